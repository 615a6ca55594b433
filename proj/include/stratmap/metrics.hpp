#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stratmap {

/// Shannon entropy (natural log) of a visit-proportion grid; zero for empty
/// or all-zero input.
double coverage_entropy(const std::vector<std::vector<double>>& heatmap);

/// Sample standard deviation (n - 1 denominator). Requires >= 2 values.
double sample_stddev(std::span<const double> values);

struct PolicySummary {
    std::string policy;
    double mean = 0.0;
    double stddev = 0.0;
};

/// Mean and sample std of Final-K per policy, ordered best mean first.
/// Throws InsufficientData when a policy has fewer than two reports.
std::vector<PolicySummary> compare_policies(
    const std::map<std::string, std::vector<double>>& final_k_per_policy);

/// Quantitative outcome of one seed of a run.
struct SeedReport {
    std::uint64_t seed = 0;
    std::vector<double> episode_scores;
    double final_k_value = 0.0;
    std::optional<double> coverage_entropy;            // maze runs only
    std::map<std::string, bool> reward_cells_reached;  // "<room> (+value)" -> hit
    std::map<std::string, long> proposer_calls;
};

struct RunReport {
    std::vector<SeedReport> seeds;
    double final_k_mean = 0.0;
    double final_k_stddev = 0.0;  // 0 when only one seed
};

}  // namespace stratmap
