#include "stratmap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stratmap/errors.hpp"

namespace stratmap {

double coverage_entropy(const std::vector<std::vector<double>>& heatmap) {
    double entropy = 0.0;
    for (const auto& row : heatmap) {
        for (const double p : row) {
            if (p > 0.0) {
                entropy -= p * std::log(p);
            }
        }
    }
    return entropy;
}

double sample_stddev(std::span<const double> values) {
    if (values.size() < 2) {
        throw InsufficientData("sample_stddev requires at least two values");
    }
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double m2 = 0.0;
    for (const double v : values) {
        m2 += (v - mean) * (v - mean);
    }
    return std::sqrt(m2 / static_cast<double>(values.size() - 1));
}

std::vector<PolicySummary> compare_policies(
    const std::map<std::string, std::vector<double>>& final_k_per_policy) {
    if (final_k_per_policy.empty()) {
        throw InsufficientData("compare_policies: no reports");
    }
    std::vector<PolicySummary> out;
    for (const auto& [policy, values] : final_k_per_policy) {
        if (values.size() < 2) {
            throw InsufficientData("compare_policies: policy '" + policy +
                                   "' has fewer than two reports");
        }
        PolicySummary summary;
        summary.policy = policy;
        summary.mean = std::accumulate(values.begin(), values.end(), 0.0) /
                       static_cast<double>(values.size());
        summary.stddev = sample_stddev(values);
        out.push_back(std::move(summary));
    }
    std::stable_sort(out.begin(), out.end(), [](const PolicySummary& a, const PolicySummary& b) {
        return a.mean != b.mean ? a.mean > b.mean : a.policy < b.policy;
    });
    return out;
}

}  // namespace stratmap
