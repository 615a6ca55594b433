#pragma once

#include <optional>

#include "stratmap/rng.hpp"
#include "stratmap/strategy_map.hpp"

namespace stratmap {

enum class PolicyKind { thompson, ucb, epsilon_greedy };

const char* to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);  // ConfigError

/// Bandit score configuration shared by all three policies.
struct SelectionPolicy {
    PolicyKind kind = PolicyKind::thompson;
    double c = 10.0;             // UCB exploration constant
    double epsilon = 0.1;        // epsilon-greedy exploration probability
    double sigma_prior = 100.0;  // posterior std-dev for a single-visit node
    double sigma_min = 1.0;      // std-dev floor for multi-visit nodes

    void validate() const;  // throws ConfigError
};

/// Posterior std-dev backing a Thompson draw: sigma_prior when n == 1,
/// otherwise max(sqrt(Var/n), sigma_min). Requires n >= 1.
double thompson_sigma(const MilestoneStats& stats, const SelectionPolicy& policy);

/// One Thompson draw: mean_reward + thompson_sigma * z with z ~ N(0, 1).
double thompson_score(const MilestoneStats& stats, const SelectionPolicy& policy,
                      RngStream& rng);

/// mean_reward + c * sqrt(ln(total_eligible_visits) / n), where the total is
/// summed over the currently eligible milestones. Requires n >= 1; throws
/// DegenerateLog when total_eligible_visits < 1.
double ucb_score(const MilestoneStats& stats, long total_eligible_visits,
                 const SelectionPolicy& policy);

/// Pick the next milestone from the eligible set:
///   - empty eligible set -> nullopt (the episode continues milestone-free)
///   - any unvisited (n == 0) candidates -> uniform-random among them
///   - otherwise the policy's argmax, ties broken by id
std::optional<MilestoneId> select_next(const StrategyMap& map, const AbstractState& state,
                                       const SelectionPolicy& policy, RngStream& rng,
                                       DepsView view = DepsView::dag);

}  // namespace stratmap
