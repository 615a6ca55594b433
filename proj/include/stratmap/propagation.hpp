#pragma once

#include <map>
#include <vector>

#include "stratmap/strategy_map.hpp"

namespace stratmap {

/// Per-episode reward attribution: a scalar r(v) for every milestone the
/// episode attempted, plus the attempt order.
struct AttributedRewards {
    int episode_index = 0;
    std::map<MilestoneId, double> rewards;
    std::vector<MilestoneId> attempted;  // attempt order; same ids as rewards keys

    void validate() const;  // SchemaViolation if attempted and rewards disagree
};

/// Discounted credit per attempted milestone.
struct CreditAssignment {
    int episode_index = 0;
    double gamma = 0.0;
    std::map<MilestoneId, double> credits;
};

/// Credit flows backwards along dependency edges, restricted to the
/// attempted set:
///
///   G_v = r(v) + gamma * sum of G_u over direct successors u of v that
///         were attempted this episode
///
/// evaluated in reverse dependency order, so a milestone earns credit only
/// from milestones it directly enables — never from parallel branches.
CreditAssignment compute_credits_dag(const StrategyMap& map, const AttributedRewards& attributed,
                                     double gamma);

/// Ablation variant: credit flows backwards along the episode's attempt
/// order regardless of dependency structure. For attempts (v_1 .. v_k):
/// G_{v_k} = r(v_k) and G_{v_i} = r(v_i) + gamma * G_{v_{i+1}}.
CreditAssignment compute_credits_sequential(const AttributedRewards& attributed, double gamma);

/// Fold credits into node statistics: each credited milestone gets one more
/// visit and a running-mean/variance update with its G value. Nodes without
/// a credit entry are untouched.
void update_stats(StrategyMap& map, const CreditAssignment& credits);

}  // namespace stratmap
