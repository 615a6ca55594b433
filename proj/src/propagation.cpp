#include "stratmap/propagation.hpp"

#include <algorithm>
#include <set>

namespace stratmap {

void AttributedRewards::validate() const {
    std::set<MilestoneId> ordered(attempted.begin(), attempted.end());
    if (ordered.size() != attempted.size()) {
        throw SchemaViolation("attempted list contains duplicates");
    }
    if (ordered.size() != rewards.size()) {
        throw SchemaViolation("rewards and attempted disagree");
    }
    for (const auto& id : attempted) {
        if (!rewards.count(id)) {
            throw SchemaViolation("attempted milestone without reward entry: " + id);
        }
    }
}

CreditAssignment compute_credits_dag(const StrategyMap& map, const AttributedRewards& attributed,
                                     double gamma) {
    if (gamma < 0.0 || gamma > 1.0) {
        throw ConfigError("gamma must be in [0, 1]");
    }
    attributed.validate();
    for (const auto& id : attributed.attempted) {
        if (!map.contains(id)) {
            throw UnknownMilestone("attempted milestone not in map: " + id);
        }
    }

    CreditAssignment out;
    out.episode_index = attributed.episode_index;
    out.gamma = gamma;

    // Reverse dependency pass: successors are finished before the nodes that
    // enable them.
    const std::vector<MilestoneId> order = map.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const MilestoneId& v = *it;
        auto reward_it = attributed.rewards.find(v);
        if (reward_it == attributed.rewards.end()) {
            continue;  // not attempted this episode
        }
        double credit = reward_it->second;
        for (const auto& succ : map.successors(v)) {
            auto succ_credit = out.credits.find(succ);
            if (succ_credit != out.credits.end()) {
                credit += gamma * succ_credit->second;
            }
        }
        out.credits.emplace(v, credit);
    }
    return out;
}

CreditAssignment compute_credits_sequential(const AttributedRewards& attributed, double gamma) {
    if (gamma < 0.0 || gamma > 1.0) {
        throw ConfigError("gamma must be in [0, 1]");
    }
    attributed.validate();

    CreditAssignment out;
    out.episode_index = attributed.episode_index;
    out.gamma = gamma;

    double downstream = 0.0;
    bool first = true;
    for (auto it = attributed.attempted.rbegin(); it != attributed.attempted.rend(); ++it) {
        const double r = attributed.rewards.at(*it);
        const double credit = first ? r : r + gamma * downstream;
        out.credits.emplace(*it, credit);
        downstream = credit;
        first = false;
    }
    return out;
}

void update_stats(StrategyMap& map, const CreditAssignment& credits) {
    for (const auto& [id, credit] : credits.credits) {
        if (!map.contains(id)) {
            throw UnknownMilestone("credited milestone not in map: " + id);
        }
    }
    for (const auto& [id, credit] : credits.credits) {
        map.stats(id).record(credit);
    }
}

}  // namespace stratmap
