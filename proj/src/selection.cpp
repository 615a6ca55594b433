#include "stratmap/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stratmap {

const char* to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::thompson: return "thompson";
        case PolicyKind::ucb: return "ucb";
        case PolicyKind::epsilon_greedy: return "epsilon_greedy";
    }
    return "unknown";
}

PolicyKind policy_kind_from_string(const std::string& name) {
    if (name == "thompson") return PolicyKind::thompson;
    if (name == "ucb") return PolicyKind::ucb;
    if (name == "epsilon_greedy") return PolicyKind::epsilon_greedy;
    throw ConfigError("unknown policy kind: " + name);
}

void SelectionPolicy::validate() const {
    if (!(c > 0.0)) throw ConfigError("policy.c must be > 0");
    if (epsilon < 0.0 || epsilon > 1.0) throw ConfigError("policy.epsilon must be in [0, 1]");
    if (!(sigma_min > 0.0)) throw ConfigError("policy.sigma_min must be > 0");
    if (sigma_prior < sigma_min) throw ConfigError("policy.sigma_prior must be >= sigma_min");
}

double thompson_sigma(const MilestoneStats& stats, const SelectionPolicy& policy) {
    if (stats.n < 1) {
        throw std::invalid_argument("thompson_sigma: requires n >= 1");
    }
    if (stats.n == 1) {
        return policy.sigma_prior;
    }
    const double var = stats.variance().value();
    const double stderr_ = std::sqrt(std::max(var, 0.0) / static_cast<double>(stats.n));
    return std::max(stderr_, policy.sigma_min);
}

double thompson_score(const MilestoneStats& stats, const SelectionPolicy& policy,
                      RngStream& rng) {
    return stats.mean_reward + thompson_sigma(stats, policy) * rng.normal();
}

double ucb_score(const MilestoneStats& stats, long total_eligible_visits,
                 const SelectionPolicy& policy) {
    if (stats.n < 1) {
        throw std::invalid_argument("ucb_score: requires n >= 1");
    }
    if (total_eligible_visits < 1) {
        throw DegenerateLog("ucb_score: total eligible visits must be >= 1");
    }
    const double log_total = std::max(std::log(static_cast<double>(total_eligible_visits)), 0.0);
    return stats.mean_reward +
           policy.c * std::sqrt(log_total / static_cast<double>(stats.n));
}

namespace {

// Argmax with lexicographic tie-break: candidates arrive sorted by id, and
// only a strictly greater score displaces the current best.
template <typename ScoreFn>
MilestoneId argmax_by(const std::vector<MilestoneId>& candidates, ScoreFn&& score) {
    MilestoneId best = candidates.front();
    double best_score = score(candidates.front());
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double s = score(candidates[i]);
        if (s > best_score) {
            best_score = s;
            best = candidates[i];
        }
    }
    return best;
}

}  // namespace

std::optional<MilestoneId> select_next(const StrategyMap& map, const AbstractState& state,
                                       const SelectionPolicy& policy, RngStream& rng,
                                       DepsView view) {
    const std::vector<MilestoneId> candidates = map.eligible(state, view);
    if (candidates.empty()) {
        return std::nullopt;
    }

    // Unvisited milestones come first, drawn uniformly at random.
    std::vector<MilestoneId> unvisited;
    for (const auto& id : candidates) {
        if (map.stats(id).n == 0) {
            unvisited.push_back(id);
        }
    }
    if (!unvisited.empty()) {
        return unvisited[rng.uniform_index(unvisited.size())];
    }

    switch (policy.kind) {
        case PolicyKind::thompson: {
            return argmax_by(candidates, [&](const MilestoneId& id) {
                return thompson_score(map.stats(id), policy, rng);
            });
        }
        case PolicyKind::ucb: {
            long total = 0;
            for (const auto& id : candidates) {
                total += map.stats(id).n;
            }
            return argmax_by(candidates, [&](const MilestoneId& id) {
                return ucb_score(map.stats(id), total, policy);
            });
        }
        case PolicyKind::epsilon_greedy: {
            if (rng.uniform() < policy.epsilon) {
                return candidates[rng.uniform_index(candidates.size())];
            }
            return argmax_by(candidates, [&](const MilestoneId& id) {
                return map.stats(id).mean_reward;
            });
        }
    }
    return std::nullopt;
}

}  // namespace stratmap
