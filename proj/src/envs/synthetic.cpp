#include "stratmap/envs/synthetic.hpp"

#include <algorithm>
#include <sstream>

namespace stratmap {

void SyntheticMdpSpec::validate() const {
    std::set<MilestoneId> ids;
    for (const auto& n : nodes) {
        if (n.id.empty()) throw ConfigError("synthetic node with empty id");
        if (!ids.insert(n.id).second) throw ConfigError("duplicate synthetic node id: " + n.id);
        if (n.success_prob < 0.0 || n.success_prob > 1.0) {
            throw ConfigError("success_prob out of [0, 1] on " + n.id);
        }
        if (n.reward_std < 0.0) throw ConfigError("negative reward_std on " + n.id);
    }
    for (const auto& n : nodes) {
        for (const auto& d : n.deps) {
            if (!ids.count(d)) throw ConfigError("dangling dep " + d + " on " + n.id);
        }
    }
    // Acyclicity through the strategy-map validator.
    initial_map();
}

StrategyMap SyntheticMdpSpec::initial_map() const {
    StrategyMap map;
    // Insert in dependency order so adds validate; nodes are few.
    std::vector<const SyntheticNode*> pending;
    for (const auto& n : nodes) pending.push_back(&n);
    std::size_t guard = 0;
    while (!pending.empty()) {
        if (guard++ > nodes.size() * nodes.size() + 1) {
            throw ConfigError("synthetic DAG contains a cycle");
        }
        for (auto it = pending.begin(); it != pending.end();) {
            const SyntheticNode& n = **it;
            const bool ready = std::all_of(n.deps.begin(), n.deps.end(), [&](const auto& d) {
                return map.contains(d);
            });
            if (!ready) {
                ++it;
                continue;
            }
            Milestone m;
            m.id = n.id;
            m.description = n.description.empty() ? ("milestone " + n.id) : n.description;
            m.key_actions = {"attempt " + n.id};
            m.deps = n.deps;
            const auto result = map.apply(EditOp::add_child(std::move(m)));
            if (!result.accepted) {
                throw ConfigError("synthetic node rejected: " + result.detail);
            }
            it = pending.erase(it);
        }
    }
    return map;
}

const SyntheticNode& SyntheticMdpSpec::node(const MilestoneId& id) const {
    for (const auto& n : nodes) {
        if (n.id == id) return n;
    }
    throw UnknownMilestone("unknown synthetic milestone: " + id);
}

SyntheticMdpSpec SyntheticMdpSpec::flat_arms(int arms, double mean_low, double mean_high,
                                             double reward_std, double success_prob) {
    if (arms < 1) throw ConfigError("flat_arms: arms must be >= 1");
    SyntheticMdpSpec spec;
    for (int i = 0; i < arms; ++i) {
        SyntheticNode n;
        n.id = "arm-" + std::string(1, static_cast<char>('a' + i % 26)) +
               (i >= 26 ? std::to_string(i / 26) : "");
        n.success_prob = success_prob;
        n.reward_mean =
            arms == 1 ? mean_low
                      : mean_low + (mean_high - mean_low) * static_cast<double>(i) /
                            static_cast<double>(arms - 1);
        n.reward_std = reward_std;
        spec.nodes.push_back(std::move(n));
    }
    spec.validate();
    return spec;
}

std::pair<bool, double> synthetic_attempt(const SyntheticMdpSpec& spec, const MilestoneId& id,
                                          const std::set<MilestoneId>& achieved, RngStream& rng) {
    const SyntheticNode& n = spec.node(id);
    const bool ready = std::all_of(n.deps.begin(), n.deps.end(), [&](const auto& d) {
        return achieved.count(d) > 0;
    });
    if (!ready) {
        return {false, 0.0};
    }
    const bool success = rng.uniform() < n.success_prob;
    if (!success) {
        return {false, 0.0};
    }
    const double reward = n.reward_mean + n.reward_std * rng.normal();
    return {true, reward};
}

SyntheticMdpEnv::SyntheticMdpEnv(SyntheticMdpSpec spec)
    : spec_(std::move(spec)), rng_(spec_.seed) {
    spec_.validate();
}

std::string SyntheticMdpEnv::reset(std::uint64_t episode_seed) {
    achieved_.clear();
    last_attempt_.reset();
    rng_ = RngStream(mix_seed(spec_.seed, episode_seed));
    return observation();
}

std::string SyntheticMdpEnv::observation() const {
    std::ostringstream out;
    out << "Milestones achieved: " << achieved_.size() << " of " << spec_.nodes.size() << ".";
    return out.str();
}

std::vector<std::string> SyntheticMdpEnv::available_actions() const {
    std::vector<std::string> out;
    for (const auto& n : spec_.nodes) {
        if (achieved_.count(n.id)) continue;
        out.push_back("attempt " + n.id);
    }
    out.push_back("noop");
    return out;
}

EnvStep SyntheticMdpEnv::step(const std::string& action) {
    EnvStep result;
    last_attempt_.reset();
    if (action.rfind("attempt ", 0) == 0) {
        const MilestoneId id = action.substr(8);
        const auto [success, reward] = synthetic_attempt(spec_, id, achieved_, rng_);
        last_attempt_ = LastAttempt{id, success};
        if (success) {
            achieved_.insert(id);
        }
        result.reward = reward;
        std::ostringstream out;
        out << (success ? "Attempt succeeded on " : "Attempt failed on ") << id << ". "
            << observation();
        result.observation = out.str();
        return result;
    }
    result.observation = "Nothing happens. " + observation();
    result.valid = action == "noop";
    return result;
}

MilestoneSignal SyntheticMdpEnv::milestone_signal(const Milestone& milestone) const {
    if (!last_attempt_.has_value() || last_attempt_->id != milestone.id) {
        return MilestoneSignal::not_achieved;
    }
    return last_attempt_->success ? MilestoneSignal::achieved : MilestoneSignal::failed;
}

}  // namespace stratmap
