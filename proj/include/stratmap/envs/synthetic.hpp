#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "stratmap/environment.hpp"
#include "stratmap/rng.hpp"

namespace stratmap {

/// Ground-truth milestone description for the synthetic environment.
struct SyntheticNode {
    MilestoneId id;
    std::set<MilestoneId> deps;  // true prerequisites
    double success_prob = 1.0;
    double reward_mean = 0.0;
    double reward_std = 0.0;
    std::string description;
};

/// A milestone MDP with a known DAG: attempting a milestone whose true
/// prerequisites are met succeeds with a configured probability and pays a
/// Gaussian reward; otherwise the attempt fails with zero reward.
struct SyntheticMdpSpec {
    std::vector<SyntheticNode> nodes;
    std::uint64_t seed = 0;

    void validate() const;  // ConfigError on cycles, bad ids, bad probabilities

    /// A strategy map mirroring the true DAG, all statistics zeroed.
    StrategyMap initial_map() const;

    const SyntheticNode& node(const MilestoneId& id) const;  // UnknownMilestone

    /// Flat bandit: `arms` independent milestones with means spaced evenly
    /// over [mean_low, mean_high].
    static SyntheticMdpSpec flat_arms(int arms, double mean_low, double mean_high,
                                      double reward_std, double success_prob);
};

/// One milestone attempt against the ground truth.
std::pair<bool, double> synthetic_attempt(const SyntheticMdpSpec& spec, const MilestoneId& id,
                                          const std::set<MilestoneId>& achieved, RngStream& rng);

/// Environment wrapper: actions are "attempt <id>" (or "noop"). Episode
/// state is the true achieved set; the reward stream is seeded per episode.
class SyntheticMdpEnv : public Environment {
public:
    explicit SyntheticMdpEnv(SyntheticMdpSpec spec);

    std::string reset(std::uint64_t episode_seed) override;
    EnvStep step(const std::string& action) override;
    std::string observation() const override;
    std::vector<std::string> available_actions() const override;
    MilestoneSignal milestone_signal(const Milestone& milestone) const override;

    const SyntheticMdpSpec& spec() const { return spec_; }

private:
    SyntheticMdpSpec spec_;
    std::set<MilestoneId> achieved_;
    RngStream rng_;
    struct LastAttempt {
        MilestoneId id;
        bool success = false;
    };
    std::optional<LastAttempt> last_attempt_;
};

}  // namespace stratmap
