#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stratmap/strategy_map.hpp"

namespace stratmap {

struct EnvStep {
    std::string observation;
    double reward = 0.0;
    bool done = false;
    bool valid = true;  // false: the action was rejected and nothing changed
};

/// Ground-truth verdict on the active milestone after a step.
///   no_ground_truth  the environment cannot tell; trust the agent's flag
///   not_achieved     definitely not done yet
///   achieved         done
///   failed           the attempt resolved as a failure (no retry this episode)
enum class MilestoneSignal { no_ground_truth, not_achieved, achieved, failed };

class Environment {
public:
    virtual ~Environment() = default;

    /// Start a new episode; returns the initial observation.
    virtual std::string reset(std::uint64_t episode_seed) = 0;

    virtual EnvStep step(const std::string& action) = 0;

    virtual std::string observation() const = 0;

    /// Actions currently valid (e.g. open exits of the current room).
    virtual std::vector<std::string> available_actions() const = 0;

    /// Consulted by the engine after each step while a milestone is active.
    virtual MilestoneSignal milestone_signal(const Milestone& milestone) const {
        (void)milestone;
        return MilestoneSignal::no_ground_truth;
    }
};

}  // namespace stratmap
