#pragma once

#include <span>
#include <string>
#include <vector>

#include "stratmap/lessons.hpp"
#include "stratmap/rng.hpp"
#include "stratmap/strategy_map.hpp"
#include "stratmap/trajectory.hpp"

namespace stratmap {

/// Everything an agent sees when choosing an action: the observation, the
/// active milestone (with its key actions, pitfalls and any stuck-node
/// guidance), the global lesson buffer, and a short window of recent steps.
struct AgentView {
    std::string observation;
    std::vector<std::string> available_actions;
    const Milestone* milestone = nullptr;  // null: no active milestone, explore freely
    int milestone_visits = 0;              // n(v) at selection time
    std::span<const Lesson> lessons;
    std::span<const StepRecord> recent_steps;
    int step = 0;  // 1-based
    int max_steps = 0;
    double score = 0.0;  // episode score so far
};

struct AgentDecision {
    std::string action;
    bool milestone_completed = false;  // self-reported completion flag
    std::string reasoning;
};

class Agent {
public:
    virtual ~Agent() = default;

    virtual AgentDecision act(const AgentView& view, RngStream& rng) = 0;

    virtual void begin_episode(int episode_index) { (void)episode_index; }
    virtual void end_episode(const Trajectory& trajectory) { (void)trajectory; }

    /// Cross-episode agent memory for run snapshots. Implementations with
    /// such memory return an opaque blob here and accept it back on resume.
    virtual std::string save_state() const { return {}; }
    virtual void load_state(const std::string& blob) { (void)blob; }
};

}  // namespace stratmap
