#pragma once

#include <deque>
#include <map>
#include <memory>
#include <set>

#include "stratmap/agent.hpp"
#include "stratmap/envs/maze.hpp"

namespace stratmap {

/// Non-learning baseline: a uniformly random valid action every step.
class StaticRandomAgent : public Agent {
public:
    AgentDecision act(const AgentView& view, RngStream& rng) override;
};

/// Collapse surrogate: replays the highest-scoring past route verbatim and
/// acts randomly only before any rewarded episode exists.
class ExploitGreedyAgent : public Agent {
public:
    AgentDecision act(const AgentView& view, RngStream& rng) override;
    void begin_episode(int episode_index) override;
    void end_episode(const Trajectory& trajectory) override;
    std::string save_state() const override;
    void load_state(const std::string& blob) override;

    double best_score() const { return best_score_; }

private:
    double best_score_ = 0.0;
    bool has_best_ = false;
    std::vector<std::string> best_actions_;
};

/// Scripted maze agent for the milestone-guided runs. Follows the active
/// milestone's start-relative key actions (backtracking first when its own
/// path has diverged); with no active milestone it explores, preferring
/// exits it has not taken from the current room this episode.
class MazeExplorerAgent : public Agent {
public:
    AgentDecision act(const AgentView& view, RngStream& rng) override;
    void begin_episode(int episode_index) override;

private:
    std::vector<Dir> moves_;  // net successful moves this episode
    std::map<std::string, std::set<std::string>> taken_;  // room -> actions tried
};

/// Synthetic-environment agent: emits "attempt <id>" for the active
/// milestone and "noop" otherwise.
class SyntheticFollowerAgent : public Agent {
public:
    AgentDecision act(const AgentView& view, RngStream& rng) override;
};

/// Replays a fixed decision list; used by tests.
class ScriptedAgent : public Agent {
public:
    explicit ScriptedAgent(std::vector<AgentDecision> script)
        : script_(script.begin(), script.end()) {}

    AgentDecision act(const AgentView& view, RngStream& rng) override;

private:
    std::deque<AgentDecision> script_;
};

}  // namespace stratmap
