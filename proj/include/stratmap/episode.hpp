#pragma once

#include <span>

#include "stratmap/agent.hpp"
#include "stratmap/environment.hpp"
#include "stratmap/selection.hpp"

namespace stratmap {

struct EngineConfig {
    int max_steps = 120;
    int patience_unvisited = 40;  // driving-step budget for n(v) == 0 milestones
    int patience_visited = 20;    // budget for previously attempted milestones
    int episodes = 50;

    void validate() const;  // throws ConfigError
};

struct EpisodeOptions {
    std::span<const Lesson> lessons;
    DepsView view = DepsView::dag;
};

/// Run a single episode: repeatedly select a milestone from the eligible
/// set, drive the agent toward it until it completes, fails, exhausts its
/// patience budget, or the episode ends. Skipped and failed milestones are
/// excluded from selection for the remainder of the episode.
Trajectory run_episode(const StrategyMap& map, Environment& env, Agent& agent,
                       const SelectionPolicy& policy, const EngineConfig& cfg, RngStream& rng,
                       int episode_index, const EpisodeOptions& options = {});

/// Mean of the last k scores. Throws BadK unless 1 <= k <= scores.size().
double final_k(std::span<const double> scores, int k);

}  // namespace stratmap
