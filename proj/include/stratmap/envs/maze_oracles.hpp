#pragma once

#include <map>
#include <set>

#include "stratmap/envs/maze.hpp"
#include "stratmap/proposers.hpp"

namespace stratmap {

/// What a window of maze trajectories reveals, reconstructed purely from the
/// recorded observations and actions (the oracles read the log the same way
/// a language model would; they never touch environment internals).
struct MazeWindowKnowledge {
    std::map<std::string, std::set<std::string>> exits_seen;  // room -> exit names
    std::set<std::pair<std::string, std::string>> exits_taken;
    std::map<std::string, std::vector<std::string>> path_to;  // room -> shortest net path seen
    // room -> (previous room, action) along the stored path
    std::map<std::string, std::pair<std::string, std::string>> entered_via;
};

MazeWindowKnowledge gather_maze_knowledge(std::span<const Trajectory> trajectories);

/// Fork-discovery twin: proposes one milestone per exit that was observed
/// but never taken in the window, anchored on the deepest known milestone
/// along the path to its room. Proposals are ordered by path length, so the
/// per-cycle cap keeps the nearest frontier.
class MazeForkOracle : public ForkProposer {
public:
    std::vector<EditOp> propose(const StrategyMap& map, std::span<const EpisodeSummary> summaries,
                                std::span<const Trajectory> trajectories) override;
};

/// Refinement twin: when the window contains an achieved attempt whose net
/// path is shorter than the milestone's stored key actions, propose the
/// shorter route.
class MazeRefinementOracle : public RefinementProposer {
public:
    std::vector<EditOp> propose(const StrategyMap& map, std::span<const EpisodeSummary> summaries,
                                std::span<const Trajectory> trajectories) override;
};

/// Unexplored-opportunity lines for the rule-based episode summary.
std::vector<std::string> maze_unexplored_lines(const Trajectory& trajectory);

}  // namespace stratmap
