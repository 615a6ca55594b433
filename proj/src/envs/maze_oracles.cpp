#include "stratmap/envs/maze_oracles.hpp"

#include <algorithm>

namespace stratmap {

namespace {

std::string inverse_action(const std::string& action) {
    if (auto dir = dir_from_string(action)) {
        return to_string(inverse(*dir));
    }
    return {};
}

struct Walk {
    std::vector<std::string> moves;  // net action path from the episode start
    std::vector<std::string> rooms;  // room each move was taken from
};

void record_room(MazeWindowKnowledge& knowledge, const Walk& walk, const std::string& room) {
    auto it = knowledge.path_to.find(room);
    if (it == knowledge.path_to.end() || walk.moves.size() < it->second.size()) {
        knowledge.path_to[room] = walk.moves;
        if (!walk.moves.empty()) {
            knowledge.entered_via[room] = {walk.rooms.back(), walk.moves.back()};
        } else {
            knowledge.entered_via.erase(room);
        }
    }
}

void apply_move(Walk& walk, const std::string& room, const std::string& action) {
    if (!walk.moves.empty() && action == inverse_action(walk.moves.back())) {
        walk.moves.pop_back();
        walk.rooms.pop_back();
    } else {
        walk.moves.push_back(action);
        walk.rooms.push_back(room);
    }
}

}  // namespace

MazeWindowKnowledge gather_maze_knowledge(std::span<const Trajectory> trajectories) {
    MazeWindowKnowledge knowledge;
    for (const auto& trajectory : trajectories) {
        Walk walk;
        for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
            const StepRecord& step = trajectory.steps[i];
            const auto room = parse_room_label(step.observation);
            if (!room.has_value()) continue;
            record_room(knowledge, walk, *room);
            for (Dir dir : parse_exits(step.observation)) {
                knowledge.exits_seen[*room].insert(to_string(dir));
            }
            if (!dir_from_string(step.action).has_value()) continue;

            // Did this move succeed? The next recorded observation tells us;
            // for the final step an achieved attempt ending there does.
            bool moved = false;
            if (i + 1 < trajectory.steps.size()) {
                const auto next_room = parse_room_label(trajectory.steps[i + 1].observation);
                moved = next_room.has_value() && *next_room != *room;
            } else {
                moved = std::any_of(trajectory.attempted.begin(), trajectory.attempted.end(),
                                    [&](const AttemptRecord& attempt) {
                                        return attempt.outcome == MilestoneOutcome::achieved &&
                                               attempt.last_step == step.step;
                                    });
            }
            if (moved) {
                knowledge.exits_taken.insert({*room, step.action});
                apply_move(walk, *room, step.action);
            }
        }
    }
    return knowledge;
}

std::vector<EditOp> MazeForkOracle::propose(const StrategyMap& map,
                                            std::span<const EpisodeSummary>,
                                            std::span<const Trajectory> trajectories) {
    const MazeWindowKnowledge knowledge = gather_maze_knowledge(trajectories);

    struct Proposal {
        std::size_t path_length;
        EditOp op;
    };
    std::vector<Proposal> proposals;
    std::set<std::string> batch_ids;

    // Deepest milestone already on the path to `room` (map nodes or earlier
    // batch proposals both anchor).
    auto anchor_for = [&](std::string room) -> MilestoneId {
        while (true) {
            auto via = knowledge.entered_via.find(room);
            if (via == knowledge.entered_via.end()) {
                return map.root();
            }
            const auto& [prev_room, action] = via->second;
            if (auto dir = dir_from_string(action)) {
                const std::string id = exit_milestone_id(prev_room, *dir);
                if (map.contains(id) || batch_ids.count(id)) {
                    return id;
                }
            }
            room = prev_room;
        }
    };

    // Deterministic expansion: nearest rooms first.
    std::vector<std::pair<std::size_t, std::string>> rooms;
    for (const auto& [room, exits] : knowledge.exits_seen) {
        auto path = knowledge.path_to.find(room);
        if (path == knowledge.path_to.end()) continue;
        rooms.emplace_back(path->second.size(), room);
    }
    std::sort(rooms.begin(), rooms.end());

    for (const auto& [depth, room] : rooms) {
        for (const auto& exit : knowledge.exits_seen.at(room)) {
            if (knowledge.exits_taken.count({room, exit})) continue;
            const auto dir = dir_from_string(exit);
            if (!dir.has_value()) continue;
            const std::string id = exit_milestone_id(room, *dir);
            if (map.contains(id) || batch_ids.count(id)) continue;

            Milestone m;
            m.id = id;
            m.description = "Take the " + exit + " exit from the " + room;
            m.key_actions = knowledge.path_to.at(room);
            m.key_actions.push_back(exit);
            m.deps = {anchor_for(room)};
            batch_ids.insert(id);
            proposals.push_back(
                {m.key_actions.size(), EditOp::add_child(std::move(m), EditOrigin::fork_discovery)});
        }
    }

    std::sort(proposals.begin(), proposals.end(), [](const Proposal& a, const Proposal& b) {
        return a.path_length != b.path_length ? a.path_length < b.path_length
                                              : a.op.target < b.op.target;
    });
    std::vector<EditOp> out;
    out.reserve(proposals.size());
    for (auto& proposal : proposals) {
        out.push_back(std::move(proposal.op));
    }
    return out;
}

std::vector<EditOp> MazeRefinementOracle::propose(const StrategyMap& map,
                                                  std::span<const EpisodeSummary>,
                                                  std::span<const Trajectory> trajectories) {
    // Shortest observed route per achieved milestone in the window.
    std::map<MilestoneId, std::vector<std::string>> best_route;
    for (const auto& trajectory : trajectories) {
        Walk walk;
        for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
            const StepRecord& step = trajectory.steps[i];
            const auto room = parse_room_label(step.observation);
            if (!room.has_value()) continue;
            if (!dir_from_string(step.action).has_value()) continue;

            bool moved = false;
            bool achieved_here = false;
            MilestoneId achieved_id;
            for (const auto& attempt : trajectory.attempted) {
                if (attempt.outcome == MilestoneOutcome::achieved &&
                    attempt.last_step == step.step) {
                    achieved_here = true;
                    achieved_id = attempt.id;
                }
            }
            if (i + 1 < trajectory.steps.size()) {
                const auto next_room = parse_room_label(trajectory.steps[i + 1].observation);
                moved = next_room.has_value() && *next_room != *room;
            } else {
                moved = achieved_here;
            }
            if (!moved) continue;
            apply_move(walk, *room, step.action);
            if (achieved_here) {
                auto it = best_route.find(achieved_id);
                if (it == best_route.end() || walk.moves.size() < it->second.size()) {
                    best_route[achieved_id] = walk.moves;
                }
            }
        }
    }

    std::vector<EditOp> out;
    for (const auto& [id, route] : best_route) {
        if (!map.contains(id)) continue;
        if (route.size() >= map.milestone(id).key_actions.size()) continue;
        EditOp op;
        op.kind = EditOpKind::update_node;
        op.target = id;
        op.key_actions = route;
        out.push_back(std::move(op));
    }
    return out;
}

std::vector<std::string> maze_unexplored_lines(const Trajectory& trajectory) {
    const MazeWindowKnowledge knowledge =
        gather_maze_knowledge(std::span<const Trajectory>(&trajectory, 1));
    std::vector<std::string> out;
    for (const auto& [room, exits] : knowledge.exits_seen) {
        for (const auto& exit : exits) {
            if (!knowledge.exits_taken.count({room, exit})) {
                out.push_back("the " + exit + " exit of the " + room + " was never taken");
            }
        }
    }
    return out;
}

}  // namespace stratmap
