#include "stratmap/agents.hpp"

#include <algorithm>

#include <json.hpp>

namespace stratmap {

using nlohmann::json;

AgentDecision StaticRandomAgent::act(const AgentView& view, RngStream& rng) {
    AgentDecision decision;
    if (view.available_actions.empty()) {
        decision.action = "noop";
        return decision;
    }
    decision.action = view.available_actions[rng.uniform_index(view.available_actions.size())];
    return decision;
}

AgentDecision ExploitGreedyAgent::act(const AgentView& view, RngStream& rng) {
    AgentDecision decision;
    const std::size_t index = static_cast<std::size_t>(view.step - 1);
    if (has_best_ && index < best_actions_.size()) {
        decision.action = best_actions_[index];
        decision.reasoning = "replaying best known route";
        return decision;
    }
    if (view.available_actions.empty()) {
        decision.action = "noop";
        return decision;
    }
    decision.action = view.available_actions[rng.uniform_index(view.available_actions.size())];
    return decision;
}

void ExploitGreedyAgent::begin_episode(int) {}

void ExploitGreedyAgent::end_episode(const Trajectory& trajectory) {
    if (trajectory.final_score > 0.0 && (!has_best_ || trajectory.final_score > best_score_)) {
        best_score_ = trajectory.final_score;
        best_actions_.clear();
        for (const auto& step : trajectory.steps) {
            best_actions_.push_back(step.action);
        }
        has_best_ = true;
    }
}

std::string ExploitGreedyAgent::save_state() const {
    json j;
    j["has_best"] = has_best_;
    j["best_score"] = best_score_;
    j["best_actions"] = best_actions_;
    return j.dump();
}

void ExploitGreedyAgent::load_state(const std::string& blob) {
    if (blob.empty()) return;
    const json j = json::parse(blob);
    has_best_ = j.value("has_best", false);
    best_score_ = j.value("best_score", 0.0);
    best_actions_ = j.value("best_actions", std::vector<std::string>{});
}

void MazeExplorerAgent::begin_episode(int) {
    moves_.clear();
    taken_.clear();
}

AgentDecision MazeExplorerAgent::act(const AgentView& view, RngStream& rng) {
    AgentDecision decision;
    const std::string room = parse_room_label(view.observation).value_or("");

    auto emit_move = [&](Dir dir, bool completes) {
        // Net-path bookkeeping: an immediate reversal cancels the last move.
        if (!moves_.empty() && dir == inverse(moves_.back())) {
            moves_.pop_back();
        } else {
            moves_.push_back(dir);
        }
        taken_[room].insert(to_string(dir));
        decision.action = to_string(dir);
        decision.milestone_completed = completes;
    };

    auto explore = [&]() {
        std::vector<std::string> untried;
        for (const auto& action : view.available_actions) {
            if (!taken_[room].count(action)) {
                untried.push_back(action);
            }
        }
        const auto& pool = untried.empty() ? view.available_actions : untried;
        if (pool.empty()) {
            decision.action = "noop";
            return;
        }
        const std::string choice = pool[rng.uniform_index(pool.size())];
        if (auto dir = dir_from_string(choice)) {
            emit_move(*dir, false);
        } else {
            decision.action = choice;
        }
    };

    if (view.milestone == nullptr) {
        explore();
        return decision;
    }

    // Convert the milestone's key actions into a move plan.
    std::vector<Dir> plan;
    for (const auto& action : view.milestone->key_actions) {
        if (auto dir = dir_from_string(action)) {
            plan.push_back(*dir);
        }
    }
    if (plan.empty()) {
        explore();
        return decision;
    }

    const bool on_plan =
        moves_.size() <= plan.size() && std::equal(moves_.begin(), moves_.end(), plan.begin());
    if (on_plan && moves_.size() < plan.size()) {
        const Dir next = plan[moves_.size()];
        const bool available =
            std::find(view.available_actions.begin(), view.available_actions.end(),
                      std::string(to_string(next))) != view.available_actions.end();
        if (available) {
            emit_move(next, moves_.size() + 1 == plan.size());
            return decision;
        }
        // Stale plan (the path no longer exists); give up and explore.
        explore();
        return decision;
    }
    if (!on_plan && !moves_.empty()) {
        emit_move(inverse(moves_.back()), false);
        return decision;
    }
    // Plan already fully walked but no completion signal: explore.
    explore();
    return decision;
}

AgentDecision SyntheticFollowerAgent::act(const AgentView& view, RngStream&) {
    AgentDecision decision;
    if (view.milestone == nullptr) {
        decision.action = "noop";
        return decision;
    }
    decision.action = "attempt " + view.milestone->id;
    return decision;
}

AgentDecision ScriptedAgent::act(const AgentView&, RngStream&) {
    if (script_.empty()) {
        throw AgentFault("scripted agent ran out of decisions");
    }
    AgentDecision decision = script_.front();
    script_.pop_front();
    return decision;
}

}  // namespace stratmap
