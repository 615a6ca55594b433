#include "stratmap/episode.hpp"

#include <numeric>

namespace stratmap {

const char* to_string(MilestoneOutcome outcome) {
    switch (outcome) {
        case MilestoneOutcome::achieved: return "achieved";
        case MilestoneOutcome::failed: return "failed";
        case MilestoneOutcome::skipped: return "skipped";
    }
    return "unknown";
}

void EngineConfig::validate() const {
    if (max_steps < 1) throw ConfigError("engine.max_steps must be >= 1");
    if (patience_visited < 1) throw ConfigError("engine.patience_visited must be >= 1");
    if (patience_unvisited < patience_visited) {
        throw ConfigError("engine.patience_unvisited must be >= patience_visited");
    }
    if (episodes < 1) throw ConfigError("engine.episodes must be >= 1");
}

Trajectory run_episode(const StrategyMap& map, Environment& env, Agent& agent,
                       const SelectionPolicy& policy, const EngineConfig& cfg, RngStream& rng,
                       int episode_index, const EpisodeOptions& options) {
    cfg.validate();
    policy.validate();

    Trajectory trajectory;
    trajectory.episode_index = episode_index;

    agent.begin_episode(episode_index);
    std::string observation = env.reset(mix_seed(rng.seed(), static_cast<std::uint64_t>(episode_index)));

    AbstractState state = AbstractState::initial(map.root());

    std::optional<MilestoneId> current;
    int milestone_steps = 0;
    double milestone_reward = 0.0;
    double score = 0.0;

    auto resolve = [&](MilestoneOutcome outcome, int at_step, std::string note) {
        AttemptRecord rec;
        rec.id = *current;
        rec.outcome = outcome;
        rec.reward = milestone_reward;
        rec.last_step = at_step;
        rec.note = std::move(note);
        trajectory.attempted.push_back(std::move(rec));
        if (outcome == MilestoneOutcome::achieved) {
            state.achieved.insert(*current);
        } else {
            state.failed_or_skipped.insert(*current);
        }
        current.reset();
    };

    for (int step = 1; step <= cfg.max_steps; ++step) {
        if (!current.has_value()) {
            current = select_next(map, state, policy, rng, options.view);
            milestone_steps = 0;
            milestone_reward = 0.0;
        }

        AgentView view;
        view.observation = observation;
        view.available_actions = env.available_actions();
        view.milestone = current ? &map.milestone(*current) : nullptr;
        view.milestone_visits = current ? map.stats(*current).n : 0;
        view.lessons = options.lessons;
        const std::size_t recent = std::min<std::size_t>(trajectory.steps.size(), 8);
        view.recent_steps = std::span<const StepRecord>(
            trajectory.steps.data() + trajectory.steps.size() - recent, recent);
        view.step = step;
        view.max_steps = cfg.max_steps;
        view.score = score;

        const AgentDecision decision = agent.act(view, rng);
        const EnvStep result = env.step(decision.action);

        StepRecord record;
        record.step = step;
        record.observation = observation;
        record.action = decision.action;
        record.reward = result.reward;
        record.milestone = current;
        record.completed_flag = decision.milestone_completed;
        trajectory.steps.push_back(std::move(record));

        score += result.reward;
        observation = result.observation;

        if (current.has_value()) {
            milestone_steps += 1;
            milestone_reward += result.reward;

            const Milestone& active = map.milestone(*current);
            const MilestoneSignal signal = env.milestone_signal(active);
            bool achieved = false;
            bool failed = false;
            switch (signal) {
                case MilestoneSignal::achieved: achieved = true; break;
                case MilestoneSignal::failed: failed = true; break;
                case MilestoneSignal::not_achieved: break;
                case MilestoneSignal::no_ground_truth:
                    achieved = decision.milestone_completed;
                    break;
            }

            if (achieved) {
                resolve(MilestoneOutcome::achieved, step, {});
            } else if (failed) {
                resolve(MilestoneOutcome::failed, step, "attempt failed");
            } else {
                const int patience = map.stats(*current).n == 0 ? cfg.patience_unvisited
                                                                : cfg.patience_visited;
                if (milestone_steps >= patience) {
                    resolve(MilestoneOutcome::skipped, step,
                            "auto-skipped after " + std::to_string(milestone_steps) + " steps");
                }
            }
        }

        if (result.done) {
            break;
        }
    }

    if (current.has_value()) {
        resolve(MilestoneOutcome::failed, static_cast<int>(trajectory.steps.size()),
                "episode ended");
    }

    trajectory.final_score = score;
    agent.end_episode(trajectory);
    return trajectory;
}

double final_k(std::span<const double> scores, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > scores.size()) {
        throw BadK("final_k: k must satisfy 1 <= k <= scores.size()");
    }
    const auto tail = scores.subspan(scores.size() - static_cast<std::size_t>(k));
    const double sum = std::accumulate(tail.begin(), tail.end(), 0.0);
    return sum / static_cast<double>(k);
}

}  // namespace stratmap
