#include "stratmap/proposers.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "stratmap/envs/maze_oracles.hpp"
#include "stratmap/payloads.hpp"

namespace stratmap {

using nlohmann::json;

std::map<std::string, long> UsageMeter::snapshot() const {
    return {
        {"summary_calls", summary_calls.load()},
        {"refinement_calls", refinement_calls.load()},
        {"reward_calls", reward_calls.load()},
        {"fork_calls", fork_calls.load()},
        {"diagnosis_calls", diagnosis_calls.load()},
        {"lesson_calls", lesson_calls.load()},
        {"action_calls", action_calls.load()},
        {"http_requests", http_requests.load()},
        {"prompt_tokens", prompt_tokens.load()},
        {"completion_tokens", completion_tokens.load()},
    };
}

namespace {

std::string format_points(double value) {
    std::ostringstream out;
    out << value;
    return out.str();
}

/// Ground-truth reward attribution: the engine already recorded the score
/// delta accumulated while each milestone was active.
class RuleRewardProposer : public RewardProposer {
public:
    explicit RuleRewardProposer(std::shared_ptr<UsageMeter> usage) : usage_(std::move(usage)) {}

    AttributedRewards attribute(const Trajectory& trajectory, const EpisodeSummary&,
                                const StrategyMap&) override {
        if (usage_) usage_->reward_calls += 1;
        AttributedRewards out;
        out.episode_index = trajectory.episode_index;
        for (const auto& attempt : trajectory.attempted) {
            out.attempted.push_back(attempt.id);
            out.rewards[attempt.id] = attempt.reward;
        }
        return out;
    }

private:
    std::shared_ptr<UsageMeter> usage_;
};

class RuleSummaryProposer : public SummaryProposer {
public:
    RuleSummaryProposer(bool maze, std::shared_ptr<UsageMeter> usage)
        : maze_(maze), usage_(std::move(usage)) {}

    EpisodeSummary summarize(const Trajectory& trajectory, const StrategyMap& map) override {
        if (usage_) usage_->summary_calls += 1;
        EpisodeSummary summary;
        summary.episode_index = trajectory.episode_index;

        AbstractState state = AbstractState::initial(map.root());
        for (const auto& attempt : trajectory.attempted) {
            if (attempt.outcome == MilestoneOutcome::achieved) {
                summary.achieved.push_back(
                    {attempt.id,
                     map.contains(attempt.id) ? map.milestone(attempt.id).description : ""});
                state.achieved.insert(attempt.id);
            } else {
                summary.not_achieved.push_back({attempt.id, attempt.note, {}});
                state.failed_or_skipped.insert(attempt.id);
            }
        }
        // Eligible at episode end but never scheduled.
        for (const auto& id : map.eligible(state)) {
            const bool attempted =
                std::any_of(trajectory.attempted.begin(), trajectory.attempted.end(),
                            [&](const AttemptRecord& a) { return a.id == id; });
            if (!attempted) {
                summary.not_achieved.push_back({id, "not attempted", {}});
            }
        }
        for (const auto& step : trajectory.steps) {
            if (step.reward < 0) {
                summary.penalties.push_back("action '" + step.action + "' at step " +
                                            std::to_string(step.step) + " cost " +
                                            format_points(-step.reward) + " points");
            }
        }
        if (maze_) {
            summary.unexplored = maze_unexplored_lines(trajectory);
        }
        return summary;
    }

private:
    bool maze_;
    std::shared_ptr<UsageMeter> usage_;
};

class RuleDiagnosisProposer : public DiagnosisProposer {
public:
    explicit RuleDiagnosisProposer(std::shared_ptr<UsageMeter> usage) : usage_(std::move(usage)) {}

    std::string diagnose(const Milestone& milestone, const MilestoneStats& stats,
                         const StrategyMap&) override {
        if (usage_) usage_->diagnosis_calls += 1;
        int failures = 0;
        std::string last_reason;
        for (const auto& note : stats.attempt_notes) {
            if (note.outcome == AttemptOutcome::failed) {
                failures += 1;
                if (!note.failure_reason.empty()) last_reason = note.failure_reason;
            }
        }
        std::ostringstream out;
        out << "Root cause: " << failures << " of the last " << stats.attempt_notes.size()
            << " attempts failed";
        if (!last_reason.empty()) out << " (most recently: " << last_reason << ")";
        out << ". Next action: re-check the prerequisites [";
        bool first = true;
        for (const auto& dep : milestone.deps) {
            if (!first) out << ", ";
            out << dep;
            first = false;
        }
        out << "] before attempting, then follow the key actions exactly; if it keeps failing, "
               "an unrecorded prerequisite is likely missing.";
        return out.str();
    }

private:
    std::shared_ptr<UsageMeter> usage_;
};

class RuleLessonProposer : public LessonProposer {
public:
    explicit RuleLessonProposer(std::shared_ptr<UsageMeter> usage) : usage_(std::move(usage)) {}

    std::vector<Lesson> extract(std::span<const EpisodeSummary> summaries,
                                std::span<const Lesson> existing) override {
        if (usage_) usage_->lesson_calls += 1;
        std::vector<Lesson> out;
        auto known = [&](const std::string& text) {
            return std::any_of(existing.begin(), existing.end(),
                               [&](const Lesson& l) { return l.text == text; }) ||
                   std::any_of(out.begin(), out.end(),
                               [&](const Lesson& l) { return l.text == text; });
        };
        for (const auto& summary : summaries) {
            for (const auto& penalty : summary.penalties) {
                const std::string text = "Avoid repeating: " + penalty;
                if (!known(text)) {
                    out.push_back({LessonCategory::penalty, text, summary.episode_index});
                }
            }
        }
        return out;
    }

private:
    std::shared_ptr<UsageMeter> usage_;
};

class EmptyRefinementProposer : public RefinementProposer {
public:
    explicit EmptyRefinementProposer(std::shared_ptr<UsageMeter> usage) : usage_(std::move(usage)) {}
    std::vector<EditOp> propose(const StrategyMap&, std::span<const EpisodeSummary>,
                                std::span<const Trajectory>) override {
        if (usage_) usage_->refinement_calls += 1;
        return {};
    }

private:
    std::shared_ptr<UsageMeter> usage_;
};

class EmptyForkProposer : public ForkProposer {
public:
    explicit EmptyForkProposer(std::shared_ptr<UsageMeter> usage) : usage_(std::move(usage)) {}
    std::vector<EditOp> propose(const StrategyMap&, std::span<const EpisodeSummary>,
                                std::span<const Trajectory>) override {
        if (usage_) usage_->fork_calls += 1;
        return {};
    }

private:
    std::shared_ptr<UsageMeter> usage_;
};

template <typename Base>
class CountedMazeProposer : public Base {
public:
    CountedMazeProposer(std::shared_ptr<UsageMeter> usage, std::atomic<long> UsageMeter::* counter)
        : usage_(std::move(usage)), counter_(counter) {}

    std::vector<EditOp> propose(const StrategyMap& map, std::span<const EpisodeSummary> summaries,
                                std::span<const Trajectory> trajectories) override {
        if (usage_) (*usage_).*counter_ += 1;
        return Base::propose(map, summaries, trajectories);
    }

private:
    std::shared_ptr<UsageMeter> usage_;
    std::atomic<long> UsageMeter::* counter_;
};

// Shared scripted state: one queue per stage, popped in call order.
struct Script {
    std::deque<json> refinement;
    std::deque<json> fork;
    std::deque<json> summary;
    std::deque<json> reward;
    std::deque<json> diagnosis;
    std::deque<json> lessons;
    std::mutex mutex;

    json pop(std::deque<json>& queue, const char* stage) {
        std::lock_guard<std::mutex> lock(mutex);
        if (queue.empty()) {
            throw ScriptExhausted(std::string("no scripted output left for ") + stage);
        }
        json out = std::move(queue.front());
        queue.pop_front();
        return out;
    }
};

class ScriptedRefinementProposer : public RefinementProposer {
public:
    ScriptedRefinementProposer(std::shared_ptr<Script> script, std::shared_ptr<UsageMeter> usage)
        : script_(std::move(script)), usage_(std::move(usage)) {}
    std::vector<EditOp> propose(const StrategyMap&, std::span<const EpisodeSummary>,
                                std::span<const Trajectory>) override {
        if (usage_) usage_->refinement_calls += 1;
        return edit_ops_from_json(script_->pop(script_->refinement, "refinement"));
    }

private:
    std::shared_ptr<Script> script_;
    std::shared_ptr<UsageMeter> usage_;
};

class ScriptedForkProposer : public ForkProposer {
public:
    ScriptedForkProposer(std::shared_ptr<Script> script, std::shared_ptr<UsageMeter> usage)
        : script_(std::move(script)), usage_(std::move(usage)) {}
    std::vector<EditOp> propose(const StrategyMap&, std::span<const EpisodeSummary>,
                                std::span<const Trajectory>) override {
        if (usage_) usage_->fork_calls += 1;
        return edit_ops_from_json(script_->pop(script_->fork, "fork"));
    }

private:
    std::shared_ptr<Script> script_;
    std::shared_ptr<UsageMeter> usage_;
};

class ScriptedSummaryProposer : public SummaryProposer {
public:
    ScriptedSummaryProposer(std::shared_ptr<Script> script, std::shared_ptr<UsageMeter> usage)
        : script_(std::move(script)), usage_(std::move(usage)) {}
    EpisodeSummary summarize(const Trajectory& trajectory, const StrategyMap&) override {
        if (usage_) usage_->summary_calls += 1;
        return summary_from_json(script_->pop(script_->summary, "summary"),
                                 trajectory.episode_index);
    }

private:
    std::shared_ptr<Script> script_;
    std::shared_ptr<UsageMeter> usage_;
};

class ScriptedRewardProposer : public RewardProposer {
public:
    ScriptedRewardProposer(std::shared_ptr<Script> script, std::shared_ptr<UsageMeter> usage)
        : script_(std::move(script)), usage_(std::move(usage)) {}
    AttributedRewards attribute(const Trajectory& trajectory, const EpisodeSummary&,
                                const StrategyMap&) override {
        if (usage_) usage_->reward_calls += 1;
        std::vector<MilestoneId> order;
        for (const auto& attempt : trajectory.attempted) order.push_back(attempt.id);
        return rewards_from_json(script_->pop(script_->reward, "reward"),
                                 trajectory.episode_index, order);
    }

private:
    std::shared_ptr<Script> script_;
    std::shared_ptr<UsageMeter> usage_;
};

class ScriptedDiagnosisProposer : public DiagnosisProposer {
public:
    ScriptedDiagnosisProposer(std::shared_ptr<Script> script, std::shared_ptr<UsageMeter> usage)
        : script_(std::move(script)), usage_(std::move(usage)) {}
    std::string diagnose(const Milestone&, const MilestoneStats&, const StrategyMap&) override {
        if (usage_) usage_->diagnosis_calls += 1;
        return diagnosis_from_json(script_->pop(script_->diagnosis, "diagnosis"));
    }

private:
    std::shared_ptr<Script> script_;
    std::shared_ptr<UsageMeter> usage_;
};

class ScriptedLessonProposer : public LessonProposer {
public:
    ScriptedLessonProposer(std::shared_ptr<Script> script, std::shared_ptr<UsageMeter> usage)
        : script_(std::move(script)), usage_(std::move(usage)) {}
    std::vector<Lesson> extract(std::span<const EpisodeSummary>,
                                std::span<const Lesson>) override {
        if (usage_) usage_->lesson_calls += 1;
        return lessons_from_json(script_->pop(script_->lessons, "lessons"));
    }

private:
    std::shared_ptr<Script> script_;
    std::shared_ptr<UsageMeter> usage_;
};

}  // namespace

Proposers make_rule_proposers(bool maze) {
    Proposers proposers;
    proposers.summary = std::make_shared<RuleSummaryProposer>(maze, proposers.usage);
    proposers.reward = std::make_shared<RuleRewardProposer>(proposers.usage);
    proposers.diagnosis = std::make_shared<RuleDiagnosisProposer>(proposers.usage);
    proposers.lessons = std::make_shared<RuleLessonProposer>(proposers.usage);
    if (maze) {
        proposers.refinement = std::make_shared<CountedMazeProposer<MazeRefinementOracle>>(
            proposers.usage, &UsageMeter::refinement_calls);
        proposers.fork = std::make_shared<CountedMazeProposer<MazeForkOracle>>(
            proposers.usage, &UsageMeter::fork_calls);
    } else {
        proposers.refinement = std::make_shared<EmptyRefinementProposer>(proposers.usage);
        proposers.fork = std::make_shared<EmptyForkProposer>(proposers.usage);
    }
    return proposers;
}

Proposers make_scripted_proposers(const std::string& script_json) {
    json doc = json::parse(script_json, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ConfigError("proposer script must be a JSON object");
    }
    auto script = std::make_shared<Script>();
    auto fill = [&](const char* key, std::deque<json>& queue) {
        for (const auto& entry : doc.value(key, json::array())) {
            queue.push_back(entry);
        }
    };
    fill("refinement", script->refinement);
    fill("fork", script->fork);
    fill("summary", script->summary);
    fill("reward", script->reward);
    fill("diagnosis", script->diagnosis);
    fill("lessons", script->lessons);

    Proposers proposers;
    proposers.refinement = std::make_shared<ScriptedRefinementProposer>(script, proposers.usage);
    proposers.fork = std::make_shared<ScriptedForkProposer>(script, proposers.usage);
    proposers.summary = std::make_shared<ScriptedSummaryProposer>(script, proposers.usage);
    proposers.reward = std::make_shared<ScriptedRewardProposer>(script, proposers.usage);
    proposers.diagnosis = std::make_shared<ScriptedDiagnosisProposer>(script, proposers.usage);
    proposers.lessons = std::make_shared<ScriptedLessonProposer>(script, proposers.usage);
    return proposers;
}

Proposers make_null_proposers() {
    Proposers proposers;
    proposers.summary = std::make_shared<RuleSummaryProposer>(false, proposers.usage);
    proposers.reward = std::make_shared<RuleRewardProposer>(proposers.usage);
    proposers.refinement = std::make_shared<EmptyRefinementProposer>(proposers.usage);
    proposers.fork = std::make_shared<EmptyForkProposer>(proposers.usage);
    proposers.diagnosis = nullptr;
    proposers.lessons = nullptr;
    return proposers;
}

}  // namespace stratmap
