#include "stratmap/reflection.hpp"

#include <algorithm>

namespace stratmap {

void ReflectionConfig::validate() const {
    if (interval_n < 1) throw ConfigError("reflection.interval_n must be >= 1");
    if (gamma < 0.0 || gamma > 1.0) throw ConfigError("reflection.gamma must be in [0, 1]");
    if (max_fork_ops < 0) throw ConfigError("reflection.max_fork_ops must be >= 0");
    if (max_new_lessons < 0) throw ConfigError("reflection.max_new_lessons must be >= 0");
    if (lesson_capacity < 1) throw ConfigError("reflection.lesson_capacity must be >= 1");
    if (freeze_episode < 0) throw ConfigError("reflection.freeze_episode must be >= 0");
    if (stuck_min_visits < 1) throw ConfigError("reflection.stuck_min_visits must be >= 1");
    if (diagnosis_cooldown < 0) throw ConfigError("reflection.diagnosis_cooldown must be >= 0");
}

ReflectionConfig ReflectionConfig::with_interval(int n) {
    ReflectionConfig cfg;
    cfg.interval_n = n;
    cfg.diagnosis_cooldown = 2 * n;
    return cfg;
}

const char* to_string(CycleStage stage) {
    switch (stage) {
        case CycleStage::refinement: return "refinement";
        case CycleStage::propagation: return "propagation";
        case CycleStage::fork_discovery: return "fork_discovery";
        case CycleStage::attempt_notes: return "attempt_notes";
        case CycleStage::diagnosis: return "diagnosis";
        case CycleStage::lessons: return "lessons";
    }
    return "unknown";
}

const char* to_string(LessonCategory category) {
    switch (category) {
        case LessonCategory::penalty: return "penalty";
        case LessonCategory::navigation: return "navigation";
        case LessonCategory::mechanic: return "mechanic";
    }
    return "unknown";
}

bool lesson_category_from_string(const std::string& name, LessonCategory& out) {
    if (name == "penalty") out = LessonCategory::penalty;
    else if (name == "navigation") out = LessonCategory::navigation;
    else if (name == "mechanic") out = LessonCategory::mechanic;
    else return false;
    return true;
}

void trim_lessons(std::vector<Lesson>& buffer, std::size_t capacity) {
    if (buffer.size() > capacity) {
        buffer.erase(buffer.begin(), buffer.begin() + (buffer.size() - capacity));
    }
}

namespace {

// Intake for proposed ops: allocate fresh ids for colliding adds (proposers
// hand us human-readable slugs), reject fork-stage ops that are not pure
// additions, and reject renames of nodes with confirmed reward.
OpOutcome apply_proposed_op(StrategyMap& map, EditOp op, bool fork_stage) {
    OpOutcome outcome;
    if (fork_stage && op.kind != EditOpKind::add_child && op.kind != EditOpKind::add_branch) {
        outcome.op = op;
        outcome.result = ApplyResult::reject(RejectReason::invalid_payload,
                                             "fork discovery may only add milestones");
        return outcome;
    }
    if ((op.kind == EditOpKind::add_child || op.kind == EditOpKind::add_branch) &&
        op.node.has_value() && !op.node->id.empty() && map.contains(op.node->id)) {
        const std::string base = op.node->id;
        for (int suffix = 2; suffix < 1000; ++suffix) {
            const std::string candidate = base + "-" + std::to_string(suffix);
            if (!map.contains(candidate)) {
                op.node->id = candidate;
                op.target = candidate;
                outcome.note = "id reassigned from " + base;
                break;
            }
        }
    }
    if (op.kind == EditOpKind::update_node && op.description.has_value() &&
        map.contains(op.target)) {
        const MilestoneStats& st = map.stats(op.target);
        if (st.n > 0 && st.mean_reward > 0.0 &&
            *op.description != map.milestone(op.target).description) {
            outcome.op = op;
            outcome.result = ApplyResult::reject(
                RejectReason::invalid_payload,
                "will not rename a node with confirmed reward: " + op.target);
            return outcome;
        }
    }
    outcome.op = op;
    outcome.result = map.apply(op);
    return outcome;
}

}  // namespace

EpisodeSummary summarize_episode(const Trajectory& trajectory, const StrategyMap& map,
                                 Proposers& proposers) {
    try {
        if (proposers.summary) {
            return proposers.summary->summarize(trajectory, map);
        }
    } catch (const ProposerFault&) {
        // fall through to the minimal summary
    }
    EpisodeSummary summary;
    summary.episode_index = trajectory.episode_index;
    for (const auto& attempt : trajectory.attempted) {
        if (attempt.outcome == MilestoneOutcome::achieved) {
            summary.achieved.push_back({attempt.id, {}});
        } else {
            summary.not_achieved.push_back({attempt.id, attempt.note, {}});
        }
    }
    return summary;
}

std::vector<Diagnosis> diagnose_stuck_nodes(StrategyMap& map, Proposers& proposers,
                                            const ReflectionConfig& cfg, int episode_t) {
    std::vector<Diagnosis> out;
    if (!proposers.diagnosis) {
        return out;
    }
    for (const auto& id : map.ids()) {
        if (id == map.root()) continue;
        const MilestoneStats& st = map.stats(id);
        if (st.n < cfg.stuck_min_visits || st.mean_reward > cfg.stuck_max_mean) {
            continue;
        }
        if (st.last_diagnosed_episode.has_value() &&
            episode_t - *st.last_diagnosed_episode < cfg.diagnosis_cooldown) {
            continue;
        }
        try {
            std::string guidance = proposers.diagnosis->diagnose(map.milestone(id), st, map);
            if (guidance.empty()) continue;
            map.set_guidance(id, guidance);
            map.stats(id).last_diagnosed_episode = episode_t;
            out.push_back({id, std::move(guidance)});
        } catch (const ProposerFault&) {
            // node skipped this cycle
        }
    }
    return out;
}

std::vector<Lesson> extract_lessons(std::span<const EpisodeSummary> window,
                                    std::vector<Lesson>& existing, Proposers& proposers,
                                    const ReflectionConfig& cfg, int episode_t) {
    std::vector<Lesson> accepted;
    if (!proposers.lessons || window.empty()) {
        return accepted;
    }
    std::vector<Lesson> candidates;
    try {
        candidates = proposers.lessons->extract(
            window, std::span<const Lesson>(existing.data(), existing.size()));
    } catch (const ProposerFault&) {
        return accepted;
    }
    for (auto& lesson : candidates) {
        if (static_cast<int>(accepted.size()) >= cfg.max_new_lessons) break;
        if (lesson.text.empty()) continue;
        const bool duplicate = std::any_of(existing.begin(), existing.end(), [&](const Lesson& l) {
            return l.text == lesson.text;
        });
        if (duplicate) continue;
        lesson.added_episode = episode_t;
        existing.push_back(lesson);
        accepted.push_back(lesson);
    }
    trim_lessons(existing, static_cast<std::size_t>(cfg.lesson_capacity));
    return accepted;
}

CycleReport run_reflection_cycle(StrategyMap& map, std::span<const EpisodeSummary> window,
                                 std::span<const Trajectory> trajectories, Proposers& proposers,
                                 const ReflectionConfig& cfg, int episode_t,
                                 std::vector<Lesson>& lessons) {
    cfg.validate();
    CycleReport report;
    report.episode = episode_t;

    // (1) Map refinement.
    report.stages_run.push_back(CycleStage::refinement);
    if (proposers.refinement) {
        try {
            const auto ops = proposers.refinement->propose(map, window, trajectories);
            for (const auto& op : ops) {
                report.refinement_ops.push_back(apply_proposed_op(map, op, false));
            }
        } catch (const ProposerFault& fault) {
            report.warnings.emplace_back(std::string("refinement skipped: ") + fault.what());
        }
    }

    // (2) Return propagation over each window episode, against the refined map.
    report.stages_run.push_back(CycleStage::propagation);
    if (proposers.reward) {
        for (std::size_t i = 0; i < trajectories.size(); ++i) {
            const Trajectory& trajectory = trajectories[i];
            const EpisodeSummary* summary = nullptr;
            for (const auto& s : window) {
                if (s.episode_index == trajectory.episode_index) {
                    summary = &s;
                    break;
                }
            }
            static const EpisodeSummary empty_summary{};
            try {
                AttributedRewards attributed = proposers.reward->attribute(
                    trajectory, summary ? *summary : empty_summary, map);
                // Entries for nodes pruned during refinement are dropped.
                AttributedRewards kept;
                kept.episode_index = attributed.episode_index;
                for (const auto& id : attributed.attempted) {
                    if (map.contains(id)) {
                        kept.attempted.push_back(id);
                        kept.rewards[id] = attributed.rewards.at(id);
                    } else {
                        report.warnings.push_back("dropped reward for pruned milestone " + id +
                                                  " (episode " +
                                                  std::to_string(attributed.episode_index) + ")");
                    }
                }
                CreditAssignment credits =
                    cfg.propagation == PropagationMode::dag
                        ? compute_credits_dag(map, kept, cfg.gamma)
                        : compute_credits_sequential(kept, cfg.gamma);
                update_stats(map, credits);
                report.credits.push_back(std::move(credits));
            } catch (const ProposerFault& fault) {
                report.warnings.emplace_back(std::string("reward attribution skipped: ") +
                                             fault.what());
            }
        }
    }

    // (3) Fork discovery, unless frozen.
    report.stages_run.push_back(CycleStage::fork_discovery);
    if (proposers.fork && cfg.fork_discovery && episode_t < cfg.freeze_episode) {
        report.fork_stage_ran = true;
        try {
            auto ops = proposers.fork->propose(map, window, trajectories);
            if (static_cast<int>(ops.size()) > cfg.max_fork_ops) {
                report.fork_ops_dropped = static_cast<int>(ops.size()) - cfg.max_fork_ops;
                ops.resize(static_cast<std::size_t>(cfg.max_fork_ops));
            }
            for (auto& op : ops) {
                op.origin = EditOrigin::fork_discovery;
                report.fork_ops.push_back(apply_proposed_op(map, op, true));
            }
        } catch (const ProposerFault& fault) {
            report.warnings.emplace_back(std::string("fork discovery skipped: ") + fault.what());
        }
    }

    // (4) Attempt notes from the window.
    report.stages_run.push_back(CycleStage::attempt_notes);
    for (const auto& trajectory : trajectories) {
        for (const auto& attempt : trajectory.attempted) {
            if (!map.contains(attempt.id)) continue;
            AttemptNote note;
            note.episode = trajectory.episode_index;
            note.reward = attempt.reward;
            if (attempt.outcome == MilestoneOutcome::achieved) {
                note.outcome = AttemptOutcome::achieved;
                note.step = attempt.last_step;
            } else {
                note.outcome = AttemptOutcome::failed;
                note.failure_reason = attempt.note.empty() ? "failed" : attempt.note;
            }
            map.stats(attempt.id).push_note(std::move(note));
        }
    }

    // (5) Stuck-node diagnosis.
    report.stages_run.push_back(CycleStage::diagnosis);
    report.diagnoses = diagnose_stuck_nodes(map, proposers, cfg, episode_t);

    // (6) Lessons.
    report.stages_run.push_back(CycleStage::lessons);
    report.new_lessons = extract_lessons(window, lessons, proposers, cfg, episode_t);

    return report;
}

}  // namespace stratmap
