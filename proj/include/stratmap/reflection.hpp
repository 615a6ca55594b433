#pragma once

#include <span>

#include "stratmap/proposers.hpp"

namespace stratmap {

enum class PropagationMode { dag, sequential };

struct ReflectionConfig {
    int interval_n = 5;          // episodes between reflection cycles
    double gamma = 0.6;          // return-propagation discount
    int max_fork_ops = 6;        // fork ops accepted per cycle
    int max_new_lessons = 5;     // lessons accepted per cycle
    int lesson_capacity = 20;    // lesson buffer cap (FIFO eviction)
    int freeze_episode = 30;     // fork discovery disabled from this episode on
    int stuck_min_visits = 3;    // stuck filter: n(v) >= this
    double stuck_max_mean = 0.0; // stuck filter: mean <= this
    int diagnosis_cooldown = 10; // episodes between diagnoses of one node (2N)
    bool fork_discovery = true;
    PropagationMode propagation = PropagationMode::dag;

    void validate() const;

    /// Config with the given interval and the matching 2N cooldown.
    static ReflectionConfig with_interval(int n);
};

enum class CycleStage { refinement, propagation, fork_discovery, attempt_notes, diagnosis, lessons };

const char* to_string(CycleStage stage);

struct OpOutcome {
    EditOp op;
    ApplyResult result;
    std::string note;  // e.g. "id reassigned from x", "dropped by cap"
};

struct Diagnosis {
    MilestoneId id;
    std::string guidance;
};

/// What one reflection cycle did, in execution order.
struct CycleReport {
    int episode = 0;
    std::vector<CycleStage> stages_run;
    std::vector<OpOutcome> refinement_ops;
    std::vector<OpOutcome> fork_ops;
    int fork_ops_dropped = 0;
    bool fork_stage_ran = false;
    std::vector<CreditAssignment> credits;  // one per window episode, in order
    std::vector<Diagnosis> diagnoses;
    std::vector<Lesson> new_lessons;
    std::vector<std::string> warnings;
};

/// The every-N-episodes cycle, in order: (1) map refinement, (2) return
/// propagation over the window against the refined map, (3) fork discovery
/// (skipped from the freeze episode on), (4) attempt-note extraction,
/// (5) stuck-node diagnosis, (6) lesson extraction. A proposer fault skips
/// its stage; the cycle continues.
CycleReport run_reflection_cycle(StrategyMap& map, std::span<const EpisodeSummary> window,
                                 std::span<const Trajectory> trajectories, Proposers& proposers,
                                 const ReflectionConfig& cfg, int episode_t,
                                 std::vector<Lesson>& lessons);

/// Nodes matching the stuck filter (n >= stuck_min_visits, mean <=
/// stuck_max_mean) and past their cooldown get a diagnosis; the guidance is
/// stored on the node and the diagnosis episode stamped.
std::vector<Diagnosis> diagnose_stuck_nodes(StrategyMap& map, Proposers& proposers,
                                            const ReflectionConfig& cfg, int episode_t);

/// Ask the lesson proposer for candidates; keep at most max_new_lessons
/// valid ones, append them, and FIFO-trim the buffer to capacity. Returns
/// the accepted lessons.
std::vector<Lesson> extract_lessons(std::span<const EpisodeSummary> window,
                                    std::vector<Lesson>& existing, Proposers& proposers,
                                    const ReflectionConfig& cfg, int episode_t);

/// Produce the structured summary for one finished episode, degrading to a
/// minimal outcome-only summary if the proposer faults.
EpisodeSummary summarize_episode(const Trajectory& trajectory, const StrategyMap& map,
                                 Proposers& proposers);

}  // namespace stratmap
