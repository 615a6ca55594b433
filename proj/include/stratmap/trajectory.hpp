#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stratmap/strategy_map.hpp"

namespace stratmap {

/// One environment step as recorded by the episode engine.
struct StepRecord {
    int step = 0;  // 1-based, strictly increasing
    std::string observation;
    std::string action;
    double reward = 0.0;  // score delta
    std::optional<MilestoneId> milestone;
    bool completed_flag = false;  // agent-reported
};

enum class MilestoneOutcome { achieved, failed, skipped };

const char* to_string(MilestoneOutcome outcome);

/// Resolution of one milestone attempt inside an episode.
struct AttemptRecord {
    MilestoneId id;
    MilestoneOutcome outcome = MilestoneOutcome::failed;
    double reward = 0.0;  // sum of step rewards while this milestone was active
    int last_step = 0;    // step at which the attempt resolved
    std::string note;     // failure / skip reason
};

/// A full episode log: raw steps plus the ordered attempt record.
struct Trajectory {
    int episode_index = 0;
    std::vector<StepRecord> steps;
    double final_score = 0.0;  // always equals the sum of step rewards
    std::vector<AttemptRecord> attempted;
};

}  // namespace stratmap
