#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stratmap/strategy_map.hpp"

namespace stratmap {

/// Structured digest of one episode, the working currency of the reflection
/// cycle. Produced by the summary proposer (or its rule-based twin).
struct EpisodeSummary {
    struct AchievedEntry {
        std::optional<MilestoneId> id;  // nullopt: not matched to a known node (NEW)
        std::string description;
    };
    struct NotAchievedEntry {
        MilestoneId id;
        std::string reason;
        std::vector<MilestoneId> missing_prerequisites;
    };

    int episode_index = 0;
    std::vector<AchievedEntry> achieved;
    std::vector<std::string> penalties;
    std::vector<NotAchievedEntry> not_achieved;
    std::vector<std::string> unexplored;
};

}  // namespace stratmap
