#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratmap/lessons.hpp"
#include "stratmap/propagation.hpp"
#include "stratmap/summary.hpp"

namespace stratmap {

enum class ProposerKind { action, summary, refinement, reward, fork, diagnosis, lessons };

const char* to_string(ProposerKind kind);

/// Result of extracting and validating the structured block of a proposer
/// response. `ok` is false when no parseable block was found or the payload
/// failed its per-proposer schema; callers apply their own retry policy.
struct ProposerOutputEnvelope {
    std::string raw;
    nlohmann::json payload;  // null unless ok
    bool ok = false;
    std::string error;
};

/// Extract the first JSON object from free-form model output (models wrap
/// payloads in prose and code fences) and validate it for the given
/// proposer. Never throws; failures are reported in the envelope.
ProposerOutputEnvelope parse_proposer_output(ProposerKind kind, const std::string& raw);

// Typed views over validated payloads. These throw SchemaViolation on
// malformed input; use parse_proposer_output first for the lenient path.
struct ActionPayload {
    std::string action;
    bool milestone_completed = false;
    std::string reasoning;
};

ActionPayload action_from_json(const nlohmann::json& payload);
std::vector<EditOp> edit_ops_from_json(const nlohmann::json& payload);
EpisodeSummary summary_from_json(const nlohmann::json& payload, int episode_index);
AttributedRewards rewards_from_json(const nlohmann::json& payload, int episode_index,
                                    const std::vector<MilestoneId>& attempt_order);
std::string diagnosis_from_json(const nlohmann::json& payload);
std::vector<Lesson> lessons_from_json(const nlohmann::json& payload);

}  // namespace stratmap
