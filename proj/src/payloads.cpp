#include "stratmap/payloads.hpp"

#include <algorithm>

namespace stratmap {

using nlohmann::json;

const char* to_string(ProposerKind kind) {
    switch (kind) {
        case ProposerKind::action: return "action";
        case ProposerKind::summary: return "summary";
        case ProposerKind::refinement: return "refinement";
        case ProposerKind::reward: return "reward";
        case ProposerKind::fork: return "fork";
        case ProposerKind::diagnosis: return "diagnosis";
        case ProposerKind::lessons: return "lessons";
    }
    return "unknown";
}

namespace {

// Find the first balanced top-level JSON object, skipping brace characters
// inside string literals.
std::optional<std::string> extract_json_block(const std::string& text) {
    const auto start = text.find('{');
    if (start == std::string::npos) {
        return std::nullopt;
    }
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        const char ch = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (ch == '\\') {
                escaped = true;
            } else if (ch == '"') {
                in_string = false;
            }
            continue;
        }
        if (ch == '"') {
            in_string = true;
        } else if (ch == '{') {
            ++depth;
        } else if (ch == '}') {
            if (--depth == 0) {
                return text.substr(start, i - start + 1);
            }
        }
    }
    return std::nullopt;
}

std::string validate_payload(ProposerKind kind, const json& payload) {
    switch (kind) {
        case ProposerKind::action:
            if (!payload.contains("action") || !payload.at("action").is_string()) {
                return "missing string field 'action'";
            }
            if (payload.contains("current_milestone_completed") &&
                !payload.at("current_milestone_completed").is_boolean()) {
                return "'current_milestone_completed' must be a boolean";
            }
            return {};
        case ProposerKind::summary:
            for (const char* key : {"achieved", "penalties", "not_achieved", "unexplored"}) {
                if (payload.contains(key) && !payload.at(key).is_array()) {
                    return std::string("'") + key + "' must be an array";
                }
            }
            return {};
        case ProposerKind::refinement:
        case ProposerKind::fork:
            if (!payload.contains("ops") || !payload.at("ops").is_array()) {
                return "missing array field 'ops'";
            }
            for (const auto& op : payload.at("ops")) {
                if (!op.is_object() || !op.contains("op") || !op.at("op").is_string()) {
                    return "each op needs a string 'op' field";
                }
            }
            return {};
        case ProposerKind::reward:
            if (!payload.contains("rewards") || !payload.at("rewards").is_object()) {
                return "missing object field 'rewards'";
            }
            for (const auto& [id, value] : payload.at("rewards").items()) {
                if (!value.is_number()) {
                    return "reward for '" + id + "' must be a number";
                }
            }
            return {};
        case ProposerKind::diagnosis:
            if (!payload.contains("root_cause") || !payload.at("root_cause").is_string()) {
                return "missing string field 'root_cause'";
            }
            return {};
        case ProposerKind::lessons:
            if (!payload.contains("lessons") || !payload.at("lessons").is_array()) {
                return "missing array field 'lessons'";
            }
            return {};
    }
    return "unknown proposer kind";
}

}  // namespace

ProposerOutputEnvelope parse_proposer_output(ProposerKind kind, const std::string& raw) {
    ProposerOutputEnvelope envelope;
    envelope.raw = raw;
    const auto block = extract_json_block(raw);
    if (!block.has_value()) {
        envelope.error = "no JSON object found in output";
        return envelope;
    }
    json payload = json::parse(*block, nullptr, false);
    if (payload.is_discarded()) {
        envelope.error = "JSON block failed to parse";
        return envelope;
    }
    const std::string problem = validate_payload(kind, payload);
    if (!problem.empty()) {
        envelope.error = problem;
        return envelope;
    }
    envelope.payload = std::move(payload);
    envelope.ok = true;
    return envelope;
}

ActionPayload action_from_json(const json& payload) {
    ActionPayload out;
    if (!payload.contains("action") || !payload.at("action").is_string()) {
        throw SchemaViolation("action payload: missing 'action'");
    }
    out.action = payload.at("action").get<std::string>();
    out.milestone_completed = payload.value("current_milestone_completed", false);
    out.reasoning = payload.value("reasoning", std::string{});
    return out;
}

std::vector<EditOp> edit_ops_from_json(const json& payload) {
    if (!payload.contains("ops") || !payload.at("ops").is_array()) {
        throw SchemaViolation("ops payload: missing 'ops' array");
    }
    std::vector<EditOp> out;
    for (const auto& j : payload.at("ops")) {
        const std::string kind_name = j.at("op").get<std::string>();
        EditOp op;
        if (kind_name == "add_child" || kind_name == "add_branch") {
            op.kind = kind_name == "add_child" ? EditOpKind::add_child : EditOpKind::add_branch;
            Milestone m;
            m.id = j.value("id", std::string{});
            m.description = j.value("description", std::string{});
            m.key_actions = j.value("key_actions", std::vector<std::string>{});
            for (const auto& d : j.value("deps", std::vector<std::string>{})) {
                m.deps.insert(d);
            }
            m.pitfalls = j.value("pitfalls", std::string{});
            op.target = m.id;
            op.node = std::move(m);
        } else if (kind_name == "update_node") {
            op.kind = EditOpKind::update_node;
            op.target = j.value("id", std::string{});
            if (j.contains("description")) op.description = j.at("description").get<std::string>();
            if (j.contains("key_actions")) {
                op.key_actions = j.at("key_actions").get<std::vector<std::string>>();
            }
            if (j.contains("pitfalls")) op.pitfalls = j.at("pitfalls").get<std::string>();
            if (j.contains("guidance")) op.guidance = j.at("guidance").get<std::string>();
        } else if (kind_name == "update_deps") {
            op.kind = EditOpKind::update_deps;
            op.target = j.value("id", std::string{});
            std::set<MilestoneId> deps;
            for (const auto& d : j.value("deps", std::vector<std::string>{})) {
                deps.insert(d);
            }
            op.deps = std::move(deps);
        } else if (kind_name == "prune") {
            op.kind = EditOpKind::prune;
            op.target = j.value("id", std::string{});
        } else {
            throw SchemaViolation("unknown op kind: " + kind_name);
        }
        out.push_back(std::move(op));
    }
    return out;
}

EpisodeSummary summary_from_json(const json& payload, int episode_index) {
    EpisodeSummary out;
    out.episode_index = episode_index;
    for (const auto& a : payload.value("achieved", json::array())) {
        EpisodeSummary::AchievedEntry entry;
        if (a.is_string()) {
            entry.id = a.get<std::string>();
        } else if (a.is_object()) {
            if (a.contains("id") && a.at("id").is_string() && !a.value("new", false)) {
                entry.id = a.at("id").get<std::string>();
            }
            entry.description = a.value("description", std::string{});
        }
        out.achieved.push_back(std::move(entry));
    }
    for (const auto& p : payload.value("penalties", json::array())) {
        if (p.is_string()) out.penalties.push_back(p.get<std::string>());
    }
    for (const auto& n : payload.value("not_achieved", json::array())) {
        if (!n.is_object()) continue;
        EpisodeSummary::NotAchievedEntry entry;
        entry.id = n.value("id", std::string{});
        entry.reason = n.value("reason", std::string{});
        entry.missing_prerequisites =
            n.value("missing_prerequisites", std::vector<std::string>{});
        out.not_achieved.push_back(std::move(entry));
    }
    for (const auto& u : payload.value("unexplored", json::array())) {
        if (u.is_string()) out.unexplored.push_back(u.get<std::string>());
    }
    return out;
}

AttributedRewards rewards_from_json(const json& payload, int episode_index,
                                    const std::vector<MilestoneId>& attempt_order) {
    if (!payload.contains("rewards") || !payload.at("rewards").is_object()) {
        throw SchemaViolation("reward payload: missing 'rewards' object");
    }
    AttributedRewards out;
    out.episode_index = episode_index;
    for (const auto& [id, value] : payload.at("rewards").items()) {
        out.rewards[id] = value.get<double>();
    }
    // Preserve the episode's attempt order; ids the proposer invented go last.
    for (const auto& id : attempt_order) {
        if (out.rewards.count(id)) {
            out.attempted.push_back(id);
        }
    }
    for (const auto& [id, value] : out.rewards) {
        if (std::find(out.attempted.begin(), out.attempted.end(), id) == out.attempted.end()) {
            out.attempted.push_back(id);
        }
    }
    return out;
}

std::string diagnosis_from_json(const json& payload) {
    std::string out = "Root cause: " + payload.value("root_cause", std::string{});
    if (payload.contains("next_action") && payload.at("next_action").is_string()) {
        out += " Next action: " + payload.at("next_action").get<std::string>();
    }
    if (payload.contains("missing_prerequisite") &&
        payload.at("missing_prerequisite").is_string() &&
        !payload.at("missing_prerequisite").get<std::string>().empty()) {
        out += " Missing prerequisite: " + payload.at("missing_prerequisite").get<std::string>();
    }
    return out;
}

std::vector<Lesson> lessons_from_json(const json& payload) {
    std::vector<Lesson> out;
    for (const auto& j : payload.value("lessons", json::array())) {
        if (!j.is_object()) continue;
        Lesson lesson;
        const std::string category = j.value("category", std::string{});
        if (!lesson_category_from_string(category, lesson.category)) {
            continue;  // invalid category: rejected
        }
        lesson.text = j.value("text", std::string{});
        if (lesson.text.empty()) continue;
        out.push_back(std::move(lesson));
    }
    return out;
}

}  // namespace stratmap
