#include "stratmap/map_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace stratmap {

using nlohmann::json;

// Grants map_io access to the node table without widening the public API.
struct MapAccess {
    static StrategyMap build(MilestoneId root, std::vector<std::pair<Milestone, MilestoneStats>> nodes) {
        StrategyMap map(std::move(root));
        map.nodes_.clear();
        for (auto& [m, st] : nodes) {
            StrategyMap::Node node;
            node.milestone = std::move(m);
            node.stats = std::move(st);
            const auto id = node.milestone.id;
            if (!map.nodes_.emplace(id, std::move(node)).second) {
                throw SchemaViolation("duplicate node id: " + id);
            }
        }
        return map;
    }

    static const MilestoneStats& stats(const StrategyMap& map, const MilestoneId& id) {
        return map.stats(id);
    }
};

namespace {

void expect_keys(const json& obj, const std::set<std::string>& allowed,
                 const std::set<std::string>& required, const std::string& context) {
    if (!obj.is_object()) {
        throw SchemaViolation(context + ": expected an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw SchemaViolation(context + ": unknown field '" + key + "'");
        }
    }
    for (const auto& key : required) {
        if (!obj.contains(key)) {
            throw SchemaViolation(context + ": missing field '" + key + "'");
        }
    }
}

json note_to_json(const AttemptNote& note) {
    json j;
    j["episode"] = note.episode;
    j["outcome"] = note.outcome == AttemptOutcome::achieved ? "achieved" : "failed";
    j["reward"] = note.reward;
    j["step"] = note.step.has_value() ? json(*note.step) : json(nullptr);
    j["failure_reason"] = note.failure_reason;
    return j;
}

AttemptNote note_from_json(const json& j, const std::string& context) {
    expect_keys(j, {"episode", "outcome", "reward", "step", "failure_reason"},
                {"episode", "outcome", "reward"}, context);
    AttemptNote note;
    note.episode = j.at("episode").get<int>();
    const std::string outcome = j.at("outcome").get<std::string>();
    if (outcome == "achieved") {
        note.outcome = AttemptOutcome::achieved;
    } else if (outcome == "failed") {
        note.outcome = AttemptOutcome::failed;
    } else {
        throw SchemaViolation(context + ": bad outcome '" + outcome + "'");
    }
    note.reward = j.at("reward").get<double>();
    if (j.contains("step") && !j.at("step").is_null()) {
        note.step = j.at("step").get<int>();
    }
    if (j.contains("failure_reason") && !j.at("failure_reason").is_null()) {
        note.failure_reason = j.at("failure_reason").get<std::string>();
    }
    return note;
}

json map_to_json(const StrategyMap& map) {
    json doc;
    doc["version"] = kMapSchemaVersion;
    doc["root"] = map.root();
    json nodes = json::array();
    for (const auto& id : map.ids()) {
        const Milestone& m = map.milestone(id);
        const MilestoneStats& st = map.stats(id);
        json n;
        n["id"] = m.id;
        n["description"] = m.description;
        n["key_actions"] = m.key_actions;
        n["deps"] = m.deps;
        n["pitfalls"] = m.pitfalls;
        n["guidance"] = m.guidance;
        n["stats"] = {{"n", st.n}, {"mean_reward", st.mean_reward}, {"m2", st.m2}};
        json notes = json::array();
        for (const auto& note : st.attempt_notes) {
            notes.push_back(note_to_json(note));
        }
        n["attempt_notes"] = notes;
        n["last_diagnosed_episode"] =
            st.last_diagnosed_episode.has_value() ? json(*st.last_diagnosed_episode) : json(nullptr);
        nodes.push_back(std::move(n));
    }
    doc["nodes"] = std::move(nodes);
    return doc;
}

StrategyMap map_from_json(const json& doc) {
    expect_keys(doc, {"version", "root", "nodes"}, {"version", "root", "nodes"}, "document");
    if (!doc.at("version").is_number_integer() ||
        doc.at("version").get<int>() != kMapSchemaVersion) {
        throw SchemaViolation("unsupported document version");
    }
    const MilestoneId root = doc.at("root").get<std::string>();
    if (!doc.at("nodes").is_array()) {
        throw SchemaViolation("nodes: expected an array");
    }

    std::vector<std::pair<Milestone, MilestoneStats>> nodes;
    for (const auto& n : doc.at("nodes")) {
        const std::string context = "node " + (n.is_object() && n.contains("id") && n.at("id").is_string()
                                                   ? n.at("id").get<std::string>()
                                                   : std::string("<unnamed>"));
        expect_keys(n,
                    {"id", "description", "key_actions", "deps", "pitfalls", "guidance",
                     "stats", "attempt_notes", "last_diagnosed_episode"},
                    {"id", "description", "key_actions", "deps", "stats"}, context);
        Milestone m;
        m.id = n.at("id").get<std::string>();
        m.description = n.at("description").get<std::string>();
        m.key_actions = n.at("key_actions").get<std::vector<std::string>>();
        for (const auto& d : n.at("deps")) {
            m.deps.insert(d.get<std::string>());
        }
        if (n.contains("pitfalls") && !n.at("pitfalls").is_null()) {
            m.pitfalls = n.at("pitfalls").get<std::string>();
        }
        if (n.contains("guidance") && !n.at("guidance").is_null()) {
            m.guidance = n.at("guidance").get<std::string>();
        }

        MilestoneStats st;
        const json& stats = n.at("stats");
        expect_keys(stats, {"n", "mean_reward", "m2"}, {"n", "mean_reward", "m2"},
                    context + ".stats");
        st.n = stats.at("n").get<int>();
        st.mean_reward = stats.at("mean_reward").get<double>();
        st.m2 = stats.at("m2").get<double>();
        if (n.contains("attempt_notes")) {
            if (!n.at("attempt_notes").is_array()) {
                throw SchemaViolation(context + ".attempt_notes: expected an array");
            }
            for (const auto& jn : n.at("attempt_notes")) {
                st.attempt_notes.push_back(note_from_json(jn, context + ".attempt_notes"));
            }
            if (st.attempt_notes.size() > kAttemptNoteCap) {
                throw SchemaViolation(context + ": attempt-note buffer exceeds capacity");
            }
        }
        if (n.contains("last_diagnosed_episode") && !n.at("last_diagnosed_episode").is_null()) {
            st.last_diagnosed_episode = n.at("last_diagnosed_episode").get<int>();
        }
        nodes.emplace_back(std::move(m), std::move(st));
    }

    StrategyMap map = MapAccess::build(root, std::move(nodes));
    map.validate();
    return map;
}

}  // namespace

std::string map_to_string(const StrategyMap& map) {
    return map_to_json(map).dump(2);
}

StrategyMap map_from_string(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // Recover a line number from the byte offset for friendlier reports.
        std::size_t line = 1;
        for (std::size_t i = 0; i < text.size() && i < e.byte; ++i) {
            if (text[i] == '\n') ++line;
        }
        throw SchemaViolation("parse error near line " + std::to_string(line) + ": " + e.what());
    }
    return map_from_json(doc);
}

void save_map(const StrategyMap& map, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoFailure("cannot open for writing: " + path.string());
    }
    out << map_to_string(map) << '\n';
    if (!out) {
        throw IoFailure("write failed: " + path.string());
    }
}

StrategyMap load_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoFailure("cannot open for reading: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return map_from_string(buf.str());
}

}  // namespace stratmap
