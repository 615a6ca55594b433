#ifndef STRATMAP_NO_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "stratmap/llm.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "stratmap/payloads.hpp"

namespace stratmap {

using nlohmann::json;

LlmConfig LlmConfig::from_env() {
    LlmConfig config;
    if (const char* base = std::getenv("STRATMAP_API_BASE")) config.base_url = base;
    if (const char* key = std::getenv("STRATMAP_API_KEY")) config.api_key = key;
    if (const char* model = std::getenv("STRATMAP_MODEL")) config.model = model;
    if (const char* verbose = std::getenv("STRATMAP_LLM_VERBOSE")) {
        config.verbose = std::string(verbose) == "1" || std::string(verbose) == "true";
    }
    if (config.base_url.empty()) {
        throw ConfigError("live mode requires STRATMAP_API_BASE");
    }
    if (config.model.empty()) {
        throw ConfigError("live mode requires STRATMAP_MODEL");
    }
    return config;
}

namespace {

// "https://host:port/v1" -> ("https://host:port", "/v1")
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint URL must include a scheme: " + base_url);
    }
    const auto path_start = base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {base_url, ""};
    }
    std::string prefix = base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') {
        prefix.pop_back();
    }
    return {base_url.substr(0, path_start), prefix};
}

json request_body(const ChatRequest& request) {
    json body;
    body["model"] = request.model;
    json messages = json::array();
    for (const auto& message : request.messages) {
        messages.push_back({{"role", message.role}, {"content", message.content}});
    }
    body["messages"] = std::move(messages);
    body["temperature"] = request.temperature;
    if (request.max_tokens > 0) {
        body["max_tokens"] = request.max_tokens;
    }
    return body;
}

}  // namespace

LlmClient::LlmClient(LlmConfig config, std::shared_ptr<UsageMeter> usage)
    : config_(std::move(config)), usage_(std::move(usage)) {}

ChatResponse LlmClient::chat(const ChatRequest& request) {
    const auto [host, prefix] = split_base_url(config_.base_url);
    httplib::Client client(host);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);

    httplib::Headers headers;
    if (!config_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.api_key);
    }
    const std::string body = request_body(request).dump();
    const std::string path = prefix + "/chat/completions";
    if (config_.verbose) {
        std::cerr << "[llm] POST " << host << path << " " << body << "\n";
    }

    std::string last_error;
    for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
        if (attempt > 0) {
            const auto delay = std::chrono::milliseconds(
                static_cast<long>(config_.backoff_initial_ms) * (1L << (attempt - 1)));
            std::this_thread::sleep_for(delay);
        }
        if (usage_) usage_->http_requests += 1;
        auto result = client.Post(path, headers, body, "application/json");
        if (!result) {
            last_error = "transport error: " + httplib::to_string(result.error());
            continue;
        }
        if (result->status == 429 || result->status >= 500) {
            last_error = "retryable status " + std::to_string(result->status);
            continue;
        }
        if (result->status != 200) {
            throw NetworkFailure("endpoint returned status " + std::to_string(result->status) +
                                 ": " + result->body);
        }
        json parsed = json::parse(result->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices") ||
            !parsed.at("choices").is_array() || parsed.at("choices").empty() ||
            !parsed.at("choices").at(0).contains("message") ||
            !parsed.at("choices").at(0).at("message").contains("content")) {
            throw MalformedResponse("response body missing choices[0].message.content");
        }
        ChatResponse response;
        response.content = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        response.finish_reason = parsed.at("choices").at(0).value("finish_reason", std::string{});
        if (parsed.contains("usage") && parsed.at("usage").is_object()) {
            response.prompt_tokens = parsed.at("usage").value("prompt_tokens", 0L);
            response.completion_tokens = parsed.at("usage").value("completion_tokens", 0L);
        }
        if (usage_) {
            usage_->prompt_tokens += response.prompt_tokens;
            usage_->completion_tokens += response.completion_tokens;
        }
        if (config_.verbose) {
            std::cerr << "[llm] <- " << response.content << "\n";
        }
        return response;
    }
    throw NetworkFailure("chat request failed after " + std::to_string(config_.max_attempts) +
                         " attempts: " + last_error);
}

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

std::string render_strategy_map(const StrategyMap& map) {
    std::ostringstream out;
    for (const auto& id : map.topological_order()) {
        const Milestone& m = map.milestone(id);
        const MilestoneStats& st = map.stats(id);
        out << "- " << id;
        if (!m.description.empty()) out << ": " << m.description;
        out << " | deps: [" << join({m.deps.begin(), m.deps.end()}, ", ") << "]";
        if (!m.key_actions.empty()) {
            out << " | key_actions: [" << join(m.key_actions, ", ") << "]";
        }
        out << " | n=" << st.n << ", mean=" << st.mean_reward;
        out << "\n";
    }
    return out.str();
}

std::string render_summary(const EpisodeSummary& summary) {
    std::ostringstream out;
    out << "Episode " << summary.episode_index << ":\n";
    out << "  Milestones achieved:";
    if (summary.achieved.empty()) out << " none";
    out << "\n";
    for (const auto& a : summary.achieved) {
        out << "    - " << (a.id ? *a.id : "[NEW] " + a.description) << "\n";
    }
    out << "  Penalties:\n";
    for (const auto& p : summary.penalties) out << "    - " << p << "\n";
    out << "  Milestones NOT achieved:\n";
    for (const auto& n : summary.not_achieved) {
        out << "    - " << n.id << " (" << n.reason << ")";
        if (!n.missing_prerequisites.empty()) {
            out << " missing: " << join(n.missing_prerequisites, ", ");
        }
        out << "\n";
    }
    out << "  Unexplored opportunities:\n";
    for (const auto& u : summary.unexplored) out << "    - " << u << "\n";
    return out.str();
}

std::string render_summaries(std::span<const EpisodeSummary> summaries) {
    std::string out;
    for (const auto& summary : summaries) {
        out += render_summary(summary);
    }
    return out;
}

std::string render_trajectory(const Trajectory& trajectory) {
    std::ostringstream out;
    for (const auto& step : trajectory.steps) {
        out << "Step " << step.step << ": STATE: " << step.observation
            << " | ACTION: " << step.action << " | REWARD: " << step.reward << "\n";
    }
    return out.str();
}

std::string render_lessons(std::span<const Lesson> lessons) {
    if (lessons.empty()) {
        return "(none yet)";
    }
    std::ostringstream out;
    for (const auto& lesson : lessons) {
        std::string tag = to_string(lesson.category);
        for (auto& ch : tag) ch = static_cast<char>(std::toupper(ch));
        out << "- [" << tag << "] " << lesson.text << "\n";
    }
    return out.str();
}

class LlmStage {
public:
    LlmStage(const LlmConfig& config, const PromptLibrary& prompts,
             std::shared_ptr<UsageMeter> usage)
        : client_(config, usage), prompts_(prompts), usage_(std::move(usage)) {}

    json request_structured(ProposerKind kind, const std::string& system_template,
                            const std::string& user_template,
                            const std::map<std::string, std::string>& slots) {
        ChatRequest request;
        request.model = client_.config().model;
        request.temperature = client_.config().temperature_structured;
        request.messages.push_back({"system", prompts_.render(system_template, slots)});
        request.messages.push_back({"user", prompts_.render(user_template, slots)});

        std::string last_error;
        for (int round = 0; round <= client_.config().parse_retries; ++round) {
            const ChatResponse response = chat_counted(kind, request);
            const ProposerOutputEnvelope envelope =
                parse_proposer_output(kind, response.content);
            if (envelope.ok) {
                return envelope.payload;
            }
            last_error = envelope.error;
            request.messages.push_back({"assistant", response.content});
            request.messages.push_back(
                {"user", "Your previous reply could not be used (" + envelope.error +
                             "). Respond again with only the JSON object in the required "
                             "format, no prose."});
        }
        throw ProposerFault(std::string(to_string(kind)) +
                            " proposer output unusable after retries: " + last_error);
    }

    ChatResponse chat_counted(ProposerKind kind, const ChatRequest& request) {
        if (usage_) {
            switch (kind) {
                case ProposerKind::action: usage_->action_calls += 1; break;
                case ProposerKind::summary: usage_->summary_calls += 1; break;
                case ProposerKind::refinement: usage_->refinement_calls += 1; break;
                case ProposerKind::reward: usage_->reward_calls += 1; break;
                case ProposerKind::fork: usage_->fork_calls += 1; break;
                case ProposerKind::diagnosis: usage_->diagnosis_calls += 1; break;
                case ProposerKind::lessons: usage_->lesson_calls += 1; break;
            }
        }
        try {
            return client_.chat(request);
        } catch (const NetworkFailure& e) {
            throw ProposerFault(e.what());
        } catch (const MalformedResponse& e) {
            throw ProposerFault(e.what());
        }
    }

    LlmClient client_;
    const PromptLibrary& prompts_;
    std::shared_ptr<UsageMeter> usage_;
};

class LlmSummaryProposer : public SummaryProposer {
public:
    explicit LlmSummaryProposer(std::shared_ptr<LlmStage> stage) : stage_(std::move(stage)) {}

    EpisodeSummary summarize(const Trajectory& trajectory, const StrategyMap& map) override {
        std::map<std::string, std::string> slots;
        slots["final_score"] = std::to_string(trajectory.final_score);
        slots["total_steps"] = std::to_string(trajectory.steps.size());
        slots["strategy_map"] = render_strategy_map(map);
        slots["trajectory"] = render_trajectory(trajectory);
        const json payload = stage_->request_structured(ProposerKind::summary, "summary_system",
                                                        "summary_user", slots);
        return summary_from_json(payload, trajectory.episode_index);
    }

private:
    std::shared_ptr<LlmStage> stage_;
};

class LlmRefinementProposer : public RefinementProposer {
public:
    explicit LlmRefinementProposer(std::shared_ptr<LlmStage> stage) : stage_(std::move(stage)) {}

    std::vector<EditOp> propose(const StrategyMap& map, std::span<const EpisodeSummary> summaries,
                                std::span<const Trajectory>) override {
        std::map<std::string, std::string> slots;
        slots["strategy_map"] = render_strategy_map(map);
        slots["episode_summaries"] = render_summaries(summaries);
        const json payload = stage_->request_structured(
            ProposerKind::refinement, "refinement_system", "refinement_user", slots);
        return edit_ops_from_json(payload);
    }

private:
    std::shared_ptr<LlmStage> stage_;
};

class LlmRewardProposer : public RewardProposer {
public:
    explicit LlmRewardProposer(std::shared_ptr<LlmStage> stage) : stage_(std::move(stage)) {}

    AttributedRewards attribute(const Trajectory& trajectory, const EpisodeSummary& summary,
                                const StrategyMap& map) override {
        std::vector<MilestoneId> attempt_order;
        std::vector<std::string> attempted_lines;
        for (const auto& attempt : trajectory.attempted) {
            attempt_order.push_back(attempt.id);
            attempted_lines.push_back(attempt.id + " (" + to_string(attempt.outcome) +
                                      ", observed score delta " + std::to_string(attempt.reward) +
                                      ")");
        }
        std::map<std::string, std::string> slots;
        slots["strategy_map"] = render_strategy_map(map);
        slots["episode_summary"] = render_summary(summary);
        slots["attempted"] = join(attempted_lines, "\n");
        const json payload = stage_->request_structured(ProposerKind::reward, "reward_system",
                                                        "reward_user", slots);
        return rewards_from_json(payload, trajectory.episode_index, attempt_order);
    }

private:
    std::shared_ptr<LlmStage> stage_;
};

class LlmForkProposer : public ForkProposer {
public:
    LlmForkProposer(std::shared_ptr<LlmStage> stage, int max_ops)
        : stage_(std::move(stage)), max_ops_(max_ops) {}

    std::vector<EditOp> propose(const StrategyMap& map, std::span<const EpisodeSummary> summaries,
                                std::span<const Trajectory>) override {
        std::map<std::string, std::string> slots;
        slots["strategy_map"] = render_strategy_map(map);
        slots["episode_summaries"] = render_summaries(summaries);
        slots["max_ops"] = std::to_string(max_ops_);
        const json payload =
            stage_->request_structured(ProposerKind::fork, "fork_system", "fork_user", slots);
        return edit_ops_from_json(payload);
    }

private:
    std::shared_ptr<LlmStage> stage_;
    int max_ops_;
};

class LlmDiagnosisProposer : public DiagnosisProposer {
public:
    explicit LlmDiagnosisProposer(std::shared_ptr<LlmStage> stage) : stage_(std::move(stage)) {}

    std::string diagnose(const Milestone& milestone, const MilestoneStats& stats,
                         const StrategyMap& map) override {
        std::ostringstream notes;
        for (const auto& note : stats.attempt_notes) {
            notes << "- episode " << note.episode << ": "
                  << (note.outcome == AttemptOutcome::achieved ? "achieved" : "failed")
                  << ", reward " << note.reward;
            if (note.step) notes << ", step " << *note.step;
            if (!note.failure_reason.empty()) notes << ", reason: " << note.failure_reason;
            notes << "\n";
        }
        std::map<std::string, std::string> slots;
        slots["node_id"] = milestone.id;
        slots["milestone"] = milestone.description;
        slots["key_actions"] = join(milestone.key_actions, ", ");
        slots["visits"] = std::to_string(stats.n);
        slots["avg_reward"] = std::to_string(stats.mean_reward);
        slots["attempt_notes"] = notes.str();
        slots["upstream"] = join({milestone.deps.begin(), milestone.deps.end()}, ", ");
        const auto downstream = map.successors(milestone.id);
        slots["downstream"] = join(downstream, ", ");
        const json payload = stage_->request_structured(ProposerKind::diagnosis,
                                                        "diagnosis_system", "diagnosis_user", slots);
        return diagnosis_from_json(payload);
    }

private:
    std::shared_ptr<LlmStage> stage_;
};

class LlmLessonProposer : public LessonProposer {
public:
    explicit LlmLessonProposer(std::shared_ptr<LlmStage> stage) : stage_(std::move(stage)) {}

    std::vector<Lesson> extract(std::span<const EpisodeSummary> summaries,
                                std::span<const Lesson> existing) override {
        std::map<std::string, std::string> slots;
        slots["episode_summaries"] = render_summaries(summaries);
        slots["existing_lessons"] = render_lessons(existing);
        const json payload = stage_->request_structured(ProposerKind::lessons, "lessons_system",
                                                        "lessons_user", slots);
        return lessons_from_json(payload);
    }

private:
    std::shared_ptr<LlmStage> stage_;
};

class LlmAgent : public Agent {
public:
    LlmAgent(const LlmConfig& config, const PromptLibrary& prompts,
             std::shared_ptr<UsageMeter> usage)
        : stage_(std::make_shared<LlmStage>(config, prompts, usage)) {}

    AgentDecision act(const AgentView& view, RngStream&) override {
        std::map<std::string, std::string> slots;
        slots["lessons"] = render_lessons(view.lessons);

        std::ostringstream recent;
        std::vector<std::string> last_actions;
        for (const auto& step : view.recent_steps) {
            recent << "Step " << step.step << ": State: " << step.observation
                   << " Action: " << step.action << " Reward: " << step.reward << "\n";
            last_actions.push_back(step.action);
        }
        slots["recent_steps"] = recent.str();
        slots["last_actions"] = join(last_actions, " -> ");
        slots["current_state"] =
            view.observation + "\nAvailable actions: " + join(view.available_actions, ", ");
        slots["progress"] = "Step " + std::to_string(view.step) + "/" +
                            std::to_string(view.max_steps) + " (" +
                            std::to_string(view.max_steps - view.step) +
                            " steps left) | Reward: " + std::to_string(view.score);
        if (view.milestone != nullptr) {
            slots["milestone"] = view.milestone->description;
            slots["key_actions"] = join(view.milestone->key_actions, ", ");
            slots["pitfalls"] =
                view.milestone->pitfalls.empty() ? "(none recorded)" : view.milestone->pitfalls;
            slots["guidance"] =
                view.milestone->guidance.empty() ? "(none)" : view.milestone->guidance;
        } else {
            slots["milestone"] = "No active milestone - explore and look for new opportunities.";
            slots["key_actions"] = "(none)";
            slots["pitfalls"] = "(none)";
            slots["guidance"] = "(none)";
        }

        ChatRequest request;
        request.model = stage_->client_.config().model;
        request.temperature = stage_->client_.config().temperature_action;
        request.messages.push_back({"system", stage_->prompts_.render("action_system", slots)});
        request.messages.push_back({"user", stage_->prompts_.render("action_user", slots)});

        AgentDecision decision;
        std::string last_error;
        for (int round = 0; round <= stage_->client_.config().parse_retries; ++round) {
            ChatResponse response;
            try {
                response = stage_->chat_counted(ProposerKind::action, request);
            } catch (const ProposerFault& fault) {
                decision.action = "noop";
                decision.reasoning = std::string("endpoint unavailable: ") + fault.what();
                return decision;
            }
            const ProposerOutputEnvelope envelope =
                parse_proposer_output(ProposerKind::action, response.content);
            if (envelope.ok) {
                const ActionPayload payload = action_from_json(envelope.payload);
                decision.action = payload.action;
                decision.milestone_completed = payload.milestone_completed;
                decision.reasoning = payload.reasoning;
                return decision;
            }
            last_error = envelope.error;
            request.messages.push_back({"assistant", response.content});
            request.messages.push_back(
                {"user", "Your previous reply could not be parsed (" + envelope.error +
                             "). Respond with only the JSON object in the required format."});
        }
        // Keep the episode alive: a malformed step becomes a no-op.
        decision.action = "noop";
        decision.reasoning = "malformed output after retries: " + last_error;
        return decision;
    }

private:
    std::shared_ptr<LlmStage> stage_;
};

}  // namespace

Proposers make_llm_proposers(const LlmConfig& config, const PromptLibrary& prompts) {
    Proposers proposers;
    auto stage = std::make_shared<LlmStage>(config, prompts, proposers.usage);
    proposers.summary = std::make_shared<LlmSummaryProposer>(stage);
    proposers.refinement = std::make_shared<LlmRefinementProposer>(stage);
    proposers.reward = std::make_shared<LlmRewardProposer>(stage);
    proposers.fork = std::make_shared<LlmForkProposer>(stage, 6);
    proposers.diagnosis = std::make_shared<LlmDiagnosisProposer>(stage);
    proposers.lessons = std::make_shared<LlmLessonProposer>(stage);
    return proposers;
}

std::unique_ptr<Agent> make_llm_agent(const LlmConfig& config, const PromptLibrary& prompts,
                                      std::shared_ptr<UsageMeter> usage) {
    return std::make_unique<LlmAgent>(config, prompts, std::move(usage));
}

}  // namespace stratmap
