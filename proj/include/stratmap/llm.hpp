#pragma once

#include <memory>
#include <string>
#include <vector>

#include "stratmap/agent.hpp"
#include "stratmap/prompts.hpp"
#include "stratmap/proposers.hpp"

namespace stratmap {

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 0;  // 0: let the endpoint decide
};

struct ChatResponse {
    std::string content;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    std::string finish_reason;
};

/// Endpoint configuration. The wire shape is the widely used
/// chat-completions API: POST {base_url}/chat/completions with a bearer
/// credential.
struct LlmConfig {
    std::string base_url;  // e.g. https://api.example.com/v1
    std::string api_key;
    std::string model;
    double temperature_structured = 0.0;  // refinement / fork / reward / diagnosis / lessons
    double temperature_action = 0.7;
    int max_attempts = 4;        // transport retries (exponential backoff)
    int parse_retries = 2;       // re-prompts after unparseable output
    int backoff_initial_ms = 250;
    bool verbose = false;        // log request/response bodies (credential redacted)

    /// Read STRATMAP_API_BASE, STRATMAP_API_KEY, STRATMAP_MODEL (and
    /// STRATMAP_LLM_VERBOSE) from the environment. Throws ConfigError when
    /// the base URL or model is missing.
    static LlmConfig from_env();
};

class LlmClient {
public:
    explicit LlmClient(LlmConfig config, std::shared_ptr<UsageMeter> usage = nullptr);

    /// Issue one chat request, retrying transient failures (429 / 5xx /
    /// connection errors) with exponential backoff. Throws NetworkFailure
    /// when attempts are exhausted and MalformedResponse on a 2xx body that
    /// does not carry choices[0].message.content.
    ChatResponse chat(const ChatRequest& request);

    const LlmConfig& config() const { return config_; }

private:
    LlmConfig config_;
    std::shared_ptr<UsageMeter> usage_;
};

/// Proposer suite backed by a live endpoint: prompts are rendered from the
/// template library, responses parsed and validated, and unparseable output
/// re-prompted (with a format reminder) up to parse_retries times before the
/// stage degrades via ProposerFault.
Proposers make_llm_proposers(const LlmConfig& config, const PromptLibrary& prompts);

/// Action agent driving an environment through the chat endpoint. Malformed
/// output is re-prompted; after the retry budget the step degrades to a
/// no-op action rather than aborting the episode.
std::unique_ptr<Agent> make_llm_agent(const LlmConfig& config, const PromptLibrary& prompts,
                                      std::shared_ptr<UsageMeter> usage);

}  // namespace stratmap
