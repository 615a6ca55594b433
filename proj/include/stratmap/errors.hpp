#pragma once

#include <stdexcept>
#include <string>

namespace stratmap {

// All library errors derive from std::runtime_error. Expected edit-op
// rejections are not errors; they are carried by ApplyResult values
// (see strategy_map.hpp).

struct SchemaViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownMilestone : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BadK : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateLog : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScriptExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProposerFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EnvironmentFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AgentFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NetworkFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedResponse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingArtifact : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace stratmap
