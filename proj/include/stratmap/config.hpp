#pragma once

#include <filesystem>
#include <vector>

#include "stratmap/envs/maze.hpp"
#include "stratmap/envs/synthetic.hpp"
#include "stratmap/episode.hpp"
#include "stratmap/reflection.hpp"

namespace stratmap {

enum class AgentKind { explorer, static_random, exploit_greedy, llm };
enum class EnvKind { maze, synthetic };
enum class ProposerMode { rule, scripted, live };

const char* to_string(AgentKind kind);
const char* to_string(EnvKind kind);
const char* to_string(ProposerMode mode);

struct AblationConfig {
    DepsView representation = DepsView::dag;
    PropagationMode propagation = PropagationMode::dag;
    bool fork_discovery = true;
};

/// One experiment: environment, agent, policies, reflection settings, seeds
/// and ablation switches. An empty config file runs the built-in defaults.
struct RunConfig {
    EnvKind env_kind = EnvKind::maze;
    MazeSpec maze = MazeSpec::default_layout();
    SyntheticMdpSpec synthetic;
    AgentKind agent = AgentKind::explorer;
    ProposerMode proposer_mode = ProposerMode::rule;
    std::filesystem::path script_path;  // scripted proposer JSON
    bool reflection_enabled = true;
    SelectionPolicy policy;
    EngineConfig engine;
    ReflectionConfig reflection;
    AblationConfig ablation;
    std::vector<std::uint64_t> seeds = {1};
    int final_k = 5;
    std::filesystem::path out_dir = "runs/latest";
    int jobs = 0;  // 0: one worker per seed, capped at hardware threads

    void validate() const;
};

/// Parse the sectioned key=value configuration format. Unknown sections or
/// keys raise ConfigError; every key has a baked-in default.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical text form of a config (all effective values, one per line).
std::string run_config_to_string(const RunConfig& config);

}  // namespace stratmap
