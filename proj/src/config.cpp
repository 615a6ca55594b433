#include "stratmap/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace stratmap {

const char* to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::explorer: return "explorer";
        case AgentKind::static_random: return "static_random";
        case AgentKind::exploit_greedy: return "exploit_greedy";
        case AgentKind::llm: return "llm";
    }
    return "unknown";
}

const char* to_string(EnvKind kind) {
    switch (kind) {
        case EnvKind::maze: return "maze";
        case EnvKind::synthetic: return "synthetic";
    }
    return "unknown";
}

const char* to_string(ProposerMode mode) {
    switch (mode) {
        case ProposerMode::rule: return "rule";
        case ProposerMode::scripted: return "scripted";
        case ProposerMode::live: return "live";
    }
    return "unknown";
}

namespace {

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

SectionMap parse_sections(const std::string& text) {
    SectionMap sections;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            }
            section = trim(stripped.substr(1, stripped.size() - 2));
            sections[section];
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        }
        sections[section][key] = value;
    }
    return sections;
}

class SectionReader {
public:
    SectionReader(const SectionMap& sections, std::string name) : name_(std::move(name)) {
        auto it = sections.find(name_);
        if (it != sections.end()) {
            entries_ = it->second;
        }
    }

    std::optional<std::string> get(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        consumed_.insert(key);
        return it->second;
    }

    template <typename Fn>
    void apply(const std::string& key, Fn&& fn) {
        if (auto value = get(key)) {
            fn(*value);
        }
    }

    void finish() const {
        for (const auto& [key, value] : entries_) {
            if (!consumed_.count(key)) {
                throw ConfigError("unknown key '" + key + "' in section [" + name_ + "]");
            }
        }
    }

private:
    std::string name_;
    std::map<std::string, std::string> entries_;
    std::set<std::string> consumed_;
};

int to_int(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const int out = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    }
}

double to_double(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const double out = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    }
}

bool to_bool(const std::string& value, const std::string& key) {
    if (value == "on" || value == "true" || value == "1" || value == "yes") return true;
    if (value == "off" || value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("key '" + key + "': expected on/off, got '" + value + "'");
}

std::vector<std::string> split(const std::string& value, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string token;
    while (std::getline(ss, token, sep)) {
        const std::string t = trim(token);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

Cell parse_cell(const std::string& value, const std::string& key) {
    const auto parts = split(value, ',');
    if (parts.size() != 2) {
        throw ConfigError("key '" + key + "': expected 'row,col'");
    }
    return {to_int(parts[0], key), to_int(parts[1], key)};
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
    const SectionMap sections = parse_sections(text);
    for (const auto& [name, entries] : sections) {
        static const std::set<std::string> known = {"run",    "env",        "maze", "synthetic",
                                                    "engine", "policy",     "reflection",
                                                    "ablation"};
        if (!known.count(name)) {
            throw ConfigError("unknown section [" + name + "]");
        }
    }

    RunConfig config;

    SectionReader env(sections, "env");
    env.apply("kind", [&](const std::string& v) {
        if (v == "maze") config.env_kind = EnvKind::maze;
        else if (v == "synthetic") config.env_kind = EnvKind::synthetic;
        else throw ConfigError("env.kind must be maze or synthetic");
    });
    env.finish();

    // Maze geometry.
    SectionReader maze(sections, "maze");
    std::string layout = "default";
    maze.apply("layout", [&](const std::string& v) { layout = v; });
    std::uint64_t maze_seed = 0;
    maze.apply("seed", [&](const std::string& v) {
        maze_seed = static_cast<std::uint64_t>(to_int(v, "maze.seed"));
    });
    if (layout == "default") {
        config.maze = MazeSpec::default_layout();
    } else if (layout == "random") {
        config.maze = MazeSpec::random_layout(maze_seed);
    } else if (layout == "custom") {
        config.maze = MazeSpec{};
        config.maze.walls.clear();
        config.maze.reward_cells.clear();
    } else {
        throw ConfigError("maze.layout must be default, random or custom");
    }
    maze.apply("width", [&](const std::string& v) { config.maze.width = to_int(v, "maze.width"); });
    maze.apply("height",
               [&](const std::string& v) { config.maze.height = to_int(v, "maze.height"); });
    maze.apply("start", [&](const std::string& v) { config.maze.start = parse_cell(v, "maze.start"); });
    maze.apply("episode_steps", [&](const std::string& v) {
        config.maze.episode_steps = to_int(v, "maze.episode_steps");
    });
    maze.apply("episodes",
               [&](const std::string& v) { config.maze.episodes = to_int(v, "maze.episodes"); });
    maze.apply("walls", [&](const std::string& v) {
        for (const auto& wall : split(v, ';')) {
            const auto ends = split(wall, '-');
            if (ends.size() != 2) {
                throw ConfigError("maze.walls entries must look like 'r,c-r,c'");
            }
            add_wall(config.maze, parse_cell(ends[0], "maze.walls"),
                     parse_cell(ends[1], "maze.walls"));
        }
    });
    maze.apply("rewards", [&](const std::string& v) {
        for (const auto& reward : split(v, ';')) {
            const auto parts = split(reward, ',');
            if (parts.size() != 3 && parts.size() != 4) {
                throw ConfigError("maze.rewards entries must look like 'r,c,value[,repeat]'");
            }
            RewardCell cell;
            cell.value = to_double(parts[2], "maze.rewards");
            cell.once_per_episode = parts.size() < 4 || !to_bool(parts[3], "maze.rewards");
            config.maze.reward_cells[{to_int(parts[0], "maze.rewards"),
                                      to_int(parts[1], "maze.rewards")}] = cell;
        }
    });
    maze.finish();

    // Synthetic environment (flat bandit from config; richer DAGs are built
    // programmatically).
    SectionReader synthetic(sections, "synthetic");
    {
        int arms = 5;
        double mean_low = 1.0, mean_high = 10.0, std_dev = 1.0, success_prob = 1.0;
        std::uint64_t seed = 0;
        synthetic.apply("arms", [&](const std::string& v) { arms = to_int(v, "synthetic.arms"); });
        synthetic.apply("mean_low",
                        [&](const std::string& v) { mean_low = to_double(v, "synthetic.mean_low"); });
        synthetic.apply("mean_high", [&](const std::string& v) {
            mean_high = to_double(v, "synthetic.mean_high");
        });
        synthetic.apply("std",
                        [&](const std::string& v) { std_dev = to_double(v, "synthetic.std"); });
        synthetic.apply("success_prob", [&](const std::string& v) {
            success_prob = to_double(v, "synthetic.success_prob");
        });
        synthetic.apply("seed", [&](const std::string& v) {
            seed = static_cast<std::uint64_t>(to_int(v, "synthetic.seed"));
        });
        config.synthetic = SyntheticMdpSpec::flat_arms(arms, mean_low, mean_high, std_dev,
                                                       success_prob);
        config.synthetic.seed = seed;
    }
    synthetic.finish();

    // Environment-driven engine defaults, then explicit overrides.
    if (config.env_kind == EnvKind::maze) {
        config.engine.max_steps = config.maze.episode_steps;
        config.engine.episodes = config.maze.episodes;
    } else {
        config.engine.max_steps = 1;  // one milestone attempt per episode
        config.engine.episodes = 200;
    }

    SectionReader engine(sections, "engine");
    engine.apply("max_steps",
                 [&](const std::string& v) { config.engine.max_steps = to_int(v, "engine.max_steps"); });
    engine.apply("patience_unvisited", [&](const std::string& v) {
        config.engine.patience_unvisited = to_int(v, "engine.patience_unvisited");
    });
    engine.apply("patience_visited", [&](const std::string& v) {
        config.engine.patience_visited = to_int(v, "engine.patience_visited");
    });
    engine.finish();

    SectionReader policy(sections, "policy");
    policy.apply("kind",
                 [&](const std::string& v) { config.policy.kind = policy_kind_from_string(v); });
    policy.apply("c", [&](const std::string& v) { config.policy.c = to_double(v, "policy.c"); });
    policy.apply("epsilon",
                 [&](const std::string& v) { config.policy.epsilon = to_double(v, "policy.epsilon"); });
    policy.apply("sigma_prior", [&](const std::string& v) {
        config.policy.sigma_prior = to_double(v, "policy.sigma_prior");
    });
    policy.apply("sigma_min", [&](const std::string& v) {
        config.policy.sigma_min = to_double(v, "policy.sigma_min");
    });
    policy.finish();

    SectionReader reflection(sections, "reflection");
    bool cooldown_set = false;
    reflection.apply("interval_n", [&](const std::string& v) {
        config.reflection.interval_n = to_int(v, "reflection.interval_n");
    });
    reflection.apply("gamma", [&](const std::string& v) {
        config.reflection.gamma = to_double(v, "reflection.gamma");
    });
    reflection.apply("max_fork_ops", [&](const std::string& v) {
        config.reflection.max_fork_ops = to_int(v, "reflection.max_fork_ops");
    });
    reflection.apply("max_new_lessons", [&](const std::string& v) {
        config.reflection.max_new_lessons = to_int(v, "reflection.max_new_lessons");
    });
    reflection.apply("lesson_capacity", [&](const std::string& v) {
        config.reflection.lesson_capacity = to_int(v, "reflection.lesson_capacity");
    });
    reflection.apply("freeze_episode", [&](const std::string& v) {
        config.reflection.freeze_episode = to_int(v, "reflection.freeze_episode");
    });
    reflection.apply("stuck_min_visits", [&](const std::string& v) {
        config.reflection.stuck_min_visits = to_int(v, "reflection.stuck_min_visits");
    });
    reflection.apply("stuck_max_mean", [&](const std::string& v) {
        config.reflection.stuck_max_mean = to_double(v, "reflection.stuck_max_mean");
    });
    reflection.apply("diagnosis_cooldown", [&](const std::string& v) {
        config.reflection.diagnosis_cooldown = to_int(v, "reflection.diagnosis_cooldown");
        cooldown_set = true;
    });
    reflection.finish();
    if (!cooldown_set) {
        config.reflection.diagnosis_cooldown = 2 * config.reflection.interval_n;
    }

    SectionReader ablation(sections, "ablation");
    ablation.apply("representation", [&](const std::string& v) {
        if (v == "dag") config.ablation.representation = DepsView::dag;
        else if (v == "flat_list") config.ablation.representation = DepsView::flat_list;
        else throw ConfigError("ablation.representation must be dag or flat_list");
    });
    ablation.apply("propagation", [&](const std::string& v) {
        if (v == "dag") config.ablation.propagation = PropagationMode::dag;
        else if (v == "sequential") config.ablation.propagation = PropagationMode::sequential;
        else throw ConfigError("ablation.propagation must be dag or sequential");
    });
    ablation.apply("fork_discovery", [&](const std::string& v) {
        config.ablation.fork_discovery = to_bool(v, "ablation.fork_discovery");
    });
    ablation.finish();

    SectionReader run(sections, "run");
    run.apply("agent", [&](const std::string& v) {
        if (v == "explorer") config.agent = AgentKind::explorer;
        else if (v == "static_random") config.agent = AgentKind::static_random;
        else if (v == "exploit_greedy") config.agent = AgentKind::exploit_greedy;
        else if (v == "llm") config.agent = AgentKind::llm;
        else throw ConfigError("run.agent must be explorer, static_random, exploit_greedy or llm");
    });
    // Baselines are memory surrogates: they do not reflect unless asked to.
    config.reflection_enabled =
        config.agent == AgentKind::explorer || config.agent == AgentKind::llm;
    run.apply("reflect", [&](const std::string& v) {
        config.reflection_enabled = to_bool(v, "run.reflect");
    });
    run.apply("proposers", [&](const std::string& v) {
        if (v == "rule") config.proposer_mode = ProposerMode::rule;
        else if (v == "scripted") config.proposer_mode = ProposerMode::scripted;
        else if (v == "live") config.proposer_mode = ProposerMode::live;
        else throw ConfigError("run.proposers must be rule, scripted or live");
    });
    run.apply("script", [&](const std::string& v) { config.script_path = v; });
    run.apply("episodes",
              [&](const std::string& v) { config.engine.episodes = to_int(v, "run.episodes"); });
    run.apply("seeds", [&](const std::string& v) {
        config.seeds.clear();
        for (const auto& seed : split(v, ',')) {
            config.seeds.push_back(static_cast<std::uint64_t>(to_int(seed, "run.seeds")));
        }
    });
    run.apply("final_k",
              [&](const std::string& v) { config.final_k = to_int(v, "run.final_k"); });
    run.apply("out", [&](const std::string& v) { config.out_dir = v; });
    run.apply("jobs", [&](const std::string& v) { config.jobs = to_int(v, "run.jobs"); });
    run.finish();

    config.validate();
    return config;
}

void RunConfig::validate() const {
    engine.validate();
    policy.validate();
    reflection.validate();
    if (env_kind == EnvKind::maze) {
        maze.validate();
    } else {
        synthetic.validate();
    }
    if (seeds.empty()) {
        throw ConfigError("run.seeds must not be empty");
    }
    if (final_k < 1 || final_k > engine.episodes) {
        throw ConfigError("run.final_k must be in [1, episodes]");
    }
    if (proposer_mode == ProposerMode::scripted && script_path.empty()) {
        throw ConfigError("run.proposers=scripted requires run.script");
    }
    if (jobs < 0) {
        throw ConfigError("run.jobs must be >= 0");
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::string run_config_to_string(const RunConfig& config) {
    std::ostringstream out;
    out << "[run]\n";
    out << "agent = " << to_string(config.agent) << "\n";
    out << "proposers = " << to_string(config.proposer_mode) << "\n";
    if (!config.script_path.empty()) out << "script = " << config.script_path.string() << "\n";
    out << "reflect = " << (config.reflection_enabled ? "on" : "off") << "\n";
    out << "episodes = " << config.engine.episodes << "\n";
    out << "seeds = ";
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
        if (i > 0) out << ",";
        out << config.seeds[i];
    }
    out << "\n";
    out << "final_k = " << config.final_k << "\n";
    out << "jobs = " << config.jobs << "\n";
    out << "\n[env]\nkind = " << to_string(config.env_kind) << "\n";

    out << "\n[maze]\n";
    out << "layout = custom\n";
    out << "width = " << config.maze.width << "\n";
    out << "height = " << config.maze.height << "\n";
    out << "start = " << config.maze.start.row << "," << config.maze.start.col << "\n";
    out << "episode_steps = " << config.maze.episode_steps << "\n";
    out << "episodes = " << config.maze.episodes << "\n";
    out << "walls = ";
    bool first = true;
    for (const auto& [a, b] : config.maze.walls) {
        if (!first) out << ";";
        out << a.row << "," << a.col << "-" << b.row << "," << b.col;
        first = false;
    }
    out << "\n";
    out << "rewards = ";
    first = true;
    for (const auto& [cell, reward] : config.maze.reward_cells) {
        if (!first) out << ";";
        out << cell.row << "," << cell.col << "," << reward.value << ","
            << (reward.once_per_episode ? "off" : "on");
        first = false;
    }
    out << "\n";

    out << "\n[synthetic]\n";
    if (!config.synthetic.nodes.empty()) {
        double mean_low = config.synthetic.nodes.front().reward_mean;
        double mean_high = mean_low;
        for (const auto& node : config.synthetic.nodes) {
            mean_low = std::min(mean_low, node.reward_mean);
            mean_high = std::max(mean_high, node.reward_mean);
        }
        out << "arms = " << config.synthetic.nodes.size() << "\n";
        out << "mean_low = " << mean_low << "\n";
        out << "mean_high = " << mean_high << "\n";
        out << "std = " << config.synthetic.nodes.front().reward_std << "\n";
        out << "success_prob = " << config.synthetic.nodes.front().success_prob << "\n";
        out << "seed = " << config.synthetic.seed << "\n";
    }

    out << "\n[engine]\n";
    out << "max_steps = " << config.engine.max_steps << "\n";
    out << "patience_unvisited = " << config.engine.patience_unvisited << "\n";
    out << "patience_visited = " << config.engine.patience_visited << "\n";

    out << "\n[policy]\n";
    out << "kind = " << to_string(config.policy.kind) << "\n";
    out << "c = " << config.policy.c << "\n";
    out << "epsilon = " << config.policy.epsilon << "\n";
    out << "sigma_prior = " << config.policy.sigma_prior << "\n";
    out << "sigma_min = " << config.policy.sigma_min << "\n";

    out << "\n[reflection]\n";
    out << "interval_n = " << config.reflection.interval_n << "\n";
    out << "gamma = " << config.reflection.gamma << "\n";
    out << "max_fork_ops = " << config.reflection.max_fork_ops << "\n";
    out << "max_new_lessons = " << config.reflection.max_new_lessons << "\n";
    out << "lesson_capacity = " << config.reflection.lesson_capacity << "\n";
    out << "freeze_episode = " << config.reflection.freeze_episode << "\n";
    out << "stuck_min_visits = " << config.reflection.stuck_min_visits << "\n";
    out << "stuck_max_mean = " << config.reflection.stuck_max_mean << "\n";
    out << "diagnosis_cooldown = " << config.reflection.diagnosis_cooldown << "\n";

    out << "\n[ablation]\n";
    out << "representation = "
        << (config.ablation.representation == DepsView::dag ? "dag" : "flat_list") << "\n";
    out << "propagation = "
        << (config.ablation.propagation == PropagationMode::dag ? "dag" : "sequential") << "\n";
    out << "fork_discovery = " << (config.ablation.fork_discovery ? "on" : "off") << "\n";
    return out.str();
}

}  // namespace stratmap
