#include "stratmap/runner.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "stratmap/agents.hpp"
#include "stratmap/llm.hpp"

namespace stratmap {

using nlohmann::json;

namespace {

// Shortest round-trip decimal form, so exports are byte-stable.
std::string format_double(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

json lesson_to_json(const Lesson& lesson) {
    return {{"category", to_string(lesson.category)},
            {"text", lesson.text},
            {"added_episode", lesson.added_episode}};
}

Lesson lesson_from_json_doc(const json& j) {
    Lesson lesson;
    if (!lesson_category_from_string(j.value("category", std::string{}), lesson.category)) {
        throw SchemaViolation("bad lesson category in snapshot");
    }
    lesson.text = j.value("text", std::string{});
    lesson.added_episode = j.value("added_episode", 0);
    return lesson;
}

json step_to_json(int episode, const StepRecord& step) {
    json j;
    j["type"] = "step";
    j["episode"] = episode;
    j["step"] = step.step;
    j["observation"] = step.observation;
    j["action"] = step.action;
    j["reward"] = step.reward;
    j["milestone"] = step.milestone.has_value() ? json(*step.milestone) : json(nullptr);
    j["completed_flag"] = step.completed_flag;
    return j;
}

json footer_to_json(const Trajectory& trajectory) {
    json attempts = json::array();
    for (const auto& attempt : trajectory.attempted) {
        attempts.push_back({{"id", attempt.id},
                            {"outcome", to_string(attempt.outcome)},
                            {"reward", attempt.reward},
                            {"last_step", attempt.last_step},
                            {"note", attempt.note}});
    }
    return {{"type", "episode_end"},
            {"episode", trajectory.episode_index},
            {"final_score", trajectory.final_score},
            {"attempted", attempts}};
}

json cycle_to_json(const CycleReport& report) {
    json stages = json::array();
    for (const auto stage : report.stages_run) stages.push_back(to_string(stage));
    auto ops_to_json = [](const std::vector<OpOutcome>& ops) {
        json out = json::array();
        for (const auto& outcome : ops) {
            out.push_back({{"op", to_string(outcome.op.kind)},
                           {"target", outcome.op.target},
                           {"accepted", outcome.result.accepted},
                           {"reason", to_string(outcome.result.reason)},
                           {"detail", outcome.result.detail},
                           {"note", outcome.note}});
        }
        return out;
    };
    json diagnoses = json::array();
    for (const auto& d : report.diagnoses) {
        diagnoses.push_back({{"id", d.id}, {"guidance", d.guidance}});
    }
    json lessons = json::array();
    for (const auto& lesson : report.new_lessons) lessons.push_back(lesson_to_json(lesson));
    return {{"type", "cycle"},
            {"episode", report.episode},
            {"stages", stages},
            {"refinement_ops", ops_to_json(report.refinement_ops)},
            {"fork_ops", ops_to_json(report.fork_ops)},
            {"fork_ops_dropped", report.fork_ops_dropped},
            {"fork_stage_ran", report.fork_stage_ran},
            {"diagnoses", diagnoses},
            {"new_lessons", lessons},
            {"warnings", report.warnings}};
}

json credits_to_json(const CreditAssignment& credits) {
    json credit_map = json::object();
    for (const auto& [id, value] : credits.credits) {
        credit_map[id] = value;
    }
    return {{"type", "credits"},
            {"episode", credits.episode_index},
            {"gamma", credits.gamma},
            {"credits", credit_map}};
}

struct EnvBundle {
    std::unique_ptr<Environment> env;
    StrategyMap initial_map;
    bool is_maze = false;
};

EnvBundle make_env(const RunConfig& config) {
    EnvBundle bundle;
    if (config.env_kind == EnvKind::maze) {
        bundle.env = std::make_unique<MazeEnv>(config.maze);
        bundle.initial_map = StrategyMap();
        bundle.is_maze = true;
    } else {
        bundle.env = std::make_unique<SyntheticMdpEnv>(config.synthetic);
        bundle.initial_map = config.synthetic.initial_map();
    }
    return bundle;
}

std::unique_ptr<Agent> make_agent(const RunConfig& config, std::shared_ptr<UsageMeter> usage) {
    switch (config.agent) {
        case AgentKind::explorer:
            if (config.env_kind == EnvKind::maze) {
                return std::make_unique<MazeExplorerAgent>();
            }
            return std::make_unique<SyntheticFollowerAgent>();
        case AgentKind::static_random:
            return std::make_unique<StaticRandomAgent>();
        case AgentKind::exploit_greedy:
            return std::make_unique<ExploitGreedyAgent>();
        case AgentKind::llm: {
            const PromptLibrary prompts = PromptLibrary::load(PromptLibrary::default_dir());
            return make_llm_agent(LlmConfig::from_env(), prompts, std::move(usage));
        }
    }
    throw ConfigError("unknown agent kind");
}

Proposers make_proposers(const RunConfig& config) {
    switch (config.proposer_mode) {
        case ProposerMode::rule:
            return make_rule_proposers(config.env_kind == EnvKind::maze);
        case ProposerMode::scripted: {
            std::ifstream in(config.script_path);
            if (!in) {
                throw ConfigError("cannot read proposer script: " + config.script_path.string());
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            return make_scripted_proposers(buf.str());
        }
        case ProposerMode::live: {
            const PromptLibrary prompts = PromptLibrary::load(PromptLibrary::default_dir());
            return make_llm_proposers(LlmConfig::from_env(), prompts);
        }
    }
    throw ConfigError("unknown proposer mode");
}

std::string reward_cell_key(const MazeSpec& spec, Cell cell, double value) {
    return spec.room_label(cell) + " (+" + format_double(value) + ")";
}

void write_heatmap_csv(const std::filesystem::path& path,
                       const std::vector<std::vector<double>>& grid) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write " + path.string());
    for (const auto& row : grid) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out << ",";
            out << format_double(row[c]);
        }
        out << "\n";
    }
}

}  // namespace

void append_trajectory(std::ostream& out, const Trajectory& trajectory) {
    for (const auto& step : trajectory.steps) {
        out << step_to_json(trajectory.episode_index, step).dump() << "\n";
    }
    out << footer_to_json(trajectory).dump() << "\n";
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path& log_path) {
    std::ifstream in(log_path);
    if (!in) {
        throw IoFailure("cannot read log: " + log_path.string());
    }
    std::vector<Trajectory> out;
    std::map<int, Trajectory> open;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw SchemaViolation("malformed log line: " + line.substr(0, 80));
        }
        const std::string type = j.value("type", std::string{});
        if (type == "step") {
            StepRecord step;
            const int episode = j.value("episode", 0);
            step.step = j.value("step", 0);
            step.observation = j.value("observation", std::string{});
            step.action = j.value("action", std::string{});
            step.reward = j.value("reward", 0.0);
            if (j.contains("milestone") && !j.at("milestone").is_null()) {
                step.milestone = j.at("milestone").get<std::string>();
            }
            step.completed_flag = j.value("completed_flag", false);
            open[episode].episode_index = episode;
            open[episode].steps.push_back(std::move(step));
        } else if (type == "episode_end") {
            const int episode = j.value("episode", 0);
            Trajectory trajectory = std::move(open[episode]);
            open.erase(episode);
            trajectory.episode_index = episode;
            trajectory.final_score = j.value("final_score", 0.0);
            for (const auto& a : j.value("attempted", json::array())) {
                AttemptRecord attempt;
                attempt.id = a.value("id", std::string{});
                const std::string outcome = a.value("outcome", std::string{});
                if (outcome == "achieved") attempt.outcome = MilestoneOutcome::achieved;
                else if (outcome == "skipped") attempt.outcome = MilestoneOutcome::skipped;
                else attempt.outcome = MilestoneOutcome::failed;
                attempt.reward = a.value("reward", 0.0);
                attempt.last_step = a.value("last_step", 0);
                attempt.note = a.value("note", std::string{});
                trajectory.attempted.push_back(std::move(attempt));
            }
            out.push_back(std::move(trajectory));
        }
        // summary / credits / cycle records are audit data; skipped here.
    }
    std::sort(out.begin(), out.end(), [](const Trajectory& a, const Trajectory& b) {
        return a.episode_index < b.episode_index;
    });
    return out;
}

void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& path) {
    json j;
    j["version"] = 1;
    j["episode"] = snapshot.episode;
    j["map"] = json::parse(map_to_string(snapshot.map));
    json lessons = json::array();
    for (const auto& lesson : snapshot.lessons) lessons.push_back(lesson_to_json(lesson));
    j["lessons"] = std::move(lessons);
    j["agent_state"] = snapshot.agent_state;
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write snapshot: " + path.string());
    out << j.dump(2) << "\n";
}

Snapshot load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot read snapshot: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    json j = json::parse(buf.str(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw SchemaViolation("malformed snapshot: " + path.string());
    }
    Snapshot snapshot;
    snapshot.episode = j.value("episode", 0);
    snapshot.map = map_from_string(j.at("map").dump());
    for (const auto& lesson : j.value("lessons", json::array())) {
        snapshot.lessons.push_back(lesson_from_json_doc(lesson));
    }
    snapshot.agent_state = j.value("agent_state", std::string{});
    return snapshot;
}

SeedRunArtifacts run_seed(const RunConfig& config, std::uint64_t seed,
                          const std::optional<Snapshot>& resume) {
    config.validate();

    EnvBundle bundle = make_env(config);
    Proposers proposers = make_proposers(config);
    std::unique_ptr<Agent> agent = make_agent(config, proposers.usage);

    SeedRunArtifacts artifacts;
    artifacts.seed = seed;
    artifacts.final_map = bundle.initial_map;

    int start_episode = 1;
    if (resume.has_value()) {
        artifacts.final_map = resume->map;
        artifacts.lessons = resume->lessons;
        agent->load_state(resume->agent_state);
        start_episode = resume->episode + 1;
    }

    ReflectionConfig reflection = config.reflection;
    reflection.fork_discovery = config.ablation.fork_discovery;
    reflection.propagation = config.ablation.propagation;

    std::filesystem::path seed_dir;
    std::ofstream log;
    if (!config.out_dir.empty()) {
        seed_dir = config.out_dir / ("seed-" + std::to_string(seed));
        std::filesystem::create_directories(seed_dir / "snapshots");
        log.open(seed_dir / "episodes.jsonl",
                 resume.has_value() ? std::ios::app : std::ios::trunc);
        if (!log) throw IoFailure("cannot open episode log in " + seed_dir.string());
    }

    std::deque<EpisodeSummary> summary_window;
    std::deque<Trajectory> trajectory_window;

    EpisodeOptions options;
    options.view = config.ablation.representation;

    for (int episode = start_episode; episode <= config.engine.episodes; ++episode) {
        RngStream episode_rng(mix_seed(seed, static_cast<std::uint64_t>(episode)));
        options.lessons = std::span<const Lesson>(artifacts.lessons.data(),
                                                  artifacts.lessons.size());
        Trajectory trajectory =
            run_episode(artifacts.final_map, *bundle.env, *agent, config.policy, config.engine,
                        episode_rng, episode, options);
        artifacts.scores.push_back(trajectory.final_score);
        if (log.is_open()) {
            append_trajectory(log, trajectory);
        }

        EpisodeSummary summary = summarize_episode(trajectory, artifacts.final_map, proposers);
        if (log.is_open()) {
            json record;
            record["type"] = "summary";
            record["episode"] = summary.episode_index;
            record["achieved"] = json::array();
            for (const auto& a : summary.achieved) {
                record["achieved"].push_back(a.id ? json(*a.id) : json(a.description));
            }
            record["penalties"] = summary.penalties;
            record["unexplored"] = summary.unexplored;
            log << record.dump() << "\n";
        }

        summary_window.push_back(std::move(summary));
        trajectory_window.push_back(trajectory);
        while (static_cast<int>(summary_window.size()) > config.reflection.interval_n) {
            summary_window.pop_front();
        }
        while (static_cast<int>(trajectory_window.size()) > config.reflection.interval_n) {
            trajectory_window.pop_front();
        }
        artifacts.trajectories.push_back(std::move(trajectory));

        if (config.reflection_enabled && episode % config.reflection.interval_n == 0) {
            std::vector<EpisodeSummary> window(summary_window.begin(), summary_window.end());
            std::vector<Trajectory> trajectories(trajectory_window.begin(),
                                                 trajectory_window.end());
            CycleReport report = run_reflection_cycle(
                artifacts.final_map, window, trajectories, proposers, reflection, episode,
                artifacts.lessons);
            if (log.is_open()) {
                for (const auto& credits : report.credits) {
                    log << credits_to_json(credits).dump() << "\n";
                }
                log << cycle_to_json(report).dump() << "\n";
            }
            if (!seed_dir.empty()) {
                Snapshot snapshot;
                snapshot.episode = episode;
                snapshot.map = artifacts.final_map;
                snapshot.lessons = artifacts.lessons;
                snapshot.agent_state = agent->save_state();
                save_snapshot(snapshot,
                              seed_dir / "snapshots" /
                                  ("cycle-ep" + std::to_string(episode) + ".json"));
            }
            artifacts.cycles.push_back(std::move(report));
        }
    }

    artifacts.proposer_calls = proposers.usage->snapshot();

    if (!seed_dir.empty()) {
        save_map(artifacts.final_map, seed_dir / "map-final.json");

        std::ofstream scores(seed_dir / "scores.csv",
                             resume.has_value() ? std::ios::app : std::ios::trunc);
        if (!scores) throw IoFailure("cannot write scores.csv in " + seed_dir.string());
        if (!resume.has_value()) {
            scores << "episode,score\n";
        }
        for (std::size_t i = 0; i < artifacts.scores.size(); ++i) {
            scores << (start_episode + static_cast<int>(i)) << ","
                   << format_double(artifacts.scores[i]) << "\n";
        }

        json metrics;
        metrics["seed"] = seed;
        metrics["episodes_run"] = artifacts.scores.size();
        metrics["proposer_calls"] = artifacts.proposer_calls;
        if (bundle.is_maze) {
            const auto grid = coverage_heatmap(artifacts.trajectories, config.maze);
            write_heatmap_csv(seed_dir / "heatmap.csv", grid);
            metrics["coverage_entropy"] = coverage_entropy(grid);
            json cells = json::object();
            for (const auto& [cell, reward] : config.maze.reward_cells) {
                bool reached = false;
                for (const auto& trajectory : artifacts.trajectories) {
                    for (const auto& step : trajectory.steps) {
                        if (step.reward == reward.value) reached = true;
                    }
                }
                cells[reward_cell_key(config.maze, cell, reward.value)] = reached;
            }
            metrics["reward_cells_reached"] = cells;
        }
        if (static_cast<int>(artifacts.scores.size()) >= config.final_k) {
            metrics["final_k"] = final_k(artifacts.scores, config.final_k);
        }
        std::ofstream metrics_out(seed_dir / "metrics.json");
        metrics_out << metrics.dump(2) << "\n";
    }

    return artifacts;
}

RunOutputs run_experiment(const RunConfig& config) {
    config.validate();
    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        std::ofstream copy(config.out_dir / "config.ini");
        if (!copy) throw IoFailure("cannot write config copy");
        copy << run_config_to_string(config);
    }

    RunOutputs outputs;
    outputs.config = config;
    outputs.seeds.resize(config.seeds.size());

    const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers =
        config.jobs > 0 ? static_cast<std::size_t>(config.jobs)
                        : std::min<std::size_t>(config.seeds.size(), hardware);

    std::vector<std::exception_ptr> failures(config.seeds.size());
    std::size_t next = 0;
    std::mutex next_mutex;
    auto worker = [&]() {
        for (;;) {
            std::size_t index;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next >= config.seeds.size()) return;
                index = next++;
            }
            try {
                outputs.seeds[index] = run_seed(config, config.seeds[index]);
            } catch (...) {
                failures[index] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < workers; ++i) {
        pool.emplace_back(worker);
    }
    for (auto& thread : pool) thread.join();
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }

    // Aggregate report.
    std::vector<double> final_ks;
    for (const auto& artifacts : outputs.seeds) {
        SeedReport report;
        report.seed = artifacts.seed;
        report.episode_scores = artifacts.scores;
        report.final_k_value = final_k(artifacts.scores, config.final_k);
        final_ks.push_back(report.final_k_value);
        if (config.env_kind == EnvKind::maze) {
            const auto grid = coverage_heatmap(artifacts.trajectories, config.maze);
            report.coverage_entropy = coverage_entropy(grid);
            for (const auto& [cell, reward] : config.maze.reward_cells) {
                bool reached = false;
                for (const auto& trajectory : artifacts.trajectories) {
                    for (const auto& step : trajectory.steps) {
                        if (step.reward == reward.value) reached = true;
                    }
                }
                report.reward_cells_reached[reward_cell_key(config.maze, cell, reward.value)] =
                    reached;
            }
        }
        report.proposer_calls = artifacts.proposer_calls;
        outputs.report.seeds.push_back(std::move(report));
    }
    outputs.report.final_k_mean =
        std::accumulate(final_ks.begin(), final_ks.end(), 0.0) /
        static_cast<double>(final_ks.size());
    outputs.report.final_k_stddev = final_ks.size() >= 2 ? sample_stddev(final_ks) : 0.0;

    if (!config.out_dir.empty()) {
        std::ofstream merged(config.out_dir / "scores.csv");
        merged << "seed,episode,score\n";
        for (const auto& artifacts : outputs.seeds) {
            for (std::size_t i = 0; i < artifacts.scores.size(); ++i) {
                merged << artifacts.seed << "," << (i + 1) << ","
                       << format_double(artifacts.scores[i]) << "\n";
            }
        }
        json metrics;
        metrics["final_k"] = config.final_k;
        metrics["final_k_mean"] = outputs.report.final_k_mean;
        metrics["final_k_stddev"] = outputs.report.final_k_stddev;
        json per_seed = json::array();
        for (const auto& report : outputs.report.seeds) {
            json j;
            j["seed"] = report.seed;
            j["final_k"] = report.final_k_value;
            if (report.coverage_entropy) j["coverage_entropy"] = *report.coverage_entropy;
            j["reward_cells_reached"] = report.reward_cells_reached;
            j["proposer_calls"] = report.proposer_calls;
            per_seed.push_back(std::move(j));
        }
        metrics["seeds"] = std::move(per_seed);
        std::ofstream metrics_out(config.out_dir / "metrics.json");
        metrics_out << metrics.dump(2) << "\n";
    }
    return outputs;
}

std::string inspect_map_file(const std::filesystem::path& map_path) {
    const StrategyMap map = load_map(map_path);
    std::ostringstream out;
    out << "strategy map: " << map.size() << " node(s), root '" << map.root() << "'\n\n";
    out << "id | n | mean | var | deps\n";
    for (const auto& id : map.topological_order()) {
        const MilestoneStats& st = map.stats(id);
        out << id << " | " << st.n << " | " << format_double(st.mean_reward) << " | ";
        if (auto var = st.variance()) {
            out << format_double(*var);
        } else {
            out << "undefined";
        }
        out << " |";
        for (const auto& dep : map.milestone(id).deps) {
            out << " " << dep;
        }
        out << "\n";
    }
    out << "\nedges:\n";
    for (const auto& [from, to] : map.edges()) {
        out << "  " << from << " -> " << to << "\n";
    }
    out << "\nstuck candidates (n >= 3, mean <= 0):\n";
    bool any = false;
    for (const auto& id : map.ids()) {
        if (id == map.root()) continue;
        const MilestoneStats& st = map.stats(id);
        if (st.n >= 3 && st.mean_reward <= 0.0) {
            out << "  " << id << " (n=" << st.n << ", mean=" << format_double(st.mean_reward)
                << ")\n";
            any = true;
        }
    }
    if (!any) {
        out << "  none\n";
    }
    return out.str();
}

std::vector<std::filesystem::path> export_artifacts(const std::filesystem::path& run_dir,
                                                    ExportKind what,
                                                    const std::filesystem::path& out_dir) {
    if (!std::filesystem::is_directory(run_dir)) {
        throw MissingArtifact("run directory not found: " + run_dir.string());
    }
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;

    std::vector<std::filesystem::path> seed_dirs;
    for (const auto& entry : std::filesystem::directory_iterator(run_dir)) {
        if (entry.is_directory() && entry.path().filename().string().rfind("seed-", 0) == 0) {
            seed_dirs.push_back(entry.path());
        }
    }
    std::sort(seed_dirs.begin(), seed_dirs.end());
    if (seed_dirs.empty()) {
        throw MissingArtifact("no seed directories in " + run_dir.string());
    }

    switch (what) {
        case ExportKind::scores: {
            const auto target = out_dir / "scores.csv";
            std::ofstream out(target);
            out << "seed,episode,score\n";
            for (const auto& seed_dir : seed_dirs) {
                const std::string seed =
                    seed_dir.filename().string().substr(std::string("seed-").size());
                std::ifstream in(seed_dir / "scores.csv");
                if (!in) throw MissingArtifact("missing scores.csv in " + seed_dir.string());
                std::string line;
                std::getline(in, line);  // header
                while (std::getline(in, line)) {
                    if (!line.empty()) out << seed << "," << line << "\n";
                }
            }
            written.push_back(target);
            break;
        }
        case ExportKind::heatmap: {
            for (const auto& seed_dir : seed_dirs) {
                const auto source = seed_dir / "heatmap.csv";
                if (!std::filesystem::exists(source)) {
                    throw MissingArtifact("missing heatmap.csv in " + seed_dir.string());
                }
                const auto target = out_dir / ("heatmap-" + seed_dir.filename().string() + ".csv");
                std::filesystem::copy_file(source, target,
                                           std::filesystem::copy_options::overwrite_existing);
                written.push_back(target);
            }
            break;
        }
        case ExportKind::map_dot: {
            for (const auto& seed_dir : seed_dirs) {
                const auto source = seed_dir / "map-final.json";
                if (!std::filesystem::exists(source)) {
                    throw MissingArtifact("missing map-final.json in " + seed_dir.string());
                }
                const StrategyMap map = load_map(source);
                const auto target = out_dir / ("map-" + seed_dir.filename().string() + ".dot");
                std::ofstream out(target);
                out << "digraph strategy_map {\n";
                for (const auto& id : map.ids()) {
                    const MilestoneStats& st = map.stats(id);
                    out << "  \"" << id << "\" [label=\"" << id << "\\nn=" << st.n
                        << " mean=" << format_double(st.mean_reward) << "\"];\n";
                }
                for (const auto& [from, to] : map.edges()) {
                    out << "  \"" << from << "\" -> \"" << to << "\";\n";
                }
                out << "}\n";
                written.push_back(target);
            }
            break;
        }
    }
    return written;
}

CycleReport reflect_once(const RunConfig& config, const std::filesystem::path& map_path,
                         const std::filesystem::path& log_path, std::optional<int> episode,
                         const std::filesystem::path& out_map_path) {
    StrategyMap map = load_map(map_path);
    std::vector<Trajectory> all = read_trajectories(log_path);
    if (all.empty()) {
        throw MissingArtifact("no trajectories in " + log_path.string());
    }
    const int episode_t = episode.value_or(all.back().episode_index);

    std::vector<Trajectory> window;
    for (const auto& trajectory : all) {
        if (trajectory.episode_index > episode_t - config.reflection.interval_n &&
            trajectory.episode_index <= episode_t) {
            window.push_back(trajectory);
        }
    }
    Proposers proposers = make_proposers(config);
    std::vector<EpisodeSummary> summaries;
    for (const auto& trajectory : window) {
        summaries.push_back(summarize_episode(trajectory, map, proposers));
    }
    ReflectionConfig reflection = config.reflection;
    reflection.fork_discovery = config.ablation.fork_discovery;
    reflection.propagation = config.ablation.propagation;
    std::vector<Lesson> lessons;
    CycleReport report =
        run_reflection_cycle(map, summaries, window, proposers, reflection, episode_t, lessons);
    if (!out_map_path.empty()) {
        save_map(map, out_map_path);
    }
    return report;
}

std::string map_group_for_task(const std::string& task_id) {
    return task_id;
}

}  // namespace stratmap
