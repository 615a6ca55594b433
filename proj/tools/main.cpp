#include <iostream>

#include <CLI11.hpp>

#include "stratmap/runner.hpp"

namespace {

using namespace stratmap;

RunConfig load_config_or_default(const std::string& config_path) {
    if (config_path.empty()) {
        return parse_run_config("");
    }
    return load_run_config(config_path);
}

void apply_ablation_flag(RunConfig& config, const std::string& spec) {
    // e.g. "representation=flat_list,propagation=sequential,fork_discovery=off"
    std::stringstream ss(spec);
    std::string token;
    while (std::getline(ss, token, ',')) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--ablation entries must look like key=value");
        }
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "representation") {
            if (value == "dag") config.ablation.representation = DepsView::dag;
            else if (value == "flat_list") config.ablation.representation = DepsView::flat_list;
            else throw ConfigError("representation must be dag or flat_list");
        } else if (key == "propagation") {
            if (value == "dag") config.ablation.propagation = PropagationMode::dag;
            else if (value == "sequential")
                config.ablation.propagation = PropagationMode::sequential;
            else throw ConfigError("propagation must be dag or sequential");
        } else if (key == "fork_discovery") {
            if (value == "on") config.ablation.fork_discovery = true;
            else if (value == "off") config.ablation.fork_discovery = false;
            else throw ConfigError("fork_discovery must be on or off");
        } else {
            throw ConfigError("unknown ablation switch: " + key);
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"strategy-map exploration engine"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string seeds_flag;
    std::string policy_flag;
    std::string ablation_flag;
    std::string resume_path;
    int episodes_flag = 0;
    int max_steps_flag = 0;
    bool live = false;
    bool mock = false;

    auto* run_cmd = app.add_subcommand("run", "run a batch experiment");
    run_cmd->add_option("--config", config_path, "configuration file");
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_option("--seed,--seeds", seeds_flag, "comma-separated seed list");
    run_cmd->add_option("--episodes", episodes_flag, "episode count override");
    run_cmd->add_option("--max-steps", max_steps_flag, "per-episode step limit override");
    run_cmd->add_option("--policy", policy_flag, "thompson | ucb | epsilon_greedy");
    run_cmd->add_option("--ablation", ablation_flag,
                        "e.g. representation=flat_list,fork_discovery=off");
    run_cmd->add_option("--resume-from", resume_path, "snapshot file to resume one seed from");
    run_cmd->add_flag("--live", live, "use the live LLM endpoint");
    run_cmd->add_flag("--mock", mock, "force rule-based proposers (default)");

    std::string map_path;
    auto* inspect_cmd = app.add_subcommand("inspect", "print a saved map as tables");
    inspect_cmd->add_option("map", map_path, "map file")->required();

    std::string export_run_dir;
    std::string export_what = "scores";
    std::string export_out;
    auto* export_cmd = app.add_subcommand("export", "derive plot-ready files from a run");
    export_cmd->add_option("--run", export_run_dir, "run directory")->required();
    export_cmd->add_option("--what", export_what, "scores | heatmap | map_dot");
    export_cmd->add_option("--out", export_out, "destination directory")->required();

    std::string reflect_map;
    std::string reflect_log;
    std::string reflect_out;
    int reflect_episode = 0;
    auto* reflect_cmd =
        app.add_subcommand("reflect", "run one reflection cycle on a saved map and log");
    reflect_cmd->add_option("--config", config_path, "configuration file");
    reflect_cmd->add_option("--map", reflect_map, "map file")->required();
    reflect_cmd->add_option("--log", reflect_log, "episodes.jsonl from a run")->required();
    reflect_cmd->add_option("--episode", reflect_episode, "cycle episode (default: last)");
    reflect_cmd->add_option("--out", reflect_out, "where to write the refined map")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            RunConfig config = load_config_or_default(config_path);
            if (!out_dir.empty()) config.out_dir = out_dir;
            if (!seeds_flag.empty()) {
                config.seeds.clear();
                std::stringstream ss(seeds_flag);
                std::string token;
                while (std::getline(ss, token, ',')) {
                    config.seeds.push_back(std::stoull(token));
                }
            }
            if (episodes_flag > 0) config.engine.episodes = episodes_flag;
            if (max_steps_flag > 0) config.engine.max_steps = max_steps_flag;
            if (!policy_flag.empty()) config.policy.kind = policy_kind_from_string(policy_flag);
            if (!ablation_flag.empty()) apply_ablation_flag(config, ablation_flag);
            if (live) config.proposer_mode = ProposerMode::live;
            if (mock) config.proposer_mode = ProposerMode::rule;
            config.validate();

            if (!resume_path.empty()) {
                if (config.seeds.size() != 1) {
                    throw ConfigError("--resume-from resumes exactly one seed");
                }
                const Snapshot snapshot = load_snapshot(resume_path);
                std::filesystem::create_directories(config.out_dir);
                run_seed(config, config.seeds.front(), snapshot);
            } else {
                const RunOutputs outputs = run_experiment(config);
                std::cout << "final-" << config.final_k << " mean "
                          << outputs.report.final_k_mean << " +- "
                          << outputs.report.final_k_stddev << " over "
                          << outputs.seeds.size() << " seed(s)\n";
            }
        } else if (inspect_cmd->parsed()) {
            std::cout << inspect_map_file(map_path);
        } else if (export_cmd->parsed()) {
            ExportKind what;
            if (export_what == "scores") what = ExportKind::scores;
            else if (export_what == "heatmap") what = ExportKind::heatmap;
            else if (export_what == "map_dot") what = ExportKind::map_dot;
            else throw ConfigError("--what must be scores, heatmap or map_dot");
            for (const auto& path : export_artifacts(export_run_dir, what, export_out)) {
                std::cout << path.string() << "\n";
            }
        } else if (reflect_cmd->parsed()) {
            RunConfig config = load_config_or_default(config_path);
            const CycleReport report = reflect_once(
                config, reflect_map, reflect_log,
                reflect_episode > 0 ? std::optional<int>(reflect_episode) : std::nullopt,
                reflect_out);
            std::cout << "cycle at episode " << report.episode << ": "
                      << report.refinement_ops.size() << " refinement op(s), "
                      << report.fork_ops.size() << " fork op(s), " << report.diagnoses.size()
                      << " diagnosis(es), " << report.new_lessons.size() << " lesson(s)\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
