#pragma once

#include <optional>

#include "stratmap/config.hpp"
#include "stratmap/map_io.hpp"
#include "stratmap/metrics.hpp"
#include "stratmap/proposers.hpp"
#include "stratmap/reflection.hpp"

namespace stratmap {

/// Resume point written after every reflection cycle: the refined map, the
/// lesson buffer and any cross-episode agent memory.
struct Snapshot {
    int episode = 0;
    StrategyMap map;
    std::vector<Lesson> lessons;
    std::string agent_state;
};

void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& path);
Snapshot load_snapshot(const std::filesystem::path& path);

/// In-memory artifacts of one seed of a run.
struct SeedRunArtifacts {
    std::uint64_t seed = 0;
    std::vector<double> scores;            // one entry per episode run
    std::vector<Trajectory> trajectories;  // full run (resume included)
    std::vector<CycleReport> cycles;
    StrategyMap final_map;
    std::vector<Lesson> lessons;
    std::map<std::string, long> proposer_calls;
};

struct RunOutputs {
    RunConfig config;
    std::vector<SeedRunArtifacts> seeds;
    RunReport report;
};

/// Run one seed. When `resume` is set, episodes continue from
/// resume->episode + 1 with the snapshot's map, lessons and agent state;
/// per-episode RNG streams depend only on (seed, episode), so a resumed run
/// reproduces the uninterrupted one. Artifacts land in
/// out_dir/seed-<seed>/ unless out_dir is empty.
SeedRunArtifacts run_seed(const RunConfig& config, std::uint64_t seed,
                          const std::optional<Snapshot>& resume = std::nullopt);

/// Run every configured seed (fanned out across worker threads), write all
/// artifacts under config.out_dir and aggregate the report.
RunOutputs run_experiment(const RunConfig& config);

/// Node table, edge list and stuck candidates for a saved map.
std::string inspect_map_file(const std::filesystem::path& map_path);

enum class ExportKind { scores, heatmap, map_dot };

/// Re-derive plot-ready files from a finished run directory.
std::vector<std::filesystem::path> export_artifacts(const std::filesystem::path& run_dir,
                                                    ExportKind what,
                                                    const std::filesystem::path& out_dir);

/// Manually trigger one reflection cycle on a saved map plus an episode log;
/// writes the refined map and returns the report.
CycleReport reflect_once(const RunConfig& config, const std::filesystem::path& map_path,
                         const std::filesystem::path& log_path, std::optional<int> episode,
                         const std::filesystem::path& out_map_path);

/// Trajectory log (JSONL) helpers: one record per step, one footer per
/// episode, plus summary / credits / cycle records appended by the runner.
void append_trajectory(std::ostream& out, const Trajectory& trajectory);
std::vector<Trajectory> read_trajectories(const std::filesystem::path& log_path);

/// Grouping hook for multi-task suites: which strategy map a task should
/// use. One map per task until a similarity judge is wired in.
/// TODO: accept a proposer-backed similarity judgment so related tasks can
/// share a map.
std::string map_group_for_task(const std::string& task_id);

}  // namespace stratmap
