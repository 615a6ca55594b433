#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stratmap/environment.hpp"
#include "stratmap/rng.hpp"
#include "stratmap/trajectory.hpp"

namespace stratmap {

struct Cell {
    int row = 0;
    int col = 0;
    auto operator<=>(const Cell&) const = default;
};

enum class Dir { north, south, east, west };

const char* to_string(Dir dir);
std::optional<Dir> dir_from_string(const std::string& name);
Dir inverse(Dir dir);
Cell neighbor(Cell cell, Dir dir);

struct RewardCell {
    double value = 0.0;
    bool once_per_episode = true;
};

/// Gridworld maze. Observations are localized text ("You are in the fern
/// cellar. Exits: north, east.") with named rooms and no coordinates.
struct MazeSpec {
    int width = 5;
    int height = 5;
    Cell start{4, 0};
    std::set<std::pair<Cell, Cell>> walls;  // blocked transitions, stored normalized
    std::map<Cell, RewardCell> reward_cells;
    int episode_steps = 10;
    int episodes = 20;

    bool blocked(Cell a, Cell b) const;
    bool in_bounds(Cell cell) const;
    std::vector<Dir> exits(Cell cell) const;
    std::string room_label(Cell cell) const;
    std::optional<Cell> cell_for_label(const std::string& label) const;

    /// start in bounds, reward cells in bounds, every cell reachable from
    /// the start. Throws ConfigError otherwise.
    void validate() const;

    /// The fixed default layout: a +40 cell three moves east of the start
    /// along an open corridor, and a +80 cell nine moves away behind a
    /// turn-heavy detour.
    static MazeSpec default_layout();

    /// Seed-randomized layout with the same qualitative structure (one easy
    /// nearby reward, one distant hard reward).
    static MazeSpec random_layout(std::uint64_t seed);
};

void add_wall(MazeSpec& spec, Cell a, Cell b);

/// Milestones on the maze name exits: id "<room-slug>.<direction>" with
/// key_actions holding a start-relative move sequence ending in that exit.
std::string exit_milestone_id(const std::string& room_label, Dir dir);

/// Parse helpers shared by agents and the trajectory-grounded oracles.
std::optional<std::string> parse_room_label(const std::string& observation);
std::vector<Dir> parse_exits(const std::string& observation);

class MazeEnv : public Environment {
public:
    explicit MazeEnv(MazeSpec spec);

    std::string reset(std::uint64_t episode_seed) override;
    EnvStep step(const std::string& action) override;
    std::string observation() const override;
    std::vector<std::string> available_actions() const override;
    MilestoneSignal milestone_signal(const Milestone& milestone) const override;

    const MazeSpec& spec() const { return spec_; }
    Cell position() const { return position_; }

private:
    std::string render_observation() const;

    MazeSpec spec_;
    Cell position_;
    std::set<Cell> collected_;  // reward cells already paid this episode
    std::optional<std::pair<std::string, Dir>> last_transition_;  // (from-room, dir), moves only
};

/// Per-cell visit proportions over a set of maze trajectories, reconstructed
/// by replaying the recorded actions against the spec. Counts cover the
/// occupied cell at the start of each episode and after every step; an empty
/// input yields an all-zero grid.
std::vector<std::vector<double>> coverage_heatmap(const std::vector<Trajectory>& trajectories,
                                                  const MazeSpec& spec);

}  // namespace stratmap
