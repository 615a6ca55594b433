#include "stratmap/envs/maze.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <sstream>

namespace stratmap {

namespace {

// 13 x 8 distinct combinations cover boards up to 104 cells.
constexpr std::array<const char*, 13> kRoomAdjectives = {
    "amber", "birch", "cedar", "dusty", "echoing", "fern",  "gilded",
    "hazel", "ivory", "jade",  "lichen", "marble", "oaken"};
constexpr std::array<const char*, 8> kRoomNouns = {
    "hall", "cellar", "landing", "gallery", "archive", "atrium", "passage", "alcove"};

std::pair<Cell, Cell> normalize(Cell a, Cell b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

std::string slugify(const std::string& label) {
    std::string out;
    for (char ch : label) {
        out.push_back(ch == ' ' ? '-' : ch);
    }
    return out;
}

}  // namespace

const char* to_string(Dir dir) {
    switch (dir) {
        case Dir::north: return "north";
        case Dir::south: return "south";
        case Dir::east: return "east";
        case Dir::west: return "west";
    }
    return "unknown";
}

std::optional<Dir> dir_from_string(const std::string& name) {
    if (name == "north") return Dir::north;
    if (name == "south") return Dir::south;
    if (name == "east") return Dir::east;
    if (name == "west") return Dir::west;
    return std::nullopt;
}

Dir inverse(Dir dir) {
    switch (dir) {
        case Dir::north: return Dir::south;
        case Dir::south: return Dir::north;
        case Dir::east: return Dir::west;
        case Dir::west: return Dir::east;
    }
    return Dir::north;
}

Cell neighbor(Cell cell, Dir dir) {
    switch (dir) {
        case Dir::north: return {cell.row - 1, cell.col};
        case Dir::south: return {cell.row + 1, cell.col};
        case Dir::east: return {cell.row, cell.col + 1};
        case Dir::west: return {cell.row, cell.col - 1};
    }
    return cell;
}

bool MazeSpec::blocked(Cell a, Cell b) const {
    return walls.count(normalize(a, b)) > 0;
}

bool MazeSpec::in_bounds(Cell cell) const {
    return cell.row >= 0 && cell.row < height && cell.col >= 0 && cell.col < width;
}

std::vector<Dir> MazeSpec::exits(Cell cell) const {
    std::vector<Dir> out;
    for (Dir dir : {Dir::north, Dir::south, Dir::east, Dir::west}) {
        const Cell next = neighbor(cell, dir);
        if (in_bounds(next) && !blocked(cell, next)) {
            out.push_back(dir);
        }
    }
    return out;
}

std::string MazeSpec::room_label(Cell cell) const {
    const int k = cell.row * width + cell.col;
    const auto adjective = kRoomAdjectives[static_cast<std::size_t>(k) % kRoomAdjectives.size()];
    const auto noun = kRoomNouns[(static_cast<std::size_t>(k) / kRoomAdjectives.size()) %
                                 kRoomNouns.size()];
    return std::string(adjective) + " " + noun;
}

std::optional<Cell> MazeSpec::cell_for_label(const std::string& label) const {
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            if (room_label({r, c}) == label) {
                return Cell{r, c};
            }
        }
    }
    return std::nullopt;
}

void MazeSpec::validate() const {
    if (width < 1 || height < 1) {
        throw ConfigError("maze dimensions must be positive");
    }
    if (episode_steps < 1 || episodes < 1) {
        throw ConfigError("maze episode settings must be positive");
    }
    if (!in_bounds(start)) {
        throw ConfigError("maze start out of bounds");
    }
    for (const auto& [cell, reward] : reward_cells) {
        if (!in_bounds(cell)) {
            throw ConfigError("maze reward cell out of bounds");
        }
    }
    // Connectivity from the start.
    std::set<Cell> seen{start};
    std::deque<Cell> queue{start};
    while (!queue.empty()) {
        const Cell cur = queue.front();
        queue.pop_front();
        for (Dir dir : exits(cur)) {
            const Cell next = neighbor(cur, dir);
            if (seen.insert(next).second) {
                queue.push_back(next);
            }
        }
    }
    if (static_cast<int>(seen.size()) != width * height) {
        throw ConfigError("maze is not connected from the start cell");
    }
}

void add_wall(MazeSpec& spec, Cell a, Cell b) {
    spec.walls.insert(normalize(a, b));
}

MazeSpec MazeSpec::default_layout() {
    MazeSpec spec;
    spec.width = 5;
    spec.height = 5;
    spec.start = {4, 0};
    spec.episode_steps = 10;
    spec.episodes = 20;
    // Bottom corridor only opens upward at its two ends.
    add_wall(spec, {4, 1}, {3, 1});
    add_wall(spec, {4, 2}, {3, 2});
    add_wall(spec, {4, 3}, {3, 3});
    // The big reward sits behind a forced zig-zag.
    add_wall(spec, {3, 4}, {2, 4});
    add_wall(spec, {1, 3}, {1, 4});
    add_wall(spec, {0, 4}, {1, 4});
    spec.reward_cells[{4, 3}] = {40.0, true};
    spec.reward_cells[{1, 4}] = {80.0, true};
    spec.validate();
    return spec;
}

MazeSpec MazeSpec::random_layout(std::uint64_t seed) {
    RngStream rng(mix_seed(seed, 0x6d617a65));
    MazeSpec spec;
    spec.width = 5;
    spec.height = 5;
    spec.start = {4, 0};
    spec.episode_steps = 10;
    spec.episodes = 20;

    // Scatter interior walls, keeping the maze connected.
    const int attempts = 14;
    for (int i = 0; i < attempts; ++i) {
        const int row = static_cast<int>(rng.uniform_index(5));
        const int col = static_cast<int>(rng.uniform_index(5));
        const Dir dir = static_cast<Dir>(rng.uniform_index(4));
        const Cell a{row, col};
        const Cell b = neighbor(a, dir);
        if (!spec.in_bounds(b)) continue;
        add_wall(spec, a, b);
        try {
            spec.validate();
        } catch (const ConfigError&) {
            spec.walls.erase(normalize(a, b));
        }
    }

    // Easy reward close to the start, hard reward far away.
    std::vector<std::pair<int, Cell>> by_distance;  // (bfs distance, cell)
    std::map<Cell, int> dist{{spec.start, 0}};
    std::deque<Cell> queue{spec.start};
    while (!queue.empty()) {
        const Cell cur = queue.front();
        queue.pop_front();
        for (Dir dir : spec.exits(cur)) {
            const Cell next = neighbor(cur, dir);
            if (!dist.count(next)) {
                dist[next] = dist[cur] + 1;
                by_distance.emplace_back(dist[next], next);
                queue.push_back(next);
            }
        }
    }
    std::sort(by_distance.begin(), by_distance.end());
    Cell easy = spec.start;
    Cell hard = spec.start;
    for (const auto& [d, cell] : by_distance) {
        if (d == 3 && easy == spec.start) easy = cell;
        if (d >= 7 && d < spec.episode_steps) hard = cell;
    }
    if (easy == spec.start || hard == spec.start) {
        // Degenerate roll; fall back to the fixed layout.
        return default_layout();
    }
    spec.reward_cells[easy] = {40.0, true};
    spec.reward_cells[hard] = {80.0, true};
    spec.validate();
    return spec;
}

std::string exit_milestone_id(const std::string& room_label, Dir dir) {
    return slugify(room_label) + "." + to_string(dir);
}

std::optional<std::string> parse_room_label(const std::string& observation) {
    const std::string prefix = "You are in the ";
    const auto start = observation.find(prefix);
    if (start == std::string::npos) return std::nullopt;
    const auto from = start + prefix.size();
    const auto end = observation.find('.', from);
    if (end == std::string::npos) return std::nullopt;
    return observation.substr(from, end - from);
}

std::vector<Dir> parse_exits(const std::string& observation) {
    std::vector<Dir> out;
    const std::string prefix = "Exits: ";
    const auto start = observation.find(prefix);
    if (start == std::string::npos) return out;
    const auto from = start + prefix.size();
    const auto end = observation.find('.', from);
    std::string list = observation.substr(from, end == std::string::npos ? std::string::npos
                                                                         : end - from);
    std::stringstream ss(list);
    std::string token;
    while (std::getline(ss, token, ',')) {
        token.erase(0, token.find_first_not_of(' '));
        token.erase(token.find_last_not_of(' ') + 1);
        if (auto dir = dir_from_string(token)) {
            out.push_back(*dir);
        }
    }
    return out;
}

MazeEnv::MazeEnv(MazeSpec spec) : spec_(std::move(spec)), position_(spec_.start) {
    spec_.validate();
}

std::string MazeEnv::reset(std::uint64_t episode_seed) {
    (void)episode_seed;  // the maze itself is deterministic
    position_ = spec_.start;
    collected_.clear();
    last_transition_.reset();
    return render_observation();
}

std::string MazeEnv::render_observation() const {
    std::ostringstream out;
    out << "You are in the " << spec_.room_label(position_) << ". Exits: ";
    const auto exits = spec_.exits(position_);
    for (std::size_t i = 0; i < exits.size(); ++i) {
        if (i > 0) out << ", ";
        out << to_string(exits[i]);
    }
    out << ".";
    return out.str();
}

std::string MazeEnv::observation() const {
    return render_observation();
}

std::vector<std::string> MazeEnv::available_actions() const {
    std::vector<std::string> out;
    for (Dir dir : spec_.exits(position_)) {
        out.emplace_back(to_string(dir));
    }
    return out;
}

EnvStep MazeEnv::step(const std::string& action) {
    EnvStep result;
    const auto dir = dir_from_string(action);
    if (!dir.has_value()) {
        result.observation = "Nothing happens. " + render_observation();
        result.valid = false;
        return result;
    }
    const Cell next = neighbor(position_, *dir);
    if (!spec_.in_bounds(next) || spec_.blocked(position_, next)) {
        result.observation = "You bump into a wall. " + render_observation();
        result.valid = false;
        return result;
    }
    last_transition_ = {spec_.room_label(position_), *dir};
    position_ = next;
    auto reward_it = spec_.reward_cells.find(position_);
    if (reward_it != spec_.reward_cells.end()) {
        const bool already = collected_.count(position_) > 0;
        if (!already || !reward_it->second.once_per_episode) {
            result.reward = reward_it->second.value;
            collected_.insert(position_);
        }
    }
    std::ostringstream out;
    if (result.reward > 0) {
        out << "You found a bonus worth " << result.reward << " points. ";
    }
    out << render_observation();
    result.observation = out.str();
    return result;
}

MilestoneSignal MazeEnv::milestone_signal(const Milestone& milestone) const {
    if (!last_transition_.has_value()) {
        return MilestoneSignal::not_achieved;
    }
    const auto& [from_room, dir] = *last_transition_;
    return exit_milestone_id(from_room, dir) == milestone.id ? MilestoneSignal::achieved
                                                             : MilestoneSignal::not_achieved;
}

std::vector<std::vector<double>> coverage_heatmap(const std::vector<Trajectory>& trajectories,
                                                  const MazeSpec& spec) {
    std::vector<std::vector<double>> grid(static_cast<std::size_t>(spec.height),
                                          std::vector<double>(static_cast<std::size_t>(spec.width), 0.0));
    double total = 0.0;
    for (const auto& trajectory : trajectories) {
        Cell pos = spec.start;
        grid[pos.row][pos.col] += 1.0;
        total += 1.0;
        for (const auto& step : trajectory.steps) {
            if (auto dir = dir_from_string(step.action)) {
                const Cell next = neighbor(pos, *dir);
                if (spec.in_bounds(next) && !spec.blocked(pos, next)) {
                    pos = next;
                }
            }
            grid[pos.row][pos.col] += 1.0;
            total += 1.0;
        }
    }
    if (total > 0.0) {
        for (auto& row : grid) {
            for (auto& cell : row) {
                cell /= total;
            }
        }
    }
    return grid;
}

}  // namespace stratmap
