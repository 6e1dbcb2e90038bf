#include "divsp/maze_env.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace divsp {

namespace {

constexpr int kDx[4] = {0, 1, 0, -1};  // up, right, down, left
constexpr int kDy[4] = {-1, 0, 1, 0};

// Tile channels of the egocentric window.
constexpr int kTileEmpty = 0;
constexpr int kTileWall = 1;
constexpr int kTileGoal = 2;
constexpr int kTileOutOfBounds = 3;

bool in_grid(const MazeLevel& level, Cell c) {
    return c.x >= 0 && c.x < level.width && c.y >= 0 && c.y < level.height;
}

Cell unflatten(int cell, int width) { return Cell{cell % width, cell / width}; }

}  // namespace

int maze_observation_dim(const MazeConfig& cfg) {
    return 4 * cfg.view_size * cfg.view_size + 4;
}

MazeLevel build_level(std::span<const DesignAction> actions, const MazeConfig& cfg) {
    bool have_start = false;
    bool have_goal = false;
    MazeLevel level;
    level.width = cfg.width;
    level.height = cfg.height;
    level.start_dir = kDirUp;

    const int num_cells = cfg.width * cfg.height;
    for (const DesignAction& action : actions) {
        if (action.cell < 0 || action.cell >= num_cells)
            throw PreconditionError("build_level: design cell out of range");
        const Cell cell = unflatten(action.cell, cfg.width);
        switch (action.kind) {
            case DesignKind::kPlaceStart:
                if (have_start) throw PreconditionError("build_level: duplicate place_start");
                level.start = cell;
                have_start = true;
                break;
            case DesignKind::kPlaceGoal: {
                if (have_goal) throw PreconditionError("build_level: duplicate place_goal");
                if (!have_start) throw PreconditionError("build_level: place_goal before place_start");
                Cell goal = cell;
                if (goal == level.start) {
                    // Shift to the next free cell so start != goal always holds.
                    int idx = (action.cell + 1) % num_cells;
                    goal = unflatten(idx, cfg.width);
                }
                level.goal = goal;
                have_goal = true;
                break;
            }
            case DesignKind::kPlaceBlock: {
                if (!have_start || !have_goal)
                    throw PreconditionError("build_level: place_block before start and goal");
                if (static_cast<int>(level.walls.size()) >= cfg.max_blocks) break;
                if (cell == level.start || cell == level.goal) break;
                level.walls.insert(cell);  // duplicate insert is the no-op collision rule
                break;
            }
        }
    }
    if (!have_start || !have_goal)
        throw PreconditionError("build_level: level design is missing start or goal");
    return level;
}

MazeLevel level_from_params(const LevelParams& params, const MazeConfig& cfg) {
    if (params.family_id != kMazeFamilyId)
        throw ConfigError("level_from_params: unknown family_id '" + params.family_id + "'");
    if (params.encoding.size() < 2)
        throw PreconditionError("level_from_params: encoding is missing start or goal");
    std::vector<DesignAction> actions;
    actions.reserve(params.encoding.size());
    actions.push_back({DesignKind::kPlaceStart, params.encoding[0]});
    actions.push_back({DesignKind::kPlaceGoal, params.encoding[1]});
    for (std::size_t i = 2; i < params.encoding.size(); ++i)
        actions.push_back({DesignKind::kPlaceBlock, params.encoding[i]});
    return build_level(actions, cfg);
}

LevelParams to_level_params(const MazeLevel& level) {
    LevelParams params;
    params.family_id = kMazeFamilyId;
    params.encoding.push_back(level.start.y * level.width + level.start.x);
    params.encoding.push_back(level.goal.y * level.width + level.goal.x);
    for (const Cell& wall : level.walls) params.encoding.push_back(wall.y * level.width + wall.x);
    return params;
}

bool is_solvable(const MazeLevel& level) {
    if (level.start == level.goal) return true;
    std::vector<char> visited(static_cast<std::size_t>(level.width) * level.height, 0);
    auto idx = [&](Cell c) { return static_cast<std::size_t>(c.y) * level.width + c.x; };
    std::deque<Cell> frontier{level.start};
    visited[idx(level.start)] = 1;
    while (!frontier.empty()) {
        const Cell cur = frontier.front();
        frontier.pop_front();
        for (int d = 0; d < 4; ++d) {
            const Cell next{cur.x + kDx[d], cur.y + kDy[d]};
            if (!in_grid(level, next) || visited[idx(next)] || level.walls.count(next)) continue;
            if (next == level.goal) return true;
            visited[idx(next)] = 1;
            frontier.push_back(next);
        }
    }
    return false;
}

std::string render_ascii(const MazeLevel& level) {
    std::string out;
    out.reserve(static_cast<std::size_t>(level.height) * (level.width + 1));
    for (int y = 0; y < level.height; ++y) {
        for (int x = 0; x < level.width; ++x) {
            const Cell c{x, y};
            char ch = '.';
            if (level.walls.count(c))
                ch = '#';
            else if (c == level.start)
                ch = 'A';
            else if (c == level.goal)
                ch = 'G';
            out.push_back(ch);
        }
        out.push_back('\n');
    }
    return out;
}

MazeLevel parse_ascii(const std::string& text) {
    std::vector<std::string> rows;
    std::string row;
    std::istringstream in(text);
    while (std::getline(in, row)) {
        if (!row.empty() && row.back() == '\r') row.pop_back();
        if (row.empty()) continue;
        rows.push_back(row);
    }
    if (rows.empty()) throw ParseError("parse_ascii: empty level text");

    MazeLevel level;
    level.height = static_cast<int>(rows.size());
    level.width = static_cast<int>(rows[0].size());
    level.start_dir = kDirUp;

    bool have_start = false;
    bool have_goal = false;
    for (int y = 0; y < level.height; ++y) {
        if (static_cast<int>(rows[y].size()) != level.width)
            throw ParseError("parse_ascii: non-rectangular level text");
        for (int x = 0; x < level.width; ++x) {
            const Cell c{x, y};
            switch (rows[y][x]) {
                case '.':
                    break;
                case '#':
                    level.walls.insert(c);
                    break;
                case 'A':
                    if (have_start) throw ParseError("parse_ascii: duplicate 'A'");
                    level.start = c;
                    have_start = true;
                    break;
                case 'G':
                    if (have_goal) throw ParseError("parse_ascii: duplicate 'G'");
                    level.goal = c;
                    have_goal = true;
                    break;
                default:
                    throw ParseError(std::string("parse_ascii: unknown character '") + rows[y][x] + "'");
            }
        }
    }
    if (!have_start) throw ParseError("parse_ascii: missing 'A'");
    if (!have_goal) throw ParseError("parse_ascii: missing 'G'");
    return level;
}

MazeEnv::MazeEnv(const MazeConfig& cfg) : cfg_(cfg) {}

Observation MazeEnv::reset(const LevelParams& level) {
    return reset_level(level_from_params(level, cfg_));
}

Observation MazeEnv::reset_level(const MazeLevel& level) {
    level_ = level;
    pos_ = level.start;
    dir_ = level.start_dir;
    steps_taken_ = 0;
    terminal_ = false;
    active_ = true;
    return observe();
}

bool MazeEnv::done() const {
    return !active_ || terminal_ || steps_taken_ >= cfg_.horizon;
}

StepResult MazeEnv::step(int action) {
    if (!active_) throw UsageError("MazeEnv::step: step before reset");
    if (done()) throw UsageError("MazeEnv::step: step after episode end");
    if (action < 0 || action >= kNumStudentActions)
        throw UsageError("MazeEnv::step: unknown action id");

    const int t = steps_taken_;
    ++steps_taken_;

    switch (action) {
        case kForward: {
            const Cell next{pos_.x + kDx[dir_], pos_.y + kDy[dir_]};
            if (in_grid(level_, next) && !level_.walls.count(next)) pos_ = next;
            break;
        }
        case kTurnLeft:
            dir_ = (dir_ + 3) % 4;
            break;
        case kTurnRight:
            dir_ = (dir_ + 1) % 4;
            break;
    }

    StepResult result;
    if (pos_ == level_.goal) {
        terminal_ = true;
        result.reward = 1.0 - 0.9 * static_cast<double>(t) / cfg_.horizon;
    }
    result.terminal = terminal_;
    result.obs = observe();
    return result;
}

int MazeEnv::observation_dim() const { return maze_observation_dim(cfg_); }

Observation MazeEnv::observe() const {
    const int k = cfg_.view_size;
    const int half = k / 2;
    Observation obs;
    obs.features.assign(static_cast<std::size_t>(maze_observation_dim(cfg_)), 0.0);

    // Window cell (f, l): f steps ahead, l steps to the agent's right.
    const int fdx = kDx[dir_], fdy = kDy[dir_];
    const int rdx = kDx[(dir_ + 1) % 4], rdy = kDy[(dir_ + 1) % 4];
    for (int f = 0; f < k; ++f) {
        for (int l = -half; l <= half; ++l) {
            const Cell c{pos_.x + f * fdx + l * rdx, pos_.y + f * fdy + l * rdy};
            int channel = kTileEmpty;
            if (!in_grid(level_, c))
                channel = kTileOutOfBounds;
            else if (level_.walls.count(c))
                channel = kTileWall;
            else if (c == level_.goal)
                channel = kTileGoal;
            const int cell_index = f * k + (l + half);
            obs.features[static_cast<std::size_t>(cell_index) * 4 + channel] = 1.0;
        }
    }
    obs.features[static_cast<std::size_t>(4 * k * k + dir_)] = 1.0;
    return obs;
}

std::unique_ptr<Environment> make_environment(const std::string& family_id, const MazeConfig& cfg) {
    if (family_id == kMazeFamilyId) return std::make_unique<MazeEnv>(cfg);
    throw ConfigError("make_environment: unknown family_id '" + family_id + "'");
}

}  // namespace divsp
