#pragma once

#include <compare>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "divsp/core.hpp"

namespace divsp {

struct Cell {
    int x = 0;
    int y = 0;

    auto operator<=>(const Cell&) const = default;
};

struct MazeConfig {
    int width = 13;
    int height = 13;
    int max_blocks = 25;
    int horizon = 100;
    int view_size = 5;  // odd egocentric window side k
};

inline const char* kMazeFamilyId = "maze";

// Student actions.
enum StudentAction : int {
    kForward = 0,
    kTurnLeft = 1,
    kTurnRight = 2,
};
inline constexpr int kNumStudentActions = 3;

// Facing directions, clockwise from up.
inline constexpr int kDirUp = 0;
inline constexpr int kDirRight = 1;
inline constexpr int kDirDown = 2;
inline constexpr int kDirLeft = 3;

struct MazeLevel {
    int width = 13;
    int height = 13;
    Cell start;
    int start_dir = kDirUp;
    Cell goal;
    std::set<Cell> walls;

    bool operator==(const MazeLevel&) const = default;
};

enum class DesignKind { kPlaceStart, kPlaceGoal, kPlaceBlock };

struct DesignAction {
    DesignKind kind = DesignKind::kPlaceBlock;
    int cell = 0;  // flattened index, cell = y * width + x
};

// Observation feature length: 4 tile channels per window cell + facing.
int maze_observation_dim(const MazeConfig& cfg);

// Constructs a level from a design-action sequence. Block placements that
// collide with the start, the goal, or an existing wall are skipped; blocks
// beyond max_blocks are ignored. A goal placed on the start cell is shifted
// to the next free cell in row-major order.
MazeLevel build_level(std::span<const DesignAction> actions, const MazeConfig& cfg);

// Interprets LevelParams.encoding as [start_cell, goal_cell, block_cells...].
MazeLevel level_from_params(const LevelParams& params, const MazeConfig& cfg);
LevelParams to_level_params(const MazeLevel& level);

// True iff a 4-connected path from start to goal avoids all walls.
bool is_solvable(const MazeLevel& level);

// ASCII format: '#' wall, '.' empty, 'A' start, 'G' goal, rows newline-separated.
std::string render_ascii(const MazeLevel& level);
MazeLevel parse_ascii(const std::string& text);

// Partially observable maze navigation. The student sees an egocentric
// k x k one-hot window over {empty, wall, goal, out-of-bounds} plus its
// facing direction. Reaching the goal at step t yields 1 - 0.9 * t / T and
// terminates; all other rewards are zero. Episodes truncate at the horizon
// without a terminal flag.
class MazeEnv final : public Environment {
public:
    explicit MazeEnv(const MazeConfig& cfg);

    Observation reset(const LevelParams& level) override;
    Observation reset_level(const MazeLevel& level);

    StepResult step(int action) override;

    int observation_dim() const override;
    int num_actions() const override { return kNumStudentActions; }
    int horizon() const override { return cfg_.horizon; }
    bool done() const override;

    const MazeLevel& level() const { return level_; }
    Cell agent_pos() const { return pos_; }
    int agent_dir() const { return dir_; }
    int steps_taken() const { return steps_taken_; }

private:
    Observation observe() const;

    MazeConfig cfg_;
    MazeLevel level_;
    Cell pos_;
    int dir_ = kDirUp;
    int steps_taken_ = 0;
    bool terminal_ = false;
    bool active_ = false;
};

// Factory for the level-parameterized environment families. Unknown
// family ids are a configuration error.
std::unique_ptr<Environment> make_environment(const std::string& family_id, const MazeConfig& cfg);

}  // namespace divsp
