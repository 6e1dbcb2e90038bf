#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "divsp/maze_env.hpp"
#include "divsp/rng.hpp"

using namespace divsp;

namespace {

MazeConfig small_config(int w, int h, int max_blocks = 25) {
    MazeConfig cfg;
    cfg.width = w;
    cfg.height = h;
    cfg.max_blocks = max_blocks;
    return cfg;
}

// Exhaustive path search used as the oracle for is_solvable: enumerates
// every simple 4-connected path from start by depth-first search.
bool oracle_reachable_dfs(const MazeLevel& level, Cell current, std::set<Cell>& visited) {
    if (current == level.goal) return true;
    visited.insert(current);
    const int dx[4] = {0, 1, 0, -1};
    const int dy[4] = {-1, 0, 1, 0};
    for (int d = 0; d < 4; ++d) {
        const Cell next{current.x + dx[d], current.y + dy[d]};
        if (next.x < 0 || next.x >= level.width || next.y < 0 || next.y >= level.height) continue;
        if (visited.count(next) || level.walls.count(next)) continue;
        if (oracle_reachable_dfs(level, next, visited)) return true;
    }
    return false;
}

bool oracle_solvable(const MazeLevel& level) {
    std::set<Cell> visited;
    return oracle_reachable_dfs(level, level.start, visited);
}

}  // namespace

TEST_CASE("build_level with only start and goal yields an empty maze") {
    const MazeConfig cfg = small_config(5, 5);
    const std::vector<DesignAction> actions = {{DesignKind::kPlaceStart, 0},
                                               {DesignKind::kPlaceGoal, 24}};
    const MazeLevel level = build_level(actions, cfg);
    CHECK(level.walls.empty());
    CHECK(level.start == Cell{0, 0});
    CHECK(level.goal == Cell{4, 4});
}

TEST_CASE("a block placed on the goal cell is skipped") {
    const MazeConfig cfg = small_config(5, 5);
    const std::vector<DesignAction> actions = {{DesignKind::kPlaceStart, 0},
                                               {DesignKind::kPlaceGoal, 12},
                                               {DesignKind::kPlaceBlock, 12}};
    CHECK(build_level(actions, cfg).walls.empty());
}

TEST_CASE("block placements beyond max_blocks are ignored") {
    const MazeConfig cfg = small_config(7, 7, 25);
    std::vector<DesignAction> actions = {{DesignKind::kPlaceStart, 0}, {DesignKind::kPlaceGoal, 48}};
    int placed = 0;
    for (int cell = 1; cell < 48 && placed < 30; ++cell, ++placed)
        actions.push_back({DesignKind::kPlaceBlock, cell});
    const MazeLevel level = build_level(actions, cfg);
    CHECK(level.walls.size() == 25);
}

TEST_CASE("build_level without a goal is an invalid design") {
    const MazeConfig cfg = small_config(5, 5);
    const std::vector<DesignAction> actions = {{DesignKind::kPlaceStart, 0}};
    CHECK_THROWS_AS(build_level(actions, cfg), PreconditionError);
    CHECK_THROWS_AS(build_level(std::vector<DesignAction>{}, cfg), PreconditionError);
}

TEST_CASE("build_level never violates level invariants under random designs") {
    const MazeConfig cfg = small_config(9, 9, 10);
    Rng rng(99);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<DesignAction> actions = {
            {DesignKind::kPlaceStart, rng.uniform_int(0, 80)},
            {DesignKind::kPlaceGoal, rng.uniform_int(0, 80)}};
        const int blocks = rng.uniform_int(0, 20);
        for (int b = 0; b < blocks; ++b)
            actions.push_back({DesignKind::kPlaceBlock, rng.uniform_int(0, 80)});

        const MazeLevel level = build_level(actions, cfg);
        CHECK(level.start != level.goal);
        CHECK(!level.walls.count(level.start));
        CHECK(!level.walls.count(level.goal));
        CHECK(level.walls.size() <= 10);
        for (const Cell& wall : level.walls) {
            CHECK(wall.x >= 0);
            CHECK(wall.x < 9);
            CHECK(wall.y >= 0);
            CHECK(wall.y < 9);
        }
    }
}

TEST_CASE("is_solvable on an empty maze and an enclosed goal") {
    MazeLevel level;
    level.width = 5;
    level.height = 5;
    level.start = {0, 0};
    level.goal = {4, 4};
    CHECK(is_solvable(level));

    level.walls = {{3, 4}, {4, 3}};  // goal in the corner, both approaches blocked
    CHECK(!is_solvable(level));
}

TEST_CASE("is_solvable agrees with exhaustive DFS on random 4x4 levels") {
    Rng rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        MazeLevel level;
        level.width = 4;
        level.height = 4;
        level.start = {rng.uniform_int(0, 3), rng.uniform_int(0, 3)};
        do {
            level.goal = {rng.uniform_int(0, 3), rng.uniform_int(0, 3)};
        } while (level.goal == level.start);
        const int walls = rng.uniform_int(0, 4);
        while (static_cast<int>(level.walls.size()) < walls) {
            const Cell c{rng.uniform_int(0, 3), rng.uniform_int(0, 3)};
            if (c != level.start && c != level.goal) level.walls.insert(c);
        }
        CHECK(is_solvable(level) == oracle_solvable(level));
    }
}

TEST_CASE("is_solvable matches DFS on all 4x4 levels with up to 4 walls") {
    // Full enumeration: every (start, goal) pair and every wall subset of
    // size <= 4 over the remaining cells.
    std::vector<Cell> cells;
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) cells.push_back({x, y});

    int count = 0;
    for (const Cell& start : cells) {
        for (const Cell& goal : cells) {
            if (goal == start) continue;
            std::vector<Cell> free_cells;
            for (const Cell& c : cells)
                if (c != start && c != goal) free_cells.push_back(c);

            // Subsets of size 0..4 via index combinations.
            std::vector<std::vector<int>> combos{{}};
            for (int size = 1; size <= 4; ++size) {
                std::vector<int> idx(size);
                for (int i = 0; i < size; ++i) idx[i] = i;
                while (true) {
                    combos.push_back(idx);
                    int i = size - 1;
                    while (i >= 0 && idx[i] == static_cast<int>(free_cells.size()) - size + i) --i;
                    if (i < 0) break;
                    ++idx[i];
                    for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
                }
            }
            for (const auto& combo : combos) {
                MazeLevel level;
                level.width = 4;
                level.height = 4;
                level.start = start;
                level.goal = goal;
                for (int i : combo) level.walls.insert(free_cells[i]);
                ++count;
                if (is_solvable(level) != oracle_solvable(level)) {
                    CAPTURE(render_ascii(level));
                    REQUIRE(is_solvable(level) == oracle_solvable(level));
                }
            }
        }
    }
    CHECK(count == 16 * 15 * (1 + 14 + 91 + 364 + 1001));
}

TEST_CASE("reaching the goal pays 1 - 0.9 t/T and terminates") {
    MazeConfig cfg = small_config(5, 5);
    cfg.horizon = 100;
    MazeLevel level;
    level.width = 5;
    level.height = 5;
    level.start = {0, 0};
    level.start_dir = kDirRight;
    level.goal = {4, 0};

    MazeEnv env(cfg);
    env.reset_level(level);
    env.step(kForward);  // t=0
    env.step(kForward);  // t=1
    env.step(kForward);  // t=2
    const StepResult result = env.step(kForward);  // t=3 reaches the goal
    CHECK(result.terminal);
    CHECK(result.reward == doctest::Approx(0.973));
}

TEST_CASE("forward into a wall leaves the position unchanged at zero reward") {
    MazeConfig cfg = small_config(5, 5);
    MazeLevel level;
    level.width = 5;
    level.height = 5;
    level.start = {0, 0};
    level.start_dir = kDirRight;
    level.goal = {4, 4};
    level.walls = {{1, 0}};

    MazeEnv env(cfg);
    env.reset_level(level);
    const StepResult result = env.step(kForward);
    CHECK(env.agent_pos() == Cell{0, 0});
    CHECK(result.reward == 0.0);
    CHECK(!result.terminal);
}

TEST_CASE("an episode that never finds the goal returns zero") {
    MazeConfig cfg = small_config(5, 5);
    cfg.horizon = 20;
    MazeLevel level;
    level.width = 5;
    level.height = 5;
    level.start = {0, 0};
    level.goal = {4, 4};

    MazeEnv env(cfg);
    env.reset_level(level);
    double total = 0.0;
    while (!env.done()) total += env.step(kTurnLeft).reward;
    CHECK(env.steps_taken() == 20);
    CHECK(total == 0.0);
}

TEST_CASE("ascii round trip is the identity up to the default facing") {
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        MazeLevel level;
        level.width = rng.uniform_int(2, 9);
        level.height = rng.uniform_int(2, 9);
        level.start = {rng.uniform_int(0, level.width - 1), rng.uniform_int(0, level.height - 1)};
        do {
            level.goal = {rng.uniform_int(0, level.width - 1),
                          rng.uniform_int(0, level.height - 1)};
        } while (level.goal == level.start);
        const int walls = rng.uniform_int(0, 6);
        while (static_cast<int>(level.walls.size()) < walls) {
            const Cell c{rng.uniform_int(0, level.width - 1), rng.uniform_int(0, level.height - 1)};
            if (c != level.start && c != level.goal) level.walls.insert(c);
        }
        const MazeLevel parsed = parse_ascii(render_ascii(level));
        CHECK(parsed == level);  // start_dir defaults equal by construction
    }
}

TEST_CASE("parse_ascii reports malformed inputs") {
    CHECK_THROWS_AS(parse_ascii("A..\n...\n..."), ParseError);    // missing G
    CHECK_THROWS_AS(parse_ascii("A.G\n.."), ParseError);          // non-rectangular
    CHECK_THROWS_AS(parse_ascii("AAG\n...\n..."), ParseError);    // duplicate A
    CHECK_THROWS_AS(parse_ascii("A.G\n.X.\n..."), ParseError);    // unknown character
    CHECK_THROWS_AS(parse_ascii(""), ParseError);
}

TEST_CASE("parse_ascii places walls, start, and goal from the text") {
    const MazeLevel level = parse_ascii("A.#\n...\n..G\n");
    CHECK(level.width == 3);
    CHECK(level.height == 3);
    CHECK(level.start == Cell{0, 0});
    CHECK(level.goal == Cell{2, 2});
    CHECK(level.walls == std::set<Cell>{{2, 0}});
}

TEST_CASE("observations are one-hot per window cell at every step") {
    const MazeConfig cfg = small_config(9, 9, 12);
    Rng rng(41);
    MazeEnv env(cfg);
    for (int episode = 0; episode < 30; ++episode) {
        std::vector<DesignAction> actions = {
            {DesignKind::kPlaceStart, rng.uniform_int(0, 80)},
            {DesignKind::kPlaceGoal, rng.uniform_int(0, 80)}};
        for (int b = rng.uniform_int(0, 12); b > 0; --b)
            actions.push_back({DesignKind::kPlaceBlock, rng.uniform_int(0, 80)});
        Observation obs = env.reset_level(build_level(actions, cfg));

        const int k = cfg.view_size;
        auto check_one_hot = [&](const Observation& o) {
            REQUIRE(static_cast<int>(o.features.size()) == 4 * k * k + 4);
            for (int cell = 0; cell < k * k; ++cell) {
                double sum = 0.0;
                for (int ch = 0; ch < 4; ++ch) sum += o.features[cell * 4 + ch];
                CHECK(sum == 1.0);
            }
            double facing = 0.0;
            for (int d = 0; d < 4; ++d) facing += o.features[4 * k * k + d];
            CHECK(facing == 1.0);
        };

        check_one_hot(obs);
        while (!env.done()) {
            const StepResult result = env.step(rng.uniform_int(0, kNumStudentActions - 1));
            check_one_hot(result.obs);
            if (result.terminal) break;
        }
    }
}

TEST_CASE("observation dimension is constant across levels of one family") {
    const MazeConfig cfg = small_config(13, 13);
    MazeEnv env(cfg);
    Rng rng(5);
    int dim = -1;
    for (int i = 0; i < 20; ++i) {
        std::vector<DesignAction> actions = {
            {DesignKind::kPlaceStart, rng.uniform_int(0, 168)},
            {DesignKind::kPlaceGoal, rng.uniform_int(0, 168)}};
        const Observation obs = env.reset_level(build_level(actions, cfg));
        if (dim < 0) dim = static_cast<int>(obs.features.size());
        CHECK(static_cast<int>(obs.features.size()) == dim);
    }
    CHECK(dim == maze_observation_dim(cfg));
    CHECK(dim == 4 * 5 * 5 + 4);
}
