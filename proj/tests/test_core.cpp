#include <doctest.h>

#include "divsp/core.hpp"
#include "divsp/maze_env.hpp"
#include "divsp/rng.hpp"

using namespace divsp;

namespace {

Trajectory traj_from_rewards(std::initializer_list<double> rewards) {
    Trajectory traj;
    for (double r : rewards) traj.steps.push_back({{}, 0, r, 0.0, false});
    return traj;
}

}  // namespace

TEST_CASE("discounted_return sums undiscounted rewards at gamma 1") {
    CHECK(discounted_return(traj_from_rewards({1, 1, 1}), 1.0) == doctest::Approx(3.0));
}

TEST_CASE("discounted_return keeps only the t=0 reward when later rewards are zero") {
    CHECK(discounted_return(traj_from_rewards({1, 0, 0}), 0.5) == doctest::Approx(1.0));
}

TEST_CASE("discounted_return discounts a late reward by gamma^t") {
    CHECK(discounted_return(traj_from_rewards({0, 0, 1}), 0.9) == doctest::Approx(0.81));
}

TEST_CASE("discounted_return rejects an empty trajectory") {
    CHECK_THROWS_AS(discounted_return(Trajectory{}, 0.9), PreconditionError);
}

TEST_CASE("discounted_return is linear in rewards") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        Trajectory traj;
        const int len = rng.uniform_int(1, 20);
        for (int i = 0; i < len; ++i)
            traj.steps.push_back({{}, 0, rng.uniform() * 4.0 - 2.0, 0.0, false});
        const double gamma = 0.5 + 0.5 * rng.uniform();
        const double c = rng.uniform() * 3.0;
        Trajectory scaled = traj;
        for (auto& step : scaled.steps) step.reward *= c;
        CHECK(discounted_return(scaled, gamma) ==
              doctest::Approx(c * discounted_return(traj, gamma)).epsilon(1e-12));
    }
}

TEST_CASE("environment resets to the start cell of an empty maze") {
    MazeConfig cfg;
    cfg.width = 5;
    cfg.height = 5;
    MazeLevel level;
    level.width = 5;
    level.height = 5;
    level.start = {0, 0};
    level.goal = {4, 4};

    MazeEnv env(cfg);
    const Observation obs = env.reset_level(level);
    CHECK(static_cast<int>(obs.features.size()) == env.observation_dim());
    CHECK(env.agent_pos() == Cell{0, 0});
    CHECK(env.agent_dir() == level.start_dir);
}

TEST_CASE("identical level and action sequence produce identical traces") {
    MazeConfig cfg;
    Rng level_rng(3);
    LevelParams level;
    level.family_id = kMazeFamilyId;
    level.encoding = {5, 100, 30, 31, 44, 60, 75};

    MazeEnv env_a(cfg);
    MazeEnv env_b(cfg);
    Observation obs_a = env_a.reset(level);
    Observation obs_b = env_b.reset(level);
    CHECK(obs_a == obs_b);

    Rng action_rng(17);
    while (!env_a.done()) {
        const int action = action_rng.uniform_int(0, kNumStudentActions - 1);
        const StepResult ra = env_a.step(action);
        const StepResult rb = env_b.step(action);
        CHECK(ra.obs == rb.obs);
        CHECK(ra.reward == rb.reward);
        CHECK(ra.terminal == rb.terminal);
        if (ra.terminal) break;
    }
}

TEST_CASE("stepping after the terminal state is a usage error") {
    MazeConfig cfg;
    cfg.width = 3;
    cfg.height = 3;
    MazeLevel level;
    level.width = 3;
    level.height = 3;
    level.start = {0, 1};
    level.start_dir = kDirRight;
    level.goal = {1, 1};

    MazeEnv env(cfg);
    env.reset_level(level);
    const StepResult result = env.step(kForward);
    CHECK(result.terminal);
    CHECK_THROWS_AS(env.step(kForward), UsageError);
}

TEST_CASE("stepping before reset is a usage error") {
    MazeEnv env(MazeConfig{});
    CHECK_THROWS_AS(env.step(kForward), UsageError);
}

TEST_CASE("unknown family id is a configuration error") {
    CHECK_THROWS_AS(make_environment("bipedal", MazeConfig{}), ConfigError);
    CHECK(make_environment(kMazeFamilyId, MazeConfig{}) != nullptr);
}
