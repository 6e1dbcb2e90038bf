#include <doctest.h>

#include <cmath>
#include <vector>

#include "divsp/learner.hpp"
#include "divsp/maze_env.hpp"

using namespace divsp;

namespace {

Observation random_obs(int dim, Rng& rng) {
    Observation obs;
    for (int i = 0; i < dim; ++i) obs.features.push_back(rng.uniform() * 2.0 - 1.0);
    return obs;
}

PolicyParams random_policy(int num_actions, int dim, Rng& rng) {
    PolicyParams params = make_policy(num_actions, dim);
    for (double& w : params.actor) w = rng.uniform() * 2.0 - 1.0;
    for (double& w : params.critic) w = rng.uniform() * 2.0 - 1.0;
    return params;
}

// Independent gae_score recomputation: explicit TD errors, then the
// quadratic-time forward sum of (gamma*lambda)^{k-t} delta_k per t.
double gae_score_oracle(const Trajectory& traj, const GaeConfig& cfg) {
    const std::size_t n = traj.steps.size();
    std::vector<double> delta(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double next_value =
            (t + 1 < n) ? traj.steps[t + 1].value_estimate : traj.bootstrap_value;
        delta[t] = traj.steps[t].reward + cfg.gamma * next_value - traj.steps[t].value_estimate;
    }
    double total = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        double acc = 0.0;
        double scale = 1.0;
        for (std::size_t k = t; k < n; ++k) {
            acc += scale * delta[k];
            scale *= cfg.gamma * cfg.lambda;
        }
        total += std::max(acc, 0.0);
    }
    return total / static_cast<double>(n);
}

Trajectory traj_from_deltas(std::initializer_list<double> deltas) {
    // With zero value estimates and zero bootstrap, delta_t == r_t.
    Trajectory traj;
    for (double d : deltas) traj.steps.push_back({{}, 0, d, 0.0, false});
    return traj;
}

}  // namespace

TEST_CASE("zero weights give a uniform softmax") {
    const PolicyParams params = make_policy(3, 4);
    Observation obs{{0.3, -1.0, 0.5, 2.0}};
    for (double p : action_probabilities(params, obs))
        CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("a dominating logit saturates the softmax") {
    PolicyParams params = make_policy(3, 1);
    params.actor = {0.0, 1000.0, 0.0};
    Observation obs{{1.0}};
    const std::vector<double> probs = action_probabilities(params, obs);
    CHECK(probs[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(probs[0] < 1e-9);
    CHECK(probs[2] < 1e-9);
}

TEST_CASE("act is deterministic under a fixed rng seed") {
    Rng weights_rng(5);
    const PolicyParams params = random_policy(4, 6, weights_rng);
    const Observation obs = random_obs(6, weights_rng);

    Rng rng_a(123), rng_b(123);
    for (int i = 0; i < 200; ++i)
        CHECK(act(params, obs, rng_a).first == act(params, obs, rng_b).first);
}

TEST_CASE("act rejects a dimension mismatch") {
    const PolicyParams params = make_policy(3, 4);
    Observation obs{{1.0, 2.0}};
    Rng rng(1);
    CHECK_THROWS_AS(act(params, obs, rng), ConfigError);
}

TEST_CASE("gae_score clips wholly negative advantage traces to zero") {
    CHECK(gae_score(traj_from_deltas({-0.5, -0.1, -2.0}), {0.9, 0.95}) == 0.0);
}

TEST_CASE("gae_score reproduces the hand-evaluated fixture") {
    // gamma*lambda = 0.855: advantages (-0.208795, -0.829, 0.2), so only the
    // final step survives the clip and the mean is 0.2 / 3.
    const double score = gae_score(traj_from_deltas({0.5, -1.0, 0.2}), {0.9, 0.95});
    CHECK(std::abs(score - 0.0667) < 1e-4);
    CHECK(score == doctest::Approx(0.2 / 3.0).epsilon(1e-12));
}

TEST_CASE("gae_score at lambda 0 is the mean positive one-step TD error") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        Trajectory traj;
        const int len = rng.uniform_int(1, 12);
        for (int i = 0; i < len; ++i)
            traj.steps.push_back({{}, 0, rng.uniform() * 2 - 1, rng.uniform() * 2 - 1, false});
        traj.bootstrap_value = rng.uniform() * 2 - 1;
        const GaeConfig cfg{0.9, 0.0};

        double expected = 0.0;
        for (int t = 0; t < len; ++t) {
            const double next_value =
                (t + 1 < len) ? traj.steps[t + 1].value_estimate : traj.bootstrap_value;
            const double delta =
                traj.steps[t].reward + cfg.gamma * next_value - traj.steps[t].value_estimate;
            expected += std::max(delta, 0.0);
        }
        expected /= len;
        CHECK(gae_score(traj, cfg) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("gae_score matches the dynamic-programming oracle on random trajectories") {
    Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        Trajectory traj;
        const int len = rng.uniform_int(1, 30);
        for (int i = 0; i < len; ++i)
            traj.steps.push_back({{}, 0, rng.uniform() * 4 - 2, rng.uniform() * 2 - 1, false});
        traj.bootstrap_value = rng.uniform() * 2 - 1;
        const GaeConfig cfg{0.5 + 0.5 * rng.uniform(), rng.uniform()};
        CHECK(gae_score(traj, cfg) == doctest::Approx(gae_score_oracle(traj, cfg)).epsilon(1e-9));
        CHECK(gae_score(traj, cfg) >= 0.0);
    }
}

TEST_CASE("gae_score rejects an empty trajectory") {
    CHECK_THROWS_AS(gae_score(Trajectory{}, GaeConfig{}), PreconditionError);
}

TEST_CASE("self_play_regret is the signed mean difference") {
    const std::vector<double> alice{1.0, 0.6};
    const std::vector<double> bob{0.2, 0.4};
    CHECK(self_play_regret(alice, bob) == doctest::Approx(0.5));
    CHECK(self_play_regret(alice, alice) == 0.0);
    CHECK(self_play_regret(std::vector<double>{0.1}, std::vector<double>{0.9}) ==
          doctest::Approx(-0.8));
    CHECK_THROWS_AS(self_play_regret({}, bob), PreconditionError);
}

TEST_CASE("self_play_regret is antisymmetric") {
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a, b;
        for (int i = rng.uniform_int(1, 6); i > 0; --i) a.push_back(rng.uniform());
        for (int i = rng.uniform_int(1, 6); i > 0; --i) b.push_back(rng.uniform());
        CHECK(self_play_regret(a, b) == doctest::Approx(-self_play_regret(b, a)).epsilon(1e-12));
    }
}

TEST_CASE("paired_regret is antagonist minus protagonist") {
    CHECK(paired_regret(std::vector<double>{0.3}, std::vector<double>{0.9}) ==
          doctest::Approx(0.6));
    CHECK(paired_regret(std::vector<double>{0.4}, std::vector<double>{0.4}) == 0.0);
    CHECK(paired_regret(std::vector<double>{0.5}, std::vector<double>{0.0}) ==
          doctest::Approx(-0.5));
}

TEST_CASE("sync_bob copies Alice exactly and is idempotent") {
    Rng rng(3);
    AgentPair pair{random_policy(3, 8, rng), make_policy(3, 8)};
    pair.alice.version = 7;

    sync_bob(pair);
    CHECK(pair.bob.version == 7);
    for (int i = 0; i < 1000; ++i) {
        const Observation obs = random_obs(8, rng);
        const auto pa = action_probabilities(pair.alice, obs);
        const auto pb = action_probabilities(pair.bob, obs);
        for (std::size_t a = 0; a < pa.size(); ++a)
            CHECK(std::abs(pa[a] - pb[a]) <= 1e-12);
    }

    const AgentPair snapshot = pair;
    sync_bob(pair);
    CHECK(pair.bob.actor == snapshot.bob.actor);
    CHECK(pair.bob.critic == snapshot.bob.critic);
}

TEST_CASE("after sync, training Alice leaves Bob untouched") {
    Rng rng(9);
    AgentPair pair{random_policy(3, 4, rng), make_policy(3, 4)};
    sync_bob(pair);
    const PolicyParams bob_before = pair.bob;

    Trajectory traj;
    for (int i = 0; i < 5; ++i) {
        TrajectoryStep step;
        step.obs = random_obs(4, rng);
        step.action = rng.uniform_int(0, 2);
        step.reward = rng.uniform();
        step.value_estimate = value_estimate(pair.alice, step.obs);
        traj.steps.push_back(step);
    }
    TrainConfig cfg;
    pair.alice = train_step(pair.alice, std::vector<Trajectory>{traj}, cfg);

    CHECK(pair.alice.actor != pair.bob.actor);
    CHECK(pair.bob.actor == bob_before.actor);
    CHECK(pair.alice.version == bob_before.version + 1);
}

TEST_CASE("train_step with zero advantages leaves the actor unchanged") {
    Rng rng(21);
    const PolicyParams params = random_policy(3, 5, rng);
    Trajectory traj;
    for (int i = 0; i < 6; ++i) traj.steps.push_back({random_obs(5, rng), 1, 0.0, 0.0, false});
    traj.bootstrap_value = 0.0;

    TrainConfig cfg;
    cfg.entropy_weight = 0.0;
    const PolicyParams updated = train_step(params, std::vector<Trajectory>{traj}, cfg);
    CHECK(updated.actor == params.actor);
    CHECK(updated.critic == params.critic);
    CHECK(updated.version == params.version + 1);
}

TEST_CASE("log-prob gradient matches central finite differences") {
    Rng rng(55);
    const double h = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
        const int num_actions = rng.uniform_int(2, 5);
        const int dim = rng.uniform_int(2, 7);
        PolicyParams params = random_policy(num_actions, dim, rng);
        const Observation obs = random_obs(dim, rng);
        const int action = rng.uniform_int(0, num_actions - 1);

        const std::vector<double> analytic = log_prob_gradient(params, obs, action);
        double max_diff = 0.0;
        for (std::size_t w = 0; w < params.actor.size(); ++w) {
            PolicyParams plus = params, minus = params;
            plus.actor[w] += h;
            minus.actor[w] -= h;
            const double fd =
                (log_prob(plus, obs, action) - log_prob(minus, obs, action)) / (2 * h);
            max_diff = std::max(max_diff, std::abs(fd - analytic[w]));
        }
        CHECK(max_diff < 1e-5);
    }
}

TEST_CASE("masked log-prob gradient matches finite differences") {
    Rng rng(56);
    for (int trial = 0; trial < 20; ++trial) {
        const int num_actions = 5;
        const int dim = 4;
        PolicyParams params = random_policy(num_actions, dim, rng);
        const Observation obs = random_obs(dim, rng);
        const int valid = 4;  // last action masked
        const int action = rng.uniform_int(0, valid - 1);

        const std::vector<double> analytic = log_prob_gradient(params, obs, action, valid);
        const double h = 1e-6;
        double max_diff = 0.0;
        for (std::size_t w = 0; w < params.actor.size(); ++w) {
            PolicyParams plus = params, minus = params;
            plus.actor[w] += h;
            minus.actor[w] -= h;
            const double fd = (log_prob(plus, obs, action, valid) -
                               log_prob(minus, obs, action, valid)) /
                              (2 * h);
            max_diff = std::max(max_diff, std::abs(fd - analytic[w]));
        }
        CHECK(max_diff < 1e-5);
        // Masked rows carry no gradient.
        for (int j = 0; j < dim; ++j)
            CHECK(analytic[static_cast<std::size_t>(valid) * dim + j] == 0.0);
    }
}

TEST_CASE("train_step is deterministic") {
    Rng rng(61);
    const PolicyParams params = random_policy(3, 6, rng);
    std::vector<Trajectory> batch;
    for (int e = 0; e < 3; ++e) {
        Trajectory traj;
        for (int i = 0; i < 8; ++i)
            traj.steps.push_back({random_obs(6, rng), rng.uniform_int(0, 2),
                                  rng.uniform() * 2 - 1, rng.uniform() * 2 - 1, false});
        traj.bootstrap_value = rng.uniform();
        batch.push_back(std::move(traj));
    }
    TrainConfig cfg;
    cfg.entropy_weight = 0.01;
    const PolicyParams a = train_step(params, batch, cfg);
    const PolicyParams b = train_step(params, batch, cfg);
    CHECK(a.actor == b.actor);
    CHECK(a.critic == b.critic);
}

TEST_CASE("clipped-ratio variant also improves and stays finite") {
    Rng rng(62);
    const PolicyParams params = random_policy(3, 4, rng);
    std::vector<Trajectory> batch;
    Trajectory traj;
    for (int i = 0; i < 10; ++i)
        traj.steps.push_back({random_obs(4, rng), rng.uniform_int(0, 2), rng.uniform(), 0.0, false});
    batch.push_back(traj);

    TrainConfig cfg;
    cfg.clipped_ratio = true;
    cfg.epochs = 4;
    const PolicyParams updated = train_step(params, batch, cfg);
    CHECK(updated.actor != params.actor);
    CHECK(updated.version == params.version + 1);
}

TEST_CASE("500 train steps beat the uniform policy on a bandit-like maze") {
    // One forward step from the start reaches the goal; the optimal policy
    // is a single saturated action.
    MazeConfig cfg;
    cfg.width = 3;
    cfg.height = 3;
    cfg.horizon = 10;
    MazeLevel level;
    level.width = 3;
    level.height = 3;
    level.start = {1, 1};
    level.start_dir = kDirUp;
    level.goal = {1, 0};

    MazeEnv env(cfg);
    const int dim = env.observation_dim();
    TrainConfig train_cfg;
    train_cfg.gae = {0.9, 0.95};
    train_cfg.actor_lr = 0.3;
    train_cfg.critic_lr = 0.2;
    train_cfg.entropy_weight = 0.0;

    auto mean_return = [&](const PolicyParams& params, Rng& rng, int episodes) {
        double total = 0.0;
        for (int e = 0; e < episodes; ++e) {
            Observation obs = env.reset_level(level);
            double ret = 0.0;
            while (!env.done()) {
                const StepResult r = env.step(act(params, obs, rng).first);
                ret += r.reward;
                obs = r.obs;
                if (r.terminal) break;
            }
            total += ret;
        }
        return total / episodes;
    };

    Rng baseline_rng(100);
    const double uniform_baseline = mean_return(make_policy(kNumStudentActions, dim), baseline_rng, 300);

    PolicyParams params = make_policy(kNumStudentActions, dim);
    Rng train_rng(101);
    for (int step = 0; step < 500; ++step) {
        std::vector<Trajectory> batch;
        for (int e = 0; e < 4; ++e) {
            Trajectory traj;
            Observation obs = env.reset_level(level);
            while (!env.done()) {
                const auto [action, lp] = act(params, obs, train_rng);
                const StepResult r = env.step(action);
                traj.steps.push_back({obs, action, r.reward, value_estimate(params, obs),
                                      r.terminal});
                obs = r.obs;
                if (r.terminal) break;
            }
            traj.bootstrap_value =
                traj.steps.back().terminal ? 0.0 : value_estimate(params, obs);
            batch.push_back(std::move(traj));
        }
        params = train_step(params, batch, train_cfg);
    }

    Rng eval_rng(102);
    const double trained = mean_return(params, eval_rng, 300);
    CHECK(trained > uniform_baseline);
    CHECK(params.version == 500);
}
