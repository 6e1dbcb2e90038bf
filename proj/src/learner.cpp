#include "divsp/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace divsp {

namespace {

void check_dims(const PolicyParams& params, const Observation& obs) {
    if (static_cast<int>(obs.features.size()) != params.obs_dim)
        throw ConfigError("policy/observation dimension mismatch");
    if (params.actor.size() != static_cast<std::size_t>(params.num_actions) * params.obs_dim ||
        params.critic.size() != static_cast<std::size_t>(params.obs_dim))
        throw ConfigError("policy weight dimensions are inconsistent");
}

int resolve_valid(const PolicyParams& params, int valid_actions) {
    if (valid_actions < 0) return params.num_actions;
    if (valid_actions == 0 || valid_actions > params.num_actions)
        throw ConfigError("invalid action mask size");
    return valid_actions;
}

std::vector<double> logits(const PolicyParams& params, const Observation& obs, int valid) {
    std::vector<double> z(static_cast<std::size_t>(valid));
    for (int a = 0; a < valid; ++a) {
        const double* row = params.actor.data() + static_cast<std::size_t>(a) * params.obs_dim;
        z[a] = std::inner_product(row, row + params.obs_dim, obs.features.data(), 0.0);
    }
    return z;
}

std::vector<double> softmax(std::vector<double> z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
    return z;
}

}  // namespace

PolicyParams make_policy(int num_actions, int obs_dim) {
    PolicyParams params;
    params.num_actions = num_actions;
    params.obs_dim = obs_dim;
    params.actor.assign(static_cast<std::size_t>(num_actions) * obs_dim, 0.0);
    params.critic.assign(static_cast<std::size_t>(obs_dim), 0.0);
    return params;
}

std::vector<double> action_probabilities(const PolicyParams& params, const Observation& obs,
                                         int valid_actions) {
    check_dims(params, obs);
    const int valid = resolve_valid(params, valid_actions);
    return softmax(logits(params, obs, valid));
}

double value_estimate(const PolicyParams& params, const Observation& obs) {
    check_dims(params, obs);
    return std::inner_product(params.critic.begin(), params.critic.end(), obs.features.begin(), 0.0);
}

std::pair<int, double> act(const PolicyParams& params, const Observation& obs, Rng& rng,
                           int valid_actions) {
    const std::vector<double> probs = action_probabilities(params, obs, valid_actions);
    const int action = rng.categorical(probs);
    return {action, std::log(probs[action])};
}

int act_greedy(const PolicyParams& params, const Observation& obs) {
    const std::vector<double> probs = action_probabilities(params, obs);
    return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

double log_prob(const PolicyParams& params, const Observation& obs, int action, int valid_actions) {
    const std::vector<double> probs = action_probabilities(params, obs, valid_actions);
    if (action < 0 || action >= static_cast<int>(probs.size()))
        throw PreconditionError("log_prob: action outside the valid set");
    return std::log(probs[action]);
}

std::vector<double> log_prob_gradient(const PolicyParams& params, const Observation& obs,
                                      int action, int valid_actions) {
    const std::vector<double> probs = action_probabilities(params, obs, valid_actions);
    if (action < 0 || action >= static_cast<int>(probs.size()))
        throw PreconditionError("log_prob_gradient: action outside the valid set");
    std::vector<double> grad(params.actor.size(), 0.0);
    for (int a = 0; a < static_cast<int>(probs.size()); ++a) {
        const double coeff = (a == action ? 1.0 : 0.0) - probs[a];
        double* row = grad.data() + static_cast<std::size_t>(a) * params.obs_dim;
        for (int j = 0; j < params.obs_dim; ++j) row[j] = coeff * obs.features[j];
    }
    return grad;
}

std::vector<double> gae_advantages(const Trajectory& traj, const GaeConfig& cfg) {
    if (traj.steps.empty()) throw PreconditionError("gae_advantages: empty trajectory");
    const std::size_t n = traj.steps.size();
    std::vector<double> adv(n);
    double next_value = traj.bootstrap_value;
    double acc = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        const TrajectoryStep& step = traj.steps[i];
        const double delta = step.reward + cfg.gamma * next_value - step.value_estimate;
        acc = delta + cfg.gamma * cfg.lambda * acc;
        adv[i] = acc;
        next_value = step.value_estimate;
    }
    return adv;
}

double gae_score(const Trajectory& traj, const GaeConfig& cfg) {
    const std::vector<double> adv = gae_advantages(traj, cfg);
    double sum = 0.0;
    for (double a : adv) sum += std::max(a, 0.0);
    return sum / static_cast<double>(adv.size());
}

double self_play_regret(std::span<const double> alice_returns, std::span<const double> bob_returns) {
    if (alice_returns.empty() || bob_returns.empty())
        throw PreconditionError("self_play_regret: empty return sequence");
    const double alice = std::accumulate(alice_returns.begin(), alice_returns.end(), 0.0) /
                         static_cast<double>(alice_returns.size());
    const double bob = std::accumulate(bob_returns.begin(), bob_returns.end(), 0.0) /
                       static_cast<double>(bob_returns.size());
    return alice - bob;
}

double paired_regret(std::span<const double> protagonist_returns,
                     std::span<const double> antagonist_returns) {
    return self_play_regret(antagonist_returns, protagonist_returns);
}

void sync_bob(AgentPair& pair) { pair.bob = pair.alice; }

PolicyParams train_step(const PolicyParams& params, std::span<const Trajectory> trajs,
                        const TrainConfig& cfg) {
    if (trajs.empty()) throw PreconditionError("train_step: empty batch");

    std::size_t total_steps = 0;
    for (const Trajectory& traj : trajs) total_steps += traj.steps.size();
    if (total_steps == 0) throw PreconditionError("train_step: batch has no steps");
    const double inv_n = 1.0 / static_cast<double>(total_steps);

    PolicyParams out = params;

    // Behavior log-probs under the incoming params anchor the clipped ratio.
    std::vector<std::vector<double>> old_log_probs;
    if (cfg.clipped_ratio) {
        old_log_probs.reserve(trajs.size());
        for (const Trajectory& traj : trajs) {
            std::vector<double> lps;
            lps.reserve(traj.steps.size());
            for (const TrajectoryStep& step : traj.steps)
                lps.push_back(log_prob(params, step.obs, step.action));
            old_log_probs.push_back(std::move(lps));
        }
    }

    const int epochs = cfg.clipped_ratio ? std::max(cfg.epochs, 1) : 1;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::vector<double> actor_grad(out.actor.size(), 0.0);
        std::vector<double> critic_grad(out.critic.size(), 0.0);

        for (std::size_t ti = 0; ti < trajs.size(); ++ti) {
            const Trajectory& traj = trajs[ti];
            const std::vector<double> adv = gae_advantages(traj, cfg.gae);
            for (std::size_t si = 0; si < traj.steps.size(); ++si) {
                const TrajectoryStep& step = traj.steps[si];
                const std::vector<double> probs = action_probabilities(out, step.obs);

                double policy_coeff = adv[si];
                if (cfg.clipped_ratio) {
                    const double ratio = std::exp(std::log(probs[step.action]) - old_log_probs[ti][si]);
                    const bool clipped = (adv[si] > 0.0 && ratio > 1.0 + cfg.clip_epsilon) ||
                                         (adv[si] < 0.0 && ratio < 1.0 - cfg.clip_epsilon);
                    policy_coeff = clipped ? 0.0 : ratio * adv[si];
                }

                double entropy = 0.0;
                if (cfg.entropy_weight != 0.0)
                    for (double p : probs) entropy -= p * std::log(std::max(p, 1e-300));

                for (int a = 0; a < out.num_actions; ++a) {
                    double coeff = policy_coeff * ((a == step.action ? 1.0 : 0.0) - probs[a]);
                    if (cfg.entropy_weight != 0.0)
                        coeff += cfg.entropy_weight *
                                 (-probs[a] * (std::log(std::max(probs[a], 1e-300)) + entropy));
                    if (coeff == 0.0) continue;
                    double* row = actor_grad.data() + static_cast<std::size_t>(a) * out.obs_dim;
                    for (int j = 0; j < out.obs_dim; ++j) row[j] += coeff * step.obs.features[j];
                }

                // Critic fitted toward the lambda-return A_t + V(o_t).
                const double target = adv[si] + step.value_estimate;
                const double err = target - value_estimate(out, step.obs);
                for (int j = 0; j < out.obs_dim; ++j) critic_grad[j] += err * step.obs.features[j];
            }
        }

        for (std::size_t i = 0; i < out.actor.size(); ++i)
            out.actor[i] += cfg.actor_lr * inv_n * actor_grad[i];
        for (std::size_t i = 0; i < out.critic.size(); ++i)
            out.critic[i] += cfg.critic_lr * inv_n * critic_grad[i];
    }

    for (double w : out.actor)
        if (!std::isfinite(w)) throw NumericalError("train_step: non-finite actor weight after update");
    for (double w : out.critic)
        if (!std::isfinite(w)) throw NumericalError("train_step: non-finite critic weight after update");

    out.version = params.version + 1;
    return out;
}

Trajectory rollout_episode(Environment& env, const LevelParams& level, const PolicyParams& params,
                           Rng& rng) {
    Trajectory traj;
    Observation obs = env.reset(level);
    while (!env.done()) {
        const auto [action, lp] = act(params, obs, rng);
        (void)lp;
        StepResult result = env.step(action);
        traj.steps.push_back({obs, action, result.reward, value_estimate(params, obs), result.terminal});
        obs = std::move(result.obs);
        if (result.terminal) break;
    }
    traj.bootstrap_value =
        (!traj.steps.empty() && traj.steps.back().terminal) ? 0.0 : value_estimate(params, obs);
    return traj;
}

}  // namespace divsp
