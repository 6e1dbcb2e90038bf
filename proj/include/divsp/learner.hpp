#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "divsp/core.hpp"
#include "divsp/rng.hpp"

namespace divsp {

// Softmax-linear actor plus linear critic over the observation features.
struct PolicyParams {
    int num_actions = 0;
    int obs_dim = 0;
    std::vector<double> actor;   // num_actions x obs_dim, row-major
    std::vector<double> critic;  // obs_dim
    std::uint64_t version = 0;
};

PolicyParams make_policy(int num_actions, int obs_dim);

// The self-play student pair: Alice is the live policy, Bob her snapshot.
struct AgentPair {
    PolicyParams alice;
    PolicyParams bob;
};

struct GaeConfig {
    double gamma = 0.995;
    double lambda = 0.95;
};

struct TrainConfig {
    GaeConfig gae;
    double actor_lr = 0.05;
    double critic_lr = 0.05;
    double entropy_weight = 0.0;
    bool clipped_ratio = false;  // clipped-ratio objective instead of plain A2C
    double clip_epsilon = 0.2;
    int epochs = 3;  // only used by the clipped-ratio variant
};

// Action probabilities over action ids [0, valid_actions). valid_actions of
// -1 means the full action set; a shorter prefix realizes masked sampling
// for the generator's design schedule.
std::vector<double> action_probabilities(const PolicyParams& params, const Observation& obs,
                                         int valid_actions = -1);

double value_estimate(const PolicyParams& params, const Observation& obs);

std::pair<int, double> act(const PolicyParams& params, const Observation& obs, Rng& rng,
                           int valid_actions = -1);
int act_greedy(const PolicyParams& params, const Observation& obs);

double log_prob(const PolicyParams& params, const Observation& obs, int action,
                int valid_actions = -1);

// d log pi(action | obs) / d actor, as a num_actions x obs_dim matrix.
std::vector<double> log_prob_gradient(const PolicyParams& params, const Observation& obs,
                                      int action, int valid_actions = -1);

// Signed lambda-advantages A_t = sum_k (gamma*lambda)^{k-t} delta_k.
std::vector<double> gae_advantages(const Trajectory& traj, const GaeConfig& cfg);

// Positive value loss: mean over steps of max(A_t, 0). Always >= 0.
double gae_score(const Trajectory& traj, const GaeConfig& cfg);

// Self-play regret estimate: mean(alice) - mean(bob), signed.
double self_play_regret(std::span<const double> alice_returns, std::span<const double> bob_returns);

// Protagonist/antagonist regret estimate: mean(antagonist) - mean(protagonist).
double paired_regret(std::span<const double> protagonist_returns,
                     std::span<const double> antagonist_returns);

// Bob becomes an element-wise copy of Alice, version included. Idempotent.
void sync_bob(AgentPair& pair);

// One advantage-actor-critic update over the batch; returns the new params
// with version incremented. Deterministic given inputs.
PolicyParams train_step(const PolicyParams& params, std::span<const Trajectory> trajs,
                        const TrainConfig& cfg);

// Runs one stochastic episode of the policy on the given level.
Trajectory rollout_episode(Environment& env, const LevelParams& level, const PolicyParams& params,
                           Rng& rng);

}  // namespace divsp
