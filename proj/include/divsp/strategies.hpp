#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "divsp/config.hpp"
#include "divsp/curriculum.hpp"
#include "divsp/eval.hpp"
#include "divsp/learner.hpp"
#include "divsp/maze_env.hpp"
#include "divsp/metrics.hpp"
#include "divsp/rng.hpp"

namespace divsp {

// Trainable level generator: a softmax-linear policy over design actions
// (one per cell, plus a stop action) with an EMA reward baseline.
struct GeneratorPolicy {
    PolicyParams params;
    double regret_baseline = 0.0;
};

// Generator action space: every cell index plus a trailing stop action.
int generator_num_actions(const MazeConfig& cfg);
// Generator observation: one-hot construction progress + occupancy grid.
int generator_observation_dim(const MazeConfig& cfg);

GeneratorPolicy make_generator(const MazeConfig& cfg);

Observation generator_observation(const MazeConfig& cfg, int step_index,
                                  std::span<const char> occupancy);

struct DesignStep {
    Observation obs;
    int action = 0;
    int valid_actions = 0;  // stop is masked while placing start and goal
};

struct DesignTrajectory {
    std::vector<DesignStep> steps;
};

// Rolls out the generator: start, goal, then up to max_blocks placements;
// the stop action ends placement early. Collisions become no-ops when the
// level is built.
std::pair<LevelParams, DesignTrajectory> generate_level(const GeneratorPolicy& gen,
                                                        const MazeConfig& cfg, Rng& rng);

// Domain-randomization construction: uniform start and goal, a block count
// uniform in [0, max_blocks], uniform block cells.
LevelParams random_level(const MazeConfig& cfg, Rng& rng);

// One episodic policy-gradient step with terminal-only reward `regret`
// against the running baseline; the baseline then absorbs the new value.
GeneratorPolicy train_generator(const GeneratorPolicy& gen, const DesignTrajectory& traj,
                                double regret, double lr);

// Rollout bundle for one policy on one level.
struct EpisodeBatch {
    std::vector<Trajectory> trajs;
    std::vector<double> returns;  // discounted episode returns
    std::vector<std::vector<double>> observations;
    std::uint64_t env_steps = 0;
};

EpisodeBatch collect_episodes(Environment& env, const LevelParams& level,
                              const PolicyParams& policy, int episodes, double gamma, Rng& rng);

// Per-iteration instrumentation for tests and debugging.
struct IterationTrace {
    std::uint64_t iteration = 0;
    bool generation_branch = false;
    std::uint64_t level_id = 0;
    std::optional<double> regret;
    std::vector<double> alice_returns;
    std::vector<double> bob_returns;
    std::uint64_t alice_version_at_collect = 0;
    std::uint64_t bob_version_at_collect = 0;
    bool bob_synced = false;
    bool alice_trained = false;
    bool generator_trained = false;
    bool reps_selected = false;
    std::optional<InsertOutcome::Kind> insert_outcome;
    bool sampled_from_buffer = false;
    bool entry_updated = false;
};

using IterationObserver = std::function<void(const IterationTrace&)>;

struct RunReport {
    ExperimentConfig config;
    std::vector<MetricsRow> rows;
    PolicyParams final_policy;  // Alice / the protagonist
    GeneratorPolicy final_generator;
    std::optional<LevelBuffer> buffer;
    std::optional<EvalResult> final_eval;
    std::uint64_t env_steps = 0;
    std::uint64_t iterations = 0;
};

// Knobs of the shared iteration driver. Each strategy is one setting; they
// are public so reductions between strategies can be tested directly.
struct DriverOptions {
    enum class GeneratorReward { kSelfPlayRegret, kNegativeReturn, kPairedRegret };

    bool generator_levels = true;  // level source: generator policy vs random construction
    bool train_gen = true;
    GeneratorReward gen_reward = GeneratorReward::kSelfPlayRegret;
    bool use_buffer = true;
    bool collect_bob = true;   // second self-play mind, snapshot only
    bool antagonist = false;   // independently trained second student
    double p = 0.5;            // probability of generating a new level
};

DriverOptions options_for_strategy(const ExperimentConfig& cfg);

RunReport run_with_options(const ExperimentConfig& cfg, const DriverOptions& opts,
                           const IterationObserver& observer = {});

RunReport run_strategy(const ExperimentConfig& cfg, const IterationObserver& observer = {});

RunReport run_divsp(const ExperimentConfig& cfg, const IterationObserver& observer = {});
RunReport run_dr(const ExperimentConfig& cfg, const IterationObserver& observer = {});
RunReport run_plr(const ExperimentConfig& cfg, const IterationObserver& observer = {});
RunReport run_minimax(const ExperimentConfig& cfg, const IterationObserver& observer = {});
RunReport run_paired(const ExperimentConfig& cfg, const IterationObserver& observer = {});

}  // namespace divsp
