#pragma once

#include <cstdint>
#include <string>

#include "divsp/curriculum.hpp"
#include "divsp/diversity.hpp"
#include "divsp/learner.hpp"
#include "divsp/maze_env.hpp"

namespace divsp {

enum class StrategyKind { kDivSP, kDR, kPLR, kMinimax, kPaired };

std::string strategy_name(StrategyKind kind);
StrategyKind strategy_from_name(const std::string& name);  // ConfigError on unknown

// Full description of one seeded run. Every field is explicit; the run
// manifest echoes all resolved values.
struct ExperimentConfig {
    MazeConfig env;
    TrainConfig learner;
    ReplayConfig replay;       // replacement rule is derived from the strategy
    DiversityConfig diversity;

    StrategyKind strategy = StrategyKind::kDivSP;
    int episodes_per_eval = 2;     // episodes per student per level visit
    double generator_lr = 0.05;
    bool use_gae_regret = false;   // score-difference regret estimator instead of returns

    std::uint64_t total_env_steps = 0;
    std::uint64_t max_iterations = 0;  // 0 = no iteration cap
    std::uint64_t seed = 0;

    int eval_interval = 0;  // iterations between held-out evaluations; 0 = final only
    int eval_episodes = 1;
    std::string eval_suite_path;
    std::string output_dir;
};

// Strict JSON loader: unknown keys, wrong types, and out-of-range values
// raise ConfigError naming the offending field. The seed must be explicit.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);

// Full round-trippable echo of a resolved config.
std::string experiment_config_to_json(const ExperimentConfig& cfg);

}  // namespace divsp
