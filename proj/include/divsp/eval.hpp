#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "divsp/learner.hpp"
#include "divsp/maze_env.hpp"
#include "divsp/rng.hpp"

namespace divsp {

struct EvalLevel {
    std::string name;
    MazeLevel level;
};

struct EvalResult {
    struct PerLevel {
        std::string name;
        double solved_rate = 0.0;
        double mean_return = 0.0;
        double mean_steps = 0.0;
    };
    std::vector<PerLevel> levels;
    double solved_rate = 0.0;
    double mean_return = 0.0;
    double return_stderr = 0.0;  // across all (level, episode) returns
};

// Loads every .maze file in the directory in filename order. Unsolvable
// levels are excluded with a warning on `warnings` when given.
std::vector<EvalLevel> load_eval_suite(const std::string& dir, std::ostream* warnings = nullptr);

// Zero-shot transfer evaluation. Greedy (argmax) action selection by
// default; pass an rng for stochastic rollouts instead. Returns are
// undiscounted episode reward sums.
EvalResult evaluate_policy(const PolicyParams& policy, std::span<const EvalLevel> suite,
                           const MazeConfig& cfg, int episodes, Rng* rng = nullptr);

}  // namespace divsp
