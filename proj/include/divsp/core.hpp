#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "divsp/errors.hpp"

namespace divsp {

// Free parameters of one level: an environment-family tag, the sequence of
// design actions that constructs the instance, and a construction seed.
struct LevelParams {
    std::string family_id;
    std::vector<int> encoding;
    std::uint64_t seed = 0;

    bool operator==(const LevelParams&) const = default;
};

// Fixed-length feature vector; the dimension is constant per family.
struct Observation {
    std::vector<double> features;

    bool operator==(const Observation&) const = default;
};

struct TrajectoryStep {
    Observation obs;
    int action = 0;
    double reward = 0.0;
    double value_estimate = 0.0;  // critic output at obs
    bool terminal = false;
};

// One episode. bootstrap_value is the critic value of the post-final
// observation; zero when the episode ended in a terminal state.
struct Trajectory {
    std::vector<TrajectoryStep> steps;
    double bootstrap_value = 0.0;
};

// Monte-Carlo return sum_t gamma^t r_t over the episode, no bootstrap term.
double discounted_return(const Trajectory& traj, double gamma);

struct StepResult {
    Observation obs;
    double reward = 0.0;
    bool terminal = false;
};

// Level-parameterized POMDP. Deterministic given (level, seed, actions);
// instances are single-threaded and share no state.
class Environment {
public:
    virtual ~Environment() = default;

    virtual Observation reset(const LevelParams& level) = 0;
    virtual StepResult step(int action) = 0;

    virtual int observation_dim() const = 0;
    virtual int num_actions() const = 0;
    virtual int horizon() const = 0;

    // True once the episode terminated or the horizon was exhausted.
    virtual bool done() const = 0;
};

}  // namespace divsp
