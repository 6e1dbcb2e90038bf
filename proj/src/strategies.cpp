#include "divsp/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace divsp {

int generator_num_actions(const MazeConfig& cfg) { return cfg.width * cfg.height + 1; }

int generator_observation_dim(const MazeConfig& cfg) {
    return (2 + cfg.max_blocks) + cfg.width * cfg.height;
}

GeneratorPolicy make_generator(const MazeConfig& cfg) {
    return GeneratorPolicy{make_policy(generator_num_actions(cfg), generator_observation_dim(cfg)),
                           0.0};
}

Observation generator_observation(const MazeConfig& cfg, int step_index,
                                  std::span<const char> occupancy) {
    const int budget = 2 + cfg.max_blocks;
    Observation obs;
    obs.features.assign(static_cast<std::size_t>(generator_observation_dim(cfg)), 0.0);
    obs.features[static_cast<std::size_t>(std::min(step_index, budget - 1))] = 1.0;
    for (std::size_t c = 0; c < occupancy.size(); ++c)
        if (occupancy[c]) obs.features[static_cast<std::size_t>(budget) + c] = 1.0;
    return obs;
}

std::pair<LevelParams, DesignTrajectory> generate_level(const GeneratorPolicy& gen,
                                                        const MazeConfig& cfg, Rng& rng) {
    const int num_cells = cfg.width * cfg.height;
    const int stop_action = num_cells;
    const int budget = 2 + cfg.max_blocks;

    LevelParams level;
    level.family_id = kMazeFamilyId;
    level.seed = rng.next_u64();

    DesignTrajectory dtraj;
    std::vector<char> occupancy(static_cast<std::size_t>(num_cells), 0);
    int start_cell = -1;
    int goal_cell = -1;
    std::set<int> wall_cells;

    for (int step = 0; step < budget; ++step) {
        const Observation obs = generator_observation(cfg, step, occupancy);
        const int valid = step < 2 ? num_cells : num_cells + 1;
        const auto [action, lp] = act(gen.params, obs, rng, valid);
        (void)lp;
        dtraj.steps.push_back({obs, action, valid});
        if (action == stop_action) break;

        level.encoding.push_back(action);
        if (step == 0) {
            start_cell = action;
            occupancy[action] = 1;
        } else if (step == 1) {
            // Mirror the builder's collision shift so the occupancy view
            // matches the level actually produced.
            goal_cell = (action == start_cell) ? (action + 1) % num_cells : action;
            occupancy[goal_cell] = 1;
        } else if (action != start_cell && action != goal_cell && !wall_cells.count(action)) {
            wall_cells.insert(action);
            occupancy[action] = 1;
        }
    }
    return {std::move(level), std::move(dtraj)};
}

LevelParams random_level(const MazeConfig& cfg, Rng& rng) {
    const int num_cells = cfg.width * cfg.height;
    LevelParams level;
    level.family_id = kMazeFamilyId;
    level.seed = rng.next_u64();
    level.encoding.push_back(rng.uniform_int(0, num_cells - 1));  // start
    level.encoding.push_back(rng.uniform_int(0, num_cells - 1));  // goal
    const int blocks = rng.uniform_int(0, cfg.max_blocks);
    for (int b = 0; b < blocks; ++b) level.encoding.push_back(rng.uniform_int(0, num_cells - 1));
    return level;
}

GeneratorPolicy train_generator(const GeneratorPolicy& gen, const DesignTrajectory& traj,
                                double regret, double lr) {
    if (!std::isfinite(regret)) throw NumericalError("train_generator: non-finite regret");
    if (traj.steps.empty()) throw PreconditionError("train_generator: empty design trajectory");

    GeneratorPolicy out = gen;
    const double advantage = regret - gen.regret_baseline;
    if (advantage != 0.0) {
        std::vector<double> grad(out.params.actor.size(), 0.0);
        for (const DesignStep& step : traj.steps) {
            const std::vector<double> g =
                log_prob_gradient(gen.params, step.obs, step.action, step.valid_actions);
            for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
        }
        for (std::size_t i = 0; i < grad.size(); ++i) out.params.actor[i] += lr * advantage * grad[i];
        for (double w : out.params.actor)
            if (!std::isfinite(w))
                throw NumericalError("train_generator: non-finite weight after update");
    }
    out.params.version = gen.params.version + 1;
    out.regret_baseline = 0.99 * gen.regret_baseline + 0.01 * regret;
    return out;
}

EpisodeBatch collect_episodes(Environment& env, const LevelParams& level,
                              const PolicyParams& policy, int episodes, double gamma, Rng& rng) {
    EpisodeBatch batch;
    for (int ep = 0; ep < episodes; ++ep) {
        Trajectory traj = rollout_episode(env, level, policy, rng);
        batch.env_steps += traj.steps.size();
        batch.returns.push_back(discounted_return(traj, gamma));
        for (const TrajectoryStep& step : traj.steps) batch.observations.push_back(step.obs.features);
        batch.trajs.push_back(std::move(traj));
    }
    return batch;
}

DriverOptions options_for_strategy(const ExperimentConfig& cfg) {
    DriverOptions opts;
    switch (cfg.strategy) {
        case StrategyKind::kDivSP:
            opts = {true, true, DriverOptions::GeneratorReward::kSelfPlayRegret,
                    true, true, false, cfg.replay.p};
            break;
        case StrategyKind::kDR:
            opts = {false, false, DriverOptions::GeneratorReward::kSelfPlayRegret,
                    false, false, false, 1.0};
            break;
        case StrategyKind::kPLR:
            opts = {false, false, DriverOptions::GeneratorReward::kSelfPlayRegret,
                    true, false, false, cfg.replay.p};
            break;
        case StrategyKind::kMinimax:
            opts = {true, true, DriverOptions::GeneratorReward::kNegativeReturn,
                    false, false, false, 1.0};
            break;
        case StrategyKind::kPaired:
            opts = {true, true, DriverOptions::GeneratorReward::kPairedRegret,
                    false, false, true, 1.0};
            break;
    }
    return opts;
}

namespace {

double mean_of(std::span<const double> values) {
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

double mean_gae_score(std::span<const Trajectory> trajs, const GaeConfig& cfg) {
    double total = 0.0;
    for (const Trajectory& traj : trajs) total += gae_score(traj, cfg);
    return total / static_cast<double>(trajs.size());
}

}  // namespace

RunReport run_with_options(const ExperimentConfig& cfg, const DriverOptions& opts,
                           const IterationObserver& observer) {
    Rng rng(cfg.seed);
    MazeEnv env(cfg.env);
    const int obs_dim = env.observation_dim();

    AgentPair pair{make_policy(kNumStudentActions, obs_dim),
                   make_policy(kNumStudentActions, obs_dim)};
    PolicyParams antagonist = make_policy(kNumStudentActions, obs_dim);
    GeneratorPolicy gen = make_generator(cfg.env);

    std::optional<LevelBuffer> buffer;
    if (opts.use_buffer) buffer.emplace(cfg.replay);

    std::vector<EvalLevel> suite;
    if (!cfg.eval_suite_path.empty()) suite = load_eval_suite(cfg.eval_suite_path);

    RunReport report;
    report.config = cfg;

    const std::string strategy = strategy_name(cfg.strategy);
    std::uint64_t env_steps = 0;
    std::uint64_t iteration = 0;
    std::uint64_t next_level_id = 1;

    while (env_steps < cfg.total_env_steps &&
           (cfg.max_iterations == 0 || iteration < cfg.max_iterations)) {
        ++iteration;
        IterationTrace trace;
        trace.iteration = iteration;
        trace.alice_version_at_collect = pair.alice.version;
        trace.bob_version_at_collect = pair.bob.version;

        const double epsilon = rng.uniform();
        const bool generate =
            epsilon <= opts.p || !opts.use_buffer || buffer->size() == 0;
        trace.generation_branch = generate;

        LevelParams level;
        DesignTrajectory design_traj;
        std::uint64_t level_id = 0;

        if (generate) {
            if (opts.generator_levels) {
                std::tie(level, design_traj) = generate_level(gen, cfg.env, rng);
            } else {
                level = random_level(cfg.env, rng);
            }
            level_id = next_level_id++;
        } else {
            level_id = buffer->sample_level(rng, iteration);
            level = buffer->entry_by_id(level_id).level;
            trace.sampled_from_buffer = true;
        }
        trace.level_id = level_id;

        const double gamma = cfg.learner.gae.gamma;
        EpisodeBatch alice_batch =
            collect_episodes(env, level, pair.alice, cfg.episodes_per_eval, gamma, rng);
        env_steps += alice_batch.env_steps;
        trace.alice_returns = alice_batch.returns;

        EpisodeBatch bob_batch;
        if (opts.collect_bob) {
            bob_batch = collect_episodes(env, level, pair.bob, cfg.episodes_per_eval, gamma, rng);
            env_steps += bob_batch.env_steps;
            trace.bob_returns = bob_batch.returns;
        }
        EpisodeBatch antagonist_batch;
        if (opts.antagonist) {
            antagonist_batch =
                collect_episodes(env, level, antagonist, cfg.episodes_per_eval, gamma, rng);
            env_steps += antagonist_batch.env_steps;
        }

        std::optional<double> regret;
        if (opts.collect_bob) {
            regret = cfg.use_gae_regret
                         ? mean_gae_score(alice_batch.trajs, cfg.learner.gae) -
                               mean_gae_score(bob_batch.trajs, cfg.learner.gae)
                         : self_play_regret(alice_batch.returns, bob_batch.returns);
        } else if (opts.antagonist) {
            regret = paired_regret(alice_batch.returns, antagonist_batch.returns);
        } else if (opts.gen_reward == DriverOptions::GeneratorReward::kNegativeReturn) {
            regret = -mean_of(alice_batch.returns);
        }
        trace.regret = regret;

        if (opts.collect_bob) {
            sync_bob(pair);
            trace.bob_synced = true;
        }
        pair.alice = train_step(pair.alice, alice_batch.trajs, cfg.learner);
        trace.alice_trained = true;
        if (opts.antagonist)
            antagonist = train_step(antagonist, antagonist_batch.trajs, cfg.learner);

        const double f_gae = mean_gae_score(alice_batch.trajs, cfg.learner.gae);

        try {
            if (generate) {
                if (opts.train_gen) {
                    gen = train_generator(gen, design_traj, *regret, cfg.generator_lr);
                    trace.generator_trained = true;
                }
                if (opts.use_buffer) {
                    BufferEntry entry;
                    entry.level = level;
                    entry.level_id = level_id;
                    entry.reps = select_representatives(alice_batch.observations, cfg.diversity,
                                                        rng, level_id);
                    trace.reps_selected = true;
                    entry.gae_score = f_gae;
                    entry.visits = 1;
                    entry.last_iteration = iteration;
                    trace.insert_outcome = buffer->try_insert(std::move(entry)).kind;
                }
            } else {
                buffer->update_entry(level_id, alice_batch.observations, f_gae, cfg.diversity,
                                     rng);
                trace.entry_updated = true;
            }
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " (iteration " +
                                 std::to_string(iteration) + ")");
        }

        MetricsRow row;
        row.iteration = iteration;
        row.env_steps = env_steps;
        row.strategy = strategy;
        row.branch = generate ? "gen" : "replay";
        row.level_id = level_id;
        row.regret = regret;
        row.f_gae = f_gae;
        row.buffer_size = buffer ? buffer->size() : 0;
        if (buffer) row.buffer_diversity = buffer->buffer_diversity();
        row.seed = cfg.seed;

        const bool budget_exhausted =
            env_steps >= cfg.total_env_steps ||
            (cfg.max_iterations != 0 && iteration >= cfg.max_iterations);
        const bool periodic_eval =
            cfg.eval_interval > 0 && iteration % static_cast<unsigned>(cfg.eval_interval) == 0;
        if (!suite.empty() && (periodic_eval || budget_exhausted)) {
            const EvalResult eval =
                evaluate_policy(pair.alice, suite, cfg.env, cfg.eval_episodes);
            row.eval_solved_rate = eval.solved_rate;
            row.eval_mean_return = eval.mean_return;
            if (budget_exhausted) report.final_eval = eval;
        }

        report.rows.push_back(std::move(row));
        if (observer) observer(trace);
    }

    report.final_policy = pair.alice;
    report.final_generator = gen;
    report.buffer = std::move(buffer);
    report.env_steps = env_steps;
    report.iterations = iteration;
    if (!suite.empty() && !report.final_eval)
        report.final_eval = evaluate_policy(pair.alice, suite, cfg.env, cfg.eval_episodes);
    return report;
}

RunReport run_strategy(const ExperimentConfig& cfg, const IterationObserver& observer) {
    return run_with_options(cfg, options_for_strategy(cfg), observer);
}

namespace {

RunReport run_as(const ExperimentConfig& cfg, StrategyKind kind, const IterationObserver& observer) {
    ExperimentConfig adjusted = cfg;
    adjusted.strategy = kind;
    if (kind == StrategyKind::kPLR) {
        adjusted.replay.replacement = ReplacementRule::kMinGae;
        adjusted.replay.rho = 0.0;
    } else {
        adjusted.replay.replacement = ReplacementRule::kDiversity;
    }
    return run_strategy(adjusted, observer);
}

}  // namespace

RunReport run_divsp(const ExperimentConfig& cfg, const IterationObserver& observer) {
    return run_as(cfg, StrategyKind::kDivSP, observer);
}
RunReport run_dr(const ExperimentConfig& cfg, const IterationObserver& observer) {
    return run_as(cfg, StrategyKind::kDR, observer);
}
RunReport run_plr(const ExperimentConfig& cfg, const IterationObserver& observer) {
    return run_as(cfg, StrategyKind::kPLR, observer);
}
RunReport run_minimax(const ExperimentConfig& cfg, const IterationObserver& observer) {
    return run_as(cfg, StrategyKind::kMinimax, observer);
}
RunReport run_paired(const ExperimentConfig& cfg, const IterationObserver& observer) {
    return run_as(cfg, StrategyKind::kPaired, observer);
}

}  // namespace divsp
