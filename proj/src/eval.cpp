#include "divsp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace divsp {

namespace fs = std::filesystem;

std::vector<EvalLevel> load_eval_suite(const std::string& dir, std::ostream* warnings) {
    if (!fs::is_directory(dir)) throw ConfigError("eval suite: '" + dir + "' is not a directory");

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".maze")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<EvalLevel> suite;
    for (const fs::path& file : files) {
        std::ifstream in(file);
        std::stringstream buffer;
        buffer << in.rdbuf();
        MazeLevel level;
        try {
            level = parse_ascii(buffer.str());
        } catch (const ParseError& e) {
            throw ParseError("eval suite: " + file.filename().string() + ": " + e.what());
        }
        if (!is_solvable(level)) {
            if (warnings)
                *warnings << "warning: skipping unsolvable eval level " << file.filename().string()
                          << "\n";
            continue;
        }
        suite.push_back({file.stem().string(), std::move(level)});
    }
    return suite;
}

EvalResult evaluate_policy(const PolicyParams& policy, std::span<const EvalLevel> suite,
                           const MazeConfig& cfg, int episodes, Rng* rng) {
    if (suite.empty()) throw PreconditionError("evaluate_policy: empty suite");
    if (episodes < 1) throw PreconditionError("evaluate_policy: episodes must be >= 1");

    MazeEnv env(cfg);
    if (env.observation_dim() != policy.obs_dim || env.num_actions() != policy.num_actions)
        throw ConfigError("evaluate_policy: policy dimensions do not match the environment");

    EvalResult result;
    std::vector<double> all_returns;
    all_returns.reserve(suite.size() * static_cast<std::size_t>(episodes));
    double solved_total = 0.0;

    for (const EvalLevel& eval_level : suite) {
        EvalResult::PerLevel per;
        per.name = eval_level.name;
        for (int ep = 0; ep < episodes; ++ep) {
            Observation obs = env.reset_level(eval_level.level);
            double episode_return = 0.0;
            bool solved = false;
            int steps = 0;
            while (!env.done()) {
                const int action =
                    rng ? act(policy, obs, *rng).first : act_greedy(policy, obs);
                StepResult sr = env.step(action);
                episode_return += sr.reward;
                ++steps;
                obs = std::move(sr.obs);
                if (sr.terminal) {
                    solved = true;
                    break;
                }
            }
            per.solved_rate += solved ? 1.0 : 0.0;
            per.mean_return += episode_return;
            per.mean_steps += steps;
            all_returns.push_back(episode_return);
            solved_total += solved ? 1.0 : 0.0;
        }
        per.solved_rate /= episodes;
        per.mean_return /= episodes;
        per.mean_steps /= episodes;
        result.levels.push_back(std::move(per));
    }

    const double count = static_cast<double>(all_returns.size());
    result.solved_rate = solved_total / count;
    double mean = 0.0;
    for (double r : all_returns) mean += r;
    mean /= count;
    result.mean_return = mean;
    if (all_returns.size() > 1) {
        double var = 0.0;
        for (double r : all_returns) var += (r - mean) * (r - mean);
        var /= (count - 1.0);
        result.return_stderr = std::sqrt(var / count);
    }
    return result;
}

}  // namespace divsp
