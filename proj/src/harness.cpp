#include "divsp/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "divsp/config.hpp"
#include "divsp/eval.hpp"
#include "divsp/metrics.hpp"
#include "divsp/snapshots.hpp"
#include "divsp/strategies.hpp"
#include "divsp/svg_plot.hpp"

namespace divsp {

namespace fs = std::filesystem;

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << hash;
    return out.str();
}

namespace {

int translate_error(const std::exception& e, std::ostream& err) {
    err << "error: " << e.what() << "\n";
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
        dynamic_cast<const LookupError*>(&e))
        return kExitConfigError;
    if (dynamic_cast<const IntegrityError*>(&e)) return kExitIntegrityError;
    if (dynamic_cast<const NumericalError*>(&e)) return kExitNumericalError;
    return kExitFailure;
}

std::string file_contents(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
    try {
        ExperimentConfig cfg = load_experiment_config(args.config_path);
        if (args.seed) cfg.seed = *args.seed;
        if (args.out_dir) cfg.output_dir = *args.out_dir;
        if (cfg.output_dir.empty())
            throw ConfigError("config: 'output_dir' is required (or pass --out)");

        fs::create_directories(cfg.output_dir);
        const fs::path out_dir(cfg.output_dir);

        const RunReport report = run_strategy(cfg);

        const fs::path metrics_path = out_dir / "metrics.csv";
        write_metrics_csv(metrics_path.string(), report.rows);

        const fs::path policy_path = out_dir / "policy.json";
        save_policy_snapshot(policy_path.string(), {kMazeFamilyId, report.final_policy});

        fs::path buffer_path;
        if (report.buffer) {
            buffer_path = out_dir / "buffer.json";
            save_buffer_snapshot(buffer_path.string(), buffer_snapshot_of(*report.buffer));
        }

        nlohmann::json manifest;
        manifest["config"] = nlohmann::json::parse(experiment_config_to_json(cfg));
        manifest["timestamp_utc"] =
            std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();
        manifest["iterations"] = report.iterations;
        manifest["env_steps"] = report.env_steps;
        nlohmann::json artifacts;
        artifacts["metrics.csv"] = fnv1a_hex(file_contents(metrics_path));
        artifacts["policy.json"] = fnv1a_hex(file_contents(policy_path));
        if (!buffer_path.empty())
            artifacts["buffer.json"] = fnv1a_hex(file_contents(buffer_path));
        manifest["artifacts"] = std::move(artifacts);
        if (report.final_eval) {
            manifest["final_eval"] = {{"solved_rate", report.final_eval->solved_rate},
                                      {"mean_return", report.final_eval->mean_return},
                                      {"return_stderr", report.final_eval->return_stderr}};
        }
        std::ofstream manifest_out(out_dir / "run_manifest.json", std::ios::binary);
        manifest_out << manifest.dump(2) << "\n";

        out << "strategy " << strategy_name(cfg.strategy) << " seed " << cfg.seed << ": "
            << report.iterations << " iterations, " << report.env_steps << " env steps";
        if (report.final_eval)
            out << ", final solved_rate " << format_double(report.final_eval->solved_rate);
        out << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        return translate_error(e, err);
    }
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
    try {
        if (args.mode != "greedy" && args.mode != "sample")
            throw ConfigError("eval: '--mode' must be greedy or sample");
        const PolicySnapshot snapshot = load_policy_snapshot(args.policy_path);
        if (snapshot.family_id != kMazeFamilyId)
            throw ConfigError("eval: policy family '" + snapshot.family_id +
                              "' is not the maze family");

        const std::vector<EvalLevel> suite = load_eval_suite(args.levels_dir, &err);
        if (suite.empty()) throw ConfigError("eval: no solvable .maze levels in the directory");

        // The observation layout pins view size and action count; recover
        // the view size from the snapshot dimension.
        MazeConfig env_cfg;
        const int k2 = (snapshot.params.obs_dim - 4) / 4;
        const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(k2))));
        if (4 * k * k + 4 != snapshot.params.obs_dim)
            throw ConfigError("eval: snapshot obs_dim does not describe a maze view");
        env_cfg.view_size = k;

        std::optional<Rng> rng;
        if (args.mode == "sample") rng.emplace(args.sample_seed);
        const EvalResult result = evaluate_policy(snapshot.params, suite, env_cfg, args.episodes,
                                                  rng ? &*rng : nullptr);

        out << "level,episodes,solved_rate,mean_return,mean_steps\n";
        std::string csv = "level,episodes,solved_rate,mean_return,mean_steps\n";
        for (const auto& level : result.levels) {
            std::ostringstream line;
            line << level.name << "," << args.episodes << "," << format_double(level.solved_rate)
                 << "," << format_double(level.mean_return) << ","
                 << format_double(level.mean_steps) << "\n";
            out << line.str();
            csv += line.str();
        }
        std::ostringstream aggregate;
        aggregate << "TOTAL," << args.episodes << "," << format_double(result.solved_rate) << ","
                  << format_double(result.mean_return) << ",\n";
        out << aggregate.str();
        out << "mean return std error: " << format_double(result.return_stderr) << "\n";
        csv += aggregate.str();

        if (args.out_csv) {
            std::ofstream csv_out(*args.out_csv, std::ios::binary);
            if (!csv_out) throw ConfigError("eval: cannot write '" + *args.out_csv + "'");
            csv_out << csv;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        return translate_error(e, err);
    }
}

int cmd_inspect_buffer(const InspectArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const BufferSnapshot snapshot = load_buffer_snapshot(args.snapshot_path);
        out << "buffer: " << snapshot.entries.size() << " entries, capacity "
            << snapshot.config.capacity << ", rho " << format_double(snapshot.config.rho)
            << ", beta " << format_double(snapshot.config.beta) << "\n";

        MazeConfig render_cfg;
        for (const BufferEntry& entry : snapshot.entries) {
            out << "\nlevel " << entry.level_id << ": f_gae " << format_double(entry.gae_score)
                << ", f_div " << format_double(entry.div_score) << ", visits " << entry.visits
                << ", last_iteration " << entry.last_iteration << "\n";
            if (entry.level.family_id == kMazeFamilyId) {
                MazeConfig cfg = render_cfg;
                cfg.max_blocks = static_cast<int>(entry.level.encoding.size());
                out << render_ascii(level_from_params(entry.level, cfg));
            }
        }

        // Re-derive every cached diversity score from the representatives.
        const LevelBuffer buffer = buffer_from_snapshot(snapshot);
        if (buffer.size() >= 2) {
            std::vector<RepresentativeSet> sets;
            for (const BufferEntry& entry : buffer.entries()) sets.push_back(entry.reps);
            double recomputed_total = 0.0;
            for (std::size_t i = 0; i < sets.size(); ++i) {
                std::vector<RepresentativeSet> others;
                for (std::size_t j = 0; j < sets.size(); ++j)
                    if (j != i) others.push_back(sets[j]);
                const double recomputed = level_div_score(sets[i], others);
                recomputed_total += recomputed;
                if (std::abs(recomputed - snapshot.entries[i].div_score) > 1e-9)
                    throw IntegrityError(
                        "inspect: cached div_score mismatch for level " +
                        std::to_string(snapshot.entries[i].level_id) + " (cached " +
                        format_double(snapshot.entries[i].div_score) + ", recomputed " +
                        format_double(recomputed) + ")");
            }
            out << "\nbuffer diversity: " << format_double(recomputed_total)
                << " (cache verified)\n";
        } else {
            out << "\nbuffer diversity: undefined for fewer than 2 entries\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        return translate_error(e, err);
    }
}

int cmd_plot(const PlotArgs& args, std::ostream& out, std::ostream& err) {
    try {
        if (args.metrics_paths.empty()) throw ConfigError("plot: at least one metrics CSV required");

        static const std::set<std::string> kMetrics = {
            "regret",           "f_gae",          "buffer_size",
            "buffer_diversity", "eval_solved_rate", "eval_mean_return"};
        if (!kMetrics.count(args.metric))
            throw ConfigError("plot: unknown metric '" + args.metric + "'");

        // Group runs by strategy tag.
        std::map<std::string, SeriesGroup> groups;
        for (const std::string& path : args.metrics_paths) {
            const std::vector<MetricsRow> rows = read_metrics_csv(path);
            std::string tag = rows.empty() ? std::string("(empty)") : rows.front().strategy;
            std::vector<std::pair<double, double>> series;
            for (const MetricsRow& row : rows) {
                std::optional<double> value;
                if (args.metric == "regret") value = row.regret;
                else if (args.metric == "f_gae") value = row.f_gae;
                else if (args.metric == "buffer_size") value = static_cast<double>(row.buffer_size);
                else if (args.metric == "buffer_diversity") value = row.buffer_diversity;
                else if (args.metric == "eval_solved_rate") value = row.eval_solved_rate;
                else if (args.metric == "eval_mean_return") value = row.eval_mean_return;
                if (value) series.emplace_back(static_cast<double>(row.env_steps), *value);
            }
            auto [it, inserted] = groups.try_emplace(tag, SeriesGroup{tag, {}});
            it->second.runs.push_back(std::move(series));
        }

        std::vector<SeriesGroup> ordered;
        for (auto& [tag, group] : groups) ordered.push_back(std::move(group));
        const std::string svg =
            render_chart_svg(args.metric, "env steps", args.metric, ordered);

        std::ofstream svg_out(args.out_svg, std::ios::binary);
        if (!svg_out) throw ConfigError("plot: cannot write '" + args.out_svg + "'");
        svg_out << svg;
        out << "wrote " << args.out_svg << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        return translate_error(e, err);
    }
}

}  // namespace divsp
