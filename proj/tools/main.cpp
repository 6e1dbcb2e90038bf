#include <iostream>

#include <CLI11.hpp>

#include "divsp/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"divsp-lab: diversity-driven environment-design experiments"};
    app.require_subcommand(1);

    divsp::TrainArgs train_args;
    std::uint64_t seed_override = 0;
    std::string out_override;
    auto* train = app.add_subcommand("train", "Run one seeded strategy experiment");
    train->add_option("--config", train_args.config_path, "Experiment config JSON")->required();
    auto* seed_opt = train->add_option("--seed", seed_override, "Override the config seed");
    auto* out_opt = train->add_option("--out", out_override, "Override the output directory");

    divsp::EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Evaluate a policy snapshot on held-out mazes");
    eval->add_option("--policy", eval_args.policy_path, "Policy snapshot JSON")->required();
    eval->add_option("--levels", eval_args.levels_dir, "Directory of .maze files")->required();
    eval->add_option("--episodes", eval_args.episodes, "Episodes per level");
    eval->add_option("--mode", eval_args.mode, "greedy (default) or sample");
    eval->add_option("--sample-seed", eval_args.sample_seed, "Seed for sample mode");
    std::string eval_out;
    auto* eval_out_opt = eval->add_option("--out", eval_out, "Also write results as CSV");

    divsp::InspectArgs inspect_args;
    auto* inspect = app.add_subcommand("inspect-buffer", "Print and verify a buffer snapshot");
    inspect->add_option("--snapshot", inspect_args.snapshot_path, "Buffer snapshot JSON")
        ->required();

    divsp::PlotArgs plot_args;
    auto* plot = app.add_subcommand("plot", "Render metric curves from metrics CSVs");
    plot->add_option("--metrics", plot_args.metrics_paths, "Metrics CSV files")->required();
    plot->add_option("--out", plot_args.out_svg, "Output SVG path")->required();
    plot->add_option("--metric", plot_args.metric, "Metric column (default eval_solved_rate)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : divsp::kExitConfigError;
    }

    if (train->parsed()) {
        if (seed_opt->count() > 0) train_args.seed = seed_override;
        if (out_opt->count() > 0) train_args.out_dir = out_override;
        return divsp::cmd_train(train_args, std::cout, std::cerr);
    }
    if (eval->parsed()) {
        if (eval_out_opt->count() > 0) eval_args.out_csv = eval_out;
        return divsp::cmd_eval(eval_args, std::cout, std::cerr);
    }
    if (inspect->parsed()) return divsp::cmd_inspect_buffer(inspect_args, std::cout, std::cerr);
    if (plot->parsed()) return divsp::cmd_plot(plot_args, std::cout, std::cerr);
    return divsp::kExitFailure;
}
