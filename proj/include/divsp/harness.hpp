#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace divsp {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitIntegrityError = 3;
inline constexpr int kExitNumericalError = 4;
inline constexpr int kExitFailure = 1;

struct TrainArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;   // overrides the config
    std::optional<std::string> out_dir;  // overrides the config
};

struct EvalArgs {
    std::string policy_path;
    std::string levels_dir;
    int episodes = 1;
    std::string mode = "greedy";  // or "sample"
    std::uint64_t sample_seed = 0;
    std::optional<std::string> out_csv;
};

struct InspectArgs {
    std::string snapshot_path;
};

struct PlotArgs {
    std::vector<std::string> metrics_paths;
    std::string out_svg;
    std::string metric = "eval_solved_rate";
};

// Command entry points; they print to the streams and translate errors into
// exit codes (config/parse -> 2, integrity -> 3, numerical -> 4).
int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int cmd_inspect_buffer(const InspectArgs& args, std::ostream& out, std::ostream& err);
int cmd_plot(const PlotArgs& args, std::ostream& out, std::ostream& err);

// FNV-1a 64-bit content hash, hex-encoded; used by the run manifest.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace divsp
