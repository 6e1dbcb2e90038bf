#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace divsp {

// One row of the per-iteration metrics CSV. Optional fields serialize as
// empty cells.
struct MetricsRow {
    std::uint64_t iteration = 0;
    std::uint64_t env_steps = 0;
    std::string strategy;
    std::string branch;  // "gen" or "replay"
    std::uint64_t level_id = 0;
    std::optional<double> regret;
    double f_gae = 0.0;
    std::uint64_t buffer_size = 0;
    std::optional<double> buffer_diversity;
    std::optional<double> eval_solved_rate;
    std::optional<double> eval_mean_return;
    std::uint64_t seed = 0;
};

// Exact column order of the metrics CSV.
extern const char* kMetricsHeader;

std::string metrics_to_csv(std::span<const MetricsRow> rows);
void write_metrics_csv(const std::string& path, std::span<const MetricsRow> rows);

// Parses a metrics CSV, validating the header and every row; a schema
// mismatch names the offending column.
std::vector<MetricsRow> read_metrics_csv(const std::string& path);
std::vector<MetricsRow> parse_metrics_csv(const std::string& text);

// Shortest round-trip decimal form of a double, locale-independent.
std::string format_double(double value);

}  // namespace divsp
