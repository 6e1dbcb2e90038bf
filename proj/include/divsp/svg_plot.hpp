#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace divsp {

// One strategy's runs of a single metric; runs are aligned by row index
// (same iteration cadence across seeds).
struct SeriesGroup {
    std::string label;
    std::vector<std::vector<std::pair<double, double>>> runs;  // per seed: (x, y)
};

// Per-index mean and standard error across a group's runs, truncated to the
// shortest run.
struct GroupStats {
    std::vector<double> x;       // mean x per index
    std::vector<double> mean;    // mean y
    std::vector<double> stderr_; // std error of y; zero for a single run
};

GroupStats group_statistics(const SeriesGroup& group);

// Line chart with across-seed mean lines and shaded std-error bands, one
// color per group. Groups without data are listed in the legend only.
std::string render_chart_svg(const std::string& title, const std::string& x_label,
                             const std::string& y_label, std::span<const SeriesGroup> groups);

}  // namespace divsp
