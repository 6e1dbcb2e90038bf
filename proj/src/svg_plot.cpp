#include "divsp/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "divsp/metrics.hpp"

namespace divsp {

GroupStats group_statistics(const SeriesGroup& group) {
    GroupStats stats;
    if (group.runs.empty()) return stats;
    std::size_t length = std::numeric_limits<std::size_t>::max();
    for (const auto& run : group.runs) length = std::min(length, run.size());
    if (length == 0 || length == std::numeric_limits<std::size_t>::max()) return stats;

    const double n = static_cast<double>(group.runs.size());
    for (std::size_t i = 0; i < length; ++i) {
        double x_sum = 0.0, y_sum = 0.0;
        for (const auto& run : group.runs) {
            x_sum += run[i].first;
            y_sum += run[i].second;
        }
        const double y_mean = y_sum / n;
        double se = 0.0;
        if (group.runs.size() > 1) {
            double var = 0.0;
            for (const auto& run : group.runs) {
                const double d = run[i].second - y_mean;
                var += d * d;
            }
            var /= (n - 1.0);
            se = std::sqrt(var / n);
        }
        stats.x.push_back(x_sum / n);
        stats.mean.push_back(y_mean);
        stats.stderr_.push_back(se);
    }
    return stats;
}

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 72.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 48.0;
constexpr double kMarginBottom = 56.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    // Fixed tick-ish formatting; trims trailing zeros for readability.
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

}  // namespace

std::string render_chart_svg(const std::string& title, const std::string& x_label,
                             const std::string& y_label, std::span<const SeriesGroup> groups) {
    std::vector<GroupStats> stats;
    stats.reserve(groups.size());
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -std::numeric_limits<double>::infinity();
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    bool any_data = false;

    for (const SeriesGroup& group : groups) {
        GroupStats s = group_statistics(group);
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            any_data = true;
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.mean[i] - s.stderr_[i]);
            y_max = std::max(y_max, s.mean[i] + s.stderr_[i]);
        }
        stats.push_back(std::move(s));
    }
    if (!any_data) {
        x_min = 0.0; x_max = 1.0; y_min = 0.0; y_max = 1.0;
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto to_x = [&](double v) { return kMarginLeft + (v - x_min) / (x_max - x_min) * plot_w; };
    auto to_y = [&](double v) { return kMarginTop + plot_h - (v - y_min) / (y_max - y_min) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
           "font-family=\"sans-serif\">" << title << "</text>\n";

    // Axes with 5 ticks each.
    svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x_min + (x_max - x_min) * i / 4.0;
        const double px = to_x(fx);
        svg << "<line x1=\"" << px << "\" y1=\"" << kMarginTop << "\" x2=\"" << px << "\" y2=\""
            << kMarginTop + plot_h << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << px << "\" y=\"" << kMarginTop + plot_h + 18
            << "\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
        const double fy = y_min + (y_max - y_min) * i / 4.0;
        const double py = to_y(fy);
        svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << py << "\" x2=\""
            << kMarginLeft + plot_w << "\" y2=\"" << py << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";
    }
    svg << "</g>\n";
    svg << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << x_label
        << "</text>\n";
    svg << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 18 " << kMarginTop + plot_h / 2 << ")\">" << y_label
        << "</text>\n";

    for (std::size_t g = 0; g < stats.size(); ++g) {
        const GroupStats& s = stats[g];
        const char* color = kPalette[g % (sizeof(kPalette) / sizeof(kPalette[0]))];
        if (!s.x.empty()) {
            const bool has_band =
                std::any_of(s.stderr_.begin(), s.stderr_.end(), [](double v) { return v > 0.0; });
            if (has_band) {
                svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" "
                       "points=\"";
                for (std::size_t i = 0; i < s.x.size(); ++i)
                    svg << to_x(s.x[i]) << "," << to_y(s.mean[i] + s.stderr_[i]) << " ";
                for (std::size_t i = s.x.size(); i-- > 0;)
                    svg << to_x(s.x[i]) << "," << to_y(s.mean[i] - s.stderr_[i]) << " ";
                svg << "\"/>\n";
            }
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" "
                   "points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg << to_x(s.x[i]) << "," << to_y(s.mean[i]) << " ";
            svg << "\"/>\n";
        }
        const double ly = kMarginTop + 16.0 * static_cast<double>(g);
        svg << "<line x1=\"" << kMarginLeft + plot_w + 12 << "\" y1=\"" << ly << "\" x2=\""
            << kMarginLeft + plot_w + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << kMarginLeft + plot_w + 40 << "\" y=\"" << ly + 4
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << groups[g].label
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace divsp
