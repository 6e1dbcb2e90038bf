#include "divsp/metrics.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "divsp/errors.hpp"

namespace divsp {

const char* kMetricsHeader =
    "iteration,env_steps,strategy,branch,level_id,regret,f_gae,buffer_size,"
    "buffer_diversity,eval_solved_rate,eval_mean_return,seed";

std::string format_double(double value) {
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

namespace {

std::string format_optional(const std::optional<double>& value) {
    return value ? format_double(*value) : std::string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

double parse_double_field(const std::string& text, const char* column) {
    double value = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size())
        throw ParseError(std::string("metrics: column '") + column + "' is not a number: '" +
                         text + "'");
    return value;
}

std::uint64_t parse_u64_field(const std::string& text, const char* column) {
    std::uint64_t value = 0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size())
        throw ParseError(std::string("metrics: column '") + column + "' is not an integer: '" +
                         text + "'");
    return value;
}

std::optional<double> parse_optional_field(const std::string& text, const char* column) {
    if (text.empty()) return std::nullopt;
    return parse_double_field(text, column);
}

}  // namespace

std::string metrics_to_csv(std::span<const MetricsRow> rows) {
    std::string out = kMetricsHeader;
    out.push_back('\n');
    for (const MetricsRow& row : rows) {
        out += std::to_string(row.iteration);
        out.push_back(',');
        out += std::to_string(row.env_steps);
        out.push_back(',');
        out += row.strategy;
        out.push_back(',');
        out += row.branch;
        out.push_back(',');
        out += std::to_string(row.level_id);
        out.push_back(',');
        out += format_optional(row.regret);
        out.push_back(',');
        out += format_double(row.f_gae);
        out.push_back(',');
        out += std::to_string(row.buffer_size);
        out.push_back(',');
        out += format_optional(row.buffer_diversity);
        out.push_back(',');
        out += format_optional(row.eval_solved_rate);
        out.push_back(',');
        out += format_optional(row.eval_mean_return);
        out.push_back(',');
        out += std::to_string(row.seed);
        out.push_back('\n');
    }
    return out;
}

void write_metrics_csv(const std::string& path, std::span<const MetricsRow> rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("metrics: cannot open '" + path + "' for writing");
    out << metrics_to_csv(rows);
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("metrics: missing header line");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kMetricsHeader) {
        // Name the first column that deviates for a usable diagnostic.
        const auto expected = split_csv_line(kMetricsHeader);
        const auto got = split_csv_line(line);
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i >= got.size() || got[i] != expected[i])
                throw ParseError("metrics: header mismatch at column '" + expected[i] + "'");
        }
        throw ParseError("metrics: header has extra columns");
    }

    std::vector<MetricsRow> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 12)
            throw ParseError("metrics: row has " + std::to_string(fields.size()) +
                             " fields, expected 12");
        MetricsRow row;
        row.iteration = parse_u64_field(fields[0], "iteration");
        row.env_steps = parse_u64_field(fields[1], "env_steps");
        row.strategy = fields[2];
        row.branch = fields[3];
        row.level_id = parse_u64_field(fields[4], "level_id");
        row.regret = parse_optional_field(fields[5], "regret");
        row.f_gae = parse_double_field(fields[6], "f_gae");
        row.buffer_size = parse_u64_field(fields[7], "buffer_size");
        row.buffer_diversity = parse_optional_field(fields[8], "buffer_diversity");
        row.eval_solved_rate = parse_optional_field(fields[9], "eval_solved_rate");
        row.eval_mean_return = parse_optional_field(fields[10], "eval_mean_return");
        row.seed = parse_u64_field(fields[11], "seed");
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("metrics: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_metrics_csv(buffer.str());
}

}  // namespace divsp
