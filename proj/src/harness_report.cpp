#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "randop/errors.hpp"
#include "randop/harness.hpp"

namespace randop::harness {

using nlohmann::json;

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size() / 2;
    return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

Statistic summarize(std::string name, std::vector<double> values) {
    Statistic s;
    s.name = std::move(name);
    const auto n = static_cast<double>(values.size());
    if (!values.empty()) {
        s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
        if (values.size() > 1) {
            double ss = 0.0;
            for (const double v : values) ss += (v - s.mean) * (v - s.mean);
            s.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
        }
        s.median = median(values);
    }
    s.values = std::move(values);
    return s;
}

const Statistic& ExperimentReport::statistic(const std::string& name) const {
    for (const auto& s : statistics)
        if (s.name == name) return s;
    throw InvalidArgument("report has no statistic '" + name + "'");
}

const Table& ExperimentReport::table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return t;
    throw InvalidArgument("report has no table '" + name + "'");
}

bool ExperimentReport::all_checks_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void require_finite(const ExperimentReport& report) {
    for (const auto& s : report.statistics) {
        if (!std::isfinite(s.mean) || !std::isfinite(s.se))
            throw NumericalFailure("non-finite statistic '" + s.name + "'");
        for (const double v : s.values)
            if (!std::isfinite(v)) throw NumericalFailure("non-finite value in statistic '" + s.name + "'");
    }
    for (const auto& t : report.tables)
        for (const auto& row : t.rows)
            for (const auto& cell : row)
                if (const auto* d = std::get_if<double>(&cell); d && !std::isfinite(*d))
                    throw NumericalFailure("non-finite cell in table '" + t.name + "'");
}

json to_json(const ExperimentReport& report) {
    json out;
    out["experiment"] = report.config.experiment;
    out["config"] = to_json(report.config);
    out["master_seed"] = report.config.master_seed;
    out["replications"] = report.config.replications;
    out["runtime_seconds"] = report.runtime_seconds;
    out["statistics"] = json::array();
    for (const auto& s : report.statistics)
        out["statistics"].push_back(
            {{"name", s.name}, {"mean", s.mean}, {"se", s.se}, {"median", s.median}, {"values", s.values}});
    out["theory"] = report.theory;
    out["checks"] = json::array();
    for (const auto& c : report.checks) out["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    out["tables"] = json::array();
    for (const auto& t : report.tables) out["tables"].push_back(t.name + ".csv");
    out["all_checks_passed"] = report.all_checks_passed();
    return out;
}

namespace {

void append_cell(std::string& line, const Cell& cell) {
    char buf[64];
    if (const auto* i = std::get_if<std::int64_t>(&cell)) {
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(*i));
    } else {
        std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(cell));
    }
    line += buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidArgument("cannot write '" + path.string() + "'");
    os << text;
}

}  // namespace

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        if (j) out += ',';
        out += table.columns[j];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            append_cell(out, row[j]);
        }
        out += '\n';
    }
    return out;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InvalidArgument("cannot create output directory '" + dir.string() + "': " + ec.message());
    write_file(dir / "report.json", to_json(report).dump(2) + "\n");
    for (const auto& s : report.statistics) {
        Table t{s.name, {"replication", "value"}, {}};
        for (std::size_t r = 0; r < s.values.size(); ++r) t.rows.push_back({static_cast<std::int64_t>(r), s.values[r]});
        write_file(dir / (s.name + ".csv"), to_csv(t));
    }
    for (const auto& t : report.tables) write_file(dir / (t.name + ".csv"), to_csv(t));
}

}  // namespace randop::harness
