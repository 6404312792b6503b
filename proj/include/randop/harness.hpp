#pragma once

// Seeded, replicated experiments over sampled configurations, and the
// report/CSV writers behind the `randop` command line tool.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "randop/gaussians.hpp"
#include "randop/muntz.hpp"
#include "randop/pointproc.hpp"
#include "randop/rng.hpp"

namespace randop::harness {

using pointproc::ProcessSpec;
using pointproc::Window;

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"campbell", "frame-bound", "nuclear", "widths", "norm-growth",
                                                "divergence", "muntz", "sample", "spectrum"};
    return names;
}

struct ExperimentConfig {
    std::string experiment;
    ProcessSpec process = pointproc::Poisson{1.0};
    double variance = 1.0;
    Window interval{0.0, 1.0};
    Window window{-12.0, 13.0};
    std::int64_t replications = 1;
    std::uint64_t master_seed = 1;
    double tail_tol = op::kDefaultTailTol;
    std::vector<double> probes;           // campbell
    std::vector<double> x_grid;           // widths, divergence
    std::vector<std::int64_t> n_grid;     // norm-growth
    gaussians::TargetFunction target;     // frame-bound, muntz
    muntz::Ordering ordering = muntz::Ordering::ByDistanceToCenter;
    double muntz_tolerance = 0.05;        // relative final distance
};

/// Defaults for `experiment`, matching the reference setups.
ExperimentConfig default_config(const std::string& experiment);

/// Overlay a JSON document on the defaults. Unknown keys, type mismatches
/// and invalid values throw InvalidArgument.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& experiment);

/// Throws InvalidArgument when the config violates an experiment precondition.
void validate(const ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);

struct Statistic {
    std::string name;
    std::vector<double> values;  // indexed by replication
    double mean = 0.0;
    double se = 0.0;
    double median = 0.0;
};

/// Sample mean, SE = sd / sqrt(n) with the (n - 1) sample variance, median.
Statistic summarize(std::string name, std::vector<double> values);

double median(std::vector<double> values);

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

using Cell = std::variant<std::int64_t, double>;

struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<Statistic> statistics;
    std::map<std::string, double> theory;
    std::vector<Check> checks;
    std::vector<Table> tables;
    double runtime_seconds = 0.0;

    [[nodiscard]] const Statistic& statistic(const std::string& name) const;
    [[nodiscard]] const Table& table(const std::string& name) const;
    [[nodiscard]] bool all_checks_passed() const;
};

struct RunOptions {
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

/// Runs fn(r, stream_seed(master_seed, r)) for r in [0, reps) on up to
/// `threads` workers. Results are indexed by r, so the output does not depend
/// on scheduling.
template <class Fn>
auto replicate(std::int64_t reps, std::uint64_t master_seed, unsigned threads, Fn&& fn)
    -> std::vector<decltype(fn(std::int64_t{}, std::uint64_t{}))>;

ExperimentReport run_campbell(const ExperimentConfig& cfg, const RunOptions& opts = {});
ExperimentReport run_frame_bound(const ExperimentConfig& cfg, const gaussians::TargetFunction& f,
                                 const RunOptions& opts = {});
ExperimentReport run_nuclear(const ExperimentConfig& cfg, const RunOptions& opts = {});
ExperimentReport run_widths(const ExperimentConfig& cfg, const RunOptions& opts = {});
ExperimentReport run_norm_growth(const ExperimentConfig& cfg, const RunOptions& opts = {});
ExperimentReport run_divergence(const ExperimentConfig& cfg, const RunOptions& opts = {});
ExperimentReport run_muntz(const ExperimentConfig& cfg, const gaussians::TargetFunction& f,
                           const RunOptions& opts = {});
ExperimentReport run_sample(const ExperimentConfig& cfg, const RunOptions& opts = {});
ExperimentReport run_spectrum(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Dispatch on cfg.experiment.
ExperimentReport run(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Throws NumericalFailure if any statistic or table cell is non-finite.
void require_finite(const ExperimentReport& report);

nlohmann::json to_json(const ExperimentReport& report);

/// CSV text for a table; doubles printed with 17 significant digits.
std::string to_csv(const Table& table);

/// Writes report.json, one <statistic>.csv per statistic and one CSV per table.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

/// Command line entry point. Exit codes: 0 success, 1 invalid input,
/// 2 numerical failure, 3 failed checks under --check.
int cli_main(int argc, char** argv);

}  // namespace randop::harness

#include "randop/harness_replicate.inl"
