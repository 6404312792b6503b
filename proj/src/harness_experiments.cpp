#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "randop/errors.hpp"
#include "randop/harness.hpp"
#include "randop/restricted_operator.hpp"
#include "randop/spectral.hpp"

namespace randop::harness {

namespace {

using pointproc::PointConfiguration;

// Monte-Carlo band: |mean - target| <= 4 SE, plus a floor for statistics
// that are deterministic up to rounding.
constexpr double kSeBand = 4.0;
constexpr double kRoundingFloor = 1e-9;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

Check band_check(const std::string& name, const Statistic& s, double target) {
    const double dev = std::abs(s.mean - target);
    const double band = kSeBand * s.se + kRoundingFloor * std::max(1.0, std::abs(target));
    return {name, dev <= band,
            "mean " + fmt(s.mean) + " vs " + fmt(target) + " (|dev| " + fmt(dev) + ", 4 SE " + fmt(kSeBand * s.se) + ")"};
}

std::string tag(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

class Stopwatch {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Column j of a replication-major matrix of results.
template <class Rep, class Get>
std::vector<double> column(const std::vector<Rep>& reps, Get get) {
    std::vector<double> out;
    out.reserve(reps.size());
    for (const auto& r : reps) out.push_back(get(r));
    return out;
}

bool pinned_lattice(const pointproc::ProcessSpec& spec) {
    const auto* l = std::get_if<pointproc::ShiftedLattice>(&spec);
    return l != nullptr && l->shift.has_value();
}

ExperimentReport begin(const ExperimentConfig& cfg, const std::string& experiment) {
    require(cfg.experiment == experiment, "config is for '" + cfg.experiment + "', expected '" + experiment + "'");
    validate(cfg);
    ExperimentReport rep;
    rep.config = cfg;
    return rep;
}

}  // namespace

ExperimentReport run_campbell(const ExperimentConfig& cfg, const RunOptions& opts) {
    Stopwatch clock;
    auto report = begin(cfg, "campbell");
    const double lambda = pointproc::intensity(cfg.process);
    const auto sums = replicate(cfg.replications, cfg.master_seed, opts.threads, [&](std::int64_t, std::uint64_t seed) {
        const auto config = pointproc::sample(cfg.process, cfg.window, seed);
        std::vector<double> out;
        for (const double u0 : cfg.probes) {
            double s = 0.0;
            for (const double theta : config.points()) s += gaussians::density(cfg.variance, u0 - theta);
            out.push_back(s);
        }
        return out;
    });
    report.theory["intensity"] = lambda;
    for (std::size_t j = 0; j < cfg.probes.size(); ++j) {
        const std::string name = "shot_sum_u" + tag(cfg.probes[j]);
        report.statistics.push_back(summarize(name, column(sums, [j](const auto& r) { return r[j]; })));
        report.checks.push_back(band_check("campbell_mean_" + name, report.statistics.back(), lambda));
    }
    report.runtime_seconds = clock.seconds();
    return report;
}

ExperimentReport run_frame_bound(const ExperimentConfig& cfg, const gaussians::TargetFunction& f,
                                 const RunOptions& opts) {
    Stopwatch clock;
    auto c = cfg;
    c.target = f;
    auto report = begin(c, "frame-bound");
    const double lambda = pointproc::intensity(cfg.process);
    const double f2 = gaussians::norm_sq(f, std::nullopt);

    const auto sums = replicate(cfg.replications, cfg.master_seed, opts.threads, [&](std::int64_t, std::uint64_t seed) {
        const auto config = pointproc::sample(cfg.process, cfg.window, seed);
        double s = 0.0;
        for (const double theta : config.points()) {
            const gaussians::GaussianBump atom{theta, cfg.variance, 1.0};
            double coef = 0.0;
            for (const auto& a : f.atoms) coef += gaussians::inner_full(a, atom);
            s += coef * coef;
        }
        return s;
    });

    double expectation = 0.0;
    for (const auto& a : f.atoms)
        for (const auto& b : f.atoms) expectation += gaussians::convolved_inner(a, b, 2.0 * cfg.variance);
    expectation *= lambda;

    report.theory["intensity"] = lambda;
    report.theory["norm_sq"] = f2;
    report.theory["bound"] = lambda * f2;
    report.theory["campbell_expectation"] = expectation;
    report.statistics.push_back(summarize("frame_sum", sums));
    const auto& s = report.statistics.back();
    report.checks.push_back({"frame_bound_not_violated", s.mean - kSeBand * s.se <= lambda * f2,
                             "mean " + fmt(s.mean) + ", 4 SE " + fmt(kSeBand * s.se) + ", bound " + fmt(lambda * f2)});
    report.checks.push_back(band_check("frame_sum_matches_campbell", s, expectation));
    report.runtime_seconds = clock.seconds();
    return report;
}

ExperimentReport run_nuclear(const ExperimentConfig& cfg, const RunOptions& opts) {
    Stopwatch clock;
    auto report = begin(cfg, "nuclear");
    const double lambda = pointproc::intensity(cfg.process);
    struct Rep {
        double trace, nuclear, norm, contributors;
    };
    const auto reps = replicate(cfg.replications, cfg.master_seed, opts.threads, [&](std::int64_t, std::uint64_t seed) {
        const auto config = pointproc::sample(cfg.process, cfg.window, seed);
        const auto op = op::build_restricted(config, cfg.variance, cfg.interval, cfg.tail_tol);
        const auto s = spectral::spectrum(op);
        return Rep{s.trace, s.nuclear_norm, s.operator_norm, static_cast<double>(op.rank_bound())};
    });
    const double theory = lambda * cfg.interval.length() * gaussians::density(2.0 * cfg.variance, 0.0);
    report.theory["intensity"] = lambda;
    report.theory["expected_trace"] = theory;
    report.statistics.push_back(summarize("trace", column(reps, [](const Rep& r) { return r.trace; })));
    report.statistics.push_back(summarize("nuclear_norm", column(reps, [](const Rep& r) { return r.nuclear; })));
    report.statistics.push_back(summarize("operator_norm", column(reps, [](const Rep& r) { return r.norm; })));
    report.statistics.push_back(summarize("contributors", column(reps, [](const Rep& r) { return r.contributors; })));

    std::int64_t bad = 0;
    double worst = 0.0;
    for (const auto& r : reps) {
        const double gap = std::abs(r.nuclear - r.trace) / (1.0 + r.trace);
        worst = std::max(worst, gap);
        if (gap > 1e-9) ++bad;
    }
    report.checks.push_back({"nuclear_equals_trace", bad == 0,
                             std::to_string(bad) + " violations, worst relative gap " + fmt(worst)});
    report.checks.push_back(band_check("trace_mean_matches_campbell", report.statistic("trace"), theory));
    report.runtime_seconds = clock.seconds();
    return report;
}

ExperimentReport run_widths(const ExperimentConfig& cfg, const RunOptions& opts) {
    Stopwatch clock;
    auto report = begin(cfg, "widths");
    struct TailRow {
        double x;
        std::int64_t n_x;
        double d_nx, bound;
        bool ok;
    };
    struct Rep {
        std::vector<double> widths;
        std::vector<TailRow> tails;
        spectral::DecayFit fit;
        bool fit_ok = false;
    };
    const auto reps = replicate(cfg.replications, cfg.master_seed, opts.threads, [&](std::int64_t, std::uint64_t seed) {
        const auto config = pointproc::sample(cfg.process, cfg.window, seed);
        const auto op = op::build_restricted(config, cfg.variance, cfg.interval, cfg.tail_tol);
        const auto summary = spectral::spectrum(op);
        Rep r;
        r.widths = summary.widths;
        for (const double x : cfg.x_grid) {
            const auto tb = spectral::width_tail_bound(config, cfg.variance, cfg.interval, x, cfg.tail_tol);
            const auto n = static_cast<std::size_t>(tb.n_x);
            const double d = n < summary.widths.size() ? summary.widths[n] : 0.0;
            r.tails.push_back({x, tb.n_x, d, tb.bound, d <= tb.bound + 1e-10});
        }
        try {
            r.fit = spectral::decay_fit(summary.widths, cfg.variance);
            r.fit_ok = true;
        } catch (const InvalidArgument&) {
            r.fit_ok = false;  // fewer than 3 usable widths; scored as slope 0, r^2 0
        }
        return r;
    });

    Table widths{"widths", {"replication", "n", "d_n", "log_d_n", "y_n"}, {}};
    Table tails{"tail_bounds", {"replication", "x", "n_x", "d_n_x", "bound", "passed"}, {}};
    std::int64_t checks = 0, passed = 0, fit_failures = 0;
    std::vector<double> slopes, intercepts, r2s, used;
    for (std::size_t r = 0; r < reps.size(); ++r) {
        const auto ri = static_cast<std::int64_t>(r);
        for (std::size_t n = 0; n < reps[r].widths.size(); ++n) {
            const double d = reps[r].widths[n];
            if (!(d > 0.0)) continue;
            const double ld = std::log(d);
            widths.rows.push_back({ri, static_cast<std::int64_t>(n), d, ld, std::sqrt(std::max(0.0, -cfg.variance * ld))});
        }
        for (const auto& t : reps[r].tails) {
            tails.rows.push_back({ri, t.x, t.n_x, t.d_nx, t.bound, std::int64_t{t.ok ? 1 : 0}});
            ++checks;
            if (t.ok) ++passed;
        }
        if (!reps[r].fit_ok) ++fit_failures;
        slopes.push_back(reps[r].fit_ok ? reps[r].fit.slope : 0.0);
        intercepts.push_back(reps[r].fit_ok ? reps[r].fit.intercept : 0.0);
        r2s.push_back(reps[r].fit_ok ? reps[r].fit.r_squared : 0.0);
        used.push_back(static_cast<double>(reps[r].fit_ok ? reps[r].fit.used : 0));
    }
    report.tables.push_back(std::move(widths));
    report.tables.push_back(std::move(tails));
    report.statistics.push_back(summarize("fit_slope", slopes));
    report.statistics.push_back(summarize("fit_intercept", intercepts));
    report.statistics.push_back(summarize("fit_r_squared", r2s));
    report.statistics.push_back(summarize("fit_points", used));
    report.theory["tail_checks"] = static_cast<double>(checks);
    report.theory["tail_checks_passed"] = static_cast<double>(passed);
    report.theory["fit_failures"] = static_cast<double>(fit_failures);
    report.checks.push_back({"tail_bound_all", passed == checks,
                             std::to_string(passed) + "/" + std::to_string(checks) + " tail checks passed"});
    const double med_slope = report.statistic("fit_slope").median;
    const double med_r2 = report.statistic("fit_r_squared").median;
    report.checks.push_back({"median_slope_positive", med_slope > 0.0, "median slope " + fmt(med_slope)});
    report.checks.push_back({"median_r_squared", med_r2 >= 0.9, "median r^2 " + fmt(med_r2)});
    report.runtime_seconds = clock.seconds();
    return report;
}

ExperimentReport run_norm_growth(const ExperimentConfig& cfg, const RunOptions& opts) {
    Stopwatch clock;
    auto report = begin(cfg, "norm-growth");
    struct Row {
        std::int64_t n;
        double norm;
        std::int64_t max_count;
        double scaled, rayleigh;
    };
    const auto reps = replicate(cfg.replications, cfg.master_seed, opts.threads, [&](std::int64_t, std::uint64_t seed) {
        const auto config = pointproc::sample(cfg.process, cfg.window, seed);
        std::vector<Row> rows;
        for (const auto n : cfg.n_grid) {
            const auto nd = static_cast<double>(n);
            const Window interval(-nd, nd);
            const auto op = op::build_restricted(config, cfg.variance, interval, cfg.tail_tol);
            const auto summary = spectral::spectrum(op);
            const auto counts = pointproc::unit_counts(config, -n, n - 1);
            const auto max_count = pointproc::max_unit_count(counts, static_cast<std::int64_t>(counts.counts.size()));
            const auto crowded = std::max_element(counts.counts.begin(), counts.counts.end()) - counts.counts.begin();
            const double lo = static_cast<double>(counts.base + crowded);
            const gaussians::TargetFunction f{gaussians::IndicatorAtom{lo, lo + 1.0, 1.0}};
            const double rayleigh = op::quadratic_form(op, f) / gaussians::norm_sq(f, interval);
            const double scaled = std::log(std::log(nd)) / std::log(nd) * summary.operator_norm;
            rows.push_back({n, summary.operator_norm, max_count, scaled, rayleigh});
        }
        return rows;
    });

    Table table{"norm_growth", {"replication", "n", "norm", "max_count", "scaled_statistic", "rayleigh_bound"}, {}};
    std::int64_t monotone_fail = 0, rayleigh_fail = 0;
    for (std::size_t r = 0; r < reps.size(); ++r) {
        for (std::size_t i = 0; i < reps[r].size(); ++i) {
            const auto& row = reps[r][i];
            table.rows.push_back({static_cast<std::int64_t>(r), row.n, row.norm, row.max_count, row.scaled, row.rayleigh});
            if (row.norm < row.rayleigh * (1.0 - 1e-10)) ++rayleigh_fail;
            if (i > 0 && row.norm < reps[r][i - 1].norm * (1.0 - 1e-10)) ++monotone_fail;
        }
    }
    report.tables.push_back(std::move(table));
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
        const auto n = cfg.n_grid[i];
        const auto nd = static_cast<double>(n);
        const std::string suffix = "_n" + std::to_string(n);
        report.statistics.push_back(summarize("norm" + suffix, column(reps, [i](const auto& r) { return r[i].norm; })));
        report.statistics.push_back(
            summarize("scaled_statistic" + suffix, column(reps, [i](const auto& r) { return r[i].scaled; })));
        report.statistics.push_back(summarize(
            "max_count" + suffix, column(reps, [i](const auto& r) { return static_cast<double>(r[i].max_count); })));
        report.theory["m" + suffix] = std::log(nd) / std::log(std::log(nd));
    }
    report.checks.push_back({"norm_nondecreasing_in_n", monotone_fail == 0, std::to_string(monotone_fail) + " violations"});
    report.checks.push_back({"norm_dominates_rayleigh", rayleigh_fail == 0, std::to_string(rayleigh_fail) + " violations"});
    if (cfg.n_grid.size() >= 2) {
        const double first = report.statistic("scaled_statistic_n" + std::to_string(cfg.n_grid.front())).median;
        const double last = report.statistic("scaled_statistic_n" + std::to_string(cfg.n_grid.back())).median;
        report.checks.push_back({"scaled_statistic_grows", last > first,
                                 "median " + fmt(last) + " at largest n vs " + fmt(first) + " at smallest n"});
    }
    report.runtime_seconds = clock.seconds();
    return report;
}

ExperimentReport run_divergence(const ExperimentConfig& cfg, const RunOptions& opts) {
    Stopwatch clock;
    auto report = begin(cfg, "divergence");
    const double lambda = pointproc::intensity(cfg.process);
    const auto reps = replicate(cfg.replications, cfg.master_seed, opts.threads, [&](std::int64_t, std::uint64_t seed) {
        const auto config = pointproc::sample(cfg.process, cfg.window, seed);
        std::vector<double> out;
        for (const double x : cfg.x_grid) out.push_back(pointproc::reciprocal_sum(config, x));
        return out;
    });
    std::int64_t monotone_fail = 0;
    for (const auto& r : reps)
        for (std::size_t i = 1; i < r.size(); ++i)
            if (r[i] < r[i - 1]) ++monotone_fail;
    report.theory["intensity"] = lambda;
    for (std::size_t j = 0; j < cfg.x_grid.size(); ++j) {
        const std::string name = "reciprocal_sum_x" + tag(cfg.x_grid[j]);
        report.statistics.push_back(summarize(name, column(reps, [j](const auto& r) { return r[j]; })));
        const double expected = lambda * std::log(cfg.x_grid[j]);
        report.theory["expected_" + name] = expected;
        // A pinned lattice is not stationary; Campbell's formula does not apply.
        if (!pinned_lattice(cfg.process))
            report.checks.push_back(band_check("campbell_mean_" + name, report.statistics.back(), expected));
    }
    report.checks.push_back({"sums_nondecreasing_in_x", monotone_fail == 0, std::to_string(monotone_fail) + " violations"});
    report.runtime_seconds = clock.seconds();
    return report;
}

ExperimentReport run_muntz(const ExperimentConfig& cfg, const gaussians::TargetFunction& f, const RunOptions& opts) {
    Stopwatch clock;
    auto c = cfg;
    c.target = f;
    auto report = begin(c, "muntz");
    const auto curves = replicate(cfg.replications, cfg.master_seed, opts.threads, [&](std::int64_t, std::uint64_t seed) {
        const auto config = pointproc::sample(cfg.process, cfg.window, seed);
        return muntz::density_curve(config, cfg.variance, cfg.interval, f, cfg.ordering);
    });
    Table table{"density_curves", {"replication", "k", "distance", "relative_distance", "truncated_distance"}, {}};
    std::int64_t monotone_fail = 0;
    std::vector<double> first, last, atoms, raw_increases;
    for (std::size_t r = 0; r < curves.size(); ++r) {
        const auto& cv = curves[r];
        for (std::size_t i = 0; i < cv.counts.size(); ++i) {
            table.rows.push_back({static_cast<std::int64_t>(r), cv.counts[i], cv.distances[i],
                                  cv.distances[i] / cv.target_norm, cv.truncated[i]});
            if (i > 0 && cv.distances[i] > cv.distances[i - 1] + 1e-8 * cv.target_norm) ++monotone_fail;
        }
        std::int64_t increases = 0;
        for (std::size_t i = 1; i < cv.truncated.size(); ++i)
            if (cv.truncated[i] > cv.truncated[i - 1] + 1e-8 * cv.target_norm) ++increases;
        raw_increases.push_back(static_cast<double>(increases));
        first.push_back(cv.distances.empty() ? 1.0 : cv.distances.front() / cv.target_norm);
        last.push_back(cv.distances.empty() ? 1.0 : cv.distances.back() / cv.target_norm);
        atoms.push_back(cv.counts.empty() ? 0.0 : static_cast<double>(cv.counts.back()));
    }
    report.tables.push_back(std::move(table));
    report.theory["target_norm"] = std::sqrt(gaussians::norm_sq(f, cfg.interval));
    report.statistics.push_back(summarize("first_relative_distance", first));
    report.statistics.push_back(summarize("final_relative_distance", last));
    report.statistics.push_back(summarize("atoms", atoms));
    report.statistics.push_back(summarize("truncated_increases", raw_increases));
    report.checks.push_back({"curves_nonincreasing", monotone_fail == 0, std::to_string(monotone_fail) + " violations"});
    const double med = report.statistic("final_relative_distance").median;
    report.checks.push_back({"median_final_distance", med <= cfg.muntz_tolerance,
                             "median " + fmt(med) + " vs tolerance " + fmt(cfg.muntz_tolerance)});
    report.runtime_seconds = clock.seconds();
    return report;
}

ExperimentReport run_sample(const ExperimentConfig& cfg, const RunOptions& opts) {
    Stopwatch clock;
    auto report = begin(cfg, "sample");
    const auto configs = replicate(cfg.replications, cfg.master_seed, opts.threads, [&](std::int64_t, std::uint64_t seed) {
        return pointproc::sample(cfg.process, cfg.window, seed);
    });
    Table table{"points", {"replication", "index", "theta", "weight"}, {}};
    std::vector<double> counts;
    for (std::size_t r = 0; r < configs.size(); ++r) {
        const auto pts = configs[r].points();
        const auto wts = configs[r].weights();
        for (std::size_t i = 0; i < pts.size(); ++i)
            table.rows.push_back({static_cast<std::int64_t>(r), static_cast<std::int64_t>(i), pts[i], wts[i]});
        counts.push_back(static_cast<double>(pts.size()));
    }
    report.tables.push_back(std::move(table));
    report.theory["expected_count"] = pointproc::intensity(cfg.process) * cfg.window.length();
    report.statistics.push_back(summarize("count", counts));
    report.runtime_seconds = clock.seconds();
    return report;
}

ExperimentReport run_spectrum(const ExperimentConfig& cfg, const RunOptions& opts) {
    Stopwatch clock;
    auto report = begin(cfg, "spectrum");
    const auto summaries = replicate(cfg.replications, cfg.master_seed, opts.threads, [&](std::int64_t, std::uint64_t seed) {
        const auto config = pointproc::sample(cfg.process, cfg.window, seed);
        return spectral::spectrum(op::build_restricted(config, cfg.variance, cfg.interval, cfg.tail_tol));
    });
    Table table{"eigenvalues", {"replication", "index", "eigenvalue"}, {}};
    for (std::size_t r = 0; r < summaries.size(); ++r)
        for (std::size_t i = 0; i < summaries[r].eigenvalues.size(); ++i)
            table.rows.push_back({static_cast<std::int64_t>(r), static_cast<std::int64_t>(i), summaries[r].eigenvalues[i]});
    report.tables.push_back(std::move(table));
    report.statistics.push_back(summarize("operator_norm", column(summaries, [](const auto& s) { return s.operator_norm; })));
    report.statistics.push_back(summarize("nuclear_norm", column(summaries, [](const auto& s) { return s.nuclear_norm; })));
    report.statistics.push_back(summarize("trace", column(summaries, [](const auto& s) { return s.trace; })));
    report.statistics.push_back(summarize(
        "rank_bound", column(summaries, [](const auto& s) { return static_cast<double>(s.rank_bound()); })));
    report.runtime_seconds = clock.seconds();
    return report;
}

ExperimentReport run(const ExperimentConfig& cfg, const RunOptions& opts) {
    const auto& e = cfg.experiment;
    ExperimentReport report;
    if (e == "campbell") report = run_campbell(cfg, opts);
    else if (e == "frame-bound") report = run_frame_bound(cfg, cfg.target, opts);
    else if (e == "nuclear") report = run_nuclear(cfg, opts);
    else if (e == "widths") report = run_widths(cfg, opts);
    else if (e == "norm-growth") report = run_norm_growth(cfg, opts);
    else if (e == "divergence") report = run_divergence(cfg, opts);
    else if (e == "muntz") report = run_muntz(cfg, cfg.target, opts);
    else if (e == "sample") report = run_sample(cfg, opts);
    else if (e == "spectrum") report = run_spectrum(cfg, opts);
    else throw InvalidArgument("unknown experiment '" + e + "'");
    require_finite(report);
    return report;
}

}  // namespace randop::harness
