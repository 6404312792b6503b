#include <doctest.h>

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "oracles.hpp"
#include "randop/errors.hpp"
#include "randop/harness.hpp"

using namespace randop;
using namespace randop::harness;
using nlohmann::json;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("randop-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    os << text;
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "randop");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

ExperimentConfig small(const std::string& experiment, std::int64_t reps) {
    auto c = default_config(experiment);
    c.replications = reps;
    return c;
}

std::string all_csv(const ExperimentReport& r) {
    std::string out;
    for (const auto& s : r.statistics) {
        Table t{s.name, {"replication", "value"}, {}};
        for (std::size_t i = 0; i < s.values.size(); ++i) t.rows.push_back({static_cast<std::int64_t>(i), s.values[i]});
        out += to_csv(t);
    }
    for (const auto& t : r.tables) out += to_csv(t);
    return out;
}

}  // namespace

TEST_CASE("summary statistics on a hand-checked fixture") {
    const auto s = summarize("x", {2.0, 4.0, 1.0, 5.0, 3.0});
    CHECK(s.mean == 3.0);
    CHECK(s.se == std::sqrt(2.5) / std::sqrt(5.0));
    CHECK(s.median == 3.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
    const auto one = summarize("y", {7.0});
    CHECK(one.mean == 7.0);
    CHECK(one.se == 0.0);
}

TEST_CASE("replicate indexes results by replication and rethrows") {
    const auto out = replicate(37, 5, 4, [](std::int64_t r, std::uint64_t seed) {
        return std::make_pair(r, seed);
    });
    REQUIRE(out.size() == 37);
    for (std::int64_t r = 0; r < 37; ++r) {
        CHECK(out[static_cast<std::size_t>(r)].first == r);
        CHECK(out[static_cast<std::size_t>(r)].second == stream_seed(5, static_cast<std::uint64_t>(r)));
    }
    CHECK_THROWS_AS(replicate(10, 1, 3,
                              [](std::int64_t r, std::uint64_t) -> int {
                                  if (r == 6) throw NumericalFailure("boom");
                                  return 0;
                              }),
                    NumericalFailure);
}

TEST_CASE("config parsing: defaults, overrides and round trip") {
    const auto c = parse_config(json::object(), "widths");
    CHECK(c.variance == 2.0);
    CHECK(c.interval == pointproc::Window(-3, 3));
    CHECK(c.replications == 50);

    const auto doc = json::parse(R"({
        "experiment": "muntz", "process": {"kind": "renewal", "shape": 2.0, "mean": 0.5},
        "variance": 0.8, "interval": [-2, 2], "window": [-6, 6], "replications": 3, "master_seed": 99,
        "target": [{"type": "gaussian", "center": 0.1, "variance": 0.5}, {"type": "indicator", "lo": -1, "hi": 0.5, "coefficient": 2}],
        "ordering": "by-index", "muntz_tolerance": 0.1})");
    const auto m = parse_config(doc, "muntz");
    CHECK(std::get<pointproc::GammaRenewal>(m.process).shape == 2.0);
    CHECK(m.master_seed == 99);
    CHECK(m.target.atoms.size() == 2);
    CHECK(m.ordering == muntz::Ordering::ByIndex);
    const auto again = parse_config(to_json(m), "muntz");
    CHECK(to_json(again) == to_json(m));
}

TEST_CASE("config parsing rejects invalid documents") {
    const std::vector<std::pair<std::string, std::string>> bad{
        {"campbell", R"({"colour": 1})"},
        {"campbell", R"({"experiment": "nuclear"})"},
        {"campbell", R"({"replications": 0})"},
        {"campbell", R"({"replications": 2.5})"},
        {"campbell", R"({"variance": -1})"},
        {"campbell", R"({"variance": "big"})"},
        {"campbell", R"({"probes": []})"},
        {"campbell", R"({"process": {"kind": "cox"}})"},
        {"campbell", R"({"process": {"kind": "poisson", "intensity": 0}})"},
        {"campbell", R"({"process": {"kind": "poisson", "rate": 1}})"},
        {"campbell", R"({"master_seed": -4})"},
        {"campbell", R"({"tail_tol": 1.5})"},
        {"nuclear", R"({"interval": [0, 20]})"},
        {"nuclear", R"({"interval": [1, 0]})"},
        {"norm-growth", R"({"n_grid": [4, 2]})"},
        {"norm-growth", R"({"n_grid": [2, 4]})"},
        {"norm-growth", R"({"window": [-260, 260]})"},
        {"divergence", R"({"x_grid": [0.5, 10]})"},
        {"divergence", R"({"x_grid": [10, 2000]})"},
        {"widths", R"({"x_grid": []})"},
        {"frame-bound", R"({"target": []})"},
        {"muntz", R"({"target": [{"type": "gaussian", "variance": 0}]})"},
        {"muntz", R"({"ordering": "random"})"},
        {"muntz", R"({"target": [{"type": "indicator", "lo": 20, "hi": 21}]})"},
    };
    for (const auto& [exp, text] : bad) {
        INFO(exp << " " << text);
        CHECK_THROWS_AS(parse_config(json::parse(text), exp), InvalidArgument);
    }
    CHECK_THROWS_AS(default_config("no-such-experiment"), InvalidArgument);
}

TEST_CASE("campbell: examples") {
    auto c = small("campbell", 3);
    c.process = pointproc::ShiftedLattice{0.5, std::nullopt};
    c.probes = {-1.3, 0.0, 0.77};
    const auto r = run_campbell(c);
    for (const auto& s : r.statistics)
        for (const double v : s.values) CHECK(std::abs(v - 2.0) < 1e-8);

    auto e = small("campbell", 2);
    e.window = pointproc::Window(0, 0);
    const auto re = run_campbell(e);
    for (const double v : re.statistics.front().values) CHECK(v == 0.0);
}

TEST_CASE("frame-bound: examples") {
    auto c = small("frame-bound", 4);
    c.process = pointproc::ShiftedLattice{1000.0, 0.0};
    const gaussians::TargetFunction bump{gaussians::GaussianBump{0.0, 1.0, 1.0}};
    const auto r = run_frame_bound(c, bump);
    const double p2 = oracle::gauss(2.0, 0.0);
    for (const double v : r.statistic("frame_sum").values) CHECK(v == doctest::Approx(p2 * p2).epsilon(1e-14));

    const gaussians::TargetFunction zero{gaussians::IndicatorAtom{0, 1, 1.0}, gaussians::IndicatorAtom{0, 1, -1.0}};
    CHECK_THROWS_AS(run_frame_bound(c, zero), InvalidArgument);

    // The Campbell expectation against a nested-quadrature oracle.
    auto p = small("frame-bound", 1);
    const auto rp = run_frame_bound(p, p.target);
    const double nested = oracle::simpson(
        [](double u) { return oracle::simpson([u](double v) { return oracle::gauss(2.0, u - v); }, 0.0, 1.0, 1e-14); },
        0.0, 1.0, 1e-13);
    CHECK(std::abs(rp.theory.at("campbell_expectation") - nested) <= 1e-11);
    CHECK(rp.theory.at("bound") == 1.0);
}

TEST_CASE("nuclear: examples") {
    auto c = small("nuclear", 20);
    const auto r = run_nuclear(c);
    CHECK(r.theory.at("expected_trace") == doctest::Approx(0.28209479).epsilon(1e-8));
    for (std::size_t i = 0; i < 20; ++i) {
        const double t = r.statistic("trace").values[i], n = r.statistic("nuclear_norm").values[i];
        CHECK(std::abs(t - n) <= 1e-9 * (1.0 + t));
    }
    c.interval = pointproc::Window(0.5, 0.5);
    const auto z = run_nuclear(c);
    for (const double t : z.statistic("trace").values) CHECK(t == 0.0);
}

TEST_CASE("widths: report layout and tail checks") {
    const auto r = run_widths(small("widths", 3));
    const auto& t = r.table("widths");
    CHECK(t.columns == std::vector<std::string>{"replication", "n", "d_n", "log_d_n", "y_n"});
    CHECK(r.theory.at("tail_checks") == 24.0);
    CHECK(r.theory.at("tail_checks_passed") == 24.0);
    const auto csv = to_csv(t);
    CHECK(csv.rfind("replication,n,d_n,log_d_n,y_n\n", 0) == 0);
    for (const auto& row : t.rows) {
        const double d = std::get<double>(row[2]);
        CHECK(std::get<double>(row[3]) == std::log(d));
    }
}

TEST_CASE("norm-growth: report layout and invariants") {
    auto c = small("norm-growth", 2);
    c.n_grid = {3, 6, 12};
    c.window = pointproc::Window(-30, 30);
    const auto r = run_norm_growth(c);
    CHECK(r.table("norm_growth").columns ==
          std::vector<std::string>{"replication", "n", "norm", "max_count", "scaled_statistic", "rayleigh_bound"});
    CHECK(r.table("norm_growth").rows.size() == 6);
    for (const auto& ch : r.checks)
        if (ch.name != "scaled_statistic_grows") CHECK_MESSAGE(ch.passed, ch.name);
    CHECK(r.theory.at("m_n12") == doctest::Approx(std::log(12.0) / std::log(std::log(12.0))).epsilon(1e-15));
}

TEST_CASE("divergence: lattice harmonic numbers") {
    auto c = small("divergence", 2);
    c.process = pointproc::ShiftedLattice{1.0, 0.0};
    const auto r = run_divergence(c);
    for (const double x : c.x_grid) {
        double h = 0.0;
        for (int k = 1; k <= static_cast<int>(x); ++k) h += 1.0 / k;
        std::ostringstream name;
        name << "reciprocal_sum_x" << x;
        for (const double v : r.statistic(name.str()).values) CHECK(v == doctest::Approx(h).epsilon(1e-15));
    }
    CHECK(r.statistic("reciprocal_sum_x10").values[0] == 2.9289682539682538);
    CHECK(r.all_checks_passed());
}

TEST_CASE("muntz: target in the span gives a zero curve") {
    auto c = small("muntz", 2);
    c.process = pointproc::ShiftedLattice{1.0, 0.25};
    const gaussians::TargetFunction f{gaussians::GaussianBump{0.25, 1.0, 1.0}};
    const auto r = run_muntz(c, f);
    for (const double v : r.statistic("final_relative_distance").values) CHECK(v <= 1e-7);
    CHECK(r.all_checks_passed());
}

TEST_CASE("sample and spectrum experiments") {
    const auto s = run_sample(small("sample", 1));
    CHECK(s.table("points").rows.size() == static_cast<std::size_t>(s.statistic("count").values[0]));
    const auto sp = run_spectrum(small("spectrum", 1));
    const auto& rows = sp.table("eigenvalues").rows;
    REQUIRE(!rows.empty());
}

TEST_CASE("reports are independent of thread count and reruns") {
    for (const auto& name : experiment_names()) {
        auto c = default_config(name);
        c.replications = name == "sample" || name == "spectrum" ? 1 : 5;
        if (name == "norm-growth") {
            c.n_grid = {3, 8};
            c.window = pointproc::Window(-21, 21);
        }
        INFO(name);
        const auto a = run(c, RunOptions{1});
        const auto b = run(c, RunOptions{4});
        const auto again = run(c, RunOptions{3});
        CHECK(all_csv(a) == all_csv(b));
        CHECK(all_csv(a) == all_csv(again));
    }
}

TEST_CASE("require_finite flags non-finite values") {
    ExperimentReport r;
    r.statistics.push_back(summarize("ok", {1.0, 2.0}));
    CHECK_NOTHROW(require_finite(r));
    r.tables.push_back(Table{"t", {"a"}, {{std::nan("")}}});
    CHECK_THROWS_AS(require_finite(r), NumericalFailure);
}

TEST_CASE("cli: exit codes and written files") {
    const auto dir = scratch_dir("cli");
    spit(dir / "campbell.json", R"({"replications": 20, "master_seed": 7})");
    const auto out1 = dir / "run1", out2 = dir / "run2";
    CHECK(run_cli({"campbell", "--config", (dir / "campbell.json").string(), "--out", out1.string()}) == 0);
    CHECK(std::filesystem::exists(out1 / "report.json"));
    CHECK(std::filesystem::exists(out1 / "shot_sum_u0.csv"));
    const auto report = json::parse(slurp(out1 / "report.json"));
    CHECK(report["master_seed"] == 7);
    CHECK(report["replications"] == 20);

    CHECK(run_cli({"campbell", "--config", (dir / "campbell.json").string(), "--out", out2.string(), "--threads", "3"}) == 0);
    CHECK(slurp(out1 / "shot_sum_u0.csv") == slurp(out2 / "shot_sum_u0.csv"));

    const auto out3 = dir / "run3";
    CHECK(run_cli({"campbell", "--config", (dir / "campbell.json").string(), "--out", out3.string(), "--seed", "8",
                   "--reps", "4"}) == 0);
    CHECK(json::parse(slurp(out3 / "report.json"))["replications"] == 4);
    CHECK(slurp(out1 / "shot_sum_u0.csv") != slurp(out3 / "shot_sum_u0.csv"));

    CHECK(run_cli({"campbell", "--config", (dir / "missing.json").string()}) == 1);
    spit(dir / "broken.json", "{ not json");
    CHECK(run_cli({"campbell", "--config", (dir / "broken.json").string()}) == 1);
    spit(dir / "unknown.json", R"({"replication": 3})");
    CHECK(run_cli({"campbell", "--config", (dir / "unknown.json").string()}) == 1);
    CHECK(run_cli({"no-such-experiment", "--config", (dir / "campbell.json").string()}) == 1);
    CHECK(run_cli({"campbell"}) == 1);

    spit(dir / "huge.json", R"({"replications": 2, "target": [{"type": "indicator", "lo": 0, "hi": 1, "coefficient": 1e200}]})");
    CHECK(run_cli({"frame-bound", "--config", (dir / "huge.json").string(), "--out", (dir / "huge").string()}) == 2);

    spit(dir / "strict.json", R"({"replications": 2, "muntz_tolerance": 1e-300})");
    CHECK(run_cli({"muntz", "--config", (dir / "strict.json").string(), "--out", (dir / "strict").string()}) == 0);
    CHECK(run_cli({"muntz", "--config", (dir / "strict.json").string(), "--out", (dir / "strict").string(), "--check"}) == 3);
    std::filesystem::remove_all(dir);
}
