#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "randop/muntz.hpp"
#include "randop/rng.hpp"

using namespace randop;
using namespace randop::muntz;
using gaussians::GaussianBump;
using gaussians::IndicatorAtom;
using pointproc::PointConfiguration;
using pointproc::Window;

namespace {

std::vector<double> positions(const std::vector<op::Contributor>& cs) {
    std::vector<double> out;
    for (const auto& c : cs) out.push_back(c.position);
    return out;
}

double grid_distance(const op::RestrictedOperator& op, const TargetFunction& f) {
    return oracle::grid_lsq_distance(positions(op.contributors()), op.variance(), op.interval().lo, op.interval().hi,
                                     [&f](double u) { return f(u); });
}

}  // namespace

TEST_CASE("span_distance: examples") {
    const Window I(-4, 4);
    const auto op = op::build_restricted(PointConfiguration(Window(-6, 6), {-2.0, 0.0, 1.5, 3.0}), 1.0, I);
    for (std::size_t i = 0; i < op.rank_bound(); ++i) {
        const TargetFunction f{op.atom(i)};
        CHECK(span_distance(op, f) <= 1e-7 * std::sqrt(gaussians::norm_sq(f, I)));
    }

    const TargetFunction bump{GaussianBump{0.3, 0.7, 1.0}};
    const auto rank0 = op::build_restricted(std::vector<op::Contributor>{}, 1.0, I);
    CHECK(span_distance(rank0, bump) == std::sqrt(gaussians::norm_sq(bump, I)));

    const auto lattice = op::build_restricted(pointproc::sample(pointproc::ShiftedLattice{0.5, 0.0}, Window(-5, 5), 0), 1.0, I);
    REQUIRE(lattice.rank_bound() == 20);
    const double fnorm = std::sqrt(gaussians::norm_sq(bump, I));
    const double d = span_distance(lattice, bump);
    const double g = grid_distance(lattice, bump);
    CHECK(d <= 0.05 * fnorm);
    CHECK(g <= 0.05 * fnorm);
    CHECK(d >= g - 1e-6 * fnorm);
}

TEST_CASE("span_distance matches the dense-grid least-squares oracle for few atoms") {
    Engine eng = make_engine(41);
    double worst = 0.0;
    for (int t = 0; t < 60; ++t) {
        const double a = -3.0 - 3.0 * uniform01(eng), b = 3.0 + 3.0 * uniform01(eng);
        const double eps = 0.3 + 0.7 * uniform01(eng);
        const int m = 1 + static_cast<int>(12.0 * uniform01(eng));
        std::vector<op::Contributor> cs;
        double x = a - 2.0 + 2.0 * uniform01(eng);
        for (int i = 0; i < m; ++i) {
            cs.push_back({x, 1.0});
            x += 1.0 + uniform01(eng);
        }
        TargetFunction f;
        for (int k = 0; k < 3; ++k)
            f.atoms.emplace_back(GaussianBump{a + (b - a) * uniform01(eng), 0.2 + uniform01(eng), -1.0 + 2.0 * uniform01(eng)});
        const auto op = op::build_restricted(cs, eps, Window(a, b));
        const double fn = std::sqrt(gaussians::norm_sq(f, Window(a, b)));
        if (fn < 1e-8) continue;
        const double err = std::abs(span_distance(op, f) - grid_distance(op, f)) / fn;
        worst = std::max(worst, err);
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("span distances are bounded by the target norm") {
    Engine eng = make_engine(42);
    for (int t = 0; t < 40; ++t) {
        const Window I(-3.0 * uniform01(eng) - 0.1, 3.0 * uniform01(eng));
        const auto cfg = pointproc::sample(pointproc::Poisson{0.5 + 2.0 * uniform01(eng)}, Window(-8, 8), eng());
        const auto op = op::build_restricted(cfg, 0.3 + uniform01(eng), I);
        const TargetFunction f{IndicatorAtom{I.lo + 0.3 * I.length(), I.hi, 1.0}, GaussianBump{0.0, 0.4, -0.6}};
        const double d = span_distance(op, f);
        CHECK(d >= 0.0);
        CHECK(d <= std::sqrt(gaussians::norm_sq(f, I)) + 1e-10);
    }
}

TEST_CASE("ordered_contributors and log_grid") {
    const PointConfiguration cfg(Window(-10, 10), {-6.0, -1.0, 0.5, 2.0, 7.0});
    const auto by_centre = ordered_contributors(cfg, 1.0, Window(-2, 4), Ordering::ByDistanceToCenter);
    REQUIRE(by_centre.size() == 5);
    CHECK(by_centre[0].position == 0.5);
    CHECK(by_centre[1].position == 2.0);
    CHECK(by_centre[2].position == -1.0);
    const auto by_index = ordered_contributors(cfg, 1.0, Window(-2, 4), Ordering::ByIndex);
    CHECK(by_index[0].position == -6.0);
    CHECK(by_index[4].position == 7.0);

    CHECK(log_grid(0).empty());
    CHECK(log_grid(1) == std::vector<std::int64_t>{1});
    CHECK(log_grid(8) == std::vector<std::int64_t>{1, 2, 4, 8});
    CHECK(log_grid(11) == std::vector<std::int64_t>{1, 2, 4, 8, 11});
}

TEST_CASE("density_curve: examples") {
    const Window I(-5, 5);
    const auto cfg = pointproc::sample(pointproc::Poisson{2.0}, Window(-8, 8), 5);
    const auto first = ordered_contributors(cfg, 1.0, I, Ordering::ByDistanceToCenter).front();
    const TargetFunction in_span{GaussianBump{first.position, 1.0, 1.0}};
    const auto flat = density_curve(cfg, 1.0, I, in_span);
    for (const double d : flat.distances) CHECK(d <= 1e-7 * flat.target_norm);

    const TargetFunction box{IndicatorAtom{-1, 1, 1}};
    for (std::uint64_t r = 0; r < 10; ++r) {
        const auto c = density_curve(pointproc::sample(pointproc::Poisson{2.0}, Window(-8, 8), stream_seed(6, r)), 1.0, I, box);
        REQUIRE(c.distances.size() >= 2);
        CHECK(c.distances.back() < c.distances.front());
        CHECK(c.target_norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    }
}

TEST_CASE("density curves are nonincreasing and conservative") {
    const Window I(-5, 5);
    const TargetFunction f{GaussianBump{0.3, 0.7, 1.0}};
    for (std::uint64_t r = 0; r < 6; ++r) {
        const auto cfg = pointproc::sample(pointproc::Poisson{2.0}, Window(-8, 8), stream_seed(1, r));
        for (const auto ordering : {Ordering::ByDistanceToCenter, Ordering::ByIndex}) {
            const auto c = density_curve(cfg, 1.0, I, f, ordering);
            const auto cs = ordered_contributors(cfg, 1.0, I, ordering);
            REQUIRE(c.counts.size() == c.distances.size());
            REQUIRE(c.truncated.size() == c.distances.size());
            double running = c.truncated.front();
            for (std::size_t i = 0; i < c.distances.size(); ++i) {
                running = std::min(running, c.truncated[i]);
                CHECK(c.distances[i] == running);
                if (i) CHECK(c.distances[i] <= c.distances[i - 1] + 1e-8 * c.target_norm);
                CHECK(c.distances[i] >= 0.0);
                CHECK(c.distances[i] <= c.target_norm + 1e-10);
                // Every value is the distance to some subspace of the span of
                // the first k atoms, so it can never undercut the exact
                // least-squares distance to that span.
                const auto k = static_cast<std::size_t>(c.counts[i]);
                const std::vector<double> th = positions({cs.begin(), cs.begin() + static_cast<std::ptrdiff_t>(k)});
                const double g = oracle::grid_lsq_distance(th, 1.0, I.lo, I.hi, [&f](double u) { return f(u); });
                CHECK(c.distances[i] >= g - 1e-6 * c.target_norm);
            }
        }
    }
}
