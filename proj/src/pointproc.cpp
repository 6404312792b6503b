#include "randop/pointproc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "randop/errors.hpp"
#include "randop/rng.hpp"

namespace randop::pointproc {

Window::Window(double lo_, double hi_) : lo(lo_), hi(hi_) {
    require(std::isfinite(lo) && std::isfinite(hi), "window bounds must be finite");
    require(lo <= hi, "window requires lo <= hi");
}

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

struct Validator {
    void operator()(const Poisson& p) const {
        require(positive_finite(p.intensity), "Poisson intensity must be positive and finite");
    }
    void operator()(const GammaRenewal& r) const {
        require(positive_finite(r.shape), "renewal shape must be positive and finite");
        require(positive_finite(r.mean), "renewal mean must be positive and finite");
    }
    void operator()(const ShiftedLattice& l) const {
        require(positive_finite(l.spacing), "lattice spacing must be positive and finite");
        if (l.shift) require(std::isfinite(*l.shift), "lattice shift must be finite");
    }
};

std::vector<double> sample_poisson(const Poisson& p, const Window& w, Engine& eng) {
    const double mean = p.intensity * w.length();
    if (mean <= 0.0) return {};
    std::poisson_distribution<std::int64_t> count_dist(mean);
    const auto n = count_dist(eng);
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        double x = w.lo + w.length() * uniform01(eng);
        if (!(x < w.hi)) x = std::nextafter(w.hi, w.lo);  // rounding guard
        pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end());
    // Coincident draws have probability zero but 53-bit uniforms can collide.
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

std::vector<double> sample_renewal(const GammaRenewal& r, const Window& w, Engine& eng) {
    if (w.length() <= 0.0) return {};
    std::gamma_distribution<double> gap(r.shape, r.mean / r.shape);
    // Burn-in of ten mean gaps approximates the equilibrium start.
    double t = w.lo - 10.0 * r.mean;
    std::vector<double> pts;
    for (;;) {
        t += gap(eng);
        if (t >= w.hi) break;
        if (t >= w.lo && (pts.empty() || t > pts.back())) pts.push_back(t);
    }
    return pts;
}

std::vector<double> sample_lattice(const ShiftedLattice& l, const Window& w, Engine& eng) {
    const double s = l.shift ? *l.shift : l.spacing * uniform01(eng);
    if (w.length() <= 0.0) return {};
    std::vector<double> pts;
    const auto k0 = static_cast<std::int64_t>(std::ceil((w.lo - s) / l.spacing));
    for (std::int64_t k = k0;; ++k) {
        const double x = s + static_cast<double>(k) * l.spacing;
        if (x < w.lo) continue;
        if (x >= w.hi) break;
        pts.push_back(x);
    }
    return pts;
}

}  // namespace

void validate(const ProcessSpec& spec) { std::visit(Validator{}, spec); }

double intensity(const ProcessSpec& spec) {
    validate(spec);
    if (const auto* p = std::get_if<Poisson>(&spec)) return p->intensity;
    if (const auto* r = std::get_if<GammaRenewal>(&spec)) return 1.0 / r->mean;
    return 1.0 / std::get<ShiftedLattice>(spec).spacing;
}

PointConfiguration::PointConfiguration(Window window) : window_(window) {}

PointConfiguration::PointConfiguration(Window window, std::vector<double> points)
    : PointConfiguration(window, points, std::vector<double>(points.size(), 1.0)) {}

PointConfiguration::PointConfiguration(Window window, std::vector<double> points,
                                       std::vector<double> weights)
    : window_(window), points_(std::move(points)), weights_(std::move(weights)) {
    require(points_.size() == weights_.size(), "weights and points must have equal length");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        require(window_.contains(points_[i]), "point outside configuration window");
        require(i == 0 || points_[i - 1] < points_[i], "points must be strictly increasing");
        require(std::isfinite(weights_[i]) && weights_[i] >= 0.0, "weights must be finite and nonnegative");
    }
}

PointConfiguration PointConfiguration::with_weights(std::vector<double> weights) const {
    return PointConfiguration(window_, points_, std::move(weights));
}

PointConfiguration sample(const ProcessSpec& spec, const Window& window, std::uint64_t seed) {
    validate(spec);
    Engine eng = make_engine(seed);
    std::vector<double> pts;
    if (const auto* p = std::get_if<Poisson>(&spec)) {
        pts = sample_poisson(*p, window, eng);
    } else if (const auto* r = std::get_if<GammaRenewal>(&spec)) {
        pts = sample_renewal(*r, window, eng);
    } else {
        pts = sample_lattice(std::get<ShiftedLattice>(spec), window, eng);
    }
    return PointConfiguration(window, std::move(pts));
}

std::int64_t count_closed(const PointConfiguration& config, double lo, double hi) {
    if (hi < lo) return 0;
    const auto pts = config.points();
    const auto first = std::lower_bound(pts.begin(), pts.end(), lo);
    const auto last = std::upper_bound(first, pts.end(), hi);
    return last - first;
}

std::int64_t count_in(const PointConfiguration& config, const Window& interval) {
    require(config.window().covers(interval), "count interval outside configuration window");
    const auto pts = config.points();
    const auto first = std::lower_bound(pts.begin(), pts.end(), interval.lo);
    const auto last = std::lower_bound(first, pts.end(), interval.hi);
    return last - first;
}

CountSequence unit_counts(const PointConfiguration& config, std::int64_t first, std::int64_t last) {
    require(first <= last + 1, "unit_counts requires first <= last + 1");
    const Window range(static_cast<double>(first), static_cast<double>(last + 1));
    require(config.window().covers(range), "unit count range outside configuration window");
    CountSequence out{first, std::vector<std::int64_t>(static_cast<std::size_t>(last + 1 - first), 0)};
    const auto pts = config.points();
    auto it = std::lower_bound(pts.begin(), pts.end(), range.lo);
    for (; it != pts.end() && *it < range.hi; ++it) {
        const auto k = static_cast<std::int64_t>(std::floor(*it)) - first;
        ++out.counts[static_cast<std::size_t>(k)];
    }
    return out;
}

double ergodic_average(const CountSequence& counts, std::int64_t n) {
    require(n >= 1 && n <= static_cast<std::int64_t>(counts.counts.size()),
            "ergodic_average: n out of range");
    std::int64_t s = 0;
    for (std::int64_t k = 0; k < n; ++k) s += counts.counts[static_cast<std::size_t>(k)];
    return static_cast<double>(s) / static_cast<double>(n);
}

double reciprocal_sum(const PointConfiguration& config, double x) {
    require(std::isfinite(x) && x >= 1.0, "reciprocal_sum requires x >= 1");
    require(config.window().lo <= 1.0 && x <= config.window().hi,
            "configuration window does not cover [1, x]");
    const auto pts = config.points();
    double sum = 0.0;
    for (auto it = std::lower_bound(pts.begin(), pts.end(), 1.0); it != pts.end() && *it <= x; ++it)
        sum += 1.0 / *it;
    return sum;
}

std::int64_t max_unit_count(const CountSequence& counts, std::int64_t n) {
    require(n >= 1 && n <= static_cast<std::int64_t>(counts.counts.size()),
            "max_unit_count: n out of range");
    return *std::max_element(counts.counts.begin(), counts.counts.begin() + n);
}

}  // namespace randop::pointproc
