#include "randop/gaussians.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "randop/errors.hpp"

namespace randop::gaussians {

namespace {

constexpr double kUnderflowExponent = -700.0;

struct AtomValidator {
    void operator()(const GaussianBump& b) const {
        require(std::isfinite(b.center), "bump center must be finite");
        require(std::isfinite(b.variance) && b.variance > 0.0, "bump variance must be positive");
        require(std::isfinite(b.coefficient), "bump coefficient must be finite");
    }
    void operator()(const IndicatorAtom& a) const {
        require(std::isfinite(a.lo) && std::isfinite(a.hi), "indicator bounds must be finite");
        require(a.lo <= a.hi, "indicator requires lo <= hi");
        require(std::isfinite(a.coefficient), "indicator coefficient must be finite");
    }
};

double overlap(double lo1, double hi1, double lo2, double hi2) {
    return std::max(0.0, std::min(hi1, hi2) - std::max(lo1, lo2));
}

// Integral of p_v(u - m) over [lo, hi].
double bump_mass(double m, double v, double lo, double hi) {
    if (!(lo < hi)) return 0.0;
    const double s = std::sqrt(v);
    return normal_mass((lo - m) / s, (hi - m) / s);
}

// Product p_{v1}(u - s) p_{v2}(u - t) = p_{v1+v2}(s - t) p_v(u - m).
struct Product {
    double scale;
    double mean;
    double variance;
};

Product gaussian_product(const GaussianBump& b1, const GaussianBump& b2) {
    const double vs = b1.variance + b2.variance;
    return {density(vs, b1.center - b2.center),
            (b2.variance * b1.center + b1.variance * b2.center) / vs,
            b1.variance * b2.variance / vs};
}

constexpr double kInf = std::numeric_limits<double>::infinity();

double restricted_pair(const Atom& a1, const Atom& a2, double lo, double hi) {
    if (const auto* b1 = std::get_if<GaussianBump>(&a1)) {
        if (const auto* b2 = std::get_if<GaussianBump>(&a2)) {
            const Product p = gaussian_product(*b1, *b2);
            if (p.scale == 0.0) return 0.0;
            const double mass = (lo == -kInf && hi == kInf) ? 1.0 : bump_mass(p.mean, p.variance, lo, hi);
            return b1->coefficient * b2->coefficient * p.scale * mass;
        }
        const auto& ind = std::get<IndicatorAtom>(a2);
        return b1->coefficient * ind.coefficient *
               bump_mass(b1->center, b1->variance, std::max(lo, ind.lo), std::min(hi, ind.hi));
    }
    const auto& i1 = std::get<IndicatorAtom>(a1);
    if (std::holds_alternative<GaussianBump>(a2)) return restricted_pair(a2, a1, lo, hi);
    const auto& i2 = std::get<IndicatorAtom>(a2);
    return i1.coefficient * i2.coefficient *
           overlap(std::max(lo, i1.lo), std::min(hi, i1.hi), i2.lo, i2.hi);
}

// Antiderivative of Phi(x / sigma) in x.
double integrated_cdf(double x, double sigma) {
    const double z = x / sigma;
    return sigma * (z * normal_cdf(z) + density(1.0, z));
}

}  // namespace

void validate(const Atom& atom) { std::visit(AtomValidator{}, atom); }

void validate(const TargetFunction& f) {
    for (const auto& a : f.atoms) validate(a);
}

double TargetFunction::operator()(double u) const {
    double s = 0.0;
    for (const auto& a : atoms) {
        if (const auto* b = std::get_if<GaussianBump>(&a)) {
            s += b->coefficient * density(b->variance, u - b->center);
        } else {
            const auto& ind = std::get<IndicatorAtom>(a);
            if (ind.lo <= u && u < ind.hi) s += ind.coefficient;
        }
    }
    return s;
}

double density(double variance, double x) {
    require(variance > 0.0, "density requires positive variance");
    const double e = -x * x / (2.0 * variance);
    if (e < kUnderflowExponent) return 0.0;
    return std::exp(e) / std::sqrt(2.0 * std::numbers::pi * variance);
}

double normal_cdf(double x) {
    // Upper tail through erfc keeps full relative accuracy for large |x|.
    const double tail = 0.5 * std::erfc(std::abs(x) / std::numbers::sqrt2);
    return x < 0.0 ? tail : 1.0 - tail;
}

double normal_mass(double lo, double hi) {
    if (!(lo < hi)) return 0.0;
    constexpr double r = 1.0 / std::numbers::sqrt2;
    if (lo >= 0.0) return 0.5 * (std::erfc(lo * r) - std::erfc(hi * r));
    if (hi <= 0.0) return 0.5 * (std::erfc(-hi * r) - std::erfc(-lo * r));
    return 1.0 - 0.5 * std::erfc(-lo * r) - 0.5 * std::erfc(hi * r);
}

double inner_full(const GaussianBump& b1, const GaussianBump& b2) {
    return b1.coefficient * b2.coefficient * density(b1.variance + b2.variance, b1.center - b2.center);
}

double inner_full(const Atom& a1, const Atom& a2) { return restricted_pair(a1, a2, -kInf, kInf); }

double inner_restricted(const Atom& a1, const Atom& a2, const Window& interval) {
    return restricted_pair(a1, a2, interval.lo, interval.hi);
}

double inner(const Atom& a1, const Atom& a2, const std::optional<Window>& interval) {
    return interval ? inner_restricted(a1, a2, *interval) : inner_full(a1, a2);
}

double inner(const TargetFunction& f, const TargetFunction& g, const std::optional<Window>& interval) {
    double s = 0.0;
    for (const auto& a : f.atoms)
        for (const auto& b : g.atoms) s += inner(a, b, interval);
    return s;
}

double convolved_inner(const Atom& a1, const Atom& a2, double smoothing_variance) {
    require(smoothing_variance > 0.0, "smoothing variance must be positive");
    if (const auto* b1 = std::get_if<GaussianBump>(&a1)) {
        if (const auto* b2 = std::get_if<GaussianBump>(&a2)) {
            return b1->coefficient * b2->coefficient *
                   density(b1->variance + b2->variance + smoothing_variance, b1->center - b2->center);
        }
        const auto& ind = std::get<IndicatorAtom>(a2);
        return b1->coefficient * ind.coefficient *
               bump_mass(b1->center, b1->variance + smoothing_variance, ind.lo, ind.hi);
    }
    if (std::holds_alternative<GaussianBump>(a2)) return convolved_inner(a2, a1, smoothing_variance);
    const auto& i1 = std::get<IndicatorAtom>(a1);
    const auto& i2 = std::get<IndicatorAtom>(a2);
    const double sigma = std::sqrt(smoothing_variance);
    const double v = integrated_cdf(i1.hi - i2.lo, sigma) - integrated_cdf(i1.lo - i2.lo, sigma) -
                     integrated_cdf(i1.hi - i2.hi, sigma) + integrated_cdf(i1.lo - i2.hi, sigma);
    return i1.coefficient * i2.coefficient * v;
}

double norm_sq(const TargetFunction& f, const std::optional<Window>& interval) {
    // Symmetric accumulation: diagonal once, off-diagonal pairs doubled.
    double s = 0.0;
    for (std::size_t i = 0; i < f.atoms.size(); ++i) {
        s += inner(f.atoms[i], f.atoms[i], interval);
        for (std::size_t j = i + 1; j < f.atoms.size(); ++j)
            s += 2.0 * inner(f.atoms[i], f.atoms[j], interval);
    }
    return std::max(0.0, s);
}

}  // namespace randop::gaussians
