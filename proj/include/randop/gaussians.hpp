#pragma once

// Closed-form Gaussian densities, normal CDF and L2 inner products of
// Gaussian bumps and interval indicators, on the full line or an interval.

#include <optional>
#include <variant>
#include <vector>

#include "randop/pointproc.hpp"

namespace randop::gaussians {

using pointproc::Window;

/// coefficient * p_variance(u - center)
struct GaussianBump {
    double center = 0.0;
    double variance = 1.0;
    double coefficient = 1.0;
};

/// coefficient * 1_[lo, hi)(u)
struct IndicatorAtom {
    double lo = 0.0;
    double hi = 1.0;
    double coefficient = 1.0;
};

using Atom = std::variant<GaussianBump, IndicatorAtom>;

/// Finite linear combination of atoms.
struct TargetFunction {
    std::vector<Atom> atoms;

    TargetFunction() = default;
    TargetFunction(std::initializer_list<Atom> a) : atoms(a) {}
    explicit TargetFunction(std::vector<Atom> a) : atoms(std::move(a)) {}

    [[nodiscard]] double operator()(double u) const;
};

void validate(const Atom& atom);
void validate(const TargetFunction& f);

/// Normal density with mean zero; exactly 0 when the exponent is below -700.
double density(double variance, double x);

/// Standard normal CDF. Phi(-x) = 1 - Phi(x) by construction.
double normal_cdf(double x);

/// Phi(hi) - Phi(lo), evaluated in the tail that avoids cancellation.
double normal_mass(double lo, double hi);

double inner_full(const GaussianBump& b1, const GaussianBump& b2);
double inner_full(const Atom& a1, const Atom& a2);

/// Integral of a1 * a2 over [interval.lo, interval.hi].
double inner_restricted(const Atom& a1, const Atom& a2, const Window& interval);

/// Inner product over `interval`, or over the full line for nullopt.
double inner(const Atom& a1, const Atom& a2, const std::optional<Window>& interval);

/// Double integral of a1(u) a2(v) p_smoothing(u - v) over the plane.
double convolved_inner(const Atom& a1, const Atom& a2, double smoothing_variance);

/// ||f||^2 over the interval (or full line), clamped at 0.
double norm_sq(const TargetFunction& f, const std::optional<Window>& interval);

/// <f, g> summed over atom pairs.
double inner(const TargetFunction& f, const TargetFunction& g, const std::optional<Window>& interval);

}  // namespace randop::gaussians
