#pragma once

// Stationary point processes on the line: sampling on finite windows and the
// unit-interval count statistics built on top of a realization.

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace randop::pointproc {

/// Interval [lo, hi). Also used as a closed range in containment checks.
struct Window {
    double lo = 0.0;
    double hi = 0.0;

    Window() = default;
    Window(double lo_, double hi_);

    [[nodiscard]] double length() const { return hi - lo; }
    [[nodiscard]] bool contains(double x) const { return lo <= x && x < hi; }
    /// True when `inner` lies inside this window (endpoints compared closed).
    [[nodiscard]] bool covers(const Window& inner) const {
        return lo <= inner.lo && inner.hi <= hi;
    }

    friend bool operator==(const Window&, const Window&) = default;
};

struct Poisson {
    double intensity = 1.0;
};

/// Renewal process with Gamma(shape, mean/shape) inter-arrival times.
struct GammaRenewal {
    double shape = 1.0;
    double mean = 1.0;
};

/// theta_k = s + k * spacing. s ~ Uniform[0, spacing) unless pinned by `shift`
/// (a pinned shift gives a deterministic, non-stationary fixture).
struct ShiftedLattice {
    double spacing = 1.0;
    std::optional<double> shift;
};

using ProcessSpec = std::variant<Poisson, GammaRenewal, ShiftedLattice>;

/// Throws InvalidArgument on non-finite or non-positive parameters.
void validate(const ProcessSpec& spec);

/// Expected number of points per unit length.
double intensity(const ProcessSpec& spec);

/// A finite realization: strictly increasing points inside `window`, each
/// with a nonnegative weight.
class PointConfiguration {
public:
    PointConfiguration() = default;
    explicit PointConfiguration(Window window);
    /// Weights default to 1. Points must be strictly increasing and in window.
    PointConfiguration(Window window, std::vector<double> points);
    PointConfiguration(Window window, std::vector<double> points, std::vector<double> weights);

    [[nodiscard]] const Window& window() const { return window_; }
    [[nodiscard]] std::span<const double> points() const { return points_; }
    [[nodiscard]] std::span<const double> weights() const { return weights_; }
    [[nodiscard]] std::size_t size() const { return points_.size(); }
    [[nodiscard]] bool empty() const { return points_.empty(); }

    /// Same points, new weights.
    [[nodiscard]] PointConfiguration with_weights(std::vector<double> weights) const;

private:
    Window window_;
    std::vector<double> points_;
    std::vector<double> weights_;
};

/// xi_n = |Theta ∩ [n, n+1)| for n = base, base+1, ...
struct CountSequence {
    std::int64_t base = 0;
    std::vector<std::int64_t> counts;
};

/// Deterministic in (spec, window, seed).
PointConfiguration sample(const ProcessSpec& spec, const Window& window, std::uint64_t seed);

/// Counts over the unit intervals [first, first+1), ..., [last, last+1).
CountSequence unit_counts(const PointConfiguration& config, std::int64_t first, std::int64_t last);

/// Number of points in the half-open interval.
std::int64_t count_in(const PointConfiguration& config, const Window& interval);

/// Number of points in the closed interval [lo, hi]; no window check.
std::int64_t count_closed(const PointConfiguration& config, double lo, double hi);

/// S_n / n over the first n counts.
double ergodic_average(const CountSequence& counts, std::int64_t n);

/// Sum of 1/theta over points in [1, x].
double reciprocal_sum(const PointConfiguration& config, double x);

/// Maximum of the first n counts.
std::int64_t max_unit_count(const CountSequence& counts, std::int64_t n);

}  // namespace randop::pointproc
