#pragma once

// Distance in L2([a, b]) from a target function to the span of projected
// Gaussian shifts along a point configuration.

#include <cstdint>
#include <vector>

#include "randop/gaussians.hpp"
#include "randop/restricted_operator.hpp"

namespace randop::muntz {

using gaussians::TargetFunction;

/// Eigenvalues of the unit-diagonal Gram matrix below this fraction of the largest one are
/// dropped from the pseudo-inverse.
inline constexpr double kPseudoInverseFloor = 1e-12;

enum class Ordering { ByDistanceToCenter, ByIndex };

struct DensityCurve {
    std::vector<std::int64_t> counts;
    /// span_distance with the first counts[i] atoms alone.
    std::vector<double> truncated;
    /// min(truncated[0..i]). Each truncated[j] is the exact distance to a
    /// subspace of the span of the first counts[j] <= counts[i] atoms, so this
    /// is an upper bound on the distance to the span of the first counts[i].
    std::vector<double> distances;
    double target_norm = 0.0;
};

/// sqrt(max(0, ||f||^2 - c^T G^+ c)) over the operator interval.
/// The pseudo-inverse is taken after scaling G to unit diagonal.
double span_distance(const op::RestrictedOperator& op, const TargetFunction& f);

/// Contributors of build_restricted(config, ...) sorted by `ordering`.
std::vector<op::Contributor> ordered_contributors(const pointproc::PointConfiguration& config, double variance,
                                                  const pointproc::Window& interval, Ordering ordering);

/// 1, 2, 4, ... below `total`, then `total`.
std::vector<std::int64_t> log_grid(std::int64_t total);

/// Span distances using the first k ordered atoms, for k on log_grid.
DensityCurve density_curve(const pointproc::PointConfiguration& config, double variance,
                           const pointproc::Window& interval, const TargetFunction& f,
                           Ordering ordering = Ordering::ByDistanceToCenter);

}  // namespace randop::muntz
