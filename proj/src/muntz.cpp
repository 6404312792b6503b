#include "randop/muntz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "randop/spectral.hpp"

namespace randop::muntz {

double span_distance(const op::RestrictedOperator& op, const TargetFunction& f) {
    const double f2 = gaussians::norm_sq(f, op.interval());
    if (op.contributors().empty()) return std::sqrt(f2);

    const auto c = op::coefficient_vector(op, f);
    // Unit-diagonal scaling of G and c leaves c^T G^+ c unchanged.
    const Eigen::MatrixXd& g = op.gram();
    Eigen::VectorXd scale(g.rows());
    for (Eigen::Index i = 0; i < g.rows(); ++i) scale(i) = g(i, i) > 0.0 ? 1.0 / std::sqrt(g(i, i)) : 0.0;
    const Eigen::MatrixXd gs = scale.asDiagonal() * g * scale.asDiagonal();
    const auto dec = spectral::eigen_sym(gs);
    const double floor = kPseudoInverseFloor * std::max(dec.values(0), 0.0);
    const Eigen::VectorXd cv =
        scale.cwiseProduct(Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())));

    double projected = 0.0;
    for (Eigen::Index k = 0; k < dec.values.size(); ++k) {
        const double lambda = dec.values(k);
        if (!(lambda > floor)) break;  // descending
        const double t = dec.vectors.col(k).dot(cv);
        projected += t * t / lambda;
    }
    return std::sqrt(std::max(0.0, f2 - projected));
}

std::vector<op::Contributor> ordered_contributors(const pointproc::PointConfiguration& config, double variance,
                                                  const pointproc::Window& interval, Ordering ordering) {
    auto contributors = op::build_restricted(config, variance, interval).contributors();
    if (ordering == Ordering::ByDistanceToCenter) {
        const double center = 0.5 * (interval.lo + interval.hi);
        std::stable_sort(contributors.begin(), contributors.end(), [center](const auto& x, const auto& y) {
            return std::abs(x.position - center) < std::abs(y.position - center);
        });
    }
    return contributors;
}

std::vector<std::int64_t> log_grid(std::int64_t total) {
    std::vector<std::int64_t> ks;
    for (std::int64_t k = 1; k < total; k *= 2) ks.push_back(k);
    if (total > 0) ks.push_back(total);
    return ks;
}

DensityCurve density_curve(const pointproc::PointConfiguration& config, double variance,
                           const pointproc::Window& interval, const TargetFunction& f, Ordering ordering) {
    gaussians::validate(f);
    const auto contributors = ordered_contributors(config, variance, interval, ordering);
    DensityCurve curve;
    curve.target_norm = std::sqrt(gaussians::norm_sq(f, interval));
    for (const auto k : log_grid(static_cast<std::int64_t>(contributors.size()))) {
        std::vector<op::Contributor> first(contributors.begin(), contributors.begin() + k);
        const auto sub = op::build_restricted(std::move(first), variance, interval);
        const double d = span_distance(sub, f);
        curve.counts.push_back(k);
        curve.truncated.push_back(d);
        curve.distances.push_back(curve.distances.empty() ? d : std::min(d, curve.distances.back()));
    }
    return curve;
}

}  // namespace randop::muntz
