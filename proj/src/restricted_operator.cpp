#include "randop/restricted_operator.hpp"

#include <algorithm>
#include <cmath>

#include "randop/errors.hpp"

namespace randop::op {

using gaussians::GaussianBump;

gaussians::GaussianBump RestrictedOperator::atom(std::size_t i) const {
    return GaussianBump{contributors_.at(i).position, variance_, 1.0};
}

double projected_atom_norm(double theta, double variance, const Window& interval) {
    const GaussianBump b{theta, variance, 1.0};
    return gaussians::inner_restricted(b, b, interval);
}

RestrictedOperator build_restricted(std::vector<Contributor> contributors, double variance,
                                    const Window& interval) {
    require(std::isfinite(variance) && variance > 0.0, "operator variance must be positive");
    RestrictedOperator op;
    op.interval_ = interval;
    op.variance_ = variance;
    op.contributors_ = std::move(contributors);

    const auto m = static_cast<Eigen::Index>(op.contributors_.size());
    op.gram_.resize(m, m);
    op.weighted_.resize(m, m);
    Eigen::VectorXd sqrt_w(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double w = op.contributors_[static_cast<std::size_t>(i)].weight;
        require(std::isfinite(w) && w >= 0.0, "contributor weights must be nonnegative");
        sqrt_w(i) = std::sqrt(w);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        const GaussianBump bj = op.atom(static_cast<std::size_t>(j));
        for (Eigen::Index i = j; i < m; ++i) {
            const double g = gaussians::inner_restricted(op.atom(static_cast<std::size_t>(i)), bj, interval);
            op.gram_(i, j) = g;
            op.gram_(j, i) = g;
            const double s = sqrt_w(i) * g * sqrt_w(j);
            op.weighted_(i, j) = s;
            op.weighted_(j, i) = s;
        }
    }
    return op;
}

RestrictedOperator build_restricted(const PointConfiguration& config, double variance,
                                    const Window& interval, double tail_tol) {
    require(std::isfinite(variance) && variance > 0.0, "operator variance must be positive");
    require(tail_tol > 0.0 && tail_tol < 1.0, "tail_tol must lie in (0, 1)");
    const double threshold = tail_tol * gaussians::density(2.0 * variance, 0.0) * interval.length();
    std::vector<Contributor> kept;
    const auto pts = config.points();
    const auto wts = config.weights();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double norm = projected_atom_norm(pts[i], variance, interval);
        if (norm > 0.0 && norm >= threshold) kept.push_back({pts[i], wts[i]});
    }
    return build_restricted(std::move(kept), variance, interval);
}

std::vector<double> atom_norms(const RestrictedOperator& op) {
    const auto& g = op.gram();
    std::vector<double> out(static_cast<std::size_t>(g.rows()));
    for (Eigen::Index i = 0; i < g.rows(); ++i) out[static_cast<std::size_t>(i)] = g(i, i);
    return out;
}

std::vector<double> coefficient_vector(const RestrictedOperator& op, const TargetFunction& f) {
    gaussians::validate(f);
    std::vector<double> c(op.contributors().size(), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const GaussianBump e = op.atom(i);
        for (const auto& a : f.atoms) c[i] += gaussians::inner_restricted(a, e, op.interval());
    }
    return c;
}

double quadratic_form(const RestrictedOperator& op, const TargetFunction& f) {
    const auto c = coefficient_vector(op, f);
    double q = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) q += op.contributors()[i].weight * c[i] * c[i];
    return q;
}

TargetFunction apply(const RestrictedOperator& op, const TargetFunction& f) {
    const auto c = coefficient_vector(op, f);
    TargetFunction out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double coef = op.contributors()[i].weight * c[i];
        if (coef != 0.0) out.atoms.emplace_back(GaussianBump{op.contributors()[i].position, op.variance(), coef});
    }
    return out;
}

double boundedness_certificate(const PointConfiguration& config, double variance, const Window& interval) {
    require(std::isfinite(variance) && variance > 0.0, "variance must be positive");
    double s = 0.0;
    for (const double theta : config.points())
        s += gaussians::density(variance, theta - std::clamp(theta, interval.lo, interval.hi));
    return s;
}

}  // namespace randop::op
