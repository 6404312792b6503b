#pragma once

// Finite-rank representation of the compressed random integral operator
//
//     Q A Q = sum_theta w_theta e_theta (x) e_theta,   e_theta = Q p_eps(. - theta),
//
// where Q projects L2(R) onto L2([a, b]). All Gram entries are closed-form
// restricted Gaussian inner products.

#include <Eigen/Core>
#include <vector>

#include "randop/gaussians.hpp"
#include "randop/pointproc.hpp"

namespace randop::op {

using gaussians::TargetFunction;
using pointproc::PointConfiguration;
using pointproc::Window;

inline constexpr double kDefaultTailTol = 1e-30;

struct Contributor {
    double position;
    double weight;
};

class RestrictedOperator {
public:
    [[nodiscard]] const Window& interval() const { return interval_; }
    [[nodiscard]] double variance() const { return variance_; }
    [[nodiscard]] const std::vector<Contributor>& contributors() const { return contributors_; }
    [[nodiscard]] std::size_t rank_bound() const { return contributors_.size(); }
    /// G[i][j] = <e_i, e_j> over the interval.
    [[nodiscard]] const Eigen::MatrixXd& gram() const { return gram_; }
    /// S = D^1/2 G D^1/2; its spectrum is the nonzero spectrum of the operator.
    [[nodiscard]] const Eigen::MatrixXd& weighted() const { return weighted_; }

    /// Atom p_eps(. - theta_i) as an unprojected bump.
    [[nodiscard]] gaussians::GaussianBump atom(std::size_t i) const;

    friend RestrictedOperator build_restricted(const PointConfiguration&, double, const Window&, double);
    friend RestrictedOperator build_restricted(std::vector<Contributor>, double, const Window&);

private:
    Window interval_;
    double variance_ = 1.0;
    std::vector<Contributor> contributors_;
    Eigen::MatrixXd gram_;
    Eigen::MatrixXd weighted_;
};

/// Keeps points whose projected atom norm is at least
/// tail_tol * p_{2 eps}(0) * (b - a).
RestrictedOperator build_restricted(const PointConfiguration& config, double variance,
                                    const Window& interval, double tail_tol = kDefaultTailTol);

/// Explicit contributor list, no tail filtering.
RestrictedOperator build_restricted(std::vector<Contributor> contributors, double variance,
                                    const Window& interval);

/// ||e_theta||^2 over the interval for one point.
double projected_atom_norm(double theta, double variance, const Window& interval);

/// Diagonal of the Gram matrix.
std::vector<double> atom_norms(const RestrictedOperator& op);

/// c_i = <f, e_i> over the operator interval.
std::vector<double> coefficient_vector(const RestrictedOperator& op, const TargetFunction& f);

/// <A_Q f, f> = sum_i w_i c_i^2.
double quadratic_form(const RestrictedOperator& op, const TargetFunction& f);

/// sum_i w_i c_i p_eps(. - theta_i); meaningful when paired over the interval.
TargetFunction apply(const RestrictedOperator& op, const TargetFunction& f);

/// sum_theta max_{u in [a,b]} p_eps(u - theta).
double boundedness_certificate(const PointConfiguration& config, double variance, const Window& interval);

}  // namespace randop::op
