#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "randop/pointproc.hpp"
#include "randop/restricted_operator.hpp"

namespace randop::spectral {

struct EigenDecomposition {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // column i pairs with values(i)
    int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for real symmetric matrices (round-robin pair
/// ordering, rotations on disjoint pairs applied as one batch).
///
/// Sweeps rotate away every off-diagonal entry above 1e-13 * ||M||_F / m
/// until the off-diagonal Frobenius norm is at most 1e-13 * ||M||_F. The
/// result is checked for reconstruction (1e-10 relative) and orthonormality
/// (1e-10) before returning.
///
/// Throws InvalidArgument for non-square, non-symmetric (1e-12 relative) or
/// non-finite input, NumericalFailure when the sweep budget is exhausted or
/// the post-checks fail.
EigenDecomposition eigen_sym(const Eigen::MatrixXd& matrix);

/// Reconstruction error ||V diag(w) V^T - M||_F / ||M||_F and
/// orthonormality error ||V^T V - I||_max.
std::pair<double, double> decomposition_errors(const Eigen::MatrixXd& matrix, const EigenDecomposition& dec);

struct SpectralSummary {
    std::vector<double> eigenvalues;  // descending
    double operator_norm = 0.0;
    double nuclear_norm = 0.0;
    double trace = 0.0;
    std::vector<double> widths;  // d_n = max(mu_{n+1}, 0), n = 0 .. size-1

    [[nodiscard]] std::size_t rank_bound() const { return eigenvalues.size(); }
};

SpectralSummary summarize(std::vector<double> eigenvalues_desc, double trace);
SpectralSummary spectrum(const op::RestrictedOperator& op);

/// Kolmogorov widths d_0 .. d_{n_max}; zero past the rank.
std::vector<double> widths(const SpectralSummary& summary, std::int64_t n_max);

struct TailBound {
    std::int64_t n_x = 0;  // |Theta ∩ [-x, x]|
    double bound = 0.0;    // sum over |theta| > x of w ||e_theta||^2
};

/// Upper bound on d_{N_x} from the atoms outside [-x, x]. Uses the same
/// contributor cutoff as build_restricted.
TailBound width_tail_bound(const pointproc::PointConfiguration& config, double variance,
                           const pointproc::Window& interval, double x,
                           double tail_tol = op::kDefaultTailTol);

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::pair<std::int64_t, std::int64_t> n_range{0, 0};
    std::size_t used = 0;
};

struct DecayFitOptions {
    double floor_rel = 1e-12;
    double cap_rel = 1e-2;
    /// Scale for floor/cap; defaults to widths[0] (= mu_1).
    std::optional<double> reference;
    std::int64_t min_n = 0;
};

/// Least-squares line through (n, sqrt(-eps ln d_n)) over widths with
/// d_n in [floor_rel, cap_rel] * reference. Throws InvalidArgument with
/// fewer than 3 usable widths.
DecayFit decay_fit(std::span<const double> widths, double variance, const DecayFitOptions& options = {});

}  // namespace randop::spectral
