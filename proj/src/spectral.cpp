#include "randop/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "randop/errors.hpp"

namespace randop::spectral {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffTol = 1e-13;

void check_input(const Eigen::MatrixXd& m) {
    require(m.rows() == m.cols(), "eigen_sym requires a square matrix");
    require(m.allFinite(), "eigen_sym requires finite entries");
    if (m.size() == 0) return;
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return;
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    require(asym <= 1e-12 * scale, "eigen_sym requires a symmetric matrix");
}

double off_diagonal_norm(const Eigen::MatrixXd& a) {
    double s = 0.0;
    for (Eigen::Index q = 1; q < a.cols(); ++q)
        for (Eigen::Index p = 0; p < q; ++p) s += a(p, q) * a(p, q);
    return std::sqrt(2.0 * s);
}

struct Rotation {
    Eigen::Index p;
    Eigen::Index q;
    double c;
    double s;
};

// Rotation in plane (p, q) that annihilates a(p, q).
Rotation make_rotation(const Eigen::MatrixXd& a, Eigen::Index p, Eigen::Index q) {
    const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
    const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    return {p, q, c, t * c};
}

void rotate_columns(Eigen::MatrixXd& m, const Rotation& r) {
    double* cp = m.col(r.p).data();
    double* cq = m.col(r.q).data();
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
        const double xp = cp[k];
        const double xq = cq[k];
        cp[k] = r.c * xp - r.s * xq;
        cq[k] = r.s * xp + r.c * xq;
    }
}

// A <- J^T A J and V <- V J for a batch of rotations on disjoint index pairs.
// Columns are rotated first, then rows, each column being touched as a
// contiguous block.
void apply_batch(Eigen::MatrixXd& a, Eigen::MatrixXd& v, const std::vector<Rotation>& batch) {
    for (const auto& r : batch) {
        rotate_columns(a, r);
        rotate_columns(v, r);
    }
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
        double* col = a.col(k).data();
        for (const auto& r : batch) {
            const double xp = col[r.p];
            const double xq = col[r.q];
            col[r.p] = r.c * xp - r.s * xq;
            col[r.q] = r.s * xp + r.c * xq;
        }
    }
    for (const auto& r : batch) {
        a(r.p, r.q) = 0.0;
        a(r.q, r.p) = 0.0;
    }
}

// Round-robin pairing schedule: n - 1 rounds (n even) covering every pair once.
std::vector<std::vector<std::pair<Eigen::Index, Eigen::Index>>> round_robin(Eigen::Index n) {
    const Eigen::Index players = n + (n % 2);
    std::vector<Eigen::Index> ring(static_cast<std::size_t>(players));
    std::iota(ring.begin(), ring.end(), Eigen::Index{0});
    std::vector<std::vector<std::pair<Eigen::Index, Eigen::Index>>> rounds;
    for (Eigen::Index round = 0; round + 1 < players; ++round) {
        auto& pairs = rounds.emplace_back();
        for (Eigen::Index i = 0; i < players / 2; ++i) {
            Eigen::Index p = ring[static_cast<std::size_t>(i)];
            Eigen::Index q = ring[static_cast<std::size_t>(players - 1 - i)];
            if (p >= n || q >= n) continue;  // bye
            if (p > q) std::swap(p, q);
            pairs.emplace_back(p, q);
        }
        std::rotate(ring.begin() + 1, ring.end() - 1, ring.end());
    }
    return rounds;
}

}  // namespace

std::pair<double, double> decomposition_errors(const Eigen::MatrixXd& matrix, const EigenDecomposition& dec) {
    const auto n = matrix.rows();
    if (n == 0) return {0.0, 0.0};
    const Eigen::MatrixXd recon = dec.vectors * dec.values.asDiagonal() * dec.vectors.transpose();
    const double mnorm = matrix.norm();
    const double recon_err = mnorm == 0.0 ? (recon - matrix).norm() : (recon - matrix).norm() / mnorm;
    const Eigen::MatrixXd gram = dec.vectors.transpose() * dec.vectors;
    const double ortho_err = (gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    return {recon_err, ortho_err};
}

EigenDecomposition eigen_sym(const Eigen::MatrixXd& matrix) {
    check_input(matrix);
    const Eigen::Index n = matrix.rows();
    // Work on the exactly symmetrized input.
    Eigen::MatrixXd a = 0.5 * (matrix + matrix.transpose());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    const double tol = kOffTol * a.norm();
    const double entry_tol = n > 0 ? tol / static_cast<double>(n) : 0.0;

    const auto rounds = round_robin(n);
    std::vector<Rotation> batch;
    int sweep = 0;
    for (; sweep <= kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) <= tol) break;
        if (sweep == kMaxSweeps) throw NumericalFailure("eigen_sym: Jacobi sweeps did not converge");
        for (const auto& pairs : rounds) {
            batch.clear();
            for (const auto& [p, q] : pairs)
                if (std::abs(a(p, q)) > entry_tol) batch.push_back(make_rotation(a, p, q));
            if (!batch.empty()) apply_batch(a, v, batch);
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

    EigenDecomposition out;
    out.sweeps = sweep;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
        out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    }

    const auto [recon_err, ortho_err] = decomposition_errors(matrix, out);
    if (!(recon_err <= 1e-10) || !(ortho_err <= 1e-10))
        throw NumericalFailure("eigen_sym: decomposition failed its reconstruction check");
    return out;
}

SpectralSummary summarize(std::vector<double> eigenvalues_desc, double trace) {
    SpectralSummary s;
    s.eigenvalues = std::move(eigenvalues_desc);
    s.trace = trace;
    s.operator_norm = s.eigenvalues.empty() ? 0.0 : std::max(0.0, s.eigenvalues.front());
    for (const double mu : s.eigenvalues) {
        s.nuclear_norm += std::max(mu, 0.0);
        s.widths.push_back(std::max(mu, 0.0));
    }
    return s;
}

SpectralSummary spectrum(const op::RestrictedOperator& op) {
    const auto& s = op.weighted();
    const auto dec = eigen_sym(s);
    std::vector<double> mu(dec.values.data(), dec.values.data() + dec.values.size());
    return summarize(std::move(mu), s.trace());
}

std::vector<double> widths(const SpectralSummary& summary, std::int64_t n_max) {
    require(n_max >= 0, "widths requires n_max >= 0");
    std::vector<double> d(static_cast<std::size_t>(n_max + 1), 0.0);
    for (std::size_t n = 0; n < d.size() && n < summary.widths.size(); ++n) d[n] = summary.widths[n];
    return d;
}

TailBound width_tail_bound(const pointproc::PointConfiguration& config, double variance,
                           const pointproc::Window& interval, double x, double tail_tol) {
    require(std::isfinite(x) && x > 0.0, "width_tail_bound requires x > 0");
    require(std::isfinite(variance) && variance > 0.0, "variance must be positive");
    TailBound out;
    out.n_x = pointproc::count_closed(config, -x, x);
    const double threshold = tail_tol * gaussians::density(2.0 * variance, 0.0) * interval.length();
    const auto pts = config.points();
    const auto wts = config.weights();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (std::abs(pts[i]) <= x) continue;
        const double norm = op::projected_atom_norm(pts[i], variance, interval);
        if (norm > 0.0 && norm >= threshold) out.bound += wts[i] * norm;
    }
    return out;
}

DecayFit decay_fit(std::span<const double> widths, double variance, const DecayFitOptions& options) {
    require(std::isfinite(variance) && variance > 0.0, "decay_fit requires positive variance");
    const double ref = options.reference.value_or(widths.empty() ? 0.0 : widths.front());
    const double lo = options.floor_rel * ref;
    const double hi = options.cap_rel * ref;

    std::vector<double> xs;
    std::vector<double> ys;
    DecayFit fit;
    for (std::size_t n = static_cast<std::size_t>(std::max<std::int64_t>(options.min_n, 0)); n < widths.size(); ++n) {
        const double d = widths[n];
        if (!(d > 0.0) || d < lo || d > hi) continue;
        if (xs.empty()) fit.n_range.first = static_cast<std::int64_t>(n);
        fit.n_range.second = static_cast<std::int64_t>(n);
        xs.push_back(static_cast<double>(n));
        ys.push_back(std::sqrt(std::max(0.0, -variance * std::log(d))));
    }
    require(xs.size() >= 3, "decay_fit requires at least 3 usable widths");

    const double m = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    fit.used = xs.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

}  // namespace randop::spectral
