#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pxk/bounds.hpp"
#include "pxk/geometry.hpp"
#include "pxk/kernel.hpp"
#include "pxk/matrix.hpp"
#include "pxk/proxy.hpp"
#include "pxk/rrqr.hpp"

namespace pxk::hybrid {

/// Output of the hybrid pipelines. `core` is K^(Xhat,Y) for the one-sided
/// factorization and K^(Xhat,Yhat) for the skeleton; either way it is a
/// verbatim submatrix of the kernel matrix, re-evaluated from the kernel.
struct HybridResult {
    rrqr::InterpolativeFactor U;
    PointSet x_hat;
    std::optional<rrqr::InterpolativeFactor> V;
    std::optional<PointSet> y_hat;
    ComplexMatrix core;
    int rank = 0;
    std::optional<double> measured_error;
    bounds::HybridBoundReport bound;
};

/// One-sided hybrid compression K^(X,Y) ~= U * K^(Xhat,Y). The row basis is
/// selected from K^(X,Z) alone; Y enters only when the core block is
/// evaluated, so the selection is identical for every admissible Y.
inline HybridResult hybrid_compress(const PointSet& X, const PointSet& Y,
                                    const GeometryConfig& cfg, double gamma, int N, double tau2,
                                    double f) {
    validate_separation(X, Y, cfg);
    if (!(cfg.gamma1 < gamma && gamma < cfg.gamma2))
        throw std::invalid_argument("hybrid_compress: gamma outside (gamma1, gamma2)");
    const ProxySurface surface = trapezoidal_surface(gamma, N);
    PointSet Z;
    Z.label = "proxy";
    Z.points = surface.nodes;
    const ComplexMatrix KXZ = kernel_matrix(X, Z, cfg.d);

    HybridResult r;
    r.U = rrqr::row_id(KXZ, tau2, f);
    r.rank = r.U.k();
    r.x_hat = X.select(r.U.selected);
    r.x_hat.label = "x_hat";
    r.core = kernel_matrix(r.x_hat, Y, cfg.d);
    const double tau1 = bounds::block_bound(gamma, cfg, N).value;
    r.bound = bounds::hybrid_bound(X.size(), r.rank, f, cfg, gamma, tau1, tau2);
    return r;
}

/// Two-sided skeleton K^(X,Y) ~= U * K^(Xhat,Yhat) * V^T.
inline HybridResult skeletonize(const PointSet& X, const PointSet& Y, const GeometryConfig& cfg,
                                double gamma, int N, double tau2, double f) {
    HybridResult r = hybrid_compress(X, Y, cfg, gamma, N, tau2, f);
    r.V = rrqr::col_id(r.core, tau2, f);
    r.y_hat = Y.select(r.V->selected);
    r.y_hat->label = "y_hat";
    r.core = kernel_matrix(r.x_hat, *r.y_hat, cfg.d);
    return r;
}

struct MeasuredErrors {
    double e_n = 0.0;                   // analytical step: ||K - A*B||_F / ||K||_F
    double r_n = 0.0;                   // hybrid: ||K - U*K^(Xhat,Y)||_F / ||K||_F
    std::optional<double> skeleton;     // ||K - U*K^(Xhat,Yhat)*V^T||_F / ||K||_F
};

/// Diagnostic error functionals against the densely assembled K^(X,Y).
/// Gated by instance size; the compression pipelines themselves never form K.
inline MeasuredErrors measure_errors(const PointSet& X, const PointSet& Y,
                                     const GeometryConfig& cfg, double gamma, int N,
                                     const HybridResult& result) {
    if (static_cast<long long>(X.size()) * Y.size() > 8'000'000LL)
        throw std::invalid_argument("measure_errors: instance too large to form K densely");
    const ComplexMatrix K = kernel_matrix(X, Y, cfg.d);
    const ProxySurface surface = trapezoidal_surface(gamma, N);
    const AnalyticalFactors factors = analytical_compress(X, Y, surface, cfg.d);

    MeasuredErrors out;
    out.e_n = rel_fro_error(K, matmul(factors.A, factors.B));
    const ComplexMatrix U = result.U.basis_matrix();
    const ComplexMatrix Khat =
        result.V ? kernel_matrix(result.x_hat, Y, cfg.d) : result.core;
    out.r_n = rel_fro_error(K, matmul(U, Khat));
    if (result.V) out.skeleton = rel_fro_error(K, matmul(U, rrqr::col_id_apply(result.core, *result.V)));
    return out;
}

namespace detail {

// Plain Householder triangularization (no pivoting, no Q), kept local so the
// oracle does not share the rank-revealing code path it is used to check.
inline ComplexMatrix plain_r_factor(ComplexMatrix A) {
    const int m = A.rows(), n = A.cols();
    const int kmin = std::min(m, n);
    std::vector<Complex> v;
    for (int k = 0; k < kmin; ++k) {
        double norm2 = 0.0;
        for (int i = k; i < m; ++i) norm2 += std::norm(A(i, k));
        if (norm2 == 0.0) continue;
        v.assign(m - k, Complex(0.0, 0.0));
        for (int i = k; i < m; ++i) v[i - k] = A(i, k);
        const Complex a0 = A(k, k);
        const Complex phase = (a0 == Complex(0.0, 0.0)) ? Complex(1.0, 0.0) : a0 / std::abs(a0);
        v[0] += phase * std::sqrt(norm2);
        double vnorm2 = 0.0;
        for (const Complex& c : v) vnorm2 += std::norm(c);
        const double inv = 1.0 / std::sqrt(vnorm2);
        for (Complex& c : v) c *= inv;
        for (int j = k; j < n; ++j) {
            Complex dot = 0.0;
            for (int i = k; i < m; ++i) dot += std::conj(v[i - k]) * A(i, j);
            dot *= 2.0;
            for (int i = k; i < m; ++i) A(i, j) -= dot * v[i - k];
        }
    }
    ComplexMatrix R(kmin, n);
    for (int i = 0; i < kmin; ++i)
        for (int j = i; j < n; ++j) R(i, j) = A(i, j);
    return R;
}

}  // namespace detail

/// Singular values by brute force: a plain QR pre-pass shrinks the tall
/// dimension, then one-sided Jacobi orthogonalization of the columns runs to
/// convergence. Throws if the sweep cap is reached.
inline std::vector<double> singular_values_oracle(const ComplexMatrix& M) {
    if (M.rows() == 0 || M.cols() == 0)
        throw std::invalid_argument("singular_values_oracle: empty matrix");
    ComplexMatrix B = M.rows() >= M.cols() ? M : M.conj_transpose();
    if (B.rows() > B.cols()) B = detail::plain_r_factor(std::move(B));
    // Work column-wise on B^H so each column is contiguous.
    ComplexMatrix W = B.conj_transpose();
    const int n = W.rows();   // number of columns being orthogonalized
    const int len = W.cols();
    constexpr int kSweepCap = 60;
    constexpr double kOffTol = 1e-13;
    bool converged = false;
    for (int sweep = 0; sweep < kSweepCap && !converged; ++sweep) {
        converged = true;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                Complex* cp = W.row_ptr(p);
                Complex* cq = W.row_ptr(q);
                double a = 0.0, b = 0.0;
                Complex gpq = 0.0;
                for (int i = 0; i < len; ++i) {
                    a += std::norm(cp[i]);
                    b += std::norm(cq[i]);
                    gpq += std::conj(cp[i]) * cq[i];
                }
                const double scale = std::sqrt(a * b);
                if (scale == 0.0 || std::abs(gpq) <= kOffTol * scale) continue;
                converged = false;
                const double absg = std::abs(gpq);
                const Complex phase = gpq / absg;
                const double tau = (b - a) / (2.0 * absg);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const Complex sp = s * std::conj(phase);
                const Complex sq = s * phase;
                for (int i = 0; i < len; ++i) {
                    const Complex wp = cp[i], wq = cq[i];
                    cp[i] = c * wp - sp * wq;
                    cq[i] = sq * wp + c * wq;
                }
            }
        }
    }
    if (!converged)
        throw std::runtime_error("singular_values_oracle: Jacobi sweeps did not converge");
    std::vector<double> sv(n);
    for (int p = 0; p < n; ++p) {
        double s = 0.0;
        for (int i = 0; i < len; ++i) s += std::norm(W(p, i));
        sv[p] = std::sqrt(s);
    }
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv;
}

/// Numerical rank: smallest k whose trailing singular-value Frobenius mass is
/// within tol*||M||_F.
inline int svd_rank_oracle(const ComplexMatrix& M, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("svd_rank_oracle: tol must be positive");
    const std::vector<double> sv = singular_values_oracle(M);
    const int n = static_cast<int>(sv.size());
    std::vector<double> tail2(n + 1, 0.0);
    for (int k = n - 1; k >= 0; --k) tail2[k] = tail2[k + 1] + sv[k] * sv[k];
    const double target = tol * std::sqrt(tail2[0]);
    for (int k = 0; k <= n; ++k)
        if (std::sqrt(tail2[k]) <= target) return k;
    return n;
}

}  // namespace pxk::hybrid
