#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pxk/matrix.hpp"

namespace pxk::rrqr {

namespace detail {

// Householder QR working state: A is overwritten with R in its upper
// triangle; the unit reflectors are returned separately.
struct Reflectors {
    std::vector<std::vector<Complex>> v;  // v[k] has length m-k, unit norm
};

// Applies one reflection A[k:, k:] -= 2 v (v^H A[k:, k:]).
inline void reflect_block(ComplexMatrix& A, const std::vector<Complex>& v, int k) {
    const int m = A.rows(), n = A.cols();
    for (int j = k; j < n; ++j) {
        Complex dot = 0.0;
        for (int i = k; i < m; ++i) dot += std::conj(v[i - k]) * A(i, j);
        dot *= 2.0;
        for (int i = k; i < m; ++i) A(i, j) -= dot * v[i - k];
    }
}

// Builds the unit Householder vector for column k of A (rows k..m-1);
// returns false when the column is already zero. Trefethen & Bau alg. 10.1
// with complex phase normalization.
inline bool householder_vector(const ComplexMatrix& A, int k, std::vector<Complex>& v) {
    const int m = A.rows();
    double norm2 = 0.0;
    for (int i = k; i < m; ++i) norm2 += std::norm(A(i, k));
    if (norm2 == 0.0) {
        v.clear();
        return false;
    }
    v.assign(m - k, Complex(0.0, 0.0));
    const double norm = std::sqrt(norm2);
    for (int i = k; i < m; ++i) v[i - k] = A(i, k);
    const Complex a0 = A(k, k);
    const Complex phase = (a0 == Complex(0.0, 0.0)) ? Complex(1.0, 0.0) : a0 / std::abs(a0);
    v[0] += phase * norm;
    double vnorm2 = 0.0;
    for (const Complex& c : v) vnorm2 += std::norm(c);
    const double inv = 1.0 / std::sqrt(vnorm2);
    for (Complex& c : v) c *= inv;
    return true;
}

// R factor of A (no pivoting, no Q), for refactorization after swaps.
inline ComplexMatrix qr_r_only(ComplexMatrix A) {
    const int m = A.rows(), n = A.cols();
    const int kmin = std::min(m, n);
    std::vector<Complex> v;
    for (int k = 0; k < kmin; ++k) {
        if (householder_vector(A, k, v)) reflect_block(A, v, k);
    }
    ComplexMatrix R(kmin, n);
    for (int i = 0; i < kmin; ++i)
        for (int j = i; j < n; ++j) R(i, j) = A(i, j);
    return R;
}

// Frobenius norm of the trailing block R[k:, k:].
inline double tail_norm(const ComplexMatrix& R, int k) {
    double s = 0.0;
    for (int i = k; i < R.rows(); ++i)
        for (int j = std::max(i, k); j < R.cols(); ++j) s += std::norm(R(i, j));
    return std::sqrt(s);
}

// T = R11^{-1} R12 by back substitution on the leading k rows.
inline ComplexMatrix interpolation_coeffs(const ComplexMatrix& R, int k) {
    const int n = R.cols();
    ComplexMatrix T(k, n - k);
    for (int j = 0; j < n - k; ++j) {
        for (int i = k - 1; i >= 0; --i) {
            Complex s = R(i, k + j);
            for (int p = i + 1; p < k; ++p) s -= R(i, p) * T(p, j);
            T(i, j) = s / R(i, i);
        }
    }
    return T;
}

}  // namespace detail

struct CpqrResult {
    ComplexMatrix Q;        // m x min(m,n), orthonormal columns
    ComplexMatrix R;        // min(m,n) x n, upper triangular
    std::vector<int> perm;  // column permutation: M[:, perm] = Q*R
};

/// Column-pivoted Householder QR. Pivots on exact remaining column norms
/// (recomputed every step; matrices here are small), ties broken by lowest
/// original index so results are deterministic.
inline CpqrResult cpqr(const ComplexMatrix& M) {
    const int m = M.rows(), n = M.cols();
    if (m == 0 || n == 0) throw std::invalid_argument("cpqr: empty matrix");
    const int kmin = std::min(m, n);
    ComplexMatrix A = M;
    CpqrResult out;
    out.perm.resize(n);
    for (int j = 0; j < n; ++j) out.perm[j] = j;
    detail::Reflectors refl;
    refl.v.reserve(kmin);
    std::vector<Complex> v;
    for (int k = 0; k < kmin; ++k) {
        int best = k;
        double best_norm = -1.0;
        for (int j = k; j < n; ++j) {
            double s = 0.0;
            for (int i = k; i < m; ++i) s += std::norm(A(i, j));
            if (s > best_norm) {
                best_norm = s;
                best = j;
            }
        }
        if (best != k) {
            for (int i = 0; i < m; ++i) std::swap(A(i, k), A(i, best));
            std::swap(out.perm[k], out.perm[best]);
        }
        if (detail::householder_vector(A, k, v))
            detail::reflect_block(A, v, k);
        refl.v.push_back(v);
    }
    out.R = ComplexMatrix(kmin, n);
    for (int i = 0; i < kmin; ++i)
        for (int j = i; j < n; ++j) out.R(i, j) = A(i, j);
    // Q = H_1 ... H_kmin applied to the first kmin columns of the identity.
    out.Q = ComplexMatrix(m, kmin);
    for (int j = 0; j < kmin; ++j) out.Q(j, j) = 1.0;
    for (int k = kmin - 1; k >= 0; --k) {
        const std::vector<Complex>& vk = refl.v[k];
        if (vk.empty()) continue;
        detail::reflect_block(out.Q, vk, k);
    }
    return out;
}

struct SrrqrResult {
    int k = 0;                // numerical rank at the requested tolerance
    std::vector<int> perm;    // first k entries index the selected columns
    ComplexMatrix R;          // triangular factor of M[:, perm]
    ComplexMatrix T;          // R11^{-1} R12, every entry bounded by f
    int swaps = 0;
};

/// Strong rank-revealing QR: column-pivoted QR truncated at the smallest
/// prefix whose trailing Frobenius mass is within tau2*||M||_F, followed by
/// column swaps until every entry of R11^{-1} R12 has magnitude at most f.
/// Each swap strictly grows |det R11|, so the loop terminates.
inline SrrqrResult srrqr(const ComplexMatrix& M, double tau2, double f) {
    if (!(tau2 > 0.0 && tau2 < 1.0)) throw std::invalid_argument("srrqr: need tau2 in (0,1)");
    if (!(f > 1.0)) throw std::invalid_argument("srrqr: need f > 1");
    const int m = M.rows(), n = M.cols();
    CpqrResult base = cpqr(M);
    const int kmin = std::min(m, n);
    const double target = tau2 * fro_norm(M);

    SrrqrResult out;
    out.perm = base.perm;
    out.R = std::move(base.R);

    int k = kmin;
    for (int kk = 0; kk <= kmin; ++kk) {
        if (detail::tail_norm(out.R, kk) <= target) {
            k = kk;
            break;
        }
    }

    const long long swap_cap = static_cast<long long>(m) * n;
    while (true) {
        out.k = k;
        if (k == 0 || k == n) {
            out.T = ComplexMatrix(k, n - k);
            return out;
        }
        while (true) {
            out.T = detail::interpolation_coeffs(out.R, k);
            int bi = -1, bj = -1;
            double bmag = f;
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < n - k; ++j)
                    if (std::abs(out.T(i, j)) > bmag) {
                        bmag = std::abs(out.T(i, j));
                        bi = i;
                        bj = j;
                    }
            if (bi < 0) break;
            std::swap(out.perm[bi], out.perm[k + bj]);
            ComplexMatrix MP(m, n);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < m; ++i) MP(i, j) = M(i, out.perm[j]);
            out.R = detail::qr_r_only(std::move(MP));
            if (++out.swaps > swap_cap)
                throw std::runtime_error("srrqr: swap loop failed to converge");
        }
        // Swaps exchange columns across the split; re-check the tolerance and
        // grow the prefix in the rare case the tail mass crept above it.
        if (detail::tail_norm(out.R, k) <= target * (1.0 + 1e-12) || k == kmin) return out;
        ++k;
    }
}

/// One-sided interpolative factor. For a row factor U = P [I; E] the rows
/// listed in `selected` are reproduced verbatim and every entry of E is
/// bounded by f_cap. The column variant V = Q [I; F] stores F in the same
/// slot.
struct InterpolativeFactor {
    std::vector<int> selected;  // index set J, size k
    std::vector<int> perm;      // permutation of all row (or column) indices
    ComplexMatrix E;            // (total-k) x k coefficient block
    double f_cap = 0.0;

    int k() const { return static_cast<int>(selected.size()); }
    int total() const { return static_cast<int>(perm.size()); }

    /// Materializes U (or V): total x k, identity rows on `selected`.
    ComplexMatrix basis_matrix() const {
        ComplexMatrix U(total(), k());
        for (int i = 0; i < k(); ++i) U(perm[i], i) = 1.0;
        for (int p = 0; p < E.rows(); ++p)
            for (int i = 0; i < k(); ++i) U(perm[k() + p], i) = E(p, i);
        return U;
    }
};

/// Row interpolative decomposition M ~= U * M[J, :] with U = P [I; E],
/// obtained from the SRRQR of M^H so selected rows are rows of M verbatim.
inline InterpolativeFactor row_id(const ComplexMatrix& M, double tau2, double f) {
    SrrqrResult s = srrqr(M.conj_transpose(), tau2, f);
    InterpolativeFactor out;
    out.perm = std::move(s.perm);
    out.selected.assign(out.perm.begin(), out.perm.begin() + s.k);
    out.f_cap = f;
    out.E = ComplexMatrix(M.rows() - s.k, s.k);
    for (int p = 0; p < out.E.rows(); ++p)
        for (int i = 0; i < s.k; ++i) out.E(p, i) = std::conj(s.T(i, p));
    return out;
}

/// Column interpolative decomposition M ~= M[:, J] * V^T with V = Q [I; F].
inline InterpolativeFactor col_id(const ComplexMatrix& M, double tau2, double f) {
    SrrqrResult s = srrqr(M, tau2, f);
    InterpolativeFactor out;
    out.perm = std::move(s.perm);
    out.selected.assign(out.perm.begin(), out.perm.begin() + s.k);
    out.f_cap = f;
    out.E = ComplexMatrix(M.cols() - s.k, s.k);
    for (int p = 0; p < out.E.rows(); ++p)
        for (int i = 0; i < s.k; ++i) out.E(p, i) = s.T(i, p);
    return out;
}

/// Reconstruction helpers used by tests and diagnostics.
inline ComplexMatrix row_id_apply(const InterpolativeFactor& U, const ComplexMatrix& selected_rows) {
    return matmul(U.basis_matrix(), selected_rows);
}

inline ComplexMatrix col_id_apply(const ComplexMatrix& selected_cols, const InterpolativeFactor& V) {
    // M ~= M[:, J] * V^T (plain transpose, not conjugated)
    const ComplexMatrix Vm = V.basis_matrix();
    ComplexMatrix Vt(Vm.cols(), Vm.rows());
    for (int i = 0; i < Vm.rows(); ++i)
        for (int j = 0; j < Vm.cols(); ++j) Vt(j, i) = Vm(i, j);
    return matmul(selected_cols, Vt);
}

}  // namespace pxk::rrqr
