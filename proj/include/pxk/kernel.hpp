#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "pxk/geometry.hpp"
#include "pxk/matrix.hpp"

namespace pxk {

namespace detail {
// Coincidence threshold; validated geometries keep |x-y| > gamma2 - gamma1.
inline constexpr double kSingularDist = 1e-30;
inline constexpr int kMaxKernelOrder = 32;
}  // namespace detail

/// kappa(x, y) = (x - y)^(-d). Computed by repeated multiplication of the
/// reciprocal so small integer orders stay exact and free of branch-cut
/// ambiguity.
inline Complex kappa(ComplexPoint x, ComplexPoint y, int d) {
    if (d < 1 || d > detail::kMaxKernelOrder)
        throw std::invalid_argument("kappa: order d must be in [1, 32]");
    const Complex diff = x - y;
    if (std::abs(diff) < detail::kSingularDist)
        throw std::domain_error("kappa: coincident points x == y");
    const Complex inv = 1.0 / diff;
    Complex r = inv;
    for (int k = 1; k < d; ++k) r *= inv;
    return r;
}

/// K^(X,Y): entry (i,j) = kappa(X_i, Y_j, d), shape |X| x |Y|.
inline ComplexMatrix kernel_matrix(const PointSet& X, const PointSet& Y, int d) {
    if (d < 1 || d > detail::kMaxKernelOrder)
        throw std::invalid_argument("kernel_matrix: order d must be in [1, 32]");
    if (X.size() == 0 || Y.size() == 0)
        throw std::invalid_argument("kernel_matrix: empty point set");
    ComplexMatrix K(X.size(), Y.size());
    for (int i = 0; i < X.size(); ++i)
        for (int j = 0; j < Y.size(); ++j) {
            const Complex diff = X[i] - Y[j];
            if (std::abs(diff) < detail::kSingularDist)
                throw std::domain_error("kernel_matrix: coincident pair at (i=" +
                                        std::to_string(i) + ", j=" + std::to_string(j) + ")");
            const Complex inv = 1.0 / diff;
            Complex r = inv;
            for (int k = 1; k < d; ++k) r *= inv;
            K(i, j) = r;
        }
    return K;
}

}  // namespace pxk
