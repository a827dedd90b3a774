#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pxk/geometry.hpp"
#include "pxk/kernel.hpp"
#include "pxk/matrix.hpp"

namespace pxk {

/// Trapezoidal discretization of a circle of radius gamma: N nodes
/// z_j = gamma*exp(2*pi*i*j/N) with weights w_j = (2*pi*i/N)*z_j, j = 1..N.
/// Node j = N lands on the positive real axis.
struct ProxySurface {
    double gamma = 0.0;
    int N = 0;
    std::vector<Complex> nodes;
    std::vector<Complex> weights;
};

inline ProxySurface trapezoidal_surface(double gamma, int N) {
    if (!(gamma > 0.0)) throw std::invalid_argument("trapezoidal_surface: gamma must be positive");
    if (N < 1) throw std::invalid_argument("trapezoidal_surface: N must be >= 1");
    ProxySurface s;
    s.gamma = gamma;
    s.N = N;
    s.nodes.reserve(N);
    s.weights.reserve(N);
    const Complex scale(0.0, 2.0 * M_PI / N);
    for (int j = 1; j <= N; ++j) {
        const double t = 2.0 * M_PI * j / N;
        const Complex z = std::polar(gamma, t);
        s.nodes.push_back(z);
        s.weights.push_back(scale * z);
    }
    return s;
}

/// Transfer function phi(z, y) = z / (N*(y - z)).
inline Complex phi(ComplexPoint z, ComplexPoint y, int N) {
    if (N < 1) throw std::invalid_argument("phi: N must be >= 1");
    const Complex diff = y - z;
    if (std::abs(diff) < detail::kSingularDist)
        throw std::domain_error("phi: y coincides with node z");
    return z / (static_cast<double>(N) * diff);
}

/// Phi^(Z,Y): N x |Y| matrix of phi values over the surface nodes.
inline ComplexMatrix phi_matrix(const ProxySurface& surface, const PointSet& Y) {
    if (Y.size() == 0) throw std::invalid_argument("phi_matrix: empty point set");
    ComplexMatrix P(surface.N, Y.size());
    const double N = surface.N;
    for (int j = 0; j < surface.N; ++j)
        for (int k = 0; k < Y.size(); ++k) {
            const Complex diff = Y[k] - surface.nodes[j];
            if (std::abs(diff) < detail::kSingularDist)
                throw std::domain_error("phi_matrix: point coincides with node at (j=" +
                                        std::to_string(j) + ", k=" + std::to_string(k) + ")");
            P(j, k) = surface.nodes[j] / (N * diff);
        }
    return P;
}

/// Quadrature approximation of kappa: sum_j kappa(x, z_j) * phi(z_j, y).
inline Complex kappa_tilde(ComplexPoint x, ComplexPoint y, const ProxySurface& surface, int d) {
    Complex acc = 0.0;
    for (int j = 0; j < surface.N; ++j)
        acc += kappa(x, surface.nodes[j], d) * phi(surface.nodes[j], y, surface.N);
    return acc;
}

/// Rank-N factorization K^(X,Y) ~= A*B with A = K^(X,Z) and B = Phi^(Z,Y).
/// The product is never formed here; downstream consumers use the factors.
struct AnalyticalFactors {
    ComplexMatrix A;  // m x N
    ComplexMatrix B;  // N x n
    ProxySurface surface;
};

inline AnalyticalFactors analytical_compress(const PointSet& X, const PointSet& Y,
                                             const ProxySurface& surface, int d) {
    PointSet Z;
    Z.label = "proxy";
    Z.points = surface.nodes;
    AnalyticalFactors f;
    f.A = kernel_matrix(X, Z, d);
    f.B = phi_matrix(surface, Y);
    f.surface = surface;
    return f;
}

/// ||K - A*B||_F / ||K||_F accumulated row by row, without materializing the
/// product.
inline double analytical_error(const ComplexMatrix& K, const AnalyticalFactors& f) {
    if (K.rows() != f.A.rows() || K.cols() != f.B.cols() || f.A.cols() != f.B.rows())
        throw std::invalid_argument("analytical_error: shape mismatch");
    const int m = K.rows(), n = K.cols(), N = f.A.cols();
    const ComplexMatrix Bt = f.B.conj_transpose();  // n x N, rows contiguous in the dot below
    double num = 0.0, den = 0.0;
    for (int i = 0; i < m; ++i) {
        const Complex* ai = f.A.row_ptr(i);
        const Complex* ki = K.row_ptr(i);
        for (int j = 0; j < n; ++j) {
            const Complex* bj = Bt.row_ptr(j);
            double re = 0.0, im = 0.0;
            for (int p = 0; p < N; ++p) {
                // a * conj(conj(b)) = a * B(p, j)
                const double ar = ai[p].real(), aim = ai[p].imag();
                const double br = bj[p].real(), bi = -bj[p].imag();
                re += ar * br - aim * bi;
                im += ar * bi + aim * br;
            }
            num += std::norm(ki[j] - Complex(re, im));
            den += std::norm(ki[j]);
        }
    }
    if (den == 0.0) throw std::invalid_argument("analytical_error: zero reference norm");
    return std::sqrt(num / den);
}

}  // namespace pxk
