#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pxk/geometry.hpp"
#include "pxk/matrix.hpp"

namespace pxk::bounds {

/// g(z) = 1/(z - 1), the building block of every error expression here.
inline Complex g(Complex z) {
    if (z == Complex(1.0, 0.0)) throw std::domain_error("g: pole at z = 1");
    return 1.0 / (z - 1.0);
}

inline double g_real(double t) {
    if (t == 1.0) throw std::domain_error("g_real: pole at t = 1");
    return 1.0 / (t - 1.0);
}

namespace detail {

// z^n by binary exponentiation; deterministic and branch-cut free.
inline Complex cpow_int(Complex z, int n) {
    Complex r = 1.0, b = z;
    for (int e = n; e > 0; e >>= 1) {
        if (e & 1) r *= b;
        b *= b;
    }
    return r;
}

// g(w^N) for |w| > 1, evaluated as u/(1-u) with u = w^(-N) so the large power
// never overflows. Pass the *inverse* base (|inv| < 1).
inline Complex g_big_pow(Complex inv_base, int N) {
    const Complex u = cpow_int(inv_base, N);
    return u / (1.0 - u);
}

// Real positive variant: g(ratio^N) for ratio > 1.
inline double g_big_pow(double inv_ratio, int N) {
    const double u = std::pow(inv_ratio, static_cast<double>(N));
    return u / (1.0 - u);
}

inline constexpr int kMaxErrorOrder = 10;  // c grows combinatorially beyond this

}  // namespace detail

/// sum_j z_j/(z - z_j) over the N trapezoidal nodes of radius gamma, computed
/// by direct summation. Equals N*g((z/gamma)^N) identically.
inline Complex ring_sum(Complex z, double gamma, int N) {
    if (!(gamma > 0.0) || N < 1) throw std::invalid_argument("ring_sum: bad surface parameters");
    Complex acc = 0.0;
    for (int j = 1; j <= N; ++j) {
        const Complex zj = std::polar(gamma, 2.0 * M_PI * j / N);
        const Complex diff = z - zj;
        if (std::abs(diff) < 1e-300)
            throw std::domain_error("ring_sum: z coincides with node " + std::to_string(j));
        acc += zj / diff;
    }
    return acc;
}

/// Exact relative error of the N-point quadrature approximation:
///   eps(x,y) = g((y/gamma)^N)
///            + sum_{j=0}^{d-1} (y-x)^j/j! * d^j/dx^j g((gamma/x)^N).
/// The derivatives are expanded as x^(-j) * sum_i alpha_i^(j) g^i((gamma/x)^N)
/// with the alpha coefficients generated by their recurrence
///   alpha_1^(k+1)   = (N-k) alpha_1^(k)
///   alpha_i^(k+1)   = (iN-k) alpha_i^(k) + N(i-1) alpha_{i-1}^(k)
///   alpha_{k+2}^(k+1) = N(k+1) alpha_{k+1}^(k).
inline Complex exact_rel_error(ComplexPoint x, ComplexPoint y, double gamma, int N, int d) {
    if (!(gamma > 0.0) || N < 1) throw std::invalid_argument("exact_rel_error: bad parameters");
    if (d < 1 || d > detail::kMaxErrorOrder)
        throw std::invalid_argument("exact_rel_error: order d must be in [1, 10]");
    if (x == ComplexPoint(0.0, 0.0))
        throw std::invalid_argument("exact_rel_error: x must be nonzero");
    const Complex gx = detail::g_big_pow(x / gamma, N);  // g((gamma/x)^N), |x| < gamma
    const Complex gy = detail::g_big_pow(gamma / y, N);  // g((y/gamma)^N), |y| > gamma
    Complex eps = gy;
    std::vector<double> alpha{1.0};
    const Complex ratio = (y - x) / x;  // (y-x)^j * x^(-j)
    Complex ratio_pow = 1.0;
    double factorial = 1.0;
    for (int j = 0; j < d; ++j) {
        if (j > 0) {
            factorial *= j;
            ratio_pow *= ratio;
        }
        Complex deriv = 0.0;
        Complex gpow = gx;
        for (int i = 1; i <= j + 1; ++i) {
            deriv += alpha[i - 1] * gpow;
            gpow *= gx;
        }
        eps += ratio_pow / factorial * deriv;
        if (j + 1 < d) {
            const double dN = N;
            std::vector<double> next(j + 3, 0.0);
            next[0] = (dN - j) * alpha[0];
            for (int i = 2; i <= j + 1; ++i)
                next[i - 1] = (i * dN - j) * alpha[i - 1] + dN * (i - 1) * alpha[i - 2];
            next[j + 1] = dN * (j + 1.0) * alpha[j];
            alpha = std::move(next);
        }
    }
    return eps;
}

/// Constant c of the pointwise error bound, with ratio = |y/x|:
///   c = 1 for d = 1, else 2 + 2 sum_{j=1}^{d-1} [(ratio+1)N]^j (2d)^{j-1}/j!.
inline double c_constant(int d, int N, double ratio) {
    if (d < 1 || d > detail::kMaxErrorOrder)
        throw std::invalid_argument("c_constant: order d must be in [1, 10]");
    if (N < 1) throw std::invalid_argument("c_constant: N must be >= 1");
    if (d == 1) return 1.0;
    double sum = 0.0, term = 1.0, factorial = 1.0;
    const double base = (ratio + 1.0) * N;
    for (int j = 1; j < d; ++j) {
        factorial *= j;
        term *= base;                              // base^j
        const double twod = std::pow(2.0 * d, j - 1);
        sum += term * twod / factorial;
    }
    return 2.0 + 2.0 * sum;
}

/// Smallest N past which the pointwise bound's derivation is valid for a
/// source at distance abs_x inside radius gamma1:
///   N1 = max{d, ceil(log 3 / log(gamma1/abs_x))}.
inline int n1_threshold(double abs_x, double gamma1, int d) {
    if (!(abs_x > 0.0 && abs_x < gamma1))
        throw std::invalid_argument("n1_threshold: need 0 < |x| < gamma1");
    const double q = std::log(3.0) / std::log(gamma1 / abs_x);
    if (q > 1e9) return 1000000000;  // |x| -> gamma1: threshold diverges
    // backoff keeps exact-integer ratios from rounding up a whole step
    return std::max(d, static_cast<int>(std::ceil(q * (1.0 - 4e-12))));
}

enum class BoundKind { pointwise, block };

struct BoundReport {
    double gamma = 0.0;
    int N = 0;
    int d = 0;
    BoundKind kind = BoundKind::pointwise;
    double value = 0.0;
    double constant_used = 1.0;  // c or c-hat
    bool valid = false;          // sufficient-condition checks passed
};

/// Pointwise bound |eps(x,y)| <= g(|y/gamma|^N) + c*g(|gamma/x|^N).
/// The valid flag requires N to clear the n1 threshold taken at the actual
/// surface radius (the proof only needs |gamma/x|^N > 3).
inline BoundReport pointwise_bound(ComplexPoint x, ComplexPoint y, double gamma, int N, int d) {
    const double ax = std::abs(x), ay = std::abs(y);
    if (!(ax > 0.0 && ax < gamma && gamma < ay))
        throw std::invalid_argument("pointwise_bound: need 0 < |x| < gamma < |y|");
    if (N < 1) throw std::invalid_argument("pointwise_bound: N must be >= 1");
    BoundReport r;
    r.gamma = gamma;
    r.N = N;
    r.d = d;
    r.kind = BoundKind::pointwise;
    r.constant_used = c_constant(d, N, ay / ax);
    r.value = detail::g_big_pow(gamma / ay, N) + r.constant_used * detail::g_big_pow(ax / gamma, N);
    r.valid = N > n1_threshold(ax, gamma, d);
    return r;
}

namespace detail {

// Minimizer of h(t) = 1/(b/t - 1) + c/(t/a - 1) on (a, b) with a = small^N,
// b = big^N: the root of (b-ac)t^2 + 2ab(c-1)t + ab(a-bc) that lies in (a,b),
// reported as t0^(1/N) together with h(t0). Evaluated in the log domain so
// the N-th powers never overflow or underflow.
struct RadiusOptimum {
    double gamma_star;
    double min_bound;
};

inline RadiusOptimum optimal_radius(double small, double big, int N, double c,
                                    const char* who) {
    const double log_s = N * (std::log(small) - std::log(big));  // log((small/big)^N) < 0
    const double log_c = std::log(c);
    if (log_s + log_c >= 0.0)
        throw std::invalid_argument(std::string(who) +
                                    ": N too small (requires big^N > c * small^N)");
    const double s = std::exp(log_s);
    const double sc = std::exp(log_s + log_c);
    // t0/b = sqrt(cs) * [(1-s) - (c-1)sqrt(s/c)] / (1 - sc)
    const double inner = (1.0 - s) - (c - 1.0) * std::exp(0.5 * (log_s - log_c));
    if (!(inner > 0.0))  // cancellation at the edge of the validity condition
        throw std::invalid_argument(std::string(who) + ": N too small (root degenerates)");
    const double log_t0_over_b = 0.5 * (log_s + log_c) + std::log(inner) - std::log1p(-sc);
    RadiusOptimum r;
    r.gamma_star = big * std::exp(log_t0_over_b / N);
    // h(t0) = (2*sqrt(cb/a) + c + 1) / (b/a - 1) = (2*sqrt(cs) + (c+1)s)/(1-s)
    r.min_bound = (2.0 * std::exp(0.5 * (log_s + log_c)) + (c + 1.0) * s) / (1.0 - s);
    return r;
}

}  // namespace detail

struct PointwiseOptimum {
    double gamma_star;  // unique minimizer of the pointwise bound in (|x|,|y|)
    double min_bound;   // bound value at the minimizer; decays like |y/x|^(-N/2)
};

inline PointwiseOptimum pointwise_optimal_gamma(ComplexPoint x, ComplexPoint y, int N, int d) {
    const double ax = std::abs(x), ay = std::abs(y);
    if (!(ax > 0.0 && ax < ay))
        throw std::invalid_argument("pointwise_optimal_gamma: need 0 < |x| < |y|");
    if (N < 1) throw std::invalid_argument("pointwise_optimal_gamma: N must be >= 1");
    const double c = c_constant(d, N, ay / ax);
    const auto opt = detail::optimal_radius(ax, ay, N, c, "pointwise_optimal_gamma");
    return {opt.gamma_star, opt.min_bound};
}

/// d = 1 Frobenius-norm bound g((gamma/gamma1)^N) + g((gamma2/gamma)^N).
inline double block_bound_d1(double gamma, double gamma1, double gamma2, int N) {
    if (!(gamma1 > 0.0 && gamma1 < gamma && gamma < gamma2))
        throw std::invalid_argument("block_bound_d1: need gamma1 < gamma < gamma2");
    if (N < 1) throw std::invalid_argument("block_bound_d1: N must be >= 1");
    return detail::g_big_pow(gamma1 / gamma, N) + detail::g_big_pow(gamma / gamma2, N);
}

/// Unique minimizer of the d = 1 block bound.
inline double optimal_gamma_d1(double gamma1, double gamma2) {
    if (!(gamma1 > 0.0 && gamma1 < gamma2))
        throw std::invalid_argument("optimal_gamma_d1: need 0 < gamma1 < gamma2");
    return std::sqrt(gamma1 * gamma2);
}

/// Minimum of the d = 1 block bound over gamma: 2*g((gamma2/gamma1)^(N/2)).
inline double block_min_d1(double gamma1, double gamma2, int N) {
    if (!(gamma1 > 0.0 && gamma1 < gamma2))
        throw std::invalid_argument("block_min_d1: need 0 < gamma1 < gamma2");
    if (N < 1) throw std::invalid_argument("block_min_d1: N must be >= 1");
    const double u = std::exp(-0.5 * N * std::log(gamma2 / gamma1));
    return 2.0 * u / (1.0 - u);
}

/// Frobenius-norm bound for any d on validated geometry:
///   g((gamma2/gamma)^N) + c-hat * g((gamma/gamma1)^N),
/// where c-hat uses ratio gamma3/gamma1. Delegates to the d = 1 bound when
/// d = 1. The valid flag checks c-hat < (gamma2/gamma1)^N, the sufficient
/// condition under which the minimizer below exists.
inline BoundReport block_bound(double gamma, const GeometryConfig& cfg, int N) {
    cfg.check();
    if (!(cfg.gamma1 < gamma && gamma < cfg.gamma2))
        throw std::invalid_argument("block_bound: need gamma1 < gamma < gamma2");
    if (N < 1) throw std::invalid_argument("block_bound: N must be >= 1");
    BoundReport r;
    r.gamma = gamma;
    r.N = N;
    r.d = cfg.d;
    r.kind = BoundKind::block;
    if (cfg.d == 1) {
        r.constant_used = 1.0;
        r.value = block_bound_d1(gamma, cfg.gamma1, cfg.gamma2, N);
        r.valid = true;  // the d = 1 bound holds for every N > 0
        return r;
    }
    r.constant_used = c_constant(cfg.d, N, cfg.gamma3 / cfg.gamma1);
    r.value = detail::g_big_pow(gamma / cfg.gamma2, N) +
              r.constant_used * detail::g_big_pow(cfg.gamma1 / gamma, N);
    r.valid = std::log(r.constant_used) < N * std::log(cfg.gamma2 / cfg.gamma1);
    return r;
}

/// Closed-form minimizer of the block bound over gamma in (gamma1, gamma2).
inline double optimal_gamma_block(const GeometryConfig& cfg, int N) {
    cfg.check();
    if (N < 1) throw std::invalid_argument("optimal_gamma_block: N must be >= 1");
    const double chat = cfg.d == 1 ? 1.0 : c_constant(cfg.d, N, cfg.gamma3 / cfg.gamma1);
    return detail::optimal_radius(cfg.gamma1, cfg.gamma2, N, chat, "optimal_gamma_block")
        .gamma_star;
}

struct ChosenN {
    int N = 0;
    bool floor_warning = false;  // requested tolerance near the double-precision floor
};

/// Smallest N whose minimized block bound meets tau1. Linear search from
/// N = d+1; the bound is cheap and monotone once valid.
inline ChosenN choose_N(const GeometryConfig& cfg, double tau1) {
    cfg.check();
    if (!(tau1 > 0.0 && tau1 < 1.0)) throw std::invalid_argument("choose_N: need 0 < tau1 < 1");
    ChosenN out;
    out.floor_warning = tau1 < 4.0 * std::numeric_limits<double>::epsilon();
    constexpr int kCap = 10000;
    for (int N = cfg.d + 1; N <= kCap; ++N) {
        double value;
        if (cfg.d == 1) {
            value = block_min_d1(cfg.gamma1, cfg.gamma2, N);
        } else {
            const double chat = c_constant(cfg.d, N, cfg.gamma3 / cfg.gamma1);
            if (!(std::log(chat) < N * std::log(cfg.gamma2 / cfg.gamma1))) continue;
            value = block_bound(optimal_gamma_block(cfg, N), cfg, N).value;
        }
        if (value <= tau1) {
            out.N = N;
            return out;
        }
    }
    throw std::runtime_error("choose_N: tolerance unreachable within N <= 10000");
}

struct HybridBoundReport {
    double s1 = 0.0;
    double s2 = 0.0;
    double s2_tilde = 0.0;
    double tau1 = 0.0;
    double tau2 = 0.0;
    double bound_spr = 0.0;   // s1*tau1 + s2*tau2
    double bound_skel = 0.0;  // s1*tau1 + s2_tilde*tau2
};

/// Constants of the hybrid-compression error bound:
///   s1 = 1 + sqrt(r + (m-r) r e^2)
///          * sqrt(1 - (m-r)(gamma2-gamma1)^(2d) / (m (gamma1+gamma3)^(2d)))
///   s2 = gamma* (gamma1+gamma3)^d / ((gamma2-gamma*)(gamma*-gamma1)^d)
/// with e the magnitude cap on the interpolation coefficients.
inline HybridBoundReport hybrid_bound(int m, int r, double e, const GeometryConfig& cfg,
                                      double gamma_star, double tau1, double tau2) {
    cfg.check();
    if (r < 1 || r > m) throw std::invalid_argument("hybrid_bound: need 1 <= r <= m");
    if (!(cfg.gamma1 < gamma_star && gamma_star < cfg.gamma2))
        throw std::invalid_argument("hybrid_bound: gamma* outside (gamma1, gamma2)");
    const double ratio2d =
        std::pow((cfg.gamma2 - cfg.gamma1) / (cfg.gamma1 + cfg.gamma3), 2 * cfg.d);
    HybridBoundReport h;
    h.tau1 = tau1;
    h.tau2 = tau2;
    h.s1 = 1.0 + std::sqrt(r + static_cast<double>(m - r) * r * e * e) *
                     std::sqrt(1.0 - (m - r) * ratio2d / m);
    h.s2 = gamma_star * std::pow(cfg.gamma1 + cfg.gamma3, cfg.d) /
           ((cfg.gamma2 - gamma_star) * std::pow(gamma_star - cfg.gamma1, cfg.d));
    h.s2_tilde = h.s2 + h.s1 - 1.0;
    h.bound_spr = h.s1 * tau1 + h.s2 * tau2;
    h.bound_skel = h.s1 * tau1 + h.s2_tilde * tau2;
    return h;
}

}  // namespace pxk::bounds
