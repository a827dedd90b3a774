#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "pxk/geometry.hpp"
#include "pxk/kernel.hpp"
#include "pxk/matrix.hpp"
#include "pxk/proxy.hpp"

namespace pxk::estimator {

enum class CurveKind { probe, full, bound };

/// Relative Frobenius errors sampled over a gamma grid.
struct ErrorCurve {
    std::vector<double> gammas;  // strictly increasing
    std::vector<double> values;
    CurveKind kind = CurveKind::full;
};

/// Probe sets for radius estimation: X0 always contains the point gamma1 and
/// Y0 the point gamma2 on the positive real axis (the worst cases of the
/// error bounds); any extras are uniform on the respective circles.
inline std::pair<PointSet, PointSet> probe_sets(const GeometryConfig& cfg, int l,
                                                std::uint64_t seed) {
    cfg.check();
    if (l < 1) throw std::invalid_argument("probe_sets: need l >= 1");
    detail::Rng rng(seed);
    PointSet X0, Y0;
    X0.label = "probe_x";
    Y0.label = "probe_y";
    X0.points.emplace_back(cfg.gamma1, 0.0);
    Y0.points.emplace_back(cfg.gamma2, 0.0);
    for (int i = 1; i < l; ++i) {
        const double t = 2.0 * M_PI * rng.uniform();
        X0.points.emplace_back(cfg.gamma1 * std::cos(t), cfg.gamma1 * std::sin(t));
    }
    for (int i = 1; i < l; ++i) {
        const double t = 2.0 * M_PI * rng.uniform();
        Y0.points.emplace_back(cfg.gamma2 * std::cos(t), cfg.gamma2 * std::sin(t));
    }
    return {X0, Y0};
}

/// Measured analytical-compression error over a gamma grid:
/// value(gamma) = ||K - K^(X,Z)Phi^(Z,Y)||_F / ||K||_F. Grid points are
/// evaluated in parallel; each one is independent.
inline ErrorCurve error_curve(const PointSet& X, const PointSet& Y, int d, int N,
                              const std::vector<double>& gamma_grid,
                              CurveKind kind = CurveKind::full) {
    if (gamma_grid.empty()) throw std::invalid_argument("error_curve: empty grid");
    double rx = 0.0, ry = std::abs(Y[0]);
    for (int i = 0; i < X.size(); ++i) rx = std::max(rx, std::abs(X[i]));
    for (int i = 0; i < Y.size(); ++i) ry = std::min(ry, std::abs(Y[i]));
    for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
        if (i > 0 && !(gamma_grid[i] > gamma_grid[i - 1]))
            throw std::invalid_argument("error_curve: grid must be strictly increasing");
        if (!(gamma_grid[i] > rx && gamma_grid[i] < ry))
            throw std::invalid_argument("error_curve: grid point not between the sets");
    }
    const ComplexMatrix K = kernel_matrix(X, Y, d);
    ErrorCurve curve;
    curve.gammas = gamma_grid;
    curve.values.assign(gamma_grid.size(), 0.0);
    curve.kind = kind;

    auto eval_range = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < gamma_grid.size(); i += stride) {
            const ProxySurface s = trapezoidal_surface(gamma_grid[i], N);
            curve.values[i] = analytical_error(K, analytical_compress(X, Y, s, d));
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(hw, gamma_grid.size());
    if (workers <= 1) {
        eval_range(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t)
            pool.emplace_back(eval_range, t, workers);
        for (auto& th : pool) th.join();
    }
    return curve;
}

namespace detail {

// Golden-section minimization on [a, b] down to the requested width.
template <typename F>
double golden_min(F&& f, double a, double b, double width) {
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > width) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

/// Probe-based estimate of the optimal proxy radius: coarse 64-point grid on
/// (gamma1+delta, gamma2-delta) with delta = 1e-3*(gamma2-gamma1), then
/// golden-section refinement of the bracketing interval down to width
/// 1e-4*(gamma2-gamma1). The coarse grid guards against false brackets in the
/// nearly-unimodal probe curve.
inline double estimate_optimal_gamma(const GeometryConfig& cfg, int d, int N, int l,
                                     std::uint64_t seed) {
    cfg.check();
    if (N < 1) throw std::invalid_argument("estimate_optimal_gamma: N must be >= 1");
    const auto [X0, Y0] = probe_sets(cfg, l, seed);
    const ComplexMatrix K0 = kernel_matrix(X0, Y0, d);
    auto probe = [&](double gamma) {
        const ProxySurface s = trapezoidal_surface(gamma, N);
        return analytical_error(K0, analytical_compress(X0, Y0, s, d));
    };
    const double span = cfg.gamma2 - cfg.gamma1;
    const double lo = cfg.gamma1 + 1e-3 * span;
    const double hi = cfg.gamma2 - 1e-3 * span;
    constexpr int kGrid = 64;
    int best = 0;
    double best_val = 0.0;
    std::vector<double> grid(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        grid[i] = lo + (hi - lo) * i / (kGrid - 1);
        const double v = probe(grid[i]);
        if (i == 0 || v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double a = grid[std::max(0, best - 1)];
    const double b = grid[std::min(kGrid - 1, best + 1)];
    return detail::golden_min(probe, a, b, 1e-4 * span);
}

}  // namespace pxk::estimator
