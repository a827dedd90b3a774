#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pxk {

using ComplexPoint = std::complex<double>;

/// Separation geometry: sources inside the disk of radius gamma1, targets in
/// the annulus (gamma2, gamma3), kernel order d.
struct GeometryConfig {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double gamma3 = 0.0;
    int d = 1;

    void check() const {
        if (!(gamma1 > 0.0 && gamma1 < gamma2 && gamma2 < gamma3))
            throw std::invalid_argument("GeometryConfig: need 0 < gamma1 < gamma2 < gamma3");
        if (d < 1) throw std::invalid_argument("GeometryConfig: d must be >= 1");
    }
};

/// Ordered list of complex points. Order is significant: matrix rows and
/// columns follow it.
struct PointSet {
    std::vector<ComplexPoint> points;
    std::string label;

    int size() const { return static_cast<int>(points.size()); }
    const ComplexPoint& operator[](int i) const { return points[i]; }

    PointSet select(const std::vector<int>& idx) const {
        PointSet s;
        s.label = label;
        s.points.reserve(idx.size());
        for (int i : idx) {
            if (i < 0 || i >= size()) throw std::invalid_argument("PointSet::select: bad index");
            s.points.push_back(points[i]);
        }
        return s;
    }

    PointSet translated(ComplexPoint t) const {
        PointSet s;
        s.label = label;
        s.points.reserve(points.size());
        for (const auto& p : points) s.points.push_back(p + t);
        return s;
    }

    ComplexPoint centroid() const {
        ComplexPoint c = 0.0;
        for (const auto& p : points) c += p;
        return points.empty() ? c : c / static_cast<double>(points.size());
    }
};

namespace detail {

// Deterministic uniform doubles in [0,1): 53 bits taken straight from the
// engine, no library distribution in the path.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 eng_;
};

}  // namespace detail

/// Uniform-by-area sample of the punctured disk 0 < |p| < gamma1. Points
/// with |p| < 1e-3*gamma1 are rejected; the error expressions require
/// nonzero sources and their constants blow up as |x| -> 0.
inline PointSet sample_disk(int count, double gamma1, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample_disk: count must be >= 1");
    if (!(gamma1 > 0.0)) throw std::invalid_argument("sample_disk: radius must be positive");
    detail::Rng rng(seed);
    PointSet set;
    set.label = "disk";
    set.points.reserve(count);
    const double rmin = 1e-3 * gamma1;
    while (set.size() < count) {
        const double r = gamma1 * std::sqrt(rng.uniform());
        if (r < rmin || r >= gamma1) continue;
        const double t = 2.0 * M_PI * rng.uniform();
        set.points.emplace_back(r * std::cos(t), r * std::sin(t));
    }
    return set;
}

/// Uniform-by-area sample of the open annulus gamma2 < |p| < gamma3.
inline PointSet sample_annulus(int count, double gamma2, double gamma3, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample_annulus: count must be >= 1");
    if (!(0.0 < gamma2 && gamma2 < gamma3))
        throw std::invalid_argument("sample_annulus: need 0 < gamma2 < gamma3");
    detail::Rng rng(seed);
    PointSet set;
    set.label = "annulus";
    set.points.reserve(count);
    const double a = gamma2 * gamma2, b = gamma3 * gamma3;
    while (set.size() < count) {
        const double r = std::sqrt(a + rng.uniform() * (b - a));
        if (r <= gamma2 || r >= gamma3) continue;
        const double t = 2.0 * M_PI * rng.uniform();
        set.points.emplace_back(r * std::cos(t), r * std::sin(t));
    }
    return set;
}

/// Structured triangular grid on a rectangle: nx-by-ny vertices plus the two
/// triangle centroids of every cell, translated by `center`. Deterministic.
inline PointSet mesh_points(int nx, int ny, std::pair<double, double> rect, ComplexPoint center) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("mesh_points: need nx, ny >= 2");
    const double w = rect.first, h = rect.second;
    if (!(w > 0.0 && h > 0.0)) throw std::invalid_argument("mesh_points: degenerate rectangle");
    const double dx = w / (nx - 1), dy = h / (ny - 1);
    PointSet set;
    set.label = "mesh";
    set.points.reserve(static_cast<std::size_t>(nx) * ny + 2 * (nx - 1) * (ny - 1));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) set.points.push_back(ComplexPoint(i * dx, j * dy) + center);
    // Each cell is split along its up-diagonal into two triangles.
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            const double x0 = i * dx, y0 = j * dy;
            set.points.push_back(ComplexPoint(x0 + 2.0 * dx / 3.0, y0 + dy / 3.0) + center);
            set.points.push_back(ComplexPoint(x0 + dx / 3.0, y0 + 2.0 * dy / 3.0) + center);
        }
    return set;
}

/// Reads "re,im" pairs, one per line. Blank lines and '#' comments are
/// skipped. Parse failures name the offending line.
inline PointSet load_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_points: cannot open '" + path + "'");
    PointSet set;
    set.label = path;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        double re = 0.0, im = 0.0;
        char comma = 0;
        std::istringstream ss(line);
        if (!(ss >> re >> comma >> im) || comma != ',')
            throw std::invalid_argument("load_points: parse error at line " +
                                        std::to_string(lineno) + " of '" + path + "'");
        if (!std::isfinite(re) || !std::isfinite(im))
            throw std::invalid_argument("load_points: non-finite value at line " +
                                        std::to_string(lineno) + " of '" + path + "'");
        set.points.emplace_back(re, im);
    }
    if (set.points.empty()) throw std::invalid_argument("load_points: '" + path + "' has no points");
    return set;
}

/// Writes points in the load_points format with round-trippable precision.
inline void save_points(const std::string& path, const PointSet& set) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("save_points: cannot open '" + path + "'");
    char buf[64];
    for (const auto& p : set.points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p.real(), p.imag());
        out << buf;
    }
}

/// Checks the separation hypothesis: every x in X satisfies 0 < |x| < gamma1
/// and every y in Y satisfies gamma2 < |y| < gamma3. Reports the first
/// offending index and the inequality it violates.
inline void validate_separation(const PointSet& X, const PointSet& Y, const GeometryConfig& cfg) {
    cfg.check();
    for (int i = 0; i < X.size(); ++i) {
        const double r = std::abs(X[i]);
        if (!(r > 0.0))
            throw std::invalid_argument("validate_separation: |x|=0 at index " + std::to_string(i));
        if (!(r < cfg.gamma1))
            throw std::invalid_argument("validate_separation: |x|>=gamma1 at index " +
                                        std::to_string(i));
    }
    for (int i = 0; i < Y.size(); ++i) {
        const double r = std::abs(Y[i]);
        if (!(r > cfg.gamma2))
            throw std::invalid_argument("validate_separation: |y|<=gamma2 at index " +
                                        std::to_string(i));
        if (!(r < cfg.gamma3))
            throw std::invalid_argument("validate_separation: |y|>=gamma3 at index " +
                                        std::to_string(i));
    }
}

}  // namespace pxk
