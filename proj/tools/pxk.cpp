// Command-line driver: gamma sweeps, N sweeps, compression with factor
// output, and probe-based radius estimation. All outputs are CSV.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pxk/pxk.hpp"

namespace {

struct Options {
    int d = 1;
    double gamma1 = 0.5;
    double gamma2 = 2.0;
    double gamma3 = 5.0;
    int m = 200;
    int n = 300;
    int N = 0;          // 0: derive from tau1
    double tau1 = 1e-10;
    double tau2 = 1e-10;
    double f = 2.0;
    int grid = 64;
    std::uint64_t seed = 1;
    std::string points_x;
    std::string points_y;
    bool skeleton = false;
    int probe_l = 1;
    std::string out;
};

void add_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--d", o.d, "kernel order d");
    cmd->add_option("--gamma1", o.gamma1, "source disk radius");
    cmd->add_option("--gamma2", o.gamma2, "annulus inner radius");
    cmd->add_option("--gamma3", o.gamma3, "annulus outer radius");
    cmd->add_option("--m", o.m, "number of source points");
    cmd->add_option("--n", o.n, "number of target points");
    cmd->add_option("--N", o.N, "number of proxy points (overrides --tau1)");
    cmd->add_option("--tau1", o.tau1, "kernel approximation tolerance");
    cmd->add_option("--tau2", o.tau2, "rank-revealing truncation tolerance");
    cmd->add_option("--f", o.f, "interpolation coefficient cap");
    cmd->add_option("--grid", o.grid, "number of gamma grid points");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--points-x", o.points_x, "load X from file instead of sampling");
    cmd->add_option("--points-y", o.points_y, "load Y from file instead of sampling");
    cmd->add_flag("--skeleton", o.skeleton, "compute the two-sided skeleton factorization");
    cmd->add_option("--probe-l", o.probe_l, "probe set size for radius estimation");
    cmd->add_option("--out", o.out, "output path (stdout when omitted)");
    cmd->set_config("--config", "", "key=value config file; flags override it");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::invalid_argument("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

pxk::GeometryConfig make_config(const Options& o) {
    pxk::GeometryConfig cfg{o.gamma1, o.gamma2, o.gamma3, o.d};
    cfg.check();
    return cfg;
}

struct Instance {
    pxk::PointSet X;
    pxk::PointSet Y;
};

Instance make_sets(const Options& o, const pxk::GeometryConfig& cfg) {
    Instance inst;
    if (!o.points_x.empty() || !o.points_y.empty()) {
        if (o.points_x.empty() || o.points_y.empty())
            throw std::invalid_argument("--points-x and --points-y must be given together");
        inst.X = pxk::load_points(o.points_x);
        inst.Y = pxk::load_points(o.points_y);
        // Compression assumes X clusters around the origin; the kernel is
        // translation invariant, so shift both sets by X's centroid.
        const pxk::ComplexPoint shift = -inst.X.centroid();
        inst.X = inst.X.translated(shift);
        inst.Y = inst.Y.translated(shift);
    } else {
        inst.X = pxk::sample_disk(o.m, cfg.gamma1, o.seed);
        inst.Y = pxk::sample_annulus(o.n, cfg.gamma2, cfg.gamma3, o.seed + 1);
    }
    pxk::validate_separation(inst.X, inst.Y, cfg);
    return inst;
}

int resolve_N(const Options& o, const pxk::GeometryConfig& cfg, bool& all_valid) {
    if (o.N > 0) return o.N;
    const auto chosen = pxk::bounds::choose_N(cfg, o.tau1);
    if (chosen.floor_warning) {
        std::cerr << "warning: tau1 is below the double-precision floor\n";
        all_valid = false;
    }
    return chosen.N;
}

std::vector<double> gamma_grid(const pxk::GeometryConfig& cfg, int count) {
    if (count < 1) throw std::invalid_argument("--grid must be >= 1");
    const double span = cfg.gamma2 - cfg.gamma1;
    const double lo = cfg.gamma1 + 1e-3 * span;
    const double hi = cfg.gamma2 - 1e-3 * span;
    std::vector<double> grid(count);
    if (count == 1) {
        grid[0] = 0.5 * (lo + hi);
        return grid;
    }
    for (int i = 0; i < count; ++i) grid[i] = lo + (hi - lo) * i / (count - 1);
    return grid;
}

constexpr long long kDenseGate = 8'000'000LL;

void require_dense_capacity(const Instance& inst) {
    if (static_cast<long long>(inst.X.size()) * inst.Y.size() > kDenseGate)
        throw std::invalid_argument("instance too large for dense error sweeps");
}

int cmd_sweep_gamma(const Options& o) {
    bool all_valid = true;
    const auto cfg = make_config(o);
    const auto inst = make_sets(o, cfg);
    require_dense_capacity(inst);
    const int N = resolve_N(o, cfg, all_valid);
    const auto grid = gamma_grid(cfg, o.grid);

    const auto full = pxk::estimator::error_curve(inst.X, inst.Y, cfg.d, N, grid);
    const auto [X0, Y0] = pxk::estimator::probe_sets(cfg, o.probe_l, o.seed);
    const auto probe =
        pxk::estimator::error_curve(X0, Y0, cfg.d, N, grid, pxk::estimator::CurveKind::probe);

    const pxk::ComplexMatrix K = pxk::kernel_matrix(inst.X, inst.Y, cfg.d);
    CsvWriter w(o.out);
    w.stream() << "gamma,E_N,R_N,bound,probe_E_N0\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto result = pxk::hybrid::hybrid_compress(inst.X, inst.Y, cfg, grid[i], N, o.tau2, o.f);
        const double r_n =
            pxk::rel_fro_error(K, pxk::matmul(result.U.basis_matrix(), result.core));
        const auto bound = pxk::bounds::block_bound(grid[i], cfg, N);
        all_valid = all_valid && bound.valid;
        w.stream() << fmt(grid[i]) << ',' << fmt(full.values[i]) << ',' << fmt(r_n) << ','
                   << fmt(bound.value) << ',' << fmt(probe.values[i]) << '\n';
    }
    return all_valid ? 0 : 2;
}

int cmd_sweep_n(const Options& o) {
    bool all_valid = true;
    const auto cfg = make_config(o);
    const auto inst = make_sets(o, cfg);
    require_dense_capacity(inst);
    const int n_max = resolve_N(o, cfg, all_valid);
    const double gamma_star =
        pxk::estimator::estimate_optimal_gamma(cfg, cfg.d, n_max, o.probe_l, o.seed);

    const pxk::ComplexMatrix K = pxk::kernel_matrix(inst.X, inst.Y, cfg.d);
    CsvWriter w(o.out);
    w.stream() << "N,E_N,R_N,bound\n";
    for (int N = cfg.d + 1; N <= n_max; ++N) {
        const auto surface = pxk::trapezoidal_surface(gamma_star, N);
        const double e_n =
            pxk::analytical_error(K, pxk::analytical_compress(inst.X, inst.Y, surface, cfg.d));
        const auto result =
            pxk::hybrid::hybrid_compress(inst.X, inst.Y, cfg, gamma_star, N, o.tau2, o.f);
        const double r_n =
            pxk::rel_fro_error(K, pxk::matmul(result.U.basis_matrix(), result.core));
        const auto bound = pxk::bounds::block_bound(gamma_star, cfg, N);
        all_valid = all_valid && bound.valid;
        w.stream() << N << ',' << fmt(e_n) << ',' << fmt(r_n) << ',' << fmt(bound.value) << '\n';
    }
    return all_valid ? 0 : 2;
}

void write_indices(const std::string& path, const std::vector<int>& idx) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open '" + path + "'");
    out << "index\n";
    for (int i : idx) out << i << '\n';
}

void write_coeff_block(const std::string& path, const pxk::ComplexMatrix& E) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open '" + path + "'");
    out << "row,col,re,im\n";
    for (int i = 0; i < E.rows(); ++i)
        for (int j = 0; j < E.cols(); ++j)
            out << i << ',' << j << ',' << fmt(E(i, j).real()) << ',' << fmt(E(i, j).imag())
                << '\n';
}

int cmd_compress(const Options& o) {
    bool all_valid = true;
    const auto cfg = make_config(o);
    const auto inst = make_sets(o, cfg);
    const int N = resolve_N(o, cfg, all_valid);
    const double gamma_star =
        pxk::estimator::estimate_optimal_gamma(cfg, cfg.d, N, o.probe_l, o.seed);
    all_valid = all_valid && pxk::bounds::block_bound(gamma_star, cfg, N).valid;

    auto result =
        o.skeleton ? pxk::hybrid::skeletonize(inst.X, inst.Y, cfg, gamma_star, N, o.tau2, o.f)
                   : pxk::hybrid::hybrid_compress(inst.X, inst.Y, cfg, gamma_star, N, o.tau2, o.f);

    double e_n = std::numeric_limits<double>::quiet_NaN();
    double r_n = e_n;
    if (static_cast<long long>(inst.X.size()) * inst.Y.size() <= kDenseGate) {
        const auto measured =
            pxk::hybrid::measure_errors(inst.X, inst.Y, cfg, gamma_star, N, result);
        e_n = measured.e_n;
        r_n = measured.r_n;
        result.measured_error = r_n;
    }

    const std::string prefix = o.out.empty() ? "pxk_compress" : o.out;
    write_indices(prefix + ".J.txt", result.U.selected);
    write_coeff_block(prefix + ".E.csv", result.U.E);
    pxk::save_points(prefix + ".xhat.txt", result.x_hat);
    if (result.V) {
        write_indices(prefix + ".Jcol.txt", result.V->selected);
        write_coeff_block(prefix + ".V.csv", result.V->E);
        pxk::save_points(prefix + ".yhat.txt", *result.y_hat);
    }
    std::ofstream summary(prefix + ".summary.csv");
    summary << "d,N,gamma_star,rank,E_N,R_N,bound_spr\n";
    summary << cfg.d << ',' << N << ',' << fmt(gamma_star) << ',' << result.rank << ','
            << fmt(e_n) << ',' << fmt(r_n) << ',' << fmt(result.bound.bound_spr) << '\n';
    return all_valid ? 0 : 2;
}

int cmd_estimate_gamma(const Options& o) {
    bool all_valid = true;
    const auto cfg = make_config(o);
    const int N = resolve_N(o, cfg, all_valid);
    const double gamma_star =
        pxk::estimator::estimate_optimal_gamma(cfg, cfg.d, N, o.probe_l, o.seed);
    CsvWriter w(o.out);
    w.stream() << "d,N,probe_l,seed,gamma_star\n";
    w.stream() << cfg.d << ',' << N << ',' << o.probe_l << ',' << o.seed << ','
               << fmt(gamma_star) << '\n';
    return all_valid ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"proxy-point kernel matrix compression"};
    app.require_subcommand(1);

    Options o;
    auto* sweep_gamma = app.add_subcommand("sweep-gamma", "errors and bounds over a gamma grid");
    auto* sweep_n = app.add_subcommand("sweep-n", "errors and bounds over a range of N");
    auto* compress = app.add_subcommand("compress", "run the hybrid compression, write factors");
    auto* estimate = app.add_subcommand("estimate-gamma", "probe-based optimal radius estimate");
    for (auto* cmd : {sweep_gamma, sweep_n, compress, estimate}) add_options(cmd, o);

    CLI11_PARSE(app, argc, argv);
    try {
        if (sweep_gamma->parsed()) return cmd_sweep_gamma(o);
        if (sweep_n->parsed()) return cmd_sweep_n(o);
        if (compress->parsed()) return cmd_compress(o);
        return cmd_estimate_gamma(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
