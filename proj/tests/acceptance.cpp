// Acceptance suite: one pass/fail line per criterion, tolerances pinned below.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cqp/experiment.hpp"
#include "cqp/fokker_planck.hpp"
#include "cqp/sde.hpp"
#include "cqp/stats.hpp"
#include "cqp/wavefunction.hpp"

using namespace cqp;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

fs::path work_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("cqp_acceptance_" + tag);
    fs::remove_all(p);
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double interp(const DensityHistogram& h, double x) {
    if (x <= h.bin_center(0)) return h.densities.front();
    std::size_t last = h.n_bins() - 1;
    if (x >= h.bin_center(last)) return h.densities.back();
    for (std::size_t i = 0; i < last; ++i) {
        double x0 = h.bin_center(i), x1 = h.bin_center(i + 1);
        if (x >= x0 && x <= x1) {
            double f = (x - x0) / (x1 - x0);
            return (1.0 - f) * h.densities[i] + f * h.densities[i + 1];
        }
    }
    return h.densities.back();
}

// --- criterion 1: Duffing finite-difference solve vs the exact density ------

void criterion_duffing() {
    ExperimentConfig cfg = ExperimentConfig::from_json_text(R"({"experiment":"duffing"})");
    fs::path out = work_dir("duffing");
    cfg.out_dir = out.string();
    RunSummary sum = run_experiment(cfg);
    const double tol = 0.05;
    double err = sum.metrics.at("rel_l2_interior");
    report(1, err <= tol,
           "duffing stationary solve matches exact density (interior rel L2 " + fmt(err) +
               " <= " + fmt(tol) + ", t_end " + fmt(sum.metrics.at("t_end")) + ")");
    fs::remove_all(out);
}

// --- criterion 2: point set A reproduces the Born density -------------------

void criterion_pointset_a() {
    // Experiment defaults pin the crossing-collection window to t in
    // [0.35, 1.5]; the complex-plane density has no stationary state, so the
    // window is part of the measurement protocol.
    ExperimentConfig cfg = ExperimentConfig::from_json_text(R"({
      "experiment": "pointset_a", "seed": 2024,
      "sde": {"n_trajectories": 10000}
    })");
    fs::path out = work_dir("pointset_a");
    cfg.out_dir = out.string();
    RunSummary sum = run_experiment(cfg);
    const double tol = 0.98;  // CI-scale ensemble of 1e4 trajectories
    double gamma = sum.metrics.at("gamma_born");
    report(2, gamma >= tol,
           "point set A correlates with the Born density (Gamma " + fmt(gamma) +
               " >= " + fmt(tol) + ")");
    fs::remove_all(out);
}

// --- criterion 3: 1D Fokker-Planck stationarity at the Born density ---------

void criterion_fp1d() {
    ExperimentConfig cfg = ExperimentConfig::from_json_text(R"({"experiment":"fp1d"})");
    fs::path out = work_dir("fp1d");
    cfg.out_dir = out.string();
    RunSummary sum = run_experiment(cfg);
    const double tol = 0.01;
    double err = sum.metrics.at("max_err_born");
    report(3, err <= tol,
           "1D solve stays on the Born density (max err " + fmt(err) + " <= " + fmt(tol) +
               " on |x| <= 4)");
    fs::remove_all(out);
}

// --- criteria 4, 5, 9: 2D complex-plane Fokker-Planck solves ----------------

DensityHistogram solve_marginal(int n, int cells, FpResult2D* full = nullptr) {
    FpProblem p;
    p.kind = FpKind::complex_2d;
    p.state = QuantumState(n);
    p.x_min = p.y_min = -6.0;
    p.x_max = p.y_max = 6.0;
    p.nx = cells;
    p.ny = cells;
    p.dt = 1e-4;
    p.t_final = 5.0;
    p.record_snapshots = (full != nullptr);
    FpResult2D res = solve_fp_2d(p);
    if (full) *full = res;
    return marginal_y(res.density);
}

void criteria_fp2d(const DensityHistogram& m1_fine) {
    // criterion 4: the y-marginal is positive at every node, with the n=1
    // value at x = 0 at least 10% of the peak; two resolutions agree to 2%
    const double floor_tol = 0.10;
    double peak = *std::max_element(m1_fine.densities.begin(), m1_fine.densities.end());
    double at_node = interp(m1_fine, 0.0);
    double frac = at_node / peak;

    DensityHistogram m1_coarse = solve_marginal(1, 120);
    double num2 = 0.0, den2 = 0.0;
    for (std::size_t i = 0; i < m1_coarse.n_bins(); ++i) {
        double x = m1_coarse.bin_center(i);
        double d = m1_coarse.densities[i] - interp(m1_fine, x);
        num2 += d * d;
        den2 += m1_coarse.densities[i] * m1_coarse.densities[i];
    }
    double grid_err = std::sqrt(num2 / den2);

    DensityHistogram m3 = solve_marginal(3, 240);
    double m3_min_at_node = 1e300;
    for (double xn : {-1.2247448713915890, 0.0, 1.2247448713915890}) {  // H_3 roots
        m3_min_at_node = std::min(m3_min_at_node, interp(m3, xn));
    }
    bool ok = frac >= floor_tol && grid_err <= 0.02 && m3_min_at_node > 0.0;
    report(4, ok,
           "nodes are removed from the 2D marginal (n=1 x=0 fraction " + fmt(frac) +
               " >= " + fmt(floor_tol) + ", grid agreement " + fmt(grid_err) +
               " <= 0.02, n=3 node minimum " + fmt(m3_min_at_node) + " > 0)");
}

void criterion_cross_validation(const DensityHistogram& m1_fine) {
    ExperimentConfig cfg = ExperimentConfig::from_json_text(R"({
      "experiment": "pointset_b", "seed": 515,
      "sde": {"n_trajectories": 4000, "n_steps": 10000}
    })");
    fs::path out = work_dir("pointset_b");
    cfg.out_dir = out.string();
    run_experiment(cfg);
    DensityHistogram hist;
    {
        std::ifstream in(out / "pointset_b.csv");
        std::string line;
        std::getline(in, line);  // header
        std::vector<double> centers, dens;
        while (std::getline(in, line)) {
            double c, d;
            if (std::sscanf(line.c_str(), "%lf,%lf", &c, &d) == 2) {
                centers.push_back(c);
                dens.push_back(d);
            }
        }
        double w = centers[1] - centers[0];
        for (double c : centers) hist.bin_edges.push_back(c - 0.5 * w);
        hist.bin_edges.push_back(centers.back() + 0.5 * w);
        hist.densities = dens;
        hist.total_samples = 1;
    }
    const double tol = 0.95;
    double gamma =
        pearson_correlation(hist, [&](double x) { return interp(m1_fine, x); });
    report(5, gamma >= tol,
           "point set B agrees with the 2D Fokker-Planck marginal (Gamma " + fmt(gamma) +
               " >= " + fmt(tol) + ")");
    fs::remove_all(out);
}

void criterion_symmetry(const FpResult2D& res) {
    double sym = 0.0;
    auto check = [&](const Field2D& f) {
        for (int j = 0; j < f.nx; ++j) {
            for (int k = 0; k < f.ny; ++k) {
                sym = std::max(sym,
                               std::abs(f.at(j, k) - f.at(f.nx - 1 - j, f.ny - 1 - k)));
            }
        }
    };
    check(res.density);
    for (const auto& [t, snap] : res.snapshots) {
        (void)t;
        check(snap);
    }
    double mass_lo = 1e300, mass_hi = -1e300;
    for (const auto& [t, m] : res.mass_trace) {
        (void)t;
        mass_lo = std::min(mass_lo, m);
        mass_hi = std::max(mass_hi, m);
    }
    bool ok = sym <= 1e-10 && mass_lo >= 0.95 && mass_hi <= 1.05;
    report(9, ok,
           "point symmetry and mass conservation hold (symmetry residual " + fmt(sym) +
               " <= 1e-10, mass in [" + fmt(mass_lo) + ", " + fmt(mass_hi) +
               "] within [0.95, 1.05])");
}

// --- criterion 6: correspondence with the classical density at n = 20 -------

void criterion_correspondence() {
    ExperimentConfig cfg = ExperimentConfig::from_json_text(R"({
      "experiment": "pointset_b", "seed": 808,
      "sde": {"n": 20, "n_trajectories": 2000, "n_steps": 20000},
      "hist_b": {"lo": -8.0, "hi": 8.0, "n_bins": 160}
    })");
    fs::path out = work_dir("correspondence");
    cfg.out_dir = out.string();
    RunSummary sum = run_experiment(cfg);
    const double tol = 0.90;
    double g_cl = sum.metrics.at("gamma_classical_window");
    double g_born = sum.metrics.at("gamma_born_window");
    report(6, g_cl >= tol && g_cl > g_born,
           "n=20 point set B approaches the classical density (Gamma_classical " +
               fmt(g_cl) + " >= " + fmt(tol) + " and > Gamma_born " + fmt(g_born) + ")");
    fs::remove_all(out);
}

// --- criterion 7: drift identity across formulations ------------------------

void criterion_drift_identity() {
    const double tol = 1e-12;
    double worst = 0.0;
    for (int n : {0, 1, 2, 3}) {
        QuantumState s(n);
        std::mt19937_64 rng(100 + static_cast<unsigned>(n));
        std::uniform_real_distribution<double> coord(-4.0, 4.0);
        int found = 0;
        while (found < 100) {
            double x = coord(rng);
            if (std::abs(hermite(n, x)) <= 1e-3) continue;
            ++found;
            double vb = bohmian_drift(s, x);
            double bp = nelson_drift(s, x);
            Complex u = complex_drift(s, Complex(x, 0.0));
            double scale = std::max(1.0, std::abs(vb));
            worst = std::max(worst, std::abs(vb - bp) / scale);
            worst = std::max(worst, std::abs(vb - (u.real() - u.imag())) / scale);
        }
    }
    report(7, worst <= tol,
           "Bohmian, Nelson, and complex drifts coincide on the real axis (max "
           "deviation " + fmt(worst) + " <= 1e-12)");
}

// --- criterion 8: Cauchy-Riemann residuals of the log-derivative ------------

void criterion_cauchy_riemann() {
    const double h = 1e-5;
    const double tol = 1e-6;
    double worst = 0.0;
    for (int n = 0; n <= 5; ++n) {
        QuantumState s(n);
        for (int j = 0; j < 20; ++j) {
            for (int k = 0; k < 20; ++k) {
                Complex z(-2.0 + 4.0 * j / 19.0, -2.0 + 4.0 * k / 19.0);
                if (std::abs(hermite(n, z)) <= 0.1) continue;  // stay off nodes
                if (std::abs(log_derivative(s, z)) > 3.0) continue;
                Complex fx = (log_derivative(s, z + Complex(h, 0.0)) -
                              log_derivative(s, z - Complex(h, 0.0))) /
                             (2.0 * h);
                Complex fy = (log_derivative(s, z + Complex(0.0, h)) -
                              log_derivative(s, z - Complex(0.0, h))) /
                             (2.0 * h);
                // analytic: d/dy = i d/dx
                worst = std::max(worst, std::abs(fy - Complex(0.0, 1.0) * fx));
            }
        }
    }
    report(8, worst <= tol,
           "log-derivative satisfies the Cauchy-Riemann equations (max residual " +
               fmt(worst) + " <= 1e-6 at h = 1e-5)");
}

// --- criterion 10: determinism across thread counts -------------------------

void criterion_determinism() {
    const char* text = R"({
      "experiment": "pointset_a", "seed": 77,
      "sde": {"n_trajectories": 1000, "n_steps": 5000}
    })";
    ExperimentConfig a = ExperimentConfig::from_json_text(text);
    ExperimentConfig b = ExperimentConfig::from_json_text(text);
    fs::path out_a = work_dir("det1"), out_b = work_dir("det4");
    a.out_dir = out_a.string();
    a.threads = 1;
    b.out_dir = out_b.string();
    b.threads = 4;
    RunSummary sa = run_experiment(a);
    RunSummary sb = run_experiment(b);
    bool ok = sa.metrics == sb.metrics;
    for (const std::string& name : sa.artifacts) {
        ok = ok && read_file(out_a / name) == read_file(out_b / name);
    }
    report(10, ok, "summaries and CSVs are identical for --threads 1 vs 4");
    fs::remove_all(out_a);
    fs::remove_all(out_b);
}

}  // namespace

int main() {
    criterion_drift_identity();     // 7
    criterion_cauchy_riemann();     // 8
    criterion_determinism();        // 10
    criterion_pointset_a();         // 2
    criterion_fp1d();               // 3
    FpResult2D fp2d_n1;
    DensityHistogram m1 = solve_marginal(1, 240, &fp2d_n1);
    criteria_fp2d(m1);              // 4
    criterion_cross_validation(m1); // 5
    criterion_symmetry(fp2d_n1);    // 9
    criterion_correspondence();     // 6
    criterion_duffing();            // 1
    std::printf("%s: %d criterion(s) failed\n", g_failures == 0 ? "OK" : "FAILURES",
                g_failures);
    return g_failures;
}
