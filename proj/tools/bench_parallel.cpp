// Compares the serial reference kernels against the OpenMP versions and
// verifies that both produce identical output.
#include <omp.h>

#include <chrono>
#include <cstdio>

#include "cqp/fokker_planck.hpp"
#include "cqp/sde.hpp"

using namespace cqp;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void bench_ensemble() {
    SdeConfig cfg;
    cfg.state = QuantumState(1);
    cfg.n_trajectories = 400;
    cfg.n_steps = 5000;
    HistSpec spec{-5.0, 5.0, 100};

    auto t0 = std::chrono::steady_clock::now();
    EnsembleStats serial = simulate_ensemble_stats(cfg, spec, spec, 1);
    double t_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    EnsembleStats parallel = simulate_ensemble_stats(cfg, spec, spec, 0);
    double t_parallel = seconds_since(t0);

    bool same = serial.counts_a == parallel.counts_a && serial.counts_b == parallel.counts_b;
    std::printf("ensemble   serial %.3fs   omp(%d) %.3fs   speedup %.2fx   identical %s\n",
                t_serial, omp_get_max_threads(), t_parallel, t_serial / t_parallel,
                same ? "yes" : "NO");
}

void bench_fp2d() {
    FpProblem p;
    p.kind = FpKind::complex_2d;
    p.t_final = 0.05;
    p.stationarity_tol = 0.0;
    p.snapshot_interval = 0.0;

    auto t0 = std::chrono::steady_clock::now();
    FpResult2D serial = solve_fp_2d(p, false);
    double t_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    FpResult2D parallel = solve_fp_2d(p, true);
    double t_parallel = seconds_since(t0);

    bool same = serial.density.values == parallel.density.values;
    std::printf("fp2d step  serial %.3fs   omp(%d) %.3fs   speedup %.2fx   identical %s\n",
                t_serial, omp_get_max_threads(), t_parallel, t_serial / t_parallel,
                same ? "yes" : "NO");
}

}  // namespace

int main() {
    std::printf("OpenMP max threads: %d\n", omp_get_max_threads());
    bench_ensemble();
    bench_fp2d();
    return 0;
}
