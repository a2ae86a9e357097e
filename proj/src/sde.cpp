#include "cqp/sde.hpp"

#include <omp.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace cqp {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

double bohmian_drift_clamped(const QuantumState& state, double x, long* clamp_events) {
    int n = state.n();
    double v;
    bool clamped = false;
    if (n == 0) {
        v = -x;
    } else {
        double hn = hermite(n, x);
        if (std::abs(hn) < kNodeEps) {
            hn = std::copysign(kNodeEps, hn == 0.0 ? 1.0 : hn);
            clamped = true;
        }
        v = 2.0 * n * hermite(n - 1, x) / hn - x;
    }
    if (std::abs(v) > kDriftClamp) {
        v = std::copysign(kDriftClamp, v);
        clamped = true;
    }
    if (clamped && clamp_events != nullptr) ++(*clamp_events);
    return v;
}

struct TrajectoryAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Integrates one trajectory, invoking on_sample(t, x, y) at each recorded point.
template <typename OnSample>
long walk_trajectory(const SdeConfig& config, long index, OnSample&& on_sample) {
    std::mt19937_64 rng(stream_seed(config.master_seed, index));
    std::normal_distribution<double> normal(0.0, 1.0);

    const std::size_t n_init = config.initial_positions.size();
    Complex z = config.initial_positions[static_cast<std::size_t>(index) % n_init];
    double x = z.real();
    long clamps = 0;
    const double sqrt_dt = std::sqrt(config.dt);

    for (long j = 0; j < config.n_steps; ++j) {
        double xi = normal(rng);
        if (config.kind == SdeKind::complex_plane) {
            Complex u = complex_drift(config.state, z, &clamps);
            double dw = kInvSqrt2 * xi * sqrt_dt;
            z = Complex(z.real() + u.real() * config.dt - dw,
                        z.imag() + u.imag() * config.dt + dw);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw TrajectoryAbort("trajectory " + std::to_string(index) +
                                      " non-finite at step " + std::to_string(j));
            }
        } else {
            double v = bohmian_drift_clamped(config.state, x, &clamps);
            x += v * config.dt + xi * sqrt_dt;
            if (!std::isfinite(x)) {
                throw TrajectoryAbort("trajectory " + std::to_string(index) +
                                      " non-finite at step " + std::to_string(j));
            }
            z = Complex(x, 0.0);
        }
        double t = (j + 1) * config.dt;
        if ((j + 1) % config.record_stride == 0 && t >= config.burn_in_time) {
            on_sample(t, z.real(), z.imag());
        }
    }
    return clamps;
}

int resolve_threads(int threads) {
    return threads > 0 ? threads : omp_get_max_threads();
}

}  // namespace

void SdeConfig::validate() const {
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    if (n_steps < 0) throw std::invalid_argument("n_steps must be non-negative");
    if (n_trajectories < 1) throw std::invalid_argument("need at least one trajectory");
    if (record_stride < 1) throw std::invalid_argument("record_stride must be positive");
    if (burn_in_time < 0.0) throw std::invalid_argument("burn_in_time must be non-negative");
    if (n_steps > 0 && burn_in_time >= n_steps * dt) {
        throw std::invalid_argument("burn_in_time must be shorter than the run");
    }
    if (initial_positions.empty()) {
        throw std::invalid_argument("need at least one initial position");
    }
    for (Complex z0 : initial_positions) {
        if (!std::isfinite(z0.real()) || !std::isfinite(z0.imag())) {
            throw std::invalid_argument("initial positions must be finite");
        }
    }
}

Complex step_complex(const QuantumState& state, Complex z, double dt, double xi,
                     long* clamp_events) {
    Complex u = complex_drift(state, z, clamp_events);
    double dw = kInvSqrt2 * xi * std::sqrt(dt);
    return {z.real() + u.real() * dt - dw, z.imag() + u.imag() * dt + dw};
}

double bohmian_drift(const QuantumState& state, double x) {
    int n = state.n();
    if (n == 0) return -x;
    double hn = hermite(n, x);
    if (std::abs(hn) < kNodeEps) {
        throw NodeError("bohmian drift evaluated at a node of H_" + std::to_string(n));
    }
    // dS_B/dx + (1/2) d ln(R_B^2)/dx with the eigenstate phase x-independent
    return 0.5 * 2.0 * (n * hermite(n - 1, x) / hn) * 2.0 - x;
}

double nelson_drift(const QuantumState& state, double x) {
    // b+ = dS_N/dx + dR_N/dx; for an eigenstate S_N carries no x dependence,
    // so b+ is the real part of d(ln Psi)/dz on the real axis.
    return log_derivative(state, Complex(x, 0.0)).real();
}

double step_bohmian(const QuantumState& state, double x, double dt, double xi) {
    double v = bohmian_drift_clamped(state, x, nullptr);
    return x + v * dt + xi * std::sqrt(dt);
}

std::uint64_t stream_seed(std::uint64_t master_seed, long index) {
    // splitmix64 over master_seed advanced by the trajectory index
    std::uint64_t s = master_seed + (static_cast<std::uint64_t>(index) + 1) *
                                        0x9E3779B97F4A7C15ULL;
    s ^= s >> 30;
    s *= 0xBF58476D1CE4E5B9ULL;
    s ^= s >> 27;
    s *= 0x94D049BB133111EBULL;
    s ^= s >> 31;
    return s;
}

Trajectory simulate_trajectory(const SdeConfig& config, long index) {
    config.validate();
    Trajectory traj;
    traj.seed = stream_seed(config.master_seed, index);
    traj.clamp_count = walk_trajectory(config, index, [&](double t, double x, double y) {
        traj.samples.push_back({t, x, y});
    });
    return traj;
}

EnsembleRun simulate_ensemble(const SdeConfig& config, int threads) {
    config.validate();
    EnsembleRun run;
    run.config = config;
    run.trajectories.resize(static_cast<std::size_t>(config.n_trajectories));

    long aborted = 0;
    std::string first_error;
#pragma omp parallel for schedule(dynamic) num_threads(resolve_threads(threads)) \
    reduction(+ : aborted)
    for (long i = 0; i < config.n_trajectories; ++i) {
        try {
            run.trajectories[static_cast<std::size_t>(i)] = simulate_trajectory(config, i);
        } catch (const std::exception& e) {
            ++aborted;
#pragma omp critical
            if (first_error.empty()) first_error = e.what();
        }
    }
    run.aborted_count = aborted;
    for (const Trajectory& t : run.trajectories) run.total_clamp_count += t.clamp_count;
    if (aborted * 1000 > config.n_trajectories) {
        throw std::runtime_error("ensemble failed: " + std::to_string(aborted) +
                                 " trajectories aborted (first: " + first_error + ")");
    }
    return run;
}

EnsembleStats simulate_ensemble_stats(const SdeConfig& config, const HistSpec& spec_a,
                                      const HistSpec& spec_b, int threads) {
    config.validate();
    EnsembleStats stats;
    stats.spec_a = spec_a;
    stats.spec_b = spec_b;
    stats.counts_a.assign(static_cast<std::size_t>(spec_a.n_bins), 0);
    stats.counts_b.assign(static_cast<std::size_t>(spec_b.n_bins), 0);

    auto bin_into = [](const HistSpec& spec, std::vector<long>& counts, long& oor,
                       long& total, double v) {
        ++total;
        if (v < spec.lo || v >= spec.hi) {
            ++oor;
            return;
        }
        auto b = static_cast<std::size_t>((v - spec.lo) / (spec.hi - spec.lo) * spec.n_bins);
        if (b >= counts.size()) b = counts.size() - 1;
        ++counts[b];
    };

    long aborted = 0;
    std::string first_error;
    const int n_threads = resolve_threads(threads);

#pragma omp parallel num_threads(n_threads)
    {
        EnsembleStats local;
        local.counts_a.assign(stats.counts_a.size(), 0);
        local.counts_b.assign(stats.counts_b.size(), 0);

#pragma omp for schedule(dynamic) reduction(+ : aborted) nowait
        for (long i = 0; i < config.n_trajectories; ++i) {
            bool have_prev = false;
            double px = 0.0, py = 0.0;
            try {
                local.total_clamp_count +=
                    walk_trajectory(config, i, [&](double, double x, double y) {
                        bin_into(spec_b, local.counts_b, local.out_of_range_b,
                                 local.total_b, x);
                        if (y == 0.0) {
                            bin_into(spec_a, local.counts_a, local.out_of_range_a,
                                     local.total_a, x);
                        } else if (have_prev && py * y < 0.0) {
                            double xc = px + (x - px) * (-py) / (y - py);
                            bin_into(spec_a, local.counts_a, local.out_of_range_a,
                                     local.total_a, xc);
                        }
                        px = x;
                        py = y;
                        have_prev = true;
                    });
            } catch (const std::exception& e) {
                ++aborted;
#pragma omp critical
                if (first_error.empty()) first_error = e.what();
            }
        }

#pragma omp critical
        {
            for (std::size_t b = 0; b < stats.counts_a.size(); ++b)
                stats.counts_a[b] += local.counts_a[b];
            for (std::size_t b = 0; b < stats.counts_b.size(); ++b)
                stats.counts_b[b] += local.counts_b[b];
            stats.out_of_range_a += local.out_of_range_a;
            stats.out_of_range_b += local.out_of_range_b;
            stats.total_a += local.total_a;
            stats.total_b += local.total_b;
            stats.total_clamp_count += local.total_clamp_count;
        }
    }

    stats.aborted_count = aborted;
    if (aborted * 1000 > config.n_trajectories) {
        throw std::runtime_error("ensemble failed: " + std::to_string(aborted) +
                                 " trajectories aborted (first: " + first_error + ")");
    }
    return stats;
}

}  // namespace cqp
