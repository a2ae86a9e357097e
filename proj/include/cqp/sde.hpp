#pragma once

#include <cstdint>
#include <vector>

#include "cqp/wavefunction.hpp"

namespace cqp {

/// One recorded trajectory point in the complex plane z = x + iy.
struct ComplexSample {
    double t;
    double x;
    double y;
};

enum class SdeKind { complex_plane, bohmian };

struct SdeConfig {
    QuantumState state{1};
    SdeKind kind = SdeKind::complex_plane;
    double dt = 1e-3;
    long n_steps = 10000;
    std::vector<Complex> initial_positions{Complex(0.95, 0.0), Complex(-0.95, 0.0)};
    long n_trajectories = 1;
    std::uint64_t master_seed = 0;
    double burn_in_time = 1.0;
    long record_stride = 1;

    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate() const;
};

struct Trajectory {
    std::vector<ComplexSample> samples;
    long clamp_count = 0;
    std::uint64_t seed = 0;
};

struct EnsembleRun {
    SdeConfig config;
    std::vector<Trajectory> trajectories;
    long total_clamp_count = 0;
    long aborted_count = 0;
};

/// One Euler-Maruyama step of the complex SDE; a single normal draw xi feeds
/// x and y with opposite signs (noise column (-1+i)/sqrt(2)).
Complex step_complex(const QuantumState& state, Complex z, double dt, double xi,
                     long* clamp_events = nullptr);

/// Bohmian drift v_B(x) in dimensionless form; (1 - x^2)/x for n = 1.
double bohmian_drift(const QuantumState& state, double x);

/// Nelson forward drift b+ = dS_N/dx + dR_N/dx; equals v_B for eigenstates.
double nelson_drift(const QuantumState& state, double x);

/// One Euler-Maruyama step of the Bohmian SDE dx = v_B dt + dw.
double step_bohmian(const QuantumState& state, double x, double dt, double xi);

/// Deterministic per-trajectory RNG stream seed from (master_seed, index).
std::uint64_t stream_seed(std::uint64_t master_seed, long index);

/// Integrates one trajectory; samples recorded every record_stride steps once
/// t >= burn_in_time. Throws std::runtime_error if the state goes non-finite.
Trajectory simulate_trajectory(const SdeConfig& config, long index);

/// Runs all trajectories, retaining samples. Fails if more than 0.1% abort.
/// threads = 0 picks the OpenMP default; threads = 1 is the serial reference.
EnsembleRun simulate_ensemble(const SdeConfig& config, int threads = 0);

/// Streaming ensemble statistics: bins point set A (real-axis crossings) and
/// point set B (all real parts) without retaining trajectories.
struct HistSpec {
    double lo = -5.0;
    double hi = 5.0;
    int n_bins = 100;
};

struct EnsembleStats {
    HistSpec spec_a, spec_b;
    std::vector<long> counts_a;  // crossings per bin
    std::vector<long> counts_b;  // projected samples per bin
    long out_of_range_a = 0;
    long out_of_range_b = 0;
    long total_a = 0;
    long total_b = 0;
    long total_clamp_count = 0;
    long aborted_count = 0;
};

EnsembleStats simulate_ensemble_stats(const SdeConfig& config, const HistSpec& spec_a,
                                      const HistSpec& spec_b, int threads = 0);

}  // namespace cqp
