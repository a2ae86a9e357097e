#include <cmath>
#include <random>

#include "cqp/sde.hpp"
#include "doctest.h"

using namespace cqp;

namespace {

/// Non-node abscissas for drift comparisons.
std::vector<double> non_node_points(const QuantumState& s, int count) {
    std::mt19937_64 rng(42 + static_cast<unsigned>(s.n()));
    std::uniform_real_distribution<double> coord(-4.0, 4.0);
    std::vector<double> xs;
    while (xs.size() < static_cast<std::size_t>(count)) {
        double x = coord(rng);
        if (std::abs(hermite(s.n(), x)) > 1e-3) xs.push_back(x);
    }
    return xs;
}

}  // namespace

TEST_CASE("bohmian drift fixed values") {
    QuantumState s1(1);
    CHECK(bohmian_drift(s1, 1.0) == doctest::Approx(0.0));
    CHECK(bohmian_drift(s1, 2.0) == doctest::Approx(-1.5));
    CHECK(bohmian_drift(s1, 0.5) == doctest::Approx(1.5));
    QuantumState s0(0);
    CHECK(bohmian_drift(s0, 0.7) == doctest::Approx(-0.7));
    CHECK_THROWS_AS(bohmian_drift(s1, 0.0), NodeError);
}

TEST_CASE("drift identity: bohmian = nelson = (Re - Im) of complex drift") {
    for (int n : {0, 1, 2, 3}) {
        QuantumState s(n);
        for (double x : non_node_points(s, 100)) {
            double vb = bohmian_drift(s, x);
            double bp = nelson_drift(s, x);
            Complex u = complex_drift(s, Complex(x, 0.0));
            CHECK(std::abs(vb - bp) <= 1e-12 * std::max(1.0, std::abs(vb)));
            CHECK(std::abs(vb - (u.real() - u.imag())) <= 1e-12 * std::max(1.0, std::abs(vb)));
        }
    }
}

TEST_CASE("complex step: equilibrium, drift-only, and noise anticorrelation") {
    QuantumState s1(1);
    // equilibrium point stays put without noise
    Complex z1 = step_complex(s1, Complex(1.0, 0.0), 0.01, 0.0);
    CHECK(std::abs(z1 - Complex(1.0, 0.0)) <= 1e-15);
    // drift -2 at z = i moves x only
    double dt = 0.01;
    Complex z2 = step_complex(s1, Complex(0.0, 1.0), dt, 0.0);
    CHECK(z2.real() == doctest::Approx(-2.0 * dt));
    CHECK(z2.imag() == doctest::Approx(1.0));
    // the single noise draw enters x and y with opposite signs
    for (double xi : {-1.3, 0.4, 2.2}) {
        Complex base = step_complex(s1, Complex(0.5, 0.5), dt, 0.0);
        Complex kicked = step_complex(s1, Complex(0.5, 0.5), dt, xi);
        double dx_noise = kicked.real() - base.real();
        double dy_noise = kicked.imag() - base.imag();
        CHECK(dx_noise == doctest::Approx(-xi * std::sqrt(dt / 2.0)));
        CHECK(dx_noise == doctest::Approx(-dy_noise));
    }
}

TEST_CASE("bohmian step values and Wiener scaling") {
    QuantumState s1(1);
    CHECK(step_bohmian(s1, 1.0, 0.01, 0.0) == doctest::Approx(1.0));
    CHECK(step_bohmian(s1, 0.5, 0.01, 0.0) == doctest::Approx(0.515));
    // noise-only variance ~ dt
    QuantumState s0(0);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal(0.0, 1.0);
    double dt = 0.25;
    double sum = 0.0, sum2 = 0.0;
    const int trials = 200000;
    for (int i = 0; i < trials; ++i) {
        double xi = normal(rng);
        double dx = step_bohmian(s0, 0.0, dt, xi) - 0.0;
        sum += dx;
        sum2 += dx * dx;
    }
    double var = sum2 / trials - (sum / trials) * (sum / trials);
    CHECK(var == doctest::Approx(dt).epsilon(0.02));
}

TEST_CASE("zero-noise trajectories stay on bounded orbits around the n=1 equilibria") {
    // The linearized drift at z = +-1 has purely imaginary eigenvalues, so the
    // equilibria are centers: drift-only trajectories orbit them without
    // escaping, and the equilibria themselves are fixed points.
    QuantumState s1(1);
    for (double x0 : {0.9, 1.1, -0.9, -1.1}) {
        Complex z(x0, 0.05);
        double target = x0 > 0 ? 1.0 : -1.0;
        double initial_dist = std::abs(z - Complex(target, 0.0));
        double max_dist = initial_dist;
        for (int i = 0; i < 20000; ++i) {
            z = step_complex(s1, z, 1e-4, 0.0);
            max_dist = std::max(max_dist, std::abs(z - Complex(target, 0.0)));
        }
        CHECK(max_dist < 3.0 * initial_dist);
    }
}

TEST_CASE("simulate_trajectory basics") {
    SdeConfig cfg;
    cfg.state = QuantumState(1);
    cfg.n_steps = 0;
    cfg.burn_in_time = 0.0;
    CHECK(simulate_trajectory(cfg, 0).samples.empty());

    cfg.n_steps = 500;
    cfg.burn_in_time = 0.1;
    Trajectory a = simulate_trajectory(cfg, 3);
    Trajectory b = simulate_trajectory(cfg, 3);
    REQUIRE(!a.samples.empty());
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].t == b.samples[i].t);
        CHECK(a.samples[i].x == b.samples[i].x);
        CHECK(a.samples[i].y == b.samples[i].y);
    }
    // recording starts at the burn-in time with uniform spacing
    CHECK(a.samples.front().t >= cfg.burn_in_time);
    for (std::size_t i = 1; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].t - a.samples[i - 1].t ==
              doctest::Approx(cfg.dt * cfg.record_stride));
    }
}

TEST_CASE("record stride thins the sample sequence") {
    SdeConfig cfg;
    cfg.n_steps = 100;
    cfg.burn_in_time = 0.0;
    cfg.record_stride = 10;
    Trajectory t = simulate_trajectory(cfg, 0);
    CHECK(t.samples.size() == 10);
}

TEST_CASE("trajectories stay confined for n = 1") {
    SdeConfig cfg;
    cfg.state = QuantumState(1);
    cfg.n_steps = 20000;
    cfg.burn_in_time = 0.0;
    Trajectory t = simulate_trajectory(cfg, 1);
    long outside = 0;
    for (const ComplexSample& s : t.samples) {
        if (std::hypot(s.x, s.y) > 6.0) ++outside;
    }
    CHECK(outside * 1000 < static_cast<long>(t.samples.size()));
}

TEST_CASE("config validation rejects bad inputs") {
    SdeConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SdeConfig{};
    cfg.burn_in_time = 1e9;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SdeConfig{};
    cfg.initial_positions.clear();
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("ensemble determinism across worker counts") {
    SdeConfig cfg;
    cfg.state = QuantumState(1);
    cfg.n_trajectories = 32;
    cfg.n_steps = 1000;
    cfg.burn_in_time = 0.1;
    cfg.master_seed = 99;

    EnsembleRun serial = simulate_ensemble(cfg, 1);
    EnsembleRun parallel = simulate_ensemble(cfg, 4);
    REQUIRE(serial.trajectories.size() == parallel.trajectories.size());
    for (std::size_t i = 0; i < serial.trajectories.size(); ++i) {
        const auto& sa = serial.trajectories[i].samples;
        const auto& sb = parallel.trajectories[i].samples;
        REQUIRE(sa.size() == sb.size());
        for (std::size_t j = 0; j < sa.size(); ++j) {
            CHECK(sa[j].x == sb[j].x);
            CHECK(sa[j].y == sb[j].y);
        }
    }

    HistSpec spec{-5.0, 5.0, 50};
    EnsembleStats st1 = simulate_ensemble_stats(cfg, spec, spec, 1);
    EnsembleStats st4 = simulate_ensemble_stats(cfg, spec, spec, 4);
    CHECK(st1.counts_a == st4.counts_a);
    CHECK(st1.counts_b == st4.counts_b);
    CHECK(st1.total_clamp_count == st4.total_clamp_count);
}

TEST_CASE("single-trajectory ensemble wraps simulate_trajectory") {
    SdeConfig cfg;
    cfg.n_trajectories = 1;
    cfg.n_steps = 200;
    cfg.burn_in_time = 0.0;
    EnsembleRun run = simulate_ensemble(cfg);
    REQUIRE(run.trajectories.size() == 1);
    Trajectory direct = simulate_trajectory(cfg, 0);
    REQUIRE(run.trajectories[0].samples.size() == direct.samples.size());
    for (std::size_t i = 0; i < direct.samples.size(); ++i) {
        CHECK(run.trajectories[0].samples[i].x == direct.samples[i].x);
    }
}

TEST_CASE("stream seeds differ between adjacent trajectories") {
    CHECK(stream_seed(0, 0) != stream_seed(0, 1));
    CHECK(stream_seed(0, 0) != stream_seed(1, 0));
    CHECK(stream_seed(7, 3) == stream_seed(7, 3));
}
