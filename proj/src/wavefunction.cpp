#include "cqp/wavefunction.hpp"

#include <cmath>
#include <limits>

namespace cqp {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

double norm_const_for(int n) {
    // (2^n n! sqrt(pi))^(-1/2), computed in log space for large n
    double log_c = -0.5 * (n * std::log(2.0) + std::lgamma(n + 1.0) + std::log(kSqrtPi));
    return std::exp(log_c);
}

}  // namespace

QuantumState::QuantumState(int n) : n_(n), norm_const_(norm_const_for(n)) {
    if (n < 0) {
        throw std::invalid_argument("quantum number must be non-negative");
    }
}

Complex hermite(int n, Complex z) {
    if (n == 0) return {1.0, 0.0};
    Complex h_prev = 1.0;
    Complex h = 2.0 * z;
    for (int k = 1; k < n; ++k) {
        Complex h_next = 2.0 * z * h - 2.0 * static_cast<double>(k) * h_prev;
        h_prev = h;
        h = h_next;
    }
    return h;
}

double hermite(int n, double x) {
    if (n == 0) return 1.0;
    double h_prev = 1.0;
    double h = 2.0 * x;
    for (int k = 1; k < n; ++k) {
        double h_next = 2.0 * x * h - 2.0 * k * h_prev;
        h_prev = h;
        h = h_next;
    }
    return h;
}

Complex eigenstate(const QuantumState& state, double t, Complex z) {
    Complex z2 = z * z;
    if (-0.5 * z2.real() > 700.0) {
        throw OverflowError("exp(-z^2/2) overflows at z with |Im z| too large");
    }
    Complex envelope = std::exp(-0.5 * z2);
    Complex phase = std::exp(Complex(0.0, -(state.n() + 0.5) * t));
    return state.norm_const() * hermite(state.n(), z) * envelope * phase;
}

Complex log_derivative(const QuantumState& state, Complex z, double node_eps) {
    int n = state.n();
    if (n == 0) return -z;
    Complex hn = hermite(n, z);
    if (std::abs(hn) < node_eps) {
        throw NodeError("evaluation point within " + std::to_string(node_eps) +
                        " of a node of H_" + std::to_string(n));
    }
    Complex hm = hermite(n - 1, z);
    return 2.0 * static_cast<double>(n) * hm / hn - z;
}

Complex complex_drift(const QuantumState& state, Complex z, long* clamp_events,
                      double v_max) {
    int n = state.n();
    Complex f;
    bool clamped = false;
    if (n == 0) {
        f = -z;
    } else {
        Complex hn = hermite(n, z);
        double mag = std::abs(hn);
        if (mag < kNodeEps) {
            // floor the denominator magnitude, keeping the phase when there is one
            hn = (mag == 0.0) ? Complex(kNodeEps, 0.0) : hn * (kNodeEps / mag);
            clamped = true;
        }
        f = 2.0 * static_cast<double>(n) * hermite(n - 1, z) / hn - z;
    }
    Complex u = Complex(0.0, -1.0) * f;
    double speed = std::abs(u);
    if (speed > v_max) {
        u *= v_max / speed;
        clamped = true;
    }
    if (clamped && clamp_events != nullptr) ++(*clamp_events);
    return u;
}

double magnitude_squared_complex(const QuantumState& state, Complex z) {
    double x = z.real(), y = z.imag();
    double arg = -(x * x - y * y);
    if (arg > 1400.0) {
        throw OverflowError("|Psi|^2 overflows for large |Im z|");
    }
    Complex hn = hermite(state.n(), z);
    double c = state.norm_const();
    return c * c * std::norm(hn) * std::exp(arg);
}

double born_density(const QuantumState& state, double x) {
    return magnitude_squared_complex(state, Complex(x, 0.0));
}

double classical_density(const QuantumState& state, double x) {
    double amp = std::sqrt(2.0 * state.n() + 1.0);
    if (std::abs(x) >= amp) return 0.0;
    return 1.0 / (M_PI * std::sqrt(amp * amp - x * x));
}

Complex complex_action(const QuantumState& state, double t, Complex z) {
    Complex psi = eigenstate(state, t, z);
    if (std::abs(psi) < std::numeric_limits<double>::min()) {
        throw NodeError("complex action undefined where Psi vanishes");
    }
    return Complex(0.0, -1.0) * std::log(psi);
}

}  // namespace cqp
