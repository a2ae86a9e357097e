#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace cqp {

using Complex = std::complex<double>;

/// Thrown when an evaluation point is too close to a node of the state.
struct NodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when exp(-z^2/2) leaves the representable range (large |Im z|).
struct OverflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// |H_n(z)| below this counts as a node.
inline constexpr double kNodeEps = 1e-12;
// Magnitude clamp applied to the drift velocity near nodes.
inline constexpr double kDriftClamp = 1e3;

/// Harmonic-oscillator eigenstate in dimensionless units (hbar = m = omega = 1).
class QuantumState {
  public:
    explicit QuantumState(int n);

    int n() const { return n_; }
    /// C_n = (2^n n! sqrt(pi))^(-1/2)
    double norm_const() const { return norm_const_; }

  private:
    int n_;
    double norm_const_;
};

/// Hermite polynomial H_n(z) by the upward three-term recurrence.
Complex hermite(int n, Complex z);
double hermite(int n, double x);

/// Psi_n(t, z) = C_n H_n(z) exp(-z^2/2) exp(-i(n+1/2)t)
Complex eigenstate(const QuantumState& state, double t, Complex z);

/// d(ln Psi_n)/dz = 2n H_{n-1}(z)/H_n(z) - z; the time phase drops out.
/// Throws NodeError when |H_n(z)| < node_eps.
Complex log_derivative(const QuantumState& state, Complex z,
                       double node_eps = kNodeEps);

/// Guidance drift u*(z) = -i d(ln Psi_n)/dz, magnitude-clamped to v_max.
/// Near a node the denominator magnitude is floored so the step always
/// proceeds; *clamp_events is incremented when either guard fires.
Complex complex_drift(const QuantumState& state, Complex z,
                      long* clamp_events = nullptr,
                      double v_max = kDriftClamp);

/// Born density [C_n H_n(x)]^2 exp(-x^2); shares the |Psi|^2 code path.
double born_density(const QuantumState& state, double x);

/// |Psi_n(t, z)|^2, t-independent; grows without bound along the imaginary axis.
double magnitude_squared_complex(const QuantumState& state, Complex z);

/// Classical oscillator position density 1/(pi sqrt(A^2 - x^2)), A = sqrt(2n+1);
/// zero outside the classically allowed region.
double classical_density(const QuantumState& state, double x);

/// Complex action S = -i ln Psi (principal branch).
Complex complex_action(const QuantumState& state, double t, Complex z);

}  // namespace cqp
