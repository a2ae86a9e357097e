#pragma once

#include <utility>
#include <vector>

#include "cqp/stats.hpp"
#include "cqp/wavefunction.hpp"

namespace cqp {

/// Thrown when the explicit scheme blows up or a run is under-resolved.
struct InstabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Field1D {
    double x_min, x_max;
    int n;
    std::vector<double> values;

    double dx() const { return (x_max - x_min) / (n - 1); }
    double x(int j) const { return x_min + j * dx(); }
};

struct DuffingParams {
    double alpha = 0.25;
    double beta = -1.0;
    double gamma = 0.2;
    double sigma = 1.0;
};

/// Cell-offset grid: n cells of width (hi-lo)/n centred inside [lo, hi], so
/// no sample point lands on the drift singularity at the origin.
Field1D make_offset_grid_1d(double lo, double hi, int n);
Field2D make_offset_grid_2d(double x_lo, double x_hi, int nx, double y_lo,
                            double y_hi, int ny);
/// Plain inclusive grid (endpoints on [lo, hi]); used by the Duffing problem.
Field2D make_grid_2d(double x_lo, double x_hi, int nx, double y_lo, double y_hi,
                     int ny);

/// Precomputed explicit-step coefficients for
///   d(rho)/dt = a rho + b rho_x + c rho_y
///             + dxx rho_xx + dxy rho_xy + dyy rho_yy
struct Stencil2D {
    std::vector<double> a, b, c;  // nx * ny, same layout as Field2D::values
    double dxx = 0.0, dxy = 0.0, dyy = 0.0;
};

struct Stencil1D {
    std::vector<double> a, b;  // size n
    double d = 0.0;            // rho_xx coefficient
};

/// Bohmian 1D operator: a = (1+x^2)/x^2, b = (x^2-1)/x, d = 1/2 for n = 1;
/// general n uses a = -v_B'(x), b = -v_B(x). Coefficients clamped near nodes.
Stencil1D make_bohmian_stencil(const QuantumState& state, const Field1D& grid);

/// Complex-plane operator from the guidance drift u*(z): a = -div(v), b = -v_R,
/// c = -v_I, diffusion (D^2/2)(rho_xx - 2 rho_xy + rho_yy) with D^2 = 1/2.
Stencil2D make_complex_plane_stencil(const QuantumState& state, const Field2D& grid);

/// Duffing operator: a = 2 alpha, b = -Y, c = 2 alpha Y + beta X + gamma X^3,
/// diffusion sigma^2/2 in Y only.
Stencil2D make_duffing_stencil(const DuffingParams& params, const Field2D& grid);

/// Rejects dt violating dt <= 0.2 h^2 / max_diffusion or 0.2 h / max|drift|.
void check_stability(const Stencil1D& s, double dx, double dt);
void check_stability(const Stencil2D& s, double dx, double dy, double dt);

/// One explicit Euler step, central differences, Dirichlet-zero edges.
/// Negative undershoot is clipped to zero; clips beyond -1e-12 are counted in
/// clip_count, those beyond -1e-8 (the ones that signal a resolution problem
/// rather than roundoff at a density zero) additionally in severe_count.
Field1D apply_step(const Field1D& rho, const Stencil1D& s, double dt,
                   long* clip_count = nullptr, bool parallel = true,
                   long* severe_count = nullptr);
Field2D apply_step(const Field2D& rho, const Stencil2D& s, double dt,
                   long* clip_count = nullptr, bool parallel = true,
                   long* severe_count = nullptr);

/// Spec'd single-step entry points (stencil rebuilt per call).
Field1D fp_step_1d(const Field1D& rho, const QuantumState& state, double dt);
Field2D fp_step_2d(const Field2D& rho, const QuantumState& state, double dt);
Field2D duffing_step(const Field2D& rho, const DuffingParams& params, double dt);

/// Unnormalized stationary Duffing density C exp{-(2a/s^2)(Y^2 + bX^2 + (g/2)X^4)}
/// with C = 1; normalize over a grid with duffing_exact_field.
double duffing_exact(const DuffingParams& params, double X, double Y);
Field2D duffing_exact_field(const DuffingParams& params, const Field2D& grid);

/// Gaussian initial condition, renormalized to unit grid mass.
Field2D gaussian_initial(double mu1, double mu2, double theta1, double theta2,
                         const Field2D& grid);

/// Trapezoid-rule mass.
double field_mass(const Field2D& rho);
double field_mass(const Field1D& rho);

enum class FpKind { bohmian_1d, complex_2d, duffing };

struct FpProblem {
    FpKind kind = FpKind::complex_2d;
    QuantumState state{1};
    DuffingParams duffing;
    double x_min = -5.0, x_max = 5.0;
    double y_min = -5.0, y_max = 5.0;
    int nx = 200, ny = 200;
    double dt = 1e-4;
    double t_final = 5.0;
    // Gaussian initial condition (duffing kind only)
    double gauss_mu1 = -2.0, gauss_mu2 = -1.8;
    double gauss_theta1 = 0.1, gauss_theta2 = 0.1;
    double snapshot_interval = 1.0;
    bool record_snapshots = false;
    /// Stop early when max-norm change per unit time drops below this; 0 runs
    /// to t_final unconditionally.
    double stationarity_tol = 1e-6;
    double max_clip_fraction = 1e-3;

    void validate() const;
};

struct FpResult1D {
    Field1D density;
    std::vector<std::pair<double, double>> mass_trace;  // (t, mass)
    long clip_count = 0;
    long severe_clip_count = 0;
    double t_end = 0.0;
    bool stationary = false;
    bool mass_flagged = false;  // mass left [0.95, 1.05]
};

struct FpResult2D {
    Field2D density;
    std::vector<std::pair<double, Field2D>> snapshots;
    std::vector<std::pair<double, double>> mass_trace;
    long clip_count = 0;
    long severe_clip_count = 0;
    double t_end = 0.0;
    bool stationary = false;
    bool mass_flagged = false;
};

/// Steps the configured problem from its default initial condition:
/// bohmian_1d starts at the Born density, complex_2d at the radial profile
/// born_density(n, |z|), duffing at the configured Gaussian.
FpResult1D solve_fp_1d(const FpProblem& problem, bool parallel = true);
FpResult2D solve_fp_2d(const FpProblem& problem, bool parallel = true);

}  // namespace cqp
