#include "cqp/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cqp {

namespace {

constexpr double kClipReportEps = 1e-12;
constexpr double kClipSevereEps = 1e-8;

/// d(log_derivative)/dz, finite everywhere the drift is (clamped alongside it).
Complex log_derivative_slope(const QuantumState& state, Complex z) {
    int n = state.n();
    if (n == 0) return {-1.0, 0.0};
    Complex hn = hermite(n, z);
    double mag = std::abs(hn);
    if (mag < kNodeEps) hn = (mag == 0.0) ? Complex(kNodeEps, 0.0) : hn * (kNodeEps / mag);
    Complex hm1 = hermite(n - 1, z);
    Complex hm2 = (n >= 2) ? hermite(n - 2, z) : Complex(0.0, 0.0);
    Complex num = 2.0 * (n - 1.0) * hm2 * hn - 2.0 * n * hm1 * hm1;
    return 2.0 * static_cast<double>(n) * num / (hn * hn) - 1.0;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

void enforce_dirichlet_2d(Field2D& f) {
    for (int k = 0; k < f.ny; ++k) {
        f.at(0, k) = 0.0;
        f.at(f.nx - 1, k) = 0.0;
    }
    for (int j = 0; j < f.nx; ++j) {
        f.at(j, 0) = 0.0;
        f.at(j, f.ny - 1) = 0.0;
    }
}

void normalize_to_unit_mass(Field2D& f) {
    double m = field_mass(f);
    if (m <= 0.0) throw std::invalid_argument("cannot normalize a massless field");
    for (double& v : f.values) v /= m;
}

}  // namespace

Field1D make_offset_grid_1d(double lo, double hi, int n) {
    if (n < 4) throw std::invalid_argument("grid too small");
    double h = (hi - lo) / n;
    Field1D g;
    g.x_min = lo + 0.5 * h;
    g.x_max = hi - 0.5 * h;
    g.n = n;
    g.values.assign(static_cast<std::size_t>(n), 0.0);
    return g;
}

Field2D make_offset_grid_2d(double x_lo, double x_hi, int nx, double y_lo,
                            double y_hi, int ny) {
    if (nx < 4 || ny < 4) throw std::invalid_argument("grid too small");
    double hx = (x_hi - x_lo) / nx;
    double hy = (y_hi - y_lo) / ny;
    Field2D g;
    g.x_min = x_lo + 0.5 * hx;
    g.x_max = x_hi - 0.5 * hx;
    g.y_min = y_lo + 0.5 * hy;
    g.y_max = y_hi - 0.5 * hy;
    g.nx = nx;
    g.ny = ny;
    g.values.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    return g;
}

Field2D make_grid_2d(double x_lo, double x_hi, int nx, double y_lo, double y_hi,
                     int ny) {
    if (nx < 4 || ny < 4) throw std::invalid_argument("grid too small");
    Field2D g;
    g.x_min = x_lo;
    g.x_max = x_hi;
    g.y_min = y_lo;
    g.y_max = y_hi;
    g.nx = nx;
    g.ny = ny;
    g.values.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    return g;
}

Stencil1D make_bohmian_stencil(const QuantumState& state, const Field1D& grid) {
    Stencil1D s;
    s.a.resize(static_cast<std::size_t>(grid.n));
    s.b.resize(static_cast<std::size_t>(grid.n));
    s.d = 0.5;
    // The drift diverges like 1/x at the wavefunction node, which would make an
    // explicit scheme unstable there. Clamp the drift speed at the cell-Peclet
    // bound 2d/dx (so both advection neighbor weights stay non-negative) and use
    // the derivative of the *clamped* field as the reaction coefficient: the
    // stencil is then the expansion of one consistent conservative operator and
    // stays positivity-preserving. The clamp only binds where |v_B| ~ 1/x is
    // large, a cell or two around the node where the density itself is ~x^2.
    const double dx = grid.dx();
    const double b_cap = std::min(kDriftClamp, 2.0 * s.d / dx);
    const double a_cap = std::min(kDriftClamp, s.d / (dx * dx));
    for (int j = 0; j < grid.n; ++j) {
        double x = grid.x(j);
        // v_B = Re(log_derivative) on the axis; complex_drift = -i * logderiv
        // => Im(complex_drift) = -Re(logderiv) = -v_B
        double v = complex_drift(state, Complex(x, 0.0)).imag() * -1.0;
        double a, b;
        if (std::abs(v) > b_cap) {
            b = -std::copysign(b_cap, v);
            a = 0.0;  // the clamped drift is locally constant
        } else {
            b = -v;
            // v_B' = Re(d logderiv / dz) on the axis
            double vp = log_derivative_slope(state, Complex(x, 0.0)).real();
            a = -vp;
            if (std::abs(a) > a_cap) a = std::copysign(a_cap, a);
        }
        s.a[static_cast<std::size_t>(j)] = a;
        s.b[static_cast<std::size_t>(j)] = b;
    }
    return s;
}

Stencil2D make_complex_plane_stencil(const QuantumState& state, const Field2D& grid) {
    Stencil2D s;
    const auto size = static_cast<std::size_t>(grid.nx) * grid.ny;
    s.a.resize(size);
    s.b.resize(size);
    s.c.resize(size);
    // diffusion (D^2/2)(rho_xx - 2 rho_xy + rho_yy), D^2 = 1/2
    s.dxx = 0.25;
    s.dxy = -0.5;
    s.dyy = 0.25;
    // Near nodes the divergence term grows like 1/r^2 and would outrun the
    // scheme's diffusive damping, so cap it at half the diagonal damping. The
    // drift itself (~1/r) stays within the advective CFL bound on these grids
    // and is left at its analytic value apart from the global magnitude clamp.
    const double dx = grid.dx(), dy = grid.dy();
    const double damping = 2.0 * s.dxx / (dx * dx) + 2.0 * s.dyy / (dy * dy);
    const double a_cap = std::min(kDriftClamp, 0.5 * damping);
    for (int j = 0; j < grid.nx; ++j) {
        for (int k = 0; k < grid.ny; ++k) {
            Complex z(grid.x(j), grid.y(k));
            Complex u = complex_drift(state, z);
            // div(v_R, v_I) = 2 Im(f') for the analytic drift u = -i f
            double div = 2.0 * log_derivative_slope(state, z).imag();
            auto i = static_cast<std::size_t>(j) * grid.ny + k;
            double a = -div;
            if (std::abs(a) > a_cap) a = std::copysign(a_cap, a);
            s.a[i] = a;
            s.b[i] = -u.real();
            s.c[i] = -u.imag();
        }
    }
    return s;
}

Stencil2D make_duffing_stencil(const DuffingParams& p, const Field2D& grid) {
    Stencil2D s;
    const auto size = static_cast<std::size_t>(grid.nx) * grid.ny;
    s.a.resize(size);
    s.b.resize(size);
    s.c.resize(size);
    s.dxx = 0.0;
    s.dxy = 0.0;
    s.dyy = 0.5 * p.sigma * p.sigma;
    for (int j = 0; j < grid.nx; ++j) {
        double X = grid.x(j);
        for (int k = 0; k < grid.ny; ++k) {
            double Y = grid.y(k);
            auto i = static_cast<std::size_t>(j) * grid.ny + k;
            s.a[i] = 2.0 * p.alpha;
            s.b[i] = -Y;
            s.c[i] = 2.0 * p.alpha * Y + p.beta * X + p.gamma * X * X * X;
        }
    }
    return s;
}

void check_stability(const Stencil1D& s, double dx, double dt) {
    if (s.d > 0.0 && dt > 0.2 * dx * dx / s.d) {
        throw std::invalid_argument("CFL violation: dt too large for diffusion on dx=" +
                                    std::to_string(dx));
    }
    double bmax = max_abs(s.b);
    if (bmax > 0.0 && dt > 0.2 * dx / bmax) {
        throw std::invalid_argument("CFL violation: dt too large for drift max " +
                                    std::to_string(bmax));
    }
    double amax = max_abs(s.a);
    if (amax * dt > 0.5) {
        throw std::invalid_argument("dt too large for reaction max " +
                                    std::to_string(amax));
    }
}

void check_stability(const Stencil2D& s, double dx, double dy, double dt) {
    double h = std::min(dx, dy);
    double dmax = std::max({s.dxx, s.dyy, std::abs(s.dxy)});
    if (dmax > 0.0 && dt > 0.2 * h * h / dmax) {
        throw std::invalid_argument("CFL violation: dt too large for diffusion on h=" +
                                    std::to_string(h));
    }
    double vmax = std::max(max_abs(s.b), max_abs(s.c));
    if (vmax > 0.0 && dt > 0.2 * h / vmax) {
        throw std::invalid_argument("CFL violation: dt too large for drift max " +
                                    std::to_string(vmax));
    }
    double amax = max_abs(s.a);
    if (amax * dt > 0.5) {
        throw std::invalid_argument("dt too large for reaction max " +
                                    std::to_string(amax));
    }
}

Field1D apply_step(const Field1D& rho, const Stencil1D& s, double dt,
                   long* clip_count, bool parallel, long* severe_count) {
    Field1D next = rho;
    const double dx = rho.dx();
    const double inv_2dx = 1.0 / (2.0 * dx);
    const double inv_dx2 = 1.0 / (dx * dx);
    const double* r = rho.values.data();
    double* out = next.values.data();
    long clips = 0, severe = 0;

#pragma omp parallel for if (parallel) reduction(+ : clips, severe) schedule(static)
    for (int j = 1; j < rho.n - 1; ++j) {
        double adv = s.b[static_cast<std::size_t>(j)] * (r[j + 1] - r[j - 1]) * inv_2dx;
        double diff = s.d * (r[j + 1] - 2.0 * r[j] + r[j - 1]) * inv_dx2;
        double v = r[j] + dt * (s.a[static_cast<std::size_t>(j)] * r[j] + adv + diff);
        if (v < 0.0) {
            if (v < -kClipReportEps) ++clips;
            if (v < -kClipSevereEps) ++severe;
            v = 0.0;
        }
        out[j] = v;
    }
    out[0] = 0.0;
    out[rho.n - 1] = 0.0;
    if (clip_count != nullptr) *clip_count += clips;
    if (severe_count != nullptr) *severe_count += severe;
    return next;
}

Field2D apply_step(const Field2D& rho, const Stencil2D& s, double dt,
                   long* clip_count, bool parallel, long* severe_count) {
    Field2D next = rho;
    const double dx = rho.dx();
    const double dy = rho.dy();
    const double inv_2dx = 1.0 / (2.0 * dx);
    const double inv_2dy = 1.0 / (2.0 * dy);
    const double inv_dx2 = 1.0 / (dx * dx);
    const double inv_dy2 = 1.0 / (dy * dy);
    const double inv_4dxdy = 1.0 / (4.0 * dx * dy);
    const int ny = rho.ny;
    const double* r = rho.values.data();
    double* out = next.values.data();
    long clips = 0, severe = 0;

#pragma omp parallel for if (parallel) reduction(+ : clips, severe) schedule(static)
    for (int j = 1; j < rho.nx - 1; ++j) {
        for (int k = 1; k < ny - 1; ++k) {
            const auto i = static_cast<std::size_t>(j) * ny + k;
            double rx = (r[i + ny] - r[i - ny]) * inv_2dx;
            double ry = (r[i + 1] - r[i - 1]) * inv_2dy;
            double rxx = (r[i + ny] - 2.0 * r[i] + r[i - ny]) * inv_dx2;
            double ryy = (r[i + 1] - 2.0 * r[i] + r[i - 1]) * inv_dy2;
            double rxy = (r[i + ny + 1] - r[i + ny - 1] - r[i - ny + 1] + r[i - ny - 1]) *
                         inv_4dxdy;
            double v = r[i] + dt * (s.a[i] * r[i] + s.b[i] * rx + s.c[i] * ry +
                                    s.dxx * rxx + s.dxy * rxy + s.dyy * ryy);
            if (v < 0.0) {
                if (v < -kClipReportEps) ++clips;
                if (v < -kClipSevereEps) ++severe;
                v = 0.0;
            }
            out[i] = v;
        }
    }
    enforce_dirichlet_2d(next);
    if (clip_count != nullptr) *clip_count += clips;
    if (severe_count != nullptr) *severe_count += severe;
    return next;
}

Field1D fp_step_1d(const Field1D& rho, const QuantumState& state, double dt) {
    return apply_step(rho, make_bohmian_stencil(state, rho), dt);
}

Field2D fp_step_2d(const Field2D& rho, const QuantumState& state, double dt) {
    return apply_step(rho, make_complex_plane_stencil(state, rho), dt);
}

Field2D duffing_step(const Field2D& rho, const DuffingParams& params, double dt) {
    return apply_step(rho, make_duffing_stencil(params, rho), dt);
}

double duffing_exact(const DuffingParams& p, double X, double Y) {
    double arg = Y * Y + p.beta * X * X + 0.5 * p.gamma * X * X * X * X;
    return std::exp(-2.0 * p.alpha / (p.sigma * p.sigma) * arg);
}

Field2D duffing_exact_field(const DuffingParams& p, const Field2D& grid) {
    Field2D f = grid;
    for (int j = 0; j < f.nx; ++j) {
        for (int k = 0; k < f.ny; ++k) {
            f.at(j, k) = duffing_exact(p, f.x(j), f.y(k));
        }
    }
    normalize_to_unit_mass(f);
    return f;
}

Field2D gaussian_initial(double mu1, double mu2, double theta1, double theta2,
                         const Field2D& grid) {
    if (theta1 <= 0.0 || theta2 <= 0.0) {
        throw std::invalid_argument("gaussian widths must be positive");
    }
    Field2D f = grid;
    for (int j = 0; j < f.nx; ++j) {
        double ex = (f.x(j) - mu1) / (2.0 * theta1);
        for (int k = 0; k < f.ny; ++k) {
            double ey = (f.y(k) - mu2) / (2.0 * theta2);
            f.at(j, k) = std::exp(-ex * ex - ey * ey);
        }
    }
    normalize_to_unit_mass(f);
    return f;
}

double field_mass(const Field2D& rho) {
    double sum = 0.0;
    for (int j = 0; j < rho.nx; ++j) {
        double wj = (j == 0 || j == rho.nx - 1) ? 0.5 : 1.0;
        for (int k = 0; k < rho.ny; ++k) {
            double wk = (k == 0 || k == rho.ny - 1) ? 0.5 : 1.0;
            sum += wj * wk * rho.at(j, k);
        }
    }
    return sum * rho.dx() * rho.dy();
}

double field_mass(const Field1D& rho) {
    double sum = 0.0;
    for (int j = 0; j < rho.n; ++j) {
        double w = (j == 0 || j == rho.n - 1) ? 0.5 : 1.0;
        sum += w * rho.values[static_cast<std::size_t>(j)];
    }
    return sum * rho.dx();
}

void FpProblem::validate() const {
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    if (t_final < 0.0) throw std::invalid_argument("t_final must be non-negative");
    if (nx < 4 || (kind != FpKind::bohmian_1d && ny < 4)) {
        throw std::invalid_argument("grid too small");
    }
    if (!(x_min < x_max) || !(y_min < y_max)) {
        throw std::invalid_argument("empty grid extent");
    }
}

namespace {

/// Shared time loop. FieldT is Field1D or Field2D.
template <typename FieldT, typename StencilT, typename ResultT>
void run_solver(const FpProblem& problem, FieldT rho, const StencilT& stencil,
                ResultT& result, bool parallel, bool record_snapshots) {
    const double initial_max = max_abs(rho.values);
    const long n_cells = static_cast<long>(rho.values.size());
    const long total_steps = static_cast<long>(std::llround(problem.t_final / problem.dt));
    const long snap_every =
        problem.snapshot_interval > 0.0
            ? std::max(1L, static_cast<long>(std::llround(problem.snapshot_interval / problem.dt)))
            : total_steps + 1;
    const long check_every = std::max(1L, std::min(snap_every, 1000L));

    result.mass_trace.emplace_back(0.0, field_mass(rho));
    if constexpr (std::is_same_v<ResultT, FpResult2D>) {
        if (record_snapshots) result.snapshots.emplace_back(0.0, rho);
    }

    std::vector<double> prev_check = rho.values;
    long prev_check_step = 0;

    long step = 0;
    for (; step < total_steps; ++step) {
        long severe_before = result.severe_clip_count;
        rho = apply_step(rho, stencil, problem.dt, &result.clip_count, parallel,
                         &result.severe_clip_count);
        long step_severe = result.severe_clip_count - severe_before;
        if (static_cast<double>(step_severe) > problem.max_clip_fraction * n_cells) {
            throw InstabilityError("under-resolved: " + std::to_string(step_severe) +
                                   " cells clipped in one step at t=" +
                                   std::to_string((step + 1) * problem.dt));
        }
        double t = (step + 1) * problem.dt;
        if (max_abs(rho.values) > 10.0 * initial_max) {
            throw InstabilityError("explicit scheme diverging at t=" + std::to_string(t) +
                                   "; reduce dt below the CFL bound");
        }
        if ((step + 1) % snap_every == 0 || step + 1 == total_steps) {
            result.mass_trace.emplace_back(t, field_mass(rho));
            if constexpr (std::is_same_v<ResultT, FpResult2D>) {
                if (record_snapshots) result.snapshots.emplace_back(t, rho);
            }
        }
        if ((step + 1) % check_every == 0) {
            double elapsed = (step + 1 - prev_check_step) * problem.dt;
            double resid = 0.0;
            for (std::size_t i = 0; i < rho.values.size(); ++i) {
                resid = std::max(resid, std::abs(rho.values[i] - prev_check[i]));
            }
            if (problem.stationarity_tol > 0.0 && resid / elapsed < problem.stationarity_tol) {
                result.stationary = true;
                ++step;
                break;
            }
            prev_check = rho.values;
            prev_check_step = step + 1;
        }
    }
    result.t_end = step * problem.dt;
    double final_mass = result.mass_trace.back().second;
    for (const auto& [t, m] : result.mass_trace) {
        (void)t;
        if (m < 0.95 || m > 1.05) result.mass_flagged = true;
    }
    if (final_mass < 0.95 || final_mass > 1.05) result.mass_flagged = true;
    if (result.stationary || step == total_steps) {
        if (result.mass_trace.back().first != result.t_end) {
            result.mass_trace.emplace_back(result.t_end, field_mass(rho));
        }
    }
    result.density = std::move(rho);
}

}  // namespace

FpResult1D solve_fp_1d(const FpProblem& problem, bool parallel) {
    problem.validate();
    if (problem.kind != FpKind::bohmian_1d) {
        throw std::invalid_argument("solve_fp_1d requires the bohmian_1d kind");
    }
    Field1D rho = make_offset_grid_1d(problem.x_min, problem.x_max, problem.nx);
    for (int j = 0; j < rho.n; ++j) {
        rho.values[static_cast<std::size_t>(j)] = born_density(problem.state, rho.x(j));
    }
    rho.values[0] = 0.0;
    rho.values[static_cast<std::size_t>(rho.n - 1)] = 0.0;

    Stencil1D stencil = make_bohmian_stencil(problem.state, rho);
    check_stability(stencil, rho.dx(), problem.dt);

    FpResult1D result;
    run_solver(problem, std::move(rho), stencil, result, parallel, false);
    return result;
}

FpResult2D solve_fp_2d(const FpProblem& problem, bool parallel) {
    problem.validate();
    Field2D rho;
    Stencil2D stencil;
    if (problem.kind == FpKind::complex_2d) {
        rho = make_offset_grid_2d(problem.x_min, problem.x_max, problem.nx,
                                  problem.y_min, problem.y_max, problem.ny);
        for (int j = 0; j < rho.nx; ++j) {
            for (int k = 0; k < rho.ny; ++k) {
                double r = std::hypot(rho.x(j), rho.y(k));
                rho.at(j, k) = born_density(problem.state, r);
            }
        }
        enforce_dirichlet_2d(rho);
        normalize_to_unit_mass(rho);
        stencil = make_complex_plane_stencil(problem.state, rho);
    } else if (problem.kind == FpKind::duffing) {
        rho = make_grid_2d(problem.x_min, problem.x_max, problem.nx, problem.y_min,
                           problem.y_max, problem.ny);
        rho = gaussian_initial(problem.gauss_mu1, problem.gauss_mu2,
                               problem.gauss_theta1, problem.gauss_theta2, rho);
        enforce_dirichlet_2d(rho);
        stencil = make_duffing_stencil(problem.duffing, rho);
    } else {
        throw std::invalid_argument("solve_fp_2d requires a 2D problem kind");
    }
    check_stability(stencil, rho.dx(), rho.dy(), problem.dt);

    FpResult2D result;
    run_solver(problem, std::move(rho), stencil, result, parallel,
               problem.record_snapshots);
    return result;
}

}  // namespace cqp
