#pragma once

#include <functional>
#include <vector>

#include "cqp/sde.hpp"

namespace cqp {

/// 1D binned probability density, normalized to unit integral over the
/// in-range samples.
struct DensityHistogram {
    std::vector<double> bin_edges;  // size n_bins + 1, uniform
    std::vector<double> densities;  // size n_bins
    long total_samples = 0;         // in-range samples
    long out_of_range = 0;

    std::size_t n_bins() const { return densities.size(); }
    double bin_center(std::size_t i) const {
        return 0.5 * (bin_edges[i] + bin_edges[i + 1]);
    }
    double bin_width() const { return bin_edges[1] - bin_edges[0]; }
    /// sum(density_i * width_i); 1 after normalization
    double integral() const;
};

struct CrossingRecord {
    double x;
    double t;
    long trajectory_index;
};

/// 2D grid-sampled density on a uniform grid, row-major in x.
struct Field2D {
    double x_min, x_max, y_min, y_max;
    int nx, ny;
    std::vector<double> values;  // nx * ny

    double dx() const { return (x_max - x_min) / (nx - 1); }
    double dy() const { return (y_max - y_min) / (ny - 1); }
    double x(int j) const { return x_min + j * dx(); }
    double y(int k) const { return y_min + k * dy(); }
    double& at(int j, int k) { return values[static_cast<std::size_t>(j) * ny + k]; }
    double at(int j, int k) const { return values[static_cast<std::size_t>(j) * ny + k]; }
};

/// Point set A: real-axis crossings of one trajectory, abscissas by linear
/// interpolation between samples that straddle y = 0.
std::vector<CrossingRecord> detect_crossings(const Trajectory& trajectory,
                                             long trajectory_index = 0);

/// Point set B: every recorded real part.
std::vector<double> project_real(const Trajectory& trajectory);

/// Uniform-bin histogram normalized to unit integral over in-range samples.
/// Throws std::invalid_argument when no sample lands in range.
DensityHistogram build_histogram(const std::vector<double>& samples, int n_bins,
                                 double lo, double hi);

/// Histogram from pre-accumulated bin counts (streaming ensembles).
DensityHistogram histogram_from_counts(const std::vector<long>& counts, double lo,
                                       double hi, long out_of_range = 0);

/// Pearson coefficient between bin densities and reference(bin center).
/// Throws std::invalid_argument when either vector has zero variance.
double pearson_correlation(const DensityHistogram& hist,
                           const std::function<double(double)>& reference);

/// Trapezoidal y-integration of a 2D field at each x column, renormalized to
/// unit integral over x.
DensityHistogram marginal_y(const Field2D& field);

}  // namespace cqp
