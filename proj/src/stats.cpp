#include "cqp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cqp {

double DensityHistogram::integral() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < densities.size(); ++i) {
        sum += densities[i] * (bin_edges[i + 1] - bin_edges[i]);
    }
    return sum;
}

std::vector<CrossingRecord> detect_crossings(const Trajectory& trajectory,
                                             long trajectory_index) {
    std::vector<CrossingRecord> crossings;
    const auto& s = trajectory.samples;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].y == 0.0) {
            crossings.push_back({s[i].x, s[i].t, trajectory_index});
        } else if (i > 0 && s[i - 1].y * s[i].y < 0.0) {
            double frac = -s[i - 1].y / (s[i].y - s[i - 1].y);
            double xc = s[i - 1].x + (s[i].x - s[i - 1].x) * frac;
            double tc = s[i - 1].t + (s[i].t - s[i - 1].t) * frac;
            crossings.push_back({xc, tc, trajectory_index});
        }
    }
    return crossings;
}

std::vector<double> project_real(const Trajectory& trajectory) {
    std::vector<double> xs;
    xs.reserve(trajectory.samples.size());
    for (const ComplexSample& s : trajectory.samples) xs.push_back(s.x);
    return xs;
}

namespace {

DensityHistogram normalize_counts(std::vector<long> counts, double lo, double hi,
                                  long out_of_range) {
    if (counts.size() < 2) throw std::invalid_argument("need at least 2 bins");
    if (!(lo < hi)) throw std::invalid_argument("histogram range must be non-empty");
    long in_range = std::accumulate(counts.begin(), counts.end(), 0L);
    if (in_range == 0) throw std::invalid_argument("no samples in histogram range");

    DensityHistogram hist;
    const auto n_bins = counts.size();
    const double width = (hi - lo) / static_cast<double>(n_bins);
    hist.bin_edges.resize(n_bins + 1);
    for (std::size_t i = 0; i <= n_bins; ++i) hist.bin_edges[i] = lo + i * width;
    hist.densities.resize(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) {
        hist.densities[i] = static_cast<double>(counts[i]) / (in_range * width);
    }
    hist.total_samples = in_range;
    hist.out_of_range = out_of_range;
    return hist;
}

}  // namespace

DensityHistogram build_histogram(const std::vector<double>& samples, int n_bins,
                                 double lo, double hi) {
    if (n_bins < 2) throw std::invalid_argument("need at least 2 bins");
    if (!(lo < hi)) throw std::invalid_argument("histogram range must be non-empty");
    std::vector<long> counts(static_cast<std::size_t>(n_bins), 0);
    long out_of_range = 0;
    for (double v : samples) {
        if (v < lo || v >= hi) {
            ++out_of_range;
            continue;
        }
        auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * n_bins);
        if (b >= counts.size()) b = counts.size() - 1;
        ++counts[b];
    }
    return normalize_counts(std::move(counts), lo, hi, out_of_range);
}

DensityHistogram histogram_from_counts(const std::vector<long>& counts, double lo,
                                       double hi, long out_of_range) {
    return normalize_counts(counts, lo, hi, out_of_range);
}

double pearson_correlation(const DensityHistogram& hist,
                           const std::function<double(double)>& reference) {
    const std::size_t n = hist.n_bins();
    if (n < 3) throw std::invalid_argument("pearson correlation needs >= 3 bins");
    std::vector<double> ref(n);
    for (std::size_t i = 0; i < n; ++i) ref[i] = reference(hist.bin_center(i));

    double mean_h = std::accumulate(hist.densities.begin(), hist.densities.end(), 0.0) / n;
    double mean_r = std::accumulate(ref.begin(), ref.end(), 0.0) / n;
    double shh = 0.0, srr = 0.0, shr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dh = hist.densities[i] - mean_h;
        double dr = ref[i] - mean_r;
        shh += dh * dh;
        srr += dr * dr;
        shr += dh * dr;
    }
    if (shh == 0.0 || srr == 0.0) {
        throw std::invalid_argument("pearson correlation undefined for constant input");
    }
    return shr / std::sqrt(shh * srr);
}

DensityHistogram marginal_y(const Field2D& field) {
    for (double v : field.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite field value");
    }
    const double dx = field.dx(), dy = field.dy();
    std::vector<double> marginal(static_cast<std::size_t>(field.nx), 0.0);
    for (int j = 0; j < field.nx; ++j) {
        double sum = 0.0;
        for (int k = 0; k < field.ny; ++k) {
            double w = (k == 0 || k == field.ny - 1) ? 0.5 : 1.0;
            sum += w * field.at(j, k);
        }
        marginal[static_cast<std::size_t>(j)] = sum * dy;
    }
    double mass = std::accumulate(marginal.begin(), marginal.end(), 0.0) * dx;
    if (mass <= 0.0) throw std::invalid_argument("field carries no mass");

    DensityHistogram hist;
    hist.bin_edges.resize(static_cast<std::size_t>(field.nx) + 1);
    for (int j = 0; j <= field.nx; ++j) {
        hist.bin_edges[static_cast<std::size_t>(j)] = field.x_min + (j - 0.5) * dx;
    }
    hist.densities.resize(static_cast<std::size_t>(field.nx));
    for (int j = 0; j < field.nx; ++j) {
        hist.densities[static_cast<std::size_t>(j)] = marginal[static_cast<std::size_t>(j)] / mass;
    }
    return hist;
}

}  // namespace cqp
