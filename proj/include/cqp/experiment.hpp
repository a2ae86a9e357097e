#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cqp/fokker_planck.hpp"
#include "cqp/sde.hpp"
#include "cqp/stats.hpp"

namespace cqp {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when an ensemble or comparison fails statistically (exit code 4).
struct StatisticsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string experiment;  // bohmian_hist | pointset_a | pointset_b | fp1d |
                             // fp2d | duffing | psi_magnitude
    SdeConfig sde;
    FpProblem fp;
    HistSpec hist_a{-5.0, 5.0, 100};
    HistSpec hist_b{-5.0, 5.0, 100};
    std::string out_dir = ".";
    int threads = 0;  // 0 = library default; affects wall time only

    // psi_magnitude grid
    double psi_extent = 3.0;
    int psi_points = 121;

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json() const;
};

struct RunSummary {
    std::string experiment;
    std::map<std::string, double> metrics;
    std::vector<std::pair<double, double>> mass_trace;
    std::vector<std::string> artifacts;  // file names relative to out_dir
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;  // reported on stdout, not in summary.json
    std::string config_echo;   // full JSON config the run used
};

/// Executes the named experiment, writes CSV artifacts plus summary.json into
/// out_dir, and returns the summary. No files are written until the whole run
/// has succeeded.
RunSummary run_experiment(const ExperimentConfig& config);

/// Formats a double with 12 significant digits (CSV convention).
std::string format_csv(double v);

}  // namespace cqp
