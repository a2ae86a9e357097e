#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "cqp/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInstability = 3;
constexpr int kExitStatistics = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complex-plane quantum random trajectory experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;

    CLI::App* run = app.add_subcommand("run", "Run an experiment from a JSON config");
    run->add_option("config", config_path, "Path to the experiment config")->required();
    run->add_option("--out", out_dir, "Output directory (overrides config)");
    run->add_option("--seed", seed, "Master seed (overrides config)")
        ->each([&](const std::string&) { seed_set = true; });
    run->add_option("--threads", threads, "Worker count; affects wall time only");

    CLI11_PARSE(app, argc, argv);

    try {
        cqp::ExperimentConfig cfg = cqp::ExperimentConfig::from_json_file(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed_set) cfg.sde.master_seed = seed;
        if (threads > 0) cfg.threads = threads;

        cqp::RunSummary sum = cqp::run_experiment(cfg);
        std::printf("experiment %s done in %.2fs (seed %llu)\n", sum.experiment.c_str(),
                    sum.wall_time_s, static_cast<unsigned long long>(sum.seed));
        for (const auto& [name, value] : sum.metrics) {
            std::printf("  %-28s %.6g\n", name.c_str(), value);
        }
        std::printf("artifacts in %s:\n", cfg.out_dir.c_str());
        for (const std::string& a : sum.artifacts) std::printf("  %s\n", a.c_str());
        return 0;
    } catch (const cqp::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const cqp::InstabilityError& e) {
        std::fprintf(stderr, "numerical instability: %s\n", e.what());
        return kExitInstability;
    } catch (const cqp::StatisticsError& e) {
        std::fprintf(stderr, "statistics failure: %s\n", e.what());
        return kExitStatistics;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "statistics failure: %s\n", e.what());
        return kExitStatistics;
    }
}
