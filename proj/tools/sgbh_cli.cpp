#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgbh/config.hpp"
#include "sgbh/experiments.hpp"
#include "sgbh/io.hpp"
#include "sgbh/presets.hpp"
#include "sgbh/solver.hpp"

namespace {

// 0 ok, 1 check failure, 2 config/validation failure, 3 numerical blow-up
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBlowup = 3;

void write_manifest(const sgbh::RunConfig& cfg, const sgbh::ExperimentOutcome& outcome,
                    double wall_seconds) {
    std::filesystem::create_directories(cfg.output_dir);
    const auto path = std::filesystem::path(cfg.output_dir) / "manifest.json";
    sgbh::write_text(path.string(), sgbh::make_manifest(cfg, outcome, wall_seconds).dump(2) + "\n");
}

int cmd_run(const std::string& config_path) {
    sgbh::RunConfig cfg;
    try {
        cfg = sgbh::parse_config_file(config_path);
        sgbh::validate_config(cfg);
    } catch (const sgbh::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    try {
        sgbh::ExperimentOutcome outcome = sgbh::run_experiment(cfg);
        write_manifest(cfg, outcome, elapsed());
        if (!outcome.pass) {
            std::fprintf(stderr, "experiment '%s': check failed\n%s\n", cfg.experiment.c_str(),
                         outcome.report.dump(2).c_str());
            return kExitCheckFailure;
        }
        std::printf("experiment '%s': pass\n", cfg.experiment.c_str());
        return 0;
    } catch (const sgbh::ConfigError& e) {
        sgbh::ExperimentOutcome failed;
        failed.pass = false;
        failed.report = {{"error", e.what()}};
        write_manifest(cfg, failed, elapsed());
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitConfig;
    } catch (const sgbh::BlowupError& e) {
        sgbh::ExperimentOutcome failed;
        failed.pass = false;
        failed.report = {{"error", e.what()}, {"blowup_time", e.time}, {"capped", true}};
        write_manifest(cfg, failed, elapsed());
        std::fprintf(stderr, "numerical blow-up: %s\n", e.what());
        return kExitBlowup;
    } catch (const std::exception& e) {
        sgbh::ExperimentOutcome failed;
        failed.pass = false;
        failed.report = {{"error", e.what()}};
        write_manifest(cfg, failed, elapsed());
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCheckFailure;
    }
}

int cmd_validate(const std::string& config_path) {
    try {
        sgbh::RunConfig cfg = sgbh::parse_config_file(config_path);
        sgbh::validate_config(cfg);
        std::printf("config ok\n%s\n", sgbh::config_echo(cfg).dump(2).c_str());
        return 0;
    } catch (const sgbh::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic generalized Burgers-Huxley simulation toolkit"};
    app.require_subcommand(1);

    std::string run_config, validate_config_path;
    auto* run = app.add_subcommand("run", "execute the experiment described by a config file");
    run->add_option("config", run_config, "path to the run configuration")->required();
    auto* listp = app.add_subcommand("list-presets", "list noise and initial-condition presets");
    auto* val = app.add_subcommand("validate", "parse and validate a config file");
    val->add_option("config", validate_config_path, "path to the run configuration")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(run_config);
    if (listp->parsed()) {
        std::printf("%s", sgbh::describe_presets().c_str());
        return 0;
    }
    if (val->parsed()) return cmd_validate(validate_config_path);
    return 0;
}
