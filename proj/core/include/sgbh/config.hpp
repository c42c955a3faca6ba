#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgbh/model.hpp"

namespace sgbh {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat sectioned key=value run configuration; every field has an explicit
// default echoed into the manifest.
struct RunConfig {
    // [model]
    ModelParams model{1.0, 1.0, 1.0, 0.5, 1, 0.5};
    // [noise]
    std::string noise_preset = "zero";
    double noise_sigma = 0.0;
    double noise_t_switch = 0.0;
    // [grid]
    int m = 31;
    int n_steps = 100;
    // [scheme]
    std::string scheme = "picard";  // picard | galerkin | transformed
    int n_modes = 0;                // 0 -> m
    // [picard]
    std::string lambda_mode = "auto";  // auto | fixed
    double lambda = 1.0;
    double tol = 1e-8;
    int max_iters = 50;
    double trunc_n = 10.0;
    double trunc_p = 0.0;  // 0 -> 2 delta + 1
    std::vector<double> n_schedule = {10.0, 20.0, 40.0};
    bool n_schedule_set = false;  // explicit schedule switches solve to the escalating route
    // [ic]
    std::string ic_preset = "sine";
    double ic_amplitude = 0.5;
    // [experiment]
    std::string experiment = "solve";
    std::string compare_preset = "constant";  // v0 of the comparison pair
    double compare_amplitude = 0.1;
    double compare_tol = 0.0;  // 0 -> discretization slack
    int malliavin_r_index = 0;
    int malliavin_z_index = 0;
    double malliavin_epsilon = 1e-2;
    double malliavin_a = 0.25;
    double malliavin_b = 0.75;
    std::vector<double> obs_times;
    double obs_x = 0.5;
    int conv_levels = 3;
    int conv_m0 = 15;
    int conv_n0 = 50;
    // [seeds]
    std::uint64_t seed_base = 1;
    int seed_count = 1;
    // [output]
    std::string output_dir = "out";
    bool out_csv = true;
    bool out_binary = false;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Field-level validation; throws ConfigError naming the offending field.
void validate_config(const RunConfig& cfg);

// Full explicit-echo of the resolved configuration (no hidden defaults).
nlohmann::json config_echo(const RunConfig& cfg);

}  // namespace sgbh
