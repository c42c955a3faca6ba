#include "sgbh/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sgbh/analysis.hpp"
#include "sgbh/io.hpp"
#include "sgbh/malliavin.hpp"
#include "sgbh/presets.hpp"
#include "sgbh/solver.hpp"

namespace sgbh {

namespace {

using nlohmann::json;

struct RunParts {
    TimeGrid tg;
    SpatialGrid sg;
    NoiseCoefficient g;
    TruncationLevel trunc;
    std::vector<double> u0;
};

RunParts assemble(const RunConfig& cfg) {
    RunParts parts{TimeGrid(cfg.n_steps, cfg.model.T), SpatialGrid(cfg.m),
                   make_noise_preset(cfg.noise_preset, cfg.noise_sigma, cfg.noise_t_switch),
                   TruncationLevel{cfg.trunc_n,
                                   cfg.trunc_p == 0.0 ? 2.0 * cfg.model.delta + 1.0 : cfg.trunc_p},
                   {}};
    parts.u0 = make_initial_preset(cfg.ic_preset, cfg.ic_amplitude, parts.sg);
    return parts;
}

KernelConfig kernel_config(const RunConfig& cfg) {
    KernelConfig kc;
    kc.nu = cfg.model.nu;
    return kc;
}

std::string artifact_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.output_dir);
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

void emit_field(const RunConfig& cfg, const FieldPath& field, const std::string& stem,
                ExperimentOutcome& out) {
    if (cfg.out_csv) {
        const std::string p = artifact_path(cfg, stem + ".csv");
        write_field_csv(field, p);
        out.artifacts.push_back(p);
    }
    if (cfg.out_binary) {
        const std::string p = artifact_path(cfg, stem + ".bin");
        write_field_binary(field, p);
        out.artifacts.push_back(p);
    }
}

ExperimentOutcome run_solve(const RunConfig& cfg) {
    ExperimentOutcome out;
    RunParts parts = assemble(cfg);
    NoiseSheet sheet = sample_sheet(cfg.seed_base, parts.tg, parts.sg);
    if (cfg.out_binary) {
        const std::string p = artifact_path(cfg, "sheet.bin");
        write_sheet_binary(sheet, p);
        out.artifacts.push_back(p);
    }
    if (cfg.scheme == "galerkin") {
        GalerkinConfig gc;
        gc.n_modes = cfg.n_modes == 0 ? cfg.m : cfg.n_modes;
        FieldPath u = galerkin_solve(parts.u0, sheet, cfg.model, parts.g, gc);
        emit_field(cfg, u, "solution", out);
        out.report = {{"scheme", "galerkin"}, {"sup_norm", u.sup_norm()}, {"n_modes", gc.n_modes}};
        return out;
    }
    KernelTable table(parts.tg, parts.sg, kernel_config(cfg));
    if (cfg.scheme == "transformed") {
        FieldPath u = mild_solve(parts.u0, sheet, cfg.model, parts.g, parts.trunc, table);
        FieldPath phi = stochastic_convolution(sheet, u, parts.g, table);
        FieldPath v = transformed_solve(parts.u0, phi, cfg.model, table);
        double decomp = 0.0;
        for (std::size_t k = 0; k < u.values.size(); ++k)
            decomp = std::max(decomp, std::fabs(v.values[k] + phi.values[k] - u.values[k]));
        emit_field(cfg, v, "transformed", out);
        emit_field(cfg, phi, "convolution", out);
        out.report = {{"scheme", "transformed"},
                      {"sup_norm", v.sup_norm()},
                      {"decomposition_sup_error", decomp}};
        return out;
    }
    PicardConfig pc;
    pc.lambda_mode = cfg.lambda_mode == "fixed" ? PicardConfig::LambdaMode::Fixed
                                                : PicardConfig::LambdaMode::Auto;
    pc.lambda = cfg.lambda;
    pc.tol = cfg.tol;
    pc.max_iters = cfg.max_iters;
    pc.trunc = parts.trunc;
    if (cfg.n_schedule_set) {
        // explicit schedule: assemble the global path across truncation levels
        auto [u, rec] = global_solve(parts.u0, sheet, cfg.model, parts.g, pc, cfg.n_schedule, table);
        emit_field(cfg, u, "solution", out);
        out.pass = !rec.capped;
        out.report = {{"scheme", "picard"},
                      {"sup_norm", u.sup_norm()},
                      {"levels", rec.levels},
                      {"tau_levels", rec.tau_levels},
                      {"tau", rec.tau_n},
                      {"achieved_n", rec.achieved_n},
                      {"capped", rec.capped},
                      {"lambda_used", u.meta.lambda}};
        return out;
    }
    auto [u, trace] = picard_solve(parts.u0, sheet, cfg.model, parts.g, pc, table);
    emit_field(cfg, u, "solution", out);
    out.pass = trace.converged;
    out.report = {{"scheme", "picard"},
                  {"sup_norm", u.sup_norm()},
                  {"lambda_used", trace.lambda_used},
                  {"lambda_bisect", trace.lambda_bisect},
                  {"iterations", trace.iterations},
                  {"converged", trace.converged},
                  {"residuals", trace.residuals}};
    return out;
}

ExperimentOutcome run_compare(const RunConfig& cfg) {
    ExperimentOutcome out;
    RunParts parts = assemble(cfg);
    const std::vector<double> v0 =
        make_initial_preset(cfg.compare_preset, cfg.compare_amplitude, parts.sg);
    for (int j = 0; j < parts.sg.m; ++j)
        if (parts.u0[j] > v0[j])
            throw ConfigError("comparison hypothesis u0 <= v0 fails at node " + std::to_string(j));
    KernelTable table(parts.tg, parts.sg, kernel_config(cfg));
    std::vector<std::uint64_t> seeds;
    for (int s = 0; s < cfg.seed_count; ++s) seeds.push_back(cfg.seed_base + s);
    ComparisonReport rep = comparison_check(parts.u0, v0, cfg.model, parts.g, parts.trunc, table,
                                            seeds, cfg.compare_tol);
    out.pass = rep.violation_cells == 0;
    out.report = {{"paths", rep.paths},
                  {"violation_cells", rep.violation_cells},
                  {"max_violation", rep.max_violation},
                  {"max_diff", rep.max_diff},
                  {"tol_first_path", rep.per_path_tol.empty() ? 0.0 : rep.per_path_tol.front()}};
    return out;
}

ExperimentOutcome run_energy(const RunConfig& cfg) {
    ExperimentOutcome out;
    RunParts parts = assemble(cfg);
    KernelTable table(parts.tg, parts.sg, kernel_config(cfg));
    const double p = parts.trunc.p;
    double min_margin = std::numeric_limits<double>::infinity();
    double max_decomp = 0.0;
    for (int s = 0; s < cfg.seed_count; ++s) {
        NoiseSheet sheet = sample_sheet(cfg.seed_base + s, parts.tg, parts.sg);
        FieldPath u = mild_solve(parts.u0, sheet, cfg.model, parts.g, parts.trunc, table);
        FieldPath phi = stochastic_convolution(sheet, u, parts.g, table);
        FieldPath v = transformed_solve(parts.u0, phi, cfg.model, table);
        for (std::size_t k = 0; k < u.values.size(); ++k)
            max_decomp = std::max(max_decomp, std::fabs(v.values[k] + phi.values[k] - u.values[k]));
        EnergyReport rep = energy_inequality_check(v, phi, parts.u0, cfg.model, p);
        min_margin = std::min(min_margin, rep.min_margin);
        if (s == 0)
            out.report = {{"K1", rep.K1}, {"K2", rep.K2}, {"K3", rep.K3}, {"rhs_first_path", rep.rhs}};
    }
    out.pass = min_margin > 0.0;
    out.report["min_margin"] = min_margin;
    out.report["decomposition_sup_error"] = max_decomp;
    out.report["paths"] = cfg.seed_count;
    return out;
}

ExperimentOutcome run_malliavin(const RunConfig& cfg) {
    ExperimentOutcome out;
    RunParts parts = assemble(cfg);
    KernelTable table(parts.tg, parts.sg, kernel_config(cfg));
    NoiseSheet sheet = sample_sheet(cfg.seed_base, parts.tg, parts.sg);
    FieldPath base = mild_solve(parts.u0, sheet, cfg.model, parts.g, parts.trunc, table);
    DerivativeField d = derivative_solve(base, sheet, cfg.model, parts.g, parts.trunc,
                                         cfg.malliavin_r_index, cfg.malliavin_z_index, table);
    DerivativeField fd = fd_oracle(parts.u0, sheet, cfg.model, parts.g, parts.trunc,
                                   cfg.malliavin_r_index, cfg.malliavin_z_index,
                                   cfg.malliavin_epsilon, table, true);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < d.values.size(); ++k) {
        num += (d.values[k] - fd.values[k]) * (d.values[k] - fd.values[k]);
        den += d.values[k] * d.values[k];
    }
    const double rel = den > 0.0 ? std::sqrt(num / den) : 0.0;
    if (cfg.out_csv) {
        const std::string p = artifact_path(cfg, "derivative.csv");
        write_derivative_csv(d, p);
        out.artifacts.push_back(p);
    }
    out.pass = rel < 0.05;
    out.report = {{"r_index", cfg.malliavin_r_index},
                  {"z_index", cfg.malliavin_z_index},
                  {"epsilon", cfg.malliavin_epsilon},
                  {"relative_l2_vs_oracle", rel}};
    return out;
}

std::pair<int, int> nearest_obs(const RunParts& parts, double t, double x) {
    const int i = static_cast<int>(std::lround(t / parts.tg.dt));
    int j = 0;
    double best = 2.0;
    for (int k = 0; k < parts.sg.m; ++k) {
        const double d = std::fabs(parts.sg.node(k) - x);
        if (d < best) {
            best = d;
            j = k;
        }
    }
    return {std::min(std::max(i, 0), parts.tg.n_steps), j};
}

ExperimentOutcome run_density(const RunConfig& cfg) {
    ExperimentOutcome out;
    RunParts parts = assemble(cfg);
    const double t_obs = cfg.obs_times.empty() ? cfg.model.T : cfg.obs_times.front();
    const auto [i_obs, j_obs] = nearest_obs(parts, t_obs, cfg.obs_x);
    GalerkinConfig gc;
    gc.n_modes = cfg.n_modes == 0 ? cfg.m : cfg.n_modes;
    std::vector<double> samples;
    samples.reserve(cfg.seed_count);
    for (int s = 0; s < cfg.seed_count; ++s) {
        NoiseSheet sheet = sample_sheet(cfg.seed_base + s, parts.tg, parts.sg);
        FieldPath u = galerkin_solve(parts.u0, sheet, cfg.model, parts.g, gc);
        samples.push_back(u.at(i_obs, j_obs));
    }
    DensityEstimate est = kde_density(samples);
    out.report = {{"t_obs", parts.tg.node(i_obs)},
                  {"x_obs", parts.sg.node(j_obs)},
                  {"samples", static_cast<int>(samples.size())},
                  {"atom_detected", est.atom_detected}};
    if (!est.atom_detected) {
        const double change = kde_halving_change(est);
        out.report["bandwidth"] = est.bandwidth;
        out.report["kde_integral"] = est.integral;
        out.report["bandwidth_halving_change"] = change;
        out.pass = std::fabs(est.integral - 1.0) <= 1e-6;
        if (cfg.out_csv) {
            const std::string p = artifact_path(cfg, "density.csv");
            std::ofstream f(p);
            f << "x,density\n";
            for (std::size_t k = 0; k < est.grid.size(); ++k)
                f << est.grid[k] << "," << est.density[k] << "\n";
            out.artifacts.push_back(p);
        }
    }
    return out;
}

ExperimentOutcome run_dichotomy(const RunConfig& cfg) {
    ExperimentOutcome out;
    RunParts parts = assemble(cfg);
    std::vector<double> t_obs = cfg.obs_times;
    if (t_obs.empty())
        t_obs = {0.5 * cfg.noise_t_switch, cfg.noise_t_switch + 0.5 * (cfg.model.T - cfg.noise_t_switch),
                 cfg.model.T};
    DichotomyReport rep = dichotomy_experiment(cfg.model, parts.g, cfg.noise_t_switch, parts.tg,
                                               parts.sg, parts.u0, t_obs, cfg.obs_x, cfg.seed_base,
                                               cfg.seed_count);
    json obs = json::array();
    bool pass = true;
    for (const auto& o : rep.observations) {
        const bool expect_atom = o.t_obs < rep.t_switch;
        pass = pass && (o.atom_detected == expect_atom);
        obs.push_back({{"t_obs", o.t_obs},
                       {"atom_detected", o.atom_detected},
                       {"variance", o.variance},
                       {"kde_integral", o.kde_integral},
                       {"bandwidth_halving_change", o.kde_halving_change}});
    }
    out.pass = pass;
    out.report = {{"t_switch", rep.t_switch}, {"observations", obs}};
    return out;
}

ExperimentOutcome run_convergence(const RunConfig& cfg) {
    ExperimentOutcome out;
    RunParts parts = assemble(cfg);
    ConvergenceProblem prob;
    prob.params = cfg.model;
    prob.g = parts.g;
    prob.trunc = parts.trunc;
    prob.scheme = cfg.scheme == "galerkin" ? "galerkin" : "mild";
    prob.seed = cfg.seed_base;
    const std::string ic = cfg.ic_preset;
    const double amp = cfg.ic_amplitude;
    prob.u0 = [ic, amp](double x) {
        if (ic == "zero") return 0.0;
        if (ic == "constant") return amp;
        if (ic == "sine") return amp * std::sin(3.14159265358979323846 * x);
        return 4.0 * amp * x * (1.0 - x);
    };
    ConvergenceReport rep = convergence_study(prob, cfg.conv_m0, cfg.conv_n0, cfg.conv_levels);
    auto sweep_json = [](const ConvergenceSweep& s) {
        return json{{"steps", s.steps}, {"errors", s.errors}, {"order", s.order},
                    {"monotone", s.monotone}};
    };
    out.report = {{"spatial", sweep_json(rep.spatial)}, {"temporal", sweep_json(rep.temporal)}};
    if (cfg.out_csv) {
        const std::string p = artifact_path(cfg, "convergence.csv");
        std::ofstream f(p);
        f << "sweep,step,error\n";
        for (std::size_t k = 0; k < rep.spatial.steps.size(); ++k)
            f << "spatial," << rep.spatial.steps[k] << "," << rep.spatial.errors[k] << "\n";
        for (std::size_t k = 0; k < rep.temporal.steps.size(); ++k)
            f << "temporal," << rep.temporal.steps[k] << "," << rep.temporal.errors[k] << "\n";
        out.artifacts.push_back(p);
    }
    return out;
}

}  // namespace

ExperimentOutcome run_experiment(const RunConfig& cfg) {
    if (cfg.experiment == "solve") return run_solve(cfg);
    if (cfg.experiment == "compare") return run_compare(cfg);
    if (cfg.experiment == "energy") return run_energy(cfg);
    if (cfg.experiment == "malliavin") return run_malliavin(cfg);
    if (cfg.experiment == "density") return run_density(cfg);
    if (cfg.experiment == "dichotomy") return run_dichotomy(cfg);
    if (cfg.experiment == "convergence") return run_convergence(cfg);
    throw ConfigError("field [experiment] type: unknown experiment '" + cfg.experiment + "'");
}

nlohmann::json make_manifest(const RunConfig& cfg, const ExperimentOutcome& outcome,
                             double wall_seconds) {
    nlohmann::json j;
    j["version"] = "0.1.0";
    j["config"] = config_echo(cfg);
    j["gaussian_sampler"] = "splitmix64/inverse-cdf-as241";
    j["wall_time_s"] = wall_seconds;
    j["experiment_summary"] = outcome.report;
    j["pass"] = outcome.pass;
    j["artifacts"] = outcome.artifacts;
    return j;
}

}  // namespace sgbh
