#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sgbh/grid.hpp"
#include "sgbh/kernel.hpp"
#include "sgbh/model.hpp"
#include "sgbh/noise.hpp"

namespace sgbh {

// Raised when a path leaves the representable range (NaN/Inf) at a time node.
struct BlowupError : std::runtime_error {
    int time_index;
    double time;
    BlowupError(int i, double t)
        : std::runtime_error("solution blew up at t = " + std::to_string(t)), time_index(i), time(t) {}
};

struct FieldMeta {
    std::string scheme = "none";
    std::uint64_t seed = 0;
    double trunc_n = 0.0;
    double trunc_p = 0.0;
    double lambda = 0.0;
};

// One realization u(t_i, x_j) on TimeGrid x SpatialGrid, row-major in time.
struct FieldPath {
    TimeGrid tg;
    SpatialGrid sg;
    std::vector<double> values;  // (N+1) x m, [i * m + j]
    std::vector<double> u0;
    FieldMeta meta;

    FieldPath() = default;
    FieldPath(const TimeGrid& t, const SpatialGrid& s)
        : tg(t), sg(s), values(static_cast<std::size_t>(t.n_steps + 1) * s.m, 0.0) {}

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * sg.m + j]; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * sg.m + j]; }
    const double* slice(int i) const { return values.data() + static_cast<std::size_t>(i) * sg.m; }
    std::vector<double> slice_vec(int i) const {
        return {slice(i), slice(i) + sg.m};
    }
    double sup_norm() const;
    // first time index whose L^p norm reaches level, or -1
    int first_exit(double level, double p) const;
};

struct PicardConfig {
    enum class LambdaMode { Auto, Fixed };
    LambdaMode lambda_mode = LambdaMode::Auto;
    double lambda = 1.0;  // used when Fixed
    double tol = 1e-8;
    int max_iters = 50;
    TruncationLevel trunc;
};

struct PicardTrace {
    std::vector<double> residuals;  // weighted-norm residual per sweep
    double lambda_used = 0.0;
    double lambda_bisect = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct GalerkinConfig {
    int n_modes = 1;
    // true: exact exponential factor e^{-nu k^2 pi^2 dt} on the linear part;
    // false: rational implicit-Euler factor 1/(1 + nu k^2 pi^2 dt).
    // Nonlinearity and noise stay explicit either way.
    bool semi_implicit = true;
};

struct StoppingRecord {
    std::vector<double> levels;      // truncation schedule actually visited
    std::vector<double> tau_levels;  // tau^n per visited level
    double tau_n = 0.0;              // tau at the final level
    double achieved_n = 0.0;
    bool capped = false;
};

// lambda of the exponentially weighted residual norm. The bisection solves
// the contraction bracket of Gamma terms <= 1/2 at truncation level n; the
// value used is clamped to [4/T, 20/T] so the discrete residual norm keeps
// the whole horizon visible (the raw bisection value is recorded alongside).
struct LambdaChoice {
    double bisect = 0.0;
    double used = 0.0;
};
LambdaChoice choose_lambda(const ModelParams& params, const NoiseCoefficient& g,
                           const TruncationLevel& trunc);

// (dt sum_i e^{-lambda t_i} ||a_i - b_i||_{L^p}^p)^{1/p}
double weighted_time_norm(const FieldPath& a, const FieldPath& b, double p, double lambda);

// One application of the truncated mild map: kernel-smoothed initial datum
// + beta A1 + alpha/(delta+1) A2 + A3, with pi_n applied to every time slice
// before the nonlinearities.
FieldPath apply_A(const FieldPath& u, const NoiseSheet& sheet, const ModelParams& params,
                  const NoiseCoefficient& g, const TruncationLevel& trunc,
                  const KernelTable& table);

// Fixed-point iteration of apply_A from the kernel-smoothed initial datum.
std::pair<FieldPath, PicardTrace> picard_solve(const std::vector<double>& u0,
                                               const NoiseSheet& sheet, const ModelParams& params,
                                               const NoiseCoefficient& g, const PicardConfig& cfg,
                                               const KernelTable& table);

// Direct forward substitution. The discrete mild map is strictly lower
// triangular in time (every kernel sits at a positive lag), so this produces
// the exact fixed point of apply_A in a single pass.
FieldPath mild_solve(const std::vector<double>& u0, const NoiseSheet& sheet,
                     const ModelParams& params, const NoiseCoefficient& g,
                     const TruncationLevel& trunc, const KernelTable& table);

// Escalates the truncation level along n_schedule until the path stays inside
// the ball up to T; capped results carry the diagnostics instead of throwing.
std::pair<FieldPath, StoppingRecord> global_solve(const std::vector<double>& u0,
                                                  const NoiseSheet& sheet,
                                                  const ModelParams& params,
                                                  const NoiseCoefficient& g,
                                                  const PicardConfig& base_cfg,
                                                  const std::vector<double>& n_schedule,
                                                  const KernelTable& table);

// Spectral Galerkin on the sine eigenbasis, exact exponential integration of
// the stiff linear part, explicit nonlinearity and noise.
FieldPath galerkin_solve(const std::vector<double>& u0, const NoiseSheet& sheet,
                         const ModelParams& params, const NoiseCoefficient& g,
                         const GalerkinConfig& cfg);

// phi(t_i, x_j) = sum_{k<i} sum_l G(t_i - t_k, x_j, y_l) g(t_k, y_l, u(t_k,y_l)) dW[k][l]
FieldPath stochastic_convolution(const NoiseSheet& sheet, const FieldPath& base,
                                 const NoiseCoefficient& g, const KernelTable& table);

struct TransformedOptions {
    bool use_picard = false;  // forward substitution is the exact fixed point
    double tol = 1e-10;
    int max_iters = 200;
};

// Deterministic integral equation for v with nonlinearities evaluated at
// v + phi (no noise term); u = v + phi reconstructs the mild solution.
FieldPath transformed_solve(const std::vector<double>& u0, const FieldPath& phi,
                            const ModelParams& params, const KernelTable& table,
                            const TransformedOptions& opts = {});

}  // namespace sgbh
