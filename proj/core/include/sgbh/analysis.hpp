#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sgbh/kernel.hpp"
#include "sgbh/model.hpp"
#include "sgbh/noise.hpp"
#include "sgbh/solver.hpp"

namespace sgbh {

// Closed-form constants of the pathwise energy estimate, exactly as printed.
std::array<double, 3> energy_constants(double p, int delta, double alpha, double beta,
                                       double gamma, double nu);

struct EnergyReport {
    double K1 = 0.0, K2 = 0.0, K3 = 0.0;
    double p = 0.0;
    double rhs = 0.0;
    std::vector<double> lhs;     // accumulated left side at every time node
    std::vector<double> margin;  // rhs - lhs
    double min_margin = 0.0;
};

// Discrete analogue of the energy inequality for the transformed path v with
// forcing phi: ||v(t)||_p^p plus the accumulated dissipation and reaction
// integrals against the constant right side.
EnergyReport energy_inequality_check(const FieldPath& v, const FieldPath& phi,
                                     const std::vector<double>& u0, const ModelParams& params,
                                     double p);

struct ComparisonReport {
    int paths = 0;
    long violation_cells = 0;
    double max_violation = 0.0;  // largest excess of u - v beyond tol, 0 when ordered
    double max_diff = 0.0;       // largest raw u - v (diagnostic)
    std::vector<double> per_path_tol;
};

// Coupled-noise ordering check: both initial conditions are solved on the
// identical sheet per seed. tol <= 0 selects the discretization slack
// 10 (h^2 + sqrt(dt)) max(||u||_sup, ||v||_sup) per path.
ComparisonReport comparison_check(const std::vector<double>& u0, const std::vector<double>& v0,
                                  const ModelParams& params, const NoiseCoefficient& g,
                                  const TruncationLevel& trunc, const KernelTable& table,
                                  const std::vector<std::uint64_t>& seeds, double tol);

struct DensityEstimate {
    std::vector<double> samples;
    double bandwidth = 0.0;
    bool atom_detected = false;
    std::vector<double> grid;
    std::vector<double> density;
    double integral = 0.0;  // trapezoid integral over the evaluation grid

    double value_at(double x) const;  // linear interpolation on the grid
};

// Gaussian kernel density estimate, Silverman bandwidth 1.06 sigma n^{-1/5}
// unless overridden. Degenerate samples set atom_detected and skip the curve.
DensityEstimate kde_density(const std::vector<double>& samples, double bandwidth = 0.0);

// Sup-change of the estimate when the bandwidth halves, relative to the sup
// of the original curve; the declared proxy for absolute continuity.
double kde_halving_change(const DensityEstimate& est);

struct DichotomyObservation {
    double t_obs = 0.0;
    bool atom_detected = false;
    double variance = 0.0;
    double kde_integral = 0.0;
    double kde_halving_change = 0.0;
};

struct DichotomyReport {
    double t_switch = 0.0;
    std::vector<DichotomyObservation> observations;
};

// Switch-at-time noise: the law of u(t_obs, x_obs) is a point mass before the
// switch and spreads after it. Paths are propagated with the Galerkin scheme.
DichotomyReport dichotomy_experiment(const ModelParams& params, const NoiseCoefficient& g,
                                     double t_switch, const TimeGrid& tg, const SpatialGrid& sg,
                                     const std::vector<double>& u0,
                                     const std::vector<double>& t_obs, double x_obs,
                                     std::uint64_t base_seed, int n_seeds);

// h^2 sum_{j != k} |f_j - f_k|^p / |x_j - x_k|^{2+eps}
double fractional_seminorm(const std::vector<double>& f, double h, double eps, double p);

struct ConvergenceProblem {
    ModelParams params;
    NoiseCoefficient g;
    std::function<double(double)> u0;
    std::string scheme = "mild";  // "mild" or "galerkin"
    TruncationLevel trunc;
    std::uint64_t seed = 1;
};

struct ConvergenceSweep {
    std::vector<double> steps;   // h or dt per level, coarse to fine (reference excluded)
    std::vector<double> errors;  // sup error against the finest level
    double order = 0.0;          // least-squares slope in log-log
    bool monotone = true;
};

struct ConvergenceReport {
    ConvergenceSweep spatial;
    ConvergenceSweep temporal;
};

// Self-convergence against the finest level under coupled noise. Spatial
// sweep: m in the dyadic family (m+1 doubling) at fixed N; temporal sweep:
// N doubling at fixed m. levels >= 3 including the reference.
ConvergenceReport convergence_study(const ConvergenceProblem& prob, int m_coarsest,
                                    int n_coarsest, int levels);

}  // namespace sgbh
