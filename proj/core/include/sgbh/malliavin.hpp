#pragma once

#include <stdexcept>
#include <vector>

#include "sgbh/kernel.hpp"
#include "sgbh/model.hpp"
#include "sgbh/noise.hpp"
#include "sgbh/solver.hpp"

namespace sgbh {

// The base path left the localization ball before T; derivative runs on such
// paths are rejected rather than silently re-truncated.
struct LocalizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// D_{r,z} u(t_i, x_j) for one source cell (r, z); identically zero for t_i <= r.
struct DerivativeField {
    int r_index = 0;
    int z_index = 0;
    double epsilon = 0.0;  // nonzero when produced by the finite-difference oracle
    TimeGrid tg;
    SpatialGrid sg;
    std::vector<double> values;  // (N+1) x m, row-major in time

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * sg.m + j]; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * sg.m + j]; }
};

// v(s, x) = int_{a'}^{b'} D_{r,z} u(s, x) dz, one linear solve with the
// z-integrated source layer.
struct IntegratedDerivative {
    int r_index = 0;
    double a = 0.0, b = 0.0;  // requested interval
    int z_lo = 0, z_hi = 0;   // cell range actually used
    TimeGrid tg;
    SpatialGrid sg;
    std::vector<double> values;

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * sg.m + j]; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * sg.m + j]; }
};

// Linearized mild equation along the frozen base path: source layer
// G(t-r, x, z) g(r, z, pi_n u(r,z)), drift coefficients
// beta [(1+gamma)(delta+1)(pi_n u)^delta - gamma - (2 delta+1)(pi_n u)^{2 delta}]
// and alpha (pi_n u)^delta, noise coefficient M_n = dg/dr along the path.
DerivativeField derivative_solve(const FieldPath& base, const NoiseSheet& sheet,
                                 const ModelParams& params, const NoiseCoefficient& g,
                                 const TruncationLevel& trunc, int r_index, int z_index,
                                 const KernelTable& table);

// Directional-derivative oracle: re-solves the SPDE on a bumped sheet and
// returns (u_eps - u)/(eps dt h), the derivative per unit of Cameron-Martin
// density on the bumped cell. central = true uses (u_eps - u_{-eps})/(2 eps dt h).
DerivativeField fd_oracle(const std::vector<double>& u0, const NoiseSheet& sheet,
                          const ModelParams& params, const NoiseCoefficient& g,
                          const TruncationLevel& trunc, int r_index, int z_index, double epsilon,
                          const KernelTable& table, bool central = false);

IntegratedDerivative integrated_derivative(const FieldPath& base, const NoiseSheet& sheet,
                                           const ModelParams& params, const NoiseCoefficient& g,
                                           const TruncationLevel& trunc, int r_index,
                                           double a_prime, double b_prime,
                                           const KernelTable& table);

struct PositivityStats {
    double fraction = 0.0;
    double min_value = 0.0;
    double median_value = 0.0;
    long count = 0;
};

// Fraction of grid points with s in (s_lo, s_hi] and v > threshold.
PositivityStats positivity_fraction(const IntegratedDerivative& v, double s_lo, double s_hi,
                                    double threshold);

}  // namespace sgbh
