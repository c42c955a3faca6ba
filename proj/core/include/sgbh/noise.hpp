#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgbh/grid.hpp"

namespace sgbh {

// Double-precision inverse of the standard normal CDF (Wichura's AS 241,
// PPND16 path). Deterministic across platforms, which is what makes the
// counter-based sheets below bit-reproducible.
double inverse_normal_cdf(double p);

// splitmix64-style avalanche used to key cells.
std::uint64_t mix64(std::uint64_t x);

// Discrete Brownian sheet: independent Normal(0, dt*h) increments over the
// cells [t_i, t_{i+1}) x [y_j - h/2, y_j + h/2], keyed by (seed, i, j) so any
// cell is reproducible independently of iteration order.
struct NoiseSheet {
    std::uint64_t seed = 0;
    TimeGrid tg;
    SpatialGrid sg;
    std::vector<double> dW;  // row-major [i * m + j], i = 0..N-1, j = 0..m-1
    std::string sampler = "splitmix64/inverse-cdf-as241";

    double operator()(int i, int j) const { return dW[static_cast<std::size_t>(i) * sg.m + j]; }
    double& at(int i, int j) { return dW[static_cast<std::size_t>(i) * sg.m + j]; }
    std::size_t cell_count() const { return dW.size(); }
};

NoiseSheet sample_sheet(std::uint64_t seed, const TimeGrid& tg, const SpatialGrid& sg);

// sum_{i,j} w[i][j] dW[i][j]; w uses the same row-major layout as the sheet.
double walsh_integral(const std::vector<double>& weights, const NoiseSheet& sheet);

// Mode-projected Wiener paths W^k(t_i) = sum_{cells before t_i} sqrt(2) sin(k pi y_j) dW,
// cumulative in i with W^k(0) = 0.
struct ProjectedWiener {
    int n_modes = 0;
    TimeGrid tg;
    std::vector<double> paths;  // [k * (N+1) + i]
    double value(int k, int i) const { return paths[static_cast<std::size_t>(k) * (tg.n_steps + 1) + i]; }
};

ProjectedWiener project_modes(const NoiseSheet& sheet, int n_modes);

// Cameron-Martin shift of density epsilon on a single cell: dW[r][z] += eps*dt*h.
NoiseSheet bump_sheet(const NoiseSheet& sheet, int r_index, int z_index, double epsilon);

// Refinement coupling. A fine sheet on (N, m) with N even / m odd determines
// the coarse sheet on (N/2, (m-1)/2): coarse increments are sums of 2 time
// cells (2i, 2i+1) and 2 space cells (2j, 2j+1). dt and h both halve exactly
// in this dyadic family, so the summed variance is exactly dt_c * h_c.
NoiseSheet coarsen_time(const NoiseSheet& sheet);
NoiseSheet coarsen_space(const NoiseSheet& sheet);
NoiseSheet coarsen2(const NoiseSheet& sheet);

}  // namespace sgbh
