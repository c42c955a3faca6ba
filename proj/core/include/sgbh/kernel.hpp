#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sgbh/grid.hpp"

namespace sgbh {

// Dirichlet heat kernel on [0,1]. The unit-diffusivity kernel G(s,x,y) is
// evaluated either as the method-of-images sum (short lags) or the sine
// eigenexpansion (long lags); diffusivity enters through the substitution
// G_nu(tau, x, y) = G(nu * tau, x, y) unless unit_diffusivity_time is set,
// which reproduces the unit-time reading of the mild formulation.
struct KernelConfig {
    double nu = 1.0;
    int image_pairs = 20;      // M in the image sum
    int spectral_terms = 400;  // Kmax in the eigenexpansion
    double crossover = 0.05;   // t* in diffusive time s; image below, spectral above
    bool unit_diffusivity_time = false;

    double diffusive_time(double tau) const { return unit_diffusivity_time ? tau : nu * tau; }
};

// (4 pi nu tau)^{-1/2} sum_{n=-M..M} [exp(-(y-x-2n)^2/(4 nu tau)) - exp(-(y+x-2n)^2/(4 nu tau))]
double green_image(double tau, double x, double y, double nu, int image_pairs);

// sum_{k=1..Kmax} 2 exp(-nu k^2 pi^2 tau) sin(k pi x) sin(k pi y)
double green_spectral(double tau, double x, double y, double nu, int spectral_terms);

// Representation dispatch at the crossover, adaptive term counts.
double green_eval(double tau, double x, double y, const KernelConfig& cfg);

// dG/dy, term-wise differentiated in the active representation.
double green_dy(double tau, double x, double y, const KernelConfig& cfg);

// dG/dtau and d^2G/dy dtau; used only by the empirical bound report.
double green_dt(double tau, double x, double y, const KernelConfig& cfg);
double green_dydt(double tau, double x, double y, const KernelConfig& cfg);

// Exact integral of G(tau, x, .) over [y_lo, y_hi] (erf differences in the
// image range, cosine differences in the spectral range).
double green_cell_integral(double tau, double x, double y_lo, double y_hi,
                           const KernelConfig& cfg);

// Empirical constants for the pointwise kernel bounds (A1)-(A6); diagnostic
// only, never consumed by the solvers.
struct BoundMeasurement {
    std::string name;      // "A1".."A6"
    double ell;            // exponential width used in the compliance weight
    double vartheta;       // Holder exponent where applicable, else 0
    double empirical_K;    // sup over the sample grid of the weighted kernel
};

struct BoundReport {
    std::vector<BoundMeasurement> entries;
    const BoundMeasurement& operator[](const std::string& name) const;
};

// Samples (s, x, y, z) with s the unit-diffusivity lag; n_space interior points per axis.
BoundReport measure_kernel_bounds(const KernelConfig& cfg, const std::vector<double>& lags,
                                  int n_space);

// Precomputed kernel data at the time-grid lag resolution.
//
// Spec-facing pointwise entries (values, dvalues) live at integer lags d*dt.
// The solver-facing arrays hold exact cell integrals:
//   cell_int[d]: int_{cell l} G(d*dt, x_j, y) dy            (initial datum, Walsh-free uses)
//   cell_mid[d]: int_{cell l} G((d-1/2)*dt, x_j, y) dy      (drift convolutions)
//   flux_mid[d]: G((d-1/2)dt, x_j, edge_{l+1}) - G(..., edge_l)  = int_cell dG/dy dy
//   point_int[d]: G(d*dt, x_j, y_l) pointwise               (Walsh weights, Malliavin source)
// Each lag block is column-major over (j = x index, l = y index).
class KernelTable {
  public:
    KernelTable(const TimeGrid& tg, const SpatialGrid& sg, const KernelConfig& cfg);

    const TimeGrid& time_grid() const { return tg_; }
    const SpatialGrid& spatial_grid() const { return sg_; }
    const KernelConfig& config() const { return cfg_; }

    // d = 1..N
    const double* values(int d) const { return block(values_, d); }
    const double* dvalues(int d) const { return block(dvalues_, d); }
    const double* cell_int(int d) const { return block(cell_int_, d); }
    const double* cell_mid(int d) const { return block(cell_mid_, d); }
    const double* flux_mid(int d) const { return block(flux_mid_, d); }
    const double* point_int(int d) const { return block(values_, d); }

    // Product-integration time weight for lag index d: exact integral of the
    // (t-s)^{-1/2} envelope over the cell, times sqrt of the midpoint lag.
    double drift_weight(int d) const { return drift_w_[d - 1]; }

    // CSV dump: lag, x, y, G, dG/dy (pointwise entries).
    void dump_csv(const std::string& path) const;

    std::optional<BoundReport> bounds;  // measured (A1)-(A6) slots

  private:
    const double* block(const std::vector<double>& a, int d) const {
        const std::size_t mm = static_cast<std::size_t>(sg_.m) * sg_.m;
        return a.data() + (static_cast<std::size_t>(d) - 1) * mm;
    }

    TimeGrid tg_;
    SpatialGrid sg_;
    KernelConfig cfg_;
    std::vector<double> values_, dvalues_, cell_int_, cell_mid_, flux_mid_;
    std::vector<double> drift_w_;
};

}  // namespace sgbh
