#include "sgbh/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sgbh {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTailCut = 45.0;  // exp(-45) ~ 3e-20, below double roundoff here

void require_positive_lag(double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("heat kernel: lag must be > 0");
}

// Number of image pairs needed so dropped terms are below the tail cut:
// |y -+ x - 2n| >= 2|n| - 1, so the exponent exceeds kTailCut once
// (2|n| - 1)^2 > 4 s kTailCut.
int adaptive_pairs(double s) {
    const int n = static_cast<int>(std::ceil(0.5 * (1.0 + std::sqrt(4.0 * s * kTailCut)))) + 1;
    return std::max(n, 2);
}

// Modes with k^2 pi^2 s > kTailCut contribute below roundoff.
int adaptive_modes(double s, int cap) {
    const int k = static_cast<int>(std::ceil(std::sqrt(kTailCut / (kPi * kPi * s)))) + 1;
    return std::min(cap, std::max(k, 2));
}

double image_sum(double s, double x, double y, int pairs) {
    const double inv4s = 1.0 / (4.0 * s);
    double tot = 0.0;
    for (int n = -pairs; n <= pairs; ++n) {
        const double a = y - x - 2.0 * n;
        const double b = y + x - 2.0 * n;
        tot += std::exp(-a * a * inv4s) - std::exp(-b * b * inv4s);
    }
    return tot / std::sqrt(4.0 * kPi * s);
}

double spectral_sum(double s, double x, double y, int modes) {
    double tot = 0.0;
    for (int k = modes; k >= 1; --k) {
        const double lam = k * kPi;
        tot += 2.0 * std::exp(-lam * lam * s) * std::sin(lam * x) * std::sin(lam * y);
    }
    return tot;
}

double unit_green(double s, double x, double y, const KernelConfig& cfg) {
    if (s < cfg.crossover) return image_sum(s, x, y, std::min(cfg.image_pairs, adaptive_pairs(s)));
    return spectral_sum(s, x, y, adaptive_modes(s, cfg.spectral_terms));
}

double unit_green_dy(double s, double x, double y, const KernelConfig& cfg) {
    if (s < cfg.crossover) {
        const int pairs = std::min(cfg.image_pairs, adaptive_pairs(s));
        const double inv4s = 1.0 / (4.0 * s);
        double tot = 0.0;
        for (int n = -pairs; n <= pairs; ++n) {
            const double a = y - x - 2.0 * n;
            const double b = y + x - 2.0 * n;
            tot += -a / (2.0 * s) * std::exp(-a * a * inv4s) + b / (2.0 * s) * std::exp(-b * b * inv4s);
        }
        return tot / std::sqrt(4.0 * kPi * s);
    }
    const int modes = adaptive_modes(s, cfg.spectral_terms);
    double tot = 0.0;
    for (int k = modes; k >= 1; --k) {
        const double lam = k * kPi;
        tot += 2.0 * lam * std::exp(-lam * lam * s) * std::sin(lam * x) * std::cos(lam * y);
    }
    return tot;
}

double unit_green_ds(double s, double x, double y, const KernelConfig& cfg) {
    if (s < cfg.crossover) {
        const int pairs = std::min(cfg.image_pairs, adaptive_pairs(s));
        const double inv4s = 1.0 / (4.0 * s);
        double tot = 0.0;
        for (int n = -pairs; n <= pairs; ++n) {
            const double a = y - x - 2.0 * n;
            const double b = y + x - 2.0 * n;
            const double fa = std::exp(-a * a * inv4s);
            const double fb = std::exp(-b * b * inv4s);
            tot += fa * (a * a * inv4s / s - 0.5 / s) - fb * (b * b * inv4s / s - 0.5 / s);
        }
        return tot / std::sqrt(4.0 * kPi * s);
    }
    const int modes = adaptive_modes(s, cfg.spectral_terms);
    double tot = 0.0;
    for (int k = modes; k >= 1; --k) {
        const double lam = k * kPi;
        tot += -2.0 * lam * lam * std::exp(-lam * lam * s) * std::sin(lam * x) * std::sin(lam * y);
    }
    return tot;
}

double unit_green_dyds(double s, double x, double y, const KernelConfig& cfg) {
    if (s < cfg.crossover) {
        const int pairs = std::min(cfg.image_pairs, adaptive_pairs(s));
        const double inv4s = 1.0 / (4.0 * s);
        double tot = 0.0;
        for (int n = -pairs; n <= pairs; ++n) {
            const double a = y - x - 2.0 * n;
            const double b = y + x - 2.0 * n;
            const double fa = std::exp(-a * a * inv4s);
            const double fb = std::exp(-b * b * inv4s);
            // d/ds of the full prefactored terms -+ (4 pi s)^{-1/2} z/(2s) exp(-z^2/4s)
            tot += fa * (0.75 * a / (s * s) - a * a * a / (8.0 * s * s * s));
            tot -= fb * (0.75 * b / (s * s) - b * b * b / (8.0 * s * s * s));
        }
        return tot / std::sqrt(4.0 * kPi * s);
    }
    const int modes = adaptive_modes(s, cfg.spectral_terms);
    double tot = 0.0;
    for (int k = modes; k >= 1; --k) {
        const double lam = k * kPi;
        tot += -2.0 * lam * lam * lam * std::exp(-lam * lam * s) * std::sin(lam * x) * std::cos(lam * y);
    }
    return tot;
}

// int_{y_lo}^{y_hi} G(s, x, y) dy, exact per representation.
double unit_green_cell(double s, double x, double y_lo, double y_hi, const KernelConfig& cfg) {
    if (s < cfg.crossover) {
        const int pairs = std::min(cfg.image_pairs, adaptive_pairs(s) + 1);
        const double a = 2.0 * std::sqrt(s);
        double tot = 0.0;
        for (int n = -pairs; n <= pairs; ++n) {
            const double c1 = x + 2.0 * n;
            const double c2 = -x + 2.0 * n;
            tot += std::erf((y_hi - c1) / a) - std::erf((y_lo - c1) / a);
            tot -= std::erf((y_hi - c2) / a) - std::erf((y_lo - c2) / a);
        }
        return 0.5 * tot;
    }
    const int modes = adaptive_modes(s, cfg.spectral_terms);
    double tot = 0.0;
    for (int k = modes; k >= 1; --k) {
        const double lam = k * kPi;
        tot += (2.0 / lam) * std::exp(-lam * lam * s) * std::sin(lam * x) *
               (std::cos(lam * y_lo) - std::cos(lam * y_hi));
    }
    return tot;
}

}  // namespace

double green_image(double tau, double x, double y, double nu, int image_pairs) {
    require_positive_lag(tau);
    if (image_pairs < 1) throw std::invalid_argument("green_image: need image_pairs >= 1");
    return image_sum(nu * tau, x, y, image_pairs);
}

double green_spectral(double tau, double x, double y, double nu, int spectral_terms) {
    require_positive_lag(tau);
    if (spectral_terms < 1) throw std::invalid_argument("green_spectral: need spectral_terms >= 1");
    return spectral_sum(nu * tau, x, y, spectral_terms);
}

double green_eval(double tau, double x, double y, const KernelConfig& cfg) {
    require_positive_lag(tau);
    return unit_green(cfg.diffusive_time(tau), x, y, cfg);
}

double green_dy(double tau, double x, double y, const KernelConfig& cfg) {
    require_positive_lag(tau);
    return unit_green_dy(cfg.diffusive_time(tau), x, y, cfg);
}

double green_dt(double tau, double x, double y, const KernelConfig& cfg) {
    require_positive_lag(tau);
    const double scale = cfg.unit_diffusivity_time ? 1.0 : cfg.nu;
    return scale * unit_green_ds(cfg.diffusive_time(tau), x, y, cfg);
}

double green_dydt(double tau, double x, double y, const KernelConfig& cfg) {
    require_positive_lag(tau);
    const double scale = cfg.unit_diffusivity_time ? 1.0 : cfg.nu;
    return scale * unit_green_dyds(cfg.diffusive_time(tau), x, y, cfg);
}

double green_cell_integral(double tau, double x, double y_lo, double y_hi,
                           const KernelConfig& cfg) {
    require_positive_lag(tau);
    return unit_green_cell(cfg.diffusive_time(tau), x, y_lo, y_hi, cfg);
}

const BoundMeasurement& BoundReport::operator[](const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return e;
    throw std::out_of_range("BoundReport: no entry " + name);
}

BoundReport measure_kernel_bounds(const KernelConfig& cfg, const std::vector<double>& lags,
                                  int n_space) {
    if (n_space < 3) throw std::invalid_argument("measure_kernel_bounds: need n_space >= 3");
    const double ell = 8.0;
    const double vartheta = 1.0;
    std::vector<double> xs(n_space);
    for (int j = 0; j < n_space; ++j) xs[j] = (j + 1) / static_cast<double>(n_space + 1);

    double k1 = 0, k2 = 0, k3 = 0, k4 = 0, k5 = 0, k6 = 0;
    KernelConfig unit = cfg;
    unit.nu = 1.0;
    unit.unit_diffusivity_time = true;
    for (double s : lags) {
        if (!(s > 0.0)) continue;
        for (double x : xs) {
            for (double y : xs) {
                const double d2 = (x - y) * (x - y);
                const double arg = d2 / (ell * s);
                // for ell > 4 the weighted product decays in d^2/s; once the
                // weight alone would overflow the product is far below the sup
                if (arg > 600.0) continue;
                const double w = std::exp(arg);
                k1 = std::max(k1, std::fabs(green_eval(s, x, y, unit)) * std::sqrt(s) * w);
                k2 = std::max(k2, std::fabs(green_dy(s, x, y, unit)) * s * w);
                k3 = std::max(k3, std::fabs(green_dt(s, x, y, unit)) * std::pow(s, 1.5) * w);
                k4 = std::max(k4, std::fabs(green_dydt(s, x, y, unit)) * s * s * w);
            }
        }
        // Holder-in-x compliance over triples (x, y, z)
        for (double x : xs) {
            for (double y : xs) {
                if (x == y) continue;
                for (double z : xs) {
                    // both difference bounds measured against the symmetric
                    // weight max{exp(-|x-z|^2/(l s)), exp(-|y-z|^2/(l s))};
                    // the asymmetric variant diverges for y near z
                    const double e5 = std::min((x - z) * (x - z), (y - z) * (y - z)) / (ell * s);
                    if (e5 > 600.0) continue;
                    const double g5 = std::exp(-e5);
                    const double g6 = g5;
                    const double dx = std::pow(std::fabs(x - y), vartheta);
                    k5 = std::max(k5, std::fabs(green_eval(s, x, z, unit) - green_eval(s, y, z, unit)) *
                                          std::pow(s, 0.5 * vartheta + 0.5) / (dx * g5));
                    k6 = std::max(k6, std::fabs(green_dy(s, x, z, unit) - green_dy(s, y, z, unit)) *
                                          std::pow(s, 1.0 + 0.5 * vartheta) / (dx * g6));
                }
            }
        }
    }
    BoundReport report;
    report.entries = {{"A1", ell, 0.0, k1}, {"A2", ell, 0.0, k2}, {"A3", ell, 0.0, k3},
                      {"A4", ell, 0.0, k4}, {"A5", ell, vartheta, k5}, {"A6", ell, vartheta, k6}};
    return report;
}

KernelTable::KernelTable(const TimeGrid& tg, const SpatialGrid& sg, const KernelConfig& cfg)
    : tg_(tg), sg_(sg), cfg_(cfg) {
    const int n = tg.n_steps;
    const int m = sg.m;
    const std::size_t mm = static_cast<std::size_t>(m) * m;
    values_.resize(n * mm);
    dvalues_.resize(n * mm);
    cell_int_.resize(n * mm);
    cell_mid_.resize(n * mm);
    flux_mid_.resize(n * mm);
    drift_w_.resize(n);

    const double dt = tg.dt;
    const double h = sg.h;
    std::vector<double> edge_vals(m + 1), edge_cum(m + 1);

    for (int d = 1; d <= n; ++d) {
        const double tau_int = d * dt;
        const double tau_mid = (d - 0.5) * dt;
        drift_w_[d - 1] = 2.0 * (std::sqrt(d * dt) - std::sqrt((d - 1) * dt)) * std::sqrt(tau_mid);
        double* v = values_.data() + (d - 1) * mm;
        double* dv = dvalues_.data() + (d - 1) * mm;
        double* ci = cell_int_.data() + (d - 1) * mm;
        double* cm = cell_mid_.data() + (d - 1) * mm;
        double* fm = flux_mid_.data() + (d - 1) * mm;
        for (int j = 0; j < m; ++j) {
            const double x = sg.node(j);
            for (int l = 0; l < m; ++l) {
                const double y = sg.node(l);
                v[l * m + j] = green_eval(tau_int, x, y, cfg_);
                dv[l * m + j] = green_dy(tau_int, x, y, cfg_);
                ci[l * m + j] = green_cell_integral(tau_int, x, y - 0.5 * h, y + 0.5 * h, cfg_);
                cm[l * m + j] = green_cell_integral(tau_mid, x, y - 0.5 * h, y + 0.5 * h, cfg_);
            }
            // flux differences from pointwise edge values at the midpoint lag
            for (int l = 0; l <= m; ++l)
                edge_vals[l] = green_eval(tau_mid, x, (l + 0.5) * h, cfg_);
            for (int l = 0; l < m; ++l) fm[l * m + j] = edge_vals[l + 1] - edge_vals[l];
        }
    }
}

void KernelTable::dump_csv(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("KernelTable::dump_csv: cannot open " + path);
    std::fprintf(f, "lag,x,y,G,dGdy\n");
    const int m = sg_.m;
    for (int d = 1; d <= tg_.n_steps; ++d) {
        const double* v = values(d);
        const double* dv = dvalues(d);
        for (int j = 0; j < m; ++j)
            for (int l = 0; l < m; ++l)
                std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", d * tg_.dt, sg_.node(j),
                             sg_.node(l), v[l * m + j], dv[l * m + j]);
    }
    std::fclose(f);
}

}  // namespace sgbh
