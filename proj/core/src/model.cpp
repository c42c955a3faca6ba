#include "sgbh/model.hpp"

#include <cmath>

namespace sgbh {

double lp_norm(const std::vector<double>& y, double h, double p) {
    double s = 0.0;
    for (double v : y) s += std::pow(std::fabs(v), p);
    return std::pow(h * s, 1.0 / p);
}

double phi_n(double r, const TruncationLevel& trunc) {
    if (r < 0.0) throw std::invalid_argument("phi_n: r must be >= 0");
    const double np = std::pow(trunc.n, trunc.p);
    if (r <= np) return 1.0;
    return trunc.n * std::pow(r, -1.0 / trunc.p);
}

std::vector<double> truncate_field(const std::vector<double>& y, const TruncationLevel& trunc,
                                   const SpatialGrid& grid) {
    auto norm_pow = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += std::pow(std::fabs(x), trunc.p);
        return grid.h * s;
    };
    const double scale = phi_n(norm_pow(y), trunc);
    if (scale == 1.0) return y;
    std::vector<double> out(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) out[j] = scale * y[j];
    // the rescaled norm can sit an ulp above n^p; nudge inside so the
    // retraction is exactly idempotent
    const double np = std::pow(trunc.n, trunc.p);
    for (int pass = 0; pass < 4 && norm_pow(out) > np; ++pass)
        for (double& v : out) v = std::nextafter(v, 0.0);
    return out;
}

double eta_n(double x, double n) {
    if (x < 0.0) throw std::invalid_argument("eta_n: x must be >= 0");
    if (x <= n) return 1.0;
    if (x <= n + 1.0) return n + 1.0 - x;
    return 0.0;
}

std::pair<double, double> truncated_nonlinearities(double u, double n, double gamma, int delta) {
    const double cut = eta_n(std::fabs(u), n);
    if (cut == 0.0) return {0.0, 0.0};
    return {cut * advection_nonlinearity(u, delta), cut * reaction_nonlinearity(u, gamma, delta)};
}

}  // namespace sgbh
