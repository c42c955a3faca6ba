#include "sgbh/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace sgbh {

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inverse_normal_cdf: p in (0,1)");
    static const double a[8] = {3.3871328727963666080e0,  1.3314166789178437745e2,
                                1.9715909503065514427e3,  1.3731693765509461125e4,
                                4.5921953931549871457e4,  6.7265770927008700853e4,
                                3.3430575583588128105e4,  2.5090809287301226727e3};
    static const double b[8] = {1.0,
                                4.2313330701600911252e1,  6.8718700749205790830e2,
                                5.3941960214247511077e3,  2.1213794301586595867e4,
                                3.9307895800092710610e4,  2.8729085735721942674e4,
                                5.2264952788528545610e3};
    static const double c[8] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                                5.76949722146069140550e0, 3.64784832476320460504e0,
                                1.27045825245236838258e0, 2.41780725177450611770e-1,
                                2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static const double d[8] = {1.0,
                                2.05319162663775882187e0, 1.67638483018380384940e0,
                                6.89767334985100004550e-1, 1.48103976427480074590e-1,
                                1.51986665636164571966e-2, 5.47593808499534494600e-4,
                                1.05075007164441684324e-9};
    static const double e[8] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                                1.78482653991729133580e0, 2.96560571828504891230e-1,
                                2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static const double f[8] = {1.0,
                                5.99832206555887937690e-1, 1.36929880922735805310e-1,
                                1.48753612908506148525e-2, 7.86869131145613259100e-4,
                                1.84631831751005468180e-5, 1.42151175831644588870e-7,
                                2.04426310338993978564e-15};
    auto horner = [](const double* k, double r) {
        return ((((((k[7] * r + k[6]) * r + k[5]) * r + k[4]) * r + k[3]) * r + k[2]) * r + k[1]) * r + k[0];
    };
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * horner(a, r) / horner(b, r);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = horner(c, r) / horner(d, r);
    } else {
        r -= 5.0;
        val = horner(e, r) / horner(f, r);
    }
    return (q < 0.0) ? -val : val;
}

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

namespace {

std::uint64_t cell_key(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
    std::uint64_t h = mix64(seed ^ 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (i + 0xd1342543de82ef95ULL));
    h = mix64(h ^ (j + 0xaf251af3b0f025b5ULL));
    return h;
}

double key_to_gaussian(std::uint64_t k) {
    // top 53 bits, offset by half an ulp so u lies strictly inside (0,1)
    const double u = (static_cast<double>(k >> 11) + 0.5) * 0x1p-53;
    return inverse_normal_cdf(u);
}

}  // namespace

NoiseSheet sample_sheet(std::uint64_t seed, const TimeGrid& tg, const SpatialGrid& sg) {
    NoiseSheet sheet;
    sheet.seed = seed;
    sheet.tg = tg;
    sheet.sg = sg;
    sheet.dW.resize(static_cast<std::size_t>(tg.n_steps) * sg.m);
    const double sd = std::sqrt(tg.dt * sg.h);
    std::size_t idx = 0;
    for (int i = 0; i < tg.n_steps; ++i)
        for (int j = 0; j < sg.m; ++j)
            sheet.dW[idx++] = sd * key_to_gaussian(cell_key(seed, i, j));
    return sheet;
}

double walsh_integral(const std::vector<double>& weights, const NoiseSheet& sheet) {
    if (weights.size() != sheet.dW.size())
        throw std::invalid_argument("walsh_integral: weight array does not match the sheet cells");
    double s = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) s += weights[k] * sheet.dW[k];
    return s;
}

ProjectedWiener project_modes(const NoiseSheet& sheet, int n_modes) {
    const int m = sheet.sg.m;
    const int n = sheet.tg.n_steps;
    if (n_modes < 1 || n_modes > m)
        throw std::invalid_argument("project_modes: need 1 <= n_modes <= m");
    ProjectedWiener pw;
    pw.n_modes = n_modes;
    pw.tg = sheet.tg;
    pw.paths.assign(static_cast<std::size_t>(n_modes) * (n + 1), 0.0);
    constexpr double kPi = 3.14159265358979323846;
    std::vector<double> basis(static_cast<std::size_t>(n_modes) * m);
    for (int k = 0; k < n_modes; ++k)
        for (int j = 0; j < m; ++j)
            basis[static_cast<std::size_t>(k) * m + j] =
                std::sqrt(2.0) * std::sin((k + 1) * kPi * sheet.sg.node(j));
    for (int k = 0; k < n_modes; ++k) {
        double* w = pw.paths.data() + static_cast<std::size_t>(k) * (n + 1);
        const double* phi = basis.data() + static_cast<std::size_t>(k) * m;
        for (int i = 0; i < n; ++i) {
            double inc = 0.0;
            const double* row = sheet.dW.data() + static_cast<std::size_t>(i) * m;
            for (int j = 0; j < m; ++j) inc += phi[j] * row[j];
            w[i + 1] = w[i] + inc;
        }
    }
    return pw;
}

NoiseSheet bump_sheet(const NoiseSheet& sheet, int r_index, int z_index, double epsilon) {
    if (r_index < 0 || r_index >= sheet.tg.n_steps || z_index < 0 || z_index >= sheet.sg.m)
        throw std::out_of_range("bump_sheet: cell index out of range");
    NoiseSheet out = sheet;
    out.at(r_index, z_index) += epsilon * sheet.tg.dt * sheet.sg.h;
    return out;
}

NoiseSheet coarsen_time(const NoiseSheet& sheet) {
    const int n = sheet.tg.n_steps;
    if (n % 2 != 0) throw std::invalid_argument("coarsen_time: N must be even");
    NoiseSheet out;
    out.seed = sheet.seed;
    out.tg = TimeGrid(n / 2, sheet.tg.T);
    out.sg = sheet.sg;
    out.sampler = sheet.sampler;
    const int m = sheet.sg.m;
    out.dW.resize(static_cast<std::size_t>(n / 2) * m);
    for (int i = 0; i < n / 2; ++i)
        for (int j = 0; j < m; ++j)
            out.at(i, j) = sheet(2 * i, j) + sheet(2 * i + 1, j);
    return out;
}

NoiseSheet coarsen_space(const NoiseSheet& sheet) {
    const int m = sheet.sg.m;
    if (m % 2 == 0) throw std::invalid_argument("coarsen_space: m must be odd (dyadic family m = 2k+1)");
    const int mc = (m - 1) / 2;
    if (mc < 3) throw std::invalid_argument("coarsen_space: coarse grid would have m < 3");
    NoiseSheet out;
    out.seed = sheet.seed;
    out.tg = sheet.tg;
    out.sg = SpatialGrid(mc);
    out.sampler = sheet.sampler;
    out.dW.resize(static_cast<std::size_t>(sheet.tg.n_steps) * mc);
    for (int i = 0; i < sheet.tg.n_steps; ++i)
        for (int j = 0; j < mc; ++j)
            out.at(i, j) = sheet(i, 2 * j) + sheet(i, 2 * j + 1);
    return out;
}

NoiseSheet coarsen2(const NoiseSheet& sheet) { return coarsen_space(coarsen_time(sheet)); }

}  // namespace sgbh
