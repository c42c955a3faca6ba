#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sgbh/malliavin.hpp"
#include "sgbh/presets.hpp"

using namespace sgbh;

namespace {

KernelConfig kcfg(double nu) {
    KernelConfig cfg;
    cfg.nu = nu;
    return cfg;
}

double rel_l2(const DerivativeField& a, const DerivativeField& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        num += (a.values[k] - b.values[k]) * (a.values[k] - b.values[k]);
        den += a.values[k] * a.values[k];
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("zero noise coefficient gives an identically zero derivative") {
    TimeGrid tg(30, 0.3);
    SpatialGrid sg(15);
    ModelParams params(1.0, 0.5, 0.5, 0.5, 1, 0.3);
    NoiseCoefficient g = make_noise_preset("zero", 0.0);
    TruncationLevel trunc{5.0, 3.0};
    KernelTable table(tg, sg, kcfg(1.0));
    NoiseSheet sheet = sample_sheet(12, tg, sg);
    FieldPath base = mild_solve(make_initial_preset("sine", 0.3, sg), sheet, params, g, trunc,
                                table);
    DerivativeField d = derivative_solve(base, sheet, params, g, trunc, 10, 7, table);
    for (double v : d.values) CHECK(v == 0.0);
}

TEST_CASE("linear case: D(t,x) = sigma G(t-r, x, z) exactly") {
    TimeGrid tg(60, 0.3);
    SpatialGrid sg(31);
    ModelParams params(1.0, 0.0, 0.0, 0.5, 1, 0.3);
    NoiseCoefficient g = make_noise_preset("constant", 0.2);
    TruncationLevel trunc{20.0, 3.0};
    KernelTable table(tg, sg, kcfg(1.0));
    NoiseSheet sheet = sample_sheet(23, tg, sg);
    const int r = 12, z = 10;
    FieldPath base = mild_solve(make_initial_preset("sine", 0.3, sg), sheet, params, g, trunc,
                                table);
    DerivativeField d = derivative_solve(base, sheet, params, g, trunc, r, z, table);

    double num = 0.0, den = 0.0;
    for (int i = 0; i <= tg.n_steps; ++i)
        for (int j = 0; j < sg.m; ++j) {
            const double expect =
                i <= r ? 0.0
                       : 0.2 * green_eval((i - r) * tg.dt, sg.node(j), sg.node(z), kcfg(1.0));
            num += (d.at(i, j) - expect) * (d.at(i, j) - expect);
            den += expect * expect;
        }
    CHECK(std::sqrt(num / den) < 1e-12);

    // the finite-difference quotient recovers the same closed form
    DerivativeField fd = fd_oracle(base.u0, sheet, params, g, trunc, r, z, 1e-2, table);
    CHECK(rel_l2(d, fd) < 1e-9);
}

TEST_CASE("adaptedness: derivative vanishes at and before the source time") {
    TimeGrid tg(40, 0.2);
    SpatialGrid sg(15);
    ModelParams params(1.0, 0.5, 0.5, 0.5, 1, 0.2);
    NoiseCoefficient g = make_noise_preset("lipschitz-sin", 0.3);
    TruncationLevel trunc{5.0, 3.0};
    KernelTable table(tg, sg, kcfg(1.0));
    NoiseSheet sheet = sample_sheet(31, tg, sg);
    FieldPath base = mild_solve(make_initial_preset("sine", 0.3, sg), sheet, params, g, trunc,
                                table);
    const int r = 15;
    DerivativeField d = derivative_solve(base, sheet, params, g, trunc, r, 8, table);
    for (int i = 0; i <= r; ++i)
        for (int j = 0; j < sg.m; ++j) CHECK(d.at(i, j) == 0.0);
    // and so does the oracle, bitwise (the bump only acts on later slices)
    DerivativeField fd = fd_oracle(base.u0, sheet, params, g, trunc, r, 8, 1e-2, table);
    for (int i = 0; i <= r; ++i)
        for (int j = 0; j < sg.m; ++j) CHECK(fd.at(i, j) == 0.0);
}

TEST_CASE("nonlinear case against the bump oracle with an epsilon sweep") {
    TimeGrid tg(60, 0.3);
    SpatialGrid sg(31);
    ModelParams params(1.0, 0.5, 0.5, 0.5, 1, 0.3);
    NoiseCoefficient g = make_noise_preset("lipschitz-sin", 0.4);
    TruncationLevel trunc{5.0, 3.0};
    KernelTable table(tg, sg, kcfg(1.0));
    NoiseSheet sheet = sample_sheet(41, tg, sg);
    FieldPath base = mild_solve(make_initial_preset("sine", 0.4, sg), sheet, params, g, trunc,
                                table);
    const int r = 10, z = 14;
    DerivativeField d = derivative_solve(base, sheet, params, g, trunc, r, z, table);

    double prev = 1e9;
    for (double eps : {1e-2, 5e-3, 2.5e-3}) {
        DerivativeField fd = fd_oracle(base.u0, sheet, params, g, trunc, r, z, eps, table);
        const double err = rel_l2(d, fd);
        CHECK(err < 0.05);
        // first-order shrink until the floating floor
        CHECK((err < 0.7 * prev || err < 1e-9));
        prev = err;
    }
    // central quotient does at least as well as the one-sided one
    DerivativeField one_sided = fd_oracle(base.u0, sheet, params, g, trunc, r, z, 1e-2, table);
    DerivativeField central = fd_oracle(base.u0, sheet, params, g, trunc, r, z, 1e-2, table, true);
    CHECK(rel_l2(d, central) <= rel_l2(d, one_sided) * (1.0 + 1e-9));
}

TEST_CASE("integrated derivative: z-sum consistency, additivity, positivity") {
    TimeGrid tg(50, 0.25);
    SpatialGrid sg(31);
    ModelParams params(1.0, 0.5, 0.5, 0.5, 1, 0.25);
    NoiseCoefficient g = make_noise_preset("lipschitz-sin", 0.4);
    TruncationLevel trunc{5.0, 3.0};
    KernelTable table(tg, sg, kcfg(1.0));
    NoiseSheet sheet = sample_sheet(51, tg, sg);
    FieldPath base = mild_solve(make_initial_preset("sine", 0.4, sg), sheet, params, g, trunc,
                                table);
    const int r = 8;
    const double a = 0.25, b = 0.75;
    IntegratedDerivative v = integrated_derivative(base, sheet, params, g, trunc, r, a, b, table);

    // linearity: the h-weighted z-sum of single-cell solves reproduces v
    std::vector<double> summed(v.values.size(), 0.0);
    for (int z = v.z_lo; z <= v.z_hi; ++z) {
        DerivativeField d = derivative_solve(base, sheet, params, g, trunc, r, z, table);
        for (std::size_t k = 0; k < summed.size(); ++k) summed[k] += sg.h * d.values[k];
    }
    double sup = 0.0;
    for (std::size_t k = 0; k < summed.size(); ++k)
        sup = std::max(sup, std::fabs(summed[k] - v.values[k]));
    CHECK(sup < 1e-10);

    // interval additivity across a partition point between two cell centers
    const double mid = 0.5;  // node 15 is the first cell of the right half
    IntegratedDerivative vl =
        integrated_derivative(base, sheet, params, g, trunc, r, a, mid - 0.5 * sg.h, table);
    IntegratedDerivative vr =
        integrated_derivative(base, sheet, params, g, trunc, r, mid - 0.4 * sg.h, b, table);
    CHECK(vl.z_hi + 1 == vr.z_lo);
    for (std::size_t k = 0; k < v.values.size(); ++k)
        CHECK(vl.values[k] + vr.values[k] == doctest::Approx(v.values[k]).epsilon(1e-12));

    CHECK_THROWS_AS(integrated_derivative(base, sheet, params, g, trunc, r, -0.1, 0.5, table),
                    std::invalid_argument);
}

TEST_CASE("positivity of the integrated derivative") {
    TimeGrid tg(50, 0.25);
    SpatialGrid sg(31);
    KernelTable table(tg, sg, kcfg(1.0));
    NoiseSheet sheet = sample_sheet(61, tg, sg);
    TruncationLevel trunc{20.0, 3.0};
    const int r = 8;

    // linear case with g = sigma > 0: v is the z-integral of a positive kernel
    ModelParams lin(1.0, 0.0, 0.0, 0.5, 1, 0.25);
    NoiseCoefficient gc = make_noise_preset("constant", 0.3);
    FieldPath base = mild_solve(make_initial_preset("sine", 0.2, sg), sheet, lin, gc, trunc, table);
    IntegratedDerivative v =
        integrated_derivative(base, sheet, lin, gc, trunc, r, 0.25, 0.75, table);
    PositivityStats st = positivity_fraction(v, tg.node(r) + tg.dt, tg.T, 0.0);
    CHECK(st.fraction == 1.0);
    CHECK(st.min_value > 0.0);

    // zero coefficient: nothing is positive
    NoiseCoefficient gz = make_noise_preset("zero", 0.0);
    FieldPath base0 = mild_solve(make_initial_preset("sine", 0.2, sg), sheet, lin, gz, trunc, table);
    IntegratedDerivative v0 =
        integrated_derivative(base0, sheet, lin, gz, trunc, r, 0.25, 0.75, table);
    PositivityStats st0 = positivity_fraction(v0, tg.node(r) + tg.dt, tg.T, 0.0);
    CHECK(st0.fraction == 0.0);
}

TEST_CASE("localization: runs on escaping base paths are rejected") {
    TimeGrid tg(20, 0.1);
    SpatialGrid sg(15);
    ModelParams params(1.0, 0.5, 0.5, 0.5, 1, 0.1);
    NoiseCoefficient g = make_noise_preset("constant", 0.1);
    KernelTable table(tg, sg, kcfg(1.0));
    NoiseSheet sheet = sample_sheet(71, tg, sg);
    TruncationLevel big{50.0, 3.0};
    FieldPath base = mild_solve(std::vector<double>(sg.m, 3.0), sheet, params, g, big, table);
    TruncationLevel tiny{0.5, 3.0};
    CHECK_THROWS_AS(derivative_solve(base, sheet, params, g, tiny, 5, 7, table),
                    LocalizationError);
    CHECK_THROWS_AS(derivative_solve(base, sheet, params, g, big, 25, 7, table),
                    std::out_of_range);
    CHECK_THROWS_AS(fd_oracle(base.u0, sheet, params, g, big, 5, 7, 0.0, table),
                    std::invalid_argument);
}
