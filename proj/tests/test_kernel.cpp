#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sgbh/kernel.hpp"

using namespace sgbh;

namespace {
KernelConfig unit_cfg() {
    KernelConfig cfg;
    cfg.nu = 1.0;
    return cfg;
}
}  // namespace

TEST_CASE("image sum: boundary, symmetry, frozen oracle values") {
    CHECK(green_image(0.1, 0.5, 0.0, 1.0, 10) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(green_image(0.1, 0.5, 1.0, 1.0, 10) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(green_image(0.07, 0.3, 0.8, 1.0, 12) ==
          doctest::Approx(green_image(0.07, 0.8, 0.3, 1.0, 12)).epsilon(1e-14));
    CHECK(green_image(0.05, 0.3, 0.7, 1.0, 20) ==
          doctest::Approx(oracle::kG_005_03_07).epsilon(1e-13));
    CHECK(green_image(0.01, 0.5, 0.5, 1.0, 20) ==
          doctest::Approx(oracle::kG_001_05_05).epsilon(1e-13));
    CHECK_THROWS_AS(green_image(0.0, 0.3, 0.4, 1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(green_image(-0.2, 0.3, 0.4, 1.0, 10), std::invalid_argument);
}

TEST_CASE("spectral sum: exact boundary zeros, long-lag single mode, frozen value") {
    CHECK(green_spectral(0.3, 0.0, 0.4, 1.0, 100) == 0.0);
    CHECK(green_spectral(0.3, 1.0, 0.4, 1.0, 100) == doctest::Approx(0.0).epsilon(1e-14));
    // first mode dominates at lag 1; error bounded by the second-mode term
    CHECK(std::fabs(green_spectral(1.0, 0.5, 0.5, 1.0, 50) - oracle::kTwoExpMinusPiSq) <
          2.0 * std::exp(-4.0 * oracle::kPi * oracle::kPi));
    CHECK(green_spectral(0.25, 0.2, 0.8, 1.0, 400) ==
          doctest::Approx(oracle::kG_025_02_08).epsilon(1e-13));
    CHECK_THROWS_AS(green_spectral(0.0, 0.3, 0.4, 1.0, 10), std::invalid_argument);
}

TEST_CASE("cross-representation agreement on the (tau, x, y) grid") {
    // acceptance criterion resolution: tau*nu in [0.005, 1], 21x21 interior points
    double max_diff = 0.0;
    for (int it = 0; it < 12; ++it) {
        const double tau = 0.005 * std::pow(1.0 / 0.005, it / 11.0);
        for (int a = 1; a <= 21; ++a)
            for (int b = 1; b <= 21; ++b) {
                const double x = a / 22.0;
                const double y = b / 22.0;
                max_diff = std::max(max_diff, std::fabs(green_image(tau, x, y, 1.0, 20) -
                                                        green_spectral(tau, x, y, 1.0, 400)));
            }
    }
    CHECK(max_diff < 1e-10);
}

TEST_CASE("dispatch continuity at the crossover and small-lag Gaussian growth") {
    KernelConfig cfg = unit_cfg();
    const double t_star = cfg.crossover;
    // the jump introduced by switching representations, with the kernel's own
    // smooth variation across the 2e-6 lag window subtracted out
    const double below = green_eval(t_star - 1e-6, 0.37, 0.55, cfg);
    const double above = green_eval(t_star + 1e-6, 0.37, 0.55, cfg);
    const double smooth = green_image(t_star - 1e-6, 0.37, 0.55, 1.0, 20) -
                          green_image(t_star + 1e-6, 0.37, 0.55, 1.0, 20);
    CHECK(std::fabs((below - above) - smooth) < 1e-10);
    // both representations agree at the crossover lag itself
    KernelConfig img = cfg, spec = cfg;
    img.crossover = 1e9;
    spec.crossover = 0.0;
    CHECK(std::fabs(green_eval(t_star, 0.37, 0.55, img) - green_eval(t_star, 0.37, 0.55, spec)) <
          1e-10);

    // ratio to the free Gaussian -> 1 as the lag shrinks
    for (double tau : {1e-3, 1e-4, 1e-5}) {
        const double free_gauss = 1.0 / std::sqrt(4.0 * oracle::kPi * tau);
        CHECK(green_eval(tau, 0.5, 0.5, cfg) / free_gauss == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("nu folds in through the time substitution") {
    KernelConfig cfg;
    cfg.nu = 0.35;
    CHECK(green_eval(0.2, 0.3, 0.6, cfg) ==
          doctest::Approx(green_eval(0.2 * 0.35, 0.3, 0.6, unit_cfg())).epsilon(1e-14));
    // unit-diffusivity switch reproduces the literal unit-time reading
    cfg.unit_diffusivity_time = true;
    CHECK(green_eval(0.2, 0.3, 0.6, cfg) ==
          doctest::Approx(green_eval(0.2, 0.3, 0.6, unit_cfg())).epsilon(1e-14));
}

TEST_CASE("kernel mass is sub-Markov") {
    KernelConfig cfg = unit_cfg();
    SpatialGrid grid(63);
    for (double tau : {0.0005, 0.01, 0.1, 0.5}) {
        double mass = 0.0;
        for (int l = 0; l < grid.m; ++l) mass += grid.h * green_eval(tau, 0.5, grid.node(l), cfg);
        CHECK(mass <= 1.0 + 1e-6);
        CHECK(mass > 0.0);
    }
}

TEST_CASE("dG/dy: frozen values, odd point, sign, centered-difference convergence") {
    KernelConfig cfg = unit_cfg();
    CHECK(green_dy(0.05, 0.5, 0.4, cfg) == doctest::Approx(oracle::kdG_005_05_04).epsilon(1e-12));
    CHECK(green_dy(0.05, 0.3, 0.7, cfg) == doctest::Approx(oracle::kdG_005_03_07).epsilon(1e-12));
    CHECK(green_dy(0.05, 0.5, 0.4, cfg) > 0.0);
    CHECK(std::fabs(green_dy(0.01, 0.5, 0.5, cfg)) < 1e-8);

    // second-order convergence of the centered difference of green_eval
    const double tau = 0.03, x = 0.42, y = 0.61;
    const double exact = green_dy(tau, x, y, cfg);
    double prev_err = 1e9;
    for (double eps : {1e-2, 5e-3, 2.5e-3}) {
        const double fd =
            (green_eval(tau, x, y + eps, cfg) - green_eval(tau, x, y - eps, cfg)) / (2.0 * eps);
        const double err = std::fabs(fd - exact);
        CHECK(err < 0.3 * prev_err);  // ~4x shrink per halving
        prev_err = err;
    }
    // the two representations agree on the overlap band
    for (double tau_band : {0.02, 0.05, 0.08}) {
        KernelConfig img = cfg, spec = cfg;
        img.crossover = 1e9;   // force image
        spec.crossover = 0.0;  // force spectral
        CHECK(std::fabs(green_dy(tau_band, 0.3, 0.55, img) - green_dy(tau_band, 0.3, 0.55, spec)) <
              1e-8);
    }
}

TEST_CASE("dG/dt and d2G/dydt match finite differences of the evaluators") {
    KernelConfig cfg = unit_cfg();
    for (double tau : {0.02, 0.2}) {
        const double eps = 1e-6 * tau;
        const double fd_t =
            (green_eval(tau + eps, 0.4, 0.6, cfg) - green_eval(tau - eps, 0.4, 0.6, cfg)) /
            (2.0 * eps);
        CHECK(green_dt(tau, 0.4, 0.6, cfg) == doctest::Approx(fd_t).epsilon(1e-6));
        const double fd_yt =
            (green_dy(tau + eps, 0.4, 0.6, cfg) - green_dy(tau - eps, 0.4, 0.6, cfg)) / (2.0 * eps);
        CHECK(green_dydt(tau, 0.4, 0.6, cfg) == doctest::Approx(fd_yt).epsilon(1e-5));
    }
}

TEST_CASE("exact cell integrals match high-resolution quadrature") {
    KernelConfig cfg = unit_cfg();
    for (double tau : {0.004, 0.05, 0.3}) {
        for (double lo : {0.2, 0.48, 0.9}) {
            const double hi = lo + 0.05;
            const double exact = green_cell_integral(tau, 0.5, lo, hi, cfg);
            double sum = 0.0;
            const int nq = 2000;
            for (int q = 0; q < nq; ++q)
                sum += green_eval(tau, 0.5, lo + (q + 0.5) * (hi - lo) / nq, cfg) * (hi - lo) / nq;
            CHECK(exact == doctest::Approx(sum).epsilon(1e-7));
        }
    }
}

TEST_CASE("Chapman-Kolmogorov semigroup property under grid refinement") {
    KernelConfig cfg = unit_cfg();
    const double t1 = 0.04, t2 = 0.07, x = 0.3, y = 0.62;
    const double exact = green_eval(t1 + t2, x, y, cfg);
    double prev_err = 1e9;
    for (int m : {40, 80, 160}) {
        const double h = 1.0 / (m + 1);
        double conv = 0.0;
        for (int l = 1; l <= m; ++l)
            conv += h * green_eval(t1, x, l * h, cfg) * green_eval(t2, l * h, y, cfg);
        const double err = std::fabs(conv - exact);
        CHECK(err < prev_err + 1e-14);
        prev_err = err;
    }
    CHECK(prev_err < 1e-6);
}

TEST_CASE("kernel table invariants: symmetry, positivity, mass, drift weights") {
    TimeGrid tg(40, 0.2);
    SpatialGrid sg(31);
    KernelConfig cfg = unit_cfg();
    KernelTable table(tg, sg, cfg);
    const int m = sg.m;
    for (int d : {1, 7, 40}) {
        const double* v = table.values(d);
        for (int j = 0; j < m; ++j)
            for (int l = 0; l < j; ++l) {
                const double a = v[l * m + j], b = v[j * m + l];
                CHECK(std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(a)));
            }
        double mass_max = 0.0;
        for (int j = 0; j < m; ++j) {
            double mass = 0.0;
            for (int l = 0; l < m; ++l) {
                CHECK(v[l * m + j] >= -1e-12);
                mass += sg.h * v[l * m + j];
            }
            mass_max = std::max(mass_max, mass);
        }
        CHECK(mass_max <= 1.0 + 1e-6);
        // cell-averaged mass is exactly sub-Markov
        const double* ci = table.cell_int(d);
        for (int j = 0; j < m; ++j) {
            double mass = 0.0;
            for (int l = 0; l < m; ++l) mass += ci[l * m + j];
            CHECK(mass <= 1.0 + 1e-12);
        }
    }
    // product-integration weights: sum of singular-envelope integrals telescopes
    double wsum = 0.0;
    for (int d = 1; d <= tg.n_steps; ++d) {
        CHECK(table.drift_weight(d) > 0.0);
        wsum += table.drift_weight(d) / std::sqrt((d - 0.5) * tg.dt);
    }
    CHECK(wsum == doctest::Approx(2.0 * std::sqrt(tg.T)).epsilon(1e-12));
    // flux entries integrate dG/dy over the cell: they telescope across y to
    // G at the outer edges
    const double* fm = table.flux_mid(5);
    const double tau_mid = 4.5 * tg.dt;
    for (int j : {0, 15, 30}) {
        double tele = 0.0;
        for (int l = 0; l < m; ++l) tele += fm[l * m + j];
        const double expect = green_eval(tau_mid, sg.node(j), 1.0 - 0.5 * sg.h, cfg) -
                              green_eval(tau_mid, sg.node(j), 0.5 * sg.h, cfg);
        CHECK(tele == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("measured kernel bounds are finite and refinement-stable") {
    KernelConfig cfg = unit_cfg();
    const std::vector<double> lags = {1e-4, 1e-3, 1e-2, 0.1, 0.5};
    BoundReport coarse = measure_kernel_bounds(cfg, lags, 9);
    BoundReport fine = measure_kernel_bounds(cfg, lags, 17);
    for (const char* name : {"A1", "A2", "A3", "A4", "A5", "A6"}) {
        const double kc = coarse[name].empirical_K;
        const double kf = fine[name].empirical_K;
        CHECK(std::isfinite(kc));
        CHECK(kc > 0.0);
        const double ratio = kf / kc;
        CHECK(ratio >= 0.5);
        CHECK(ratio <= 2.0);
    }
    // the kernel has no alpha/beta/gamma dependence: tables built from params
    // differing only in those coefficients are bitwise equal
    TimeGrid tg(10, 0.1);
    SpatialGrid sg(15);
    KernelTable t1(tg, sg, cfg), t2(tg, sg, cfg);
    for (int d = 1; d <= 10; ++d)
        for (int k = 0; k < sg.m * sg.m; ++k) CHECK(t1.values(d)[k] == t2.values(d)[k]);

    // the table carries the measured-bound slots
    t1.bounds = coarse;
    CHECK(t1.bounds.has_value());
    CHECK((*t1.bounds)["A2"].ell == 8.0);
}

TEST_CASE("kernel table CSV dump") {
    TimeGrid tg(3, 0.03);
    SpatialGrid sg(5);
    KernelTable table(tg, sg, unit_cfg());
    const std::string path = "/tmp/sgbh-kernel-dump.csv";
    table.dump_csv(path);
    std::FILE* f = std::fopen(path.c_str(), "r");
    REQUIRE(f != nullptr);
    char line[128];
    REQUIRE(std::fgets(line, sizeof(line), f) != nullptr);
    CHECK(std::string(line) == "lag,x,y,G,dGdy\n");
    int rows = 0;
    while (std::fgets(line, sizeof(line), f)) ++rows;
    std::fclose(f);
    CHECK(rows == 3 * 5 * 5);
    std::remove(path.c_str());
}
