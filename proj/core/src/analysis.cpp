#include "sgbh/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sgbh {

namespace {

double lp_pow(const std::vector<double>& y, double h, double p) {
    double s = 0.0;
    for (double v : y) s += std::pow(std::fabs(v), p);
    return h * s;
}

// centered differences, one-sided at the first and last interior nodes
std::vector<double> grad_x(const std::vector<double>& v, double h) {
    const int m = static_cast<int>(v.size());
    std::vector<double> d(m);
    d[0] = (v[1] - v[0]) / h;
    d[m - 1] = (v[m - 1] - v[m - 2]) / h;
    for (int j = 1; j < m - 1; ++j) d[j] = (v[j + 1] - v[j - 1]) / (2.0 * h);
    return d;
}

double lsq_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const int n = static_cast<int>(xs.size());
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double num = 0, den = 0;
    for (int i = 0; i < n; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return num / den;
}

}  // namespace

std::array<double, 3> energy_constants(double p, int delta, double alpha, double beta,
                                       double gamma, double nu) {
    if (!(p >= 2.0 * delta + 1.0))
        throw std::invalid_argument("energy_constants: need p >= 2*delta + 1");
    const double d = delta;
    const double pd = p + 2.0 * d;
    const double two_d = std::pow(2.0, d);
    const double brace = two_d * (p - 1.0) * (p - 1.0) * alpha * alpha / (4.0 * nu) +
                         std::pow(2.0, 2.0 * d) * beta * (1.0 + gamma) * (1.0 + gamma) +
                         two_d * beta * (1.0 + gamma) +
                         std::pow(2.0, 2.0 * d - 1.0) * beta * (2.0 * d + 1.0);
    const double K1 = (2.0 * d / pd) * std::pow(8.0 * p / pd, p / (2.0 * d)) *
                      std::pow(brace, pd / (2.0 * d));
    const double K2 = (two_d * beta * (1.0 + gamma) / p) * std::pow((p - 1.0) / p, p - 1.0) +
                      (two_d * (p - 1.0) * (p - 1.0) * alpha * alpha / (nu * p)) *
                          std::pow(2.0 * (p - 2.0) / p, 2.0 / (p - 2.0));
    const double K3 =
        (1.0 / pd) * (std::pow(4.0 * (pd - 1.0) / (beta * pd), pd - 1.0) *
                          std::pow(std::pow(2.0, 2.0 * d - 1.0) * beta * (2.0 * d + 1.0), pd) +
                      2.0 * std::pow(4.0 * (pd - 2.0) / (beta * pd), (pd - 2.0) / 2.0) *
                          std::pow(two_d * (p - 1.0) * (p - 1.0) * alpha * alpha / (2.0 * nu),
                                   pd / 2.0));
    return {K1, K2, K3};
}

EnergyReport energy_inequality_check(const FieldPath& v, const FieldPath& phi,
                                     const std::vector<double>& u0, const ModelParams& params,
                                     double p) {
    if (v.tg != phi.tg || v.sg != phi.sg)
        throw std::invalid_argument("energy_inequality_check: grid mismatch between v and phi");
    const int n = v.tg.n_steps;
    const double h = v.sg.h;
    const double dt = v.tg.dt;
    const double d = params.delta;

    EnergyReport rep;
    rep.p = p;
    auto [K1, K2, K3] = energy_constants(p, params.delta, params.alpha, params.beta, params.gamma,
                                         params.nu);
    rep.K1 = K1;
    rep.K2 = K2;
    rep.K3 = K3;

    double sup_phi_pd1 = 0.0, sup_phi_p2d = 0.0;
    for (int i = 0; i <= n; ++i) {
        const auto ph = phi.slice_vec(i);
        sup_phi_pd1 = std::max(sup_phi_pd1, lp_pow(ph, h, p * (d + 1.0)));
        sup_phi_p2d = std::max(sup_phi_p2d, lp_pow(ph, h, p + 2.0 * d));
    }
    rep.rhs = lp_pow(u0, h, p) + p * K1 * params.T + p * K2 * params.T * sup_phi_pd1 +
              p * K3 * params.T * sup_phi_p2d;

    rep.lhs.resize(n + 1);
    rep.margin.resize(n + 1);
    double cum_grad = 0.0, cum_p = 0.0, cum_p2d = 0.0;
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        const auto vi = v.slice_vec(i);
        rep.lhs[i] = lp_pow(vi, h, p) + 0.5 * params.nu * p * (p - 1.0) * cum_grad +
                     params.beta * p * params.gamma * cum_p + params.beta * p / 8.0 * cum_p2d;
        rep.margin[i] = rep.rhs - rep.lhs[i];
        rep.min_margin = std::min(rep.min_margin, rep.margin[i]);
        if (i < n) {
            const auto dv = grad_x(vi, h);
            double gsum = 0.0;
            for (int j = 0; j < v.sg.m; ++j)
                gsum += std::pow(std::fabs(vi[j]), p - 2.0) * dv[j] * dv[j];
            cum_grad += dt * h * gsum;
            cum_p += dt * lp_pow(vi, h, p);
            cum_p2d += dt * lp_pow(vi, h, p + 2.0 * d);
        }
    }
    return rep;
}

ComparisonReport comparison_check(const std::vector<double>& u0, const std::vector<double>& v0,
                                  const ModelParams& params, const NoiseCoefficient& g,
                                  const TruncationLevel& trunc, const KernelTable& table,
                                  const std::vector<std::uint64_t>& seeds, double tol) {
    const SpatialGrid& sg = table.spatial_grid();
    const TimeGrid& tg = table.time_grid();
    if (static_cast<int>(u0.size()) != sg.m || static_cast<int>(v0.size()) != sg.m)
        throw std::invalid_argument("comparison_check: initial data size mismatch");
    for (int j = 0; j < sg.m; ++j)
        if (u0[j] > v0[j])
            throw std::invalid_argument("comparison_check: hypothesis u0 <= v0 fails at node " +
                                        std::to_string(j));

    ComparisonReport rep;
    rep.paths = static_cast<int>(seeds.size());
    const double slack_scale = 10.0 * (sg.h * sg.h + std::sqrt(tg.dt));
    for (std::uint64_t seed : seeds) {
        NoiseSheet sheet = sample_sheet(seed, tg, sg);
        FieldPath u = mild_solve(u0, sheet, params, g, trunc, table);
        FieldPath v = mild_solve(v0, sheet, params, g, trunc, table);
        const double amp = std::max(u.sup_norm(), v.sup_norm());
        const double path_tol = tol > 0.0 ? tol : slack_scale * amp;
        rep.per_path_tol.push_back(path_tol);
        for (std::size_t c = 0; c < u.values.size(); ++c) {
            const double diff = u.values[c] - v.values[c];
            rep.max_diff = std::max(rep.max_diff, diff);
            if (diff > path_tol) {
                ++rep.violation_cells;
                rep.max_violation = std::max(rep.max_violation, diff - path_tol);
            }
        }
    }
    return rep;
}

double DensityEstimate::value_at(double x) const {
    if (grid.empty()) return 0.0;
    if (x <= grid.front() || x >= grid.back()) return 0.0;
    const double step = grid[1] - grid[0];
    const auto k = static_cast<std::size_t>((x - grid.front()) / step);
    const double w = (x - grid[k]) / step;
    return (1.0 - w) * density[k] + w * density[k + 1];
}

namespace {

DensityEstimate kde_on_grid(const std::vector<double>& samples, double bw,
                            const std::vector<double>& grid) {
    DensityEstimate est;
    est.samples = samples;
    est.bandwidth = bw;
    est.grid = grid;
    est.density.assign(grid.size(), 0.0);
    const double norm = 1.0 / (samples.size() * bw * std::sqrt(2.0 * 3.14159265358979323846));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double s = 0.0;
        for (double x : samples) {
            const double z = (grid[k] - x) / bw;
            s += std::exp(-0.5 * z * z);
        }
        est.density[k] = norm * s;
    }
    double integral = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k)
        integral += 0.5 * (est.density[k] + est.density[k - 1]) * (grid[k] - grid[k - 1]);
    est.integral = integral;
    return est;
}

std::vector<double> kde_grid(const std::vector<double>& samples, double bw) {
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it - 8.0 * bw;
    const double hi = *hi_it + 8.0 * bw;
    std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / (bw / 4.0))) + 2;
    n = std::clamp<std::size_t>(n, 64, 400000);
    std::vector<double> grid(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) grid[k] = lo + k * step;
    return grid;
}

}  // namespace

DensityEstimate kde_density(const std::vector<double>& samples, double bandwidth) {
    if (samples.size() < 2) throw std::invalid_argument("kde_density: need at least 2 samples");
    const double n = static_cast<double>(samples.size());
    double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double var = 0.0;
    for (double x : samples) var += (x - mean) * (x - mean);
    var /= (n - 1.0);

    if (var < 1e-20 * (1.0 + mean * mean)) {
        DensityEstimate est;
        est.samples = samples;
        est.atom_detected = true;
        return est;
    }
    const double bw = bandwidth > 0.0 ? bandwidth : 1.06 * std::sqrt(var) * std::pow(n, -0.2);
    return kde_on_grid(samples, bw, kde_grid(samples, bw));
}

double kde_halving_change(const DensityEstimate& est) {
    if (est.atom_detected) throw std::invalid_argument("kde_halving_change: estimate is an atom");
    DensityEstimate halved = kde_on_grid(est.samples, 0.5 * est.bandwidth, est.grid);
    double sup_diff = 0.0, sup = 0.0;
    for (std::size_t k = 0; k < est.grid.size(); ++k) {
        sup_diff = std::max(sup_diff, std::fabs(halved.density[k] - est.density[k]));
        sup = std::max(sup, est.density[k]);
    }
    return sup_diff / sup;
}

DichotomyReport dichotomy_experiment(const ModelParams& params, const NoiseCoefficient& g,
                                     double t_switch, const TimeGrid& tg, const SpatialGrid& sg,
                                     const std::vector<double>& u0,
                                     const std::vector<double>& t_obs, double x_obs,
                                     std::uint64_t base_seed, int n_seeds) {
    int j_obs = 0;
    double best = 2.0;
    for (int j = 0; j < sg.m; ++j) {
        const double d = std::fabs(sg.node(j) - x_obs);
        if (d < best) {
            best = d;
            j_obs = j;
        }
    }
    std::vector<int> i_obs;
    for (double t : t_obs) i_obs.push_back(static_cast<int>(std::lround(t / tg.dt)));

    std::vector<std::vector<double>> samples(t_obs.size());
    GalerkinConfig gcfg;
    gcfg.n_modes = sg.m;
    for (int s = 0; s < n_seeds; ++s) {
        NoiseSheet sheet = sample_sheet(base_seed + s, tg, sg);
        FieldPath u = galerkin_solve(u0, sheet, params, g, gcfg);
        for (std::size_t k = 0; k < i_obs.size(); ++k) samples[k].push_back(u.at(i_obs[k], j_obs));
    }

    DichotomyReport rep;
    rep.t_switch = t_switch;
    for (std::size_t k = 0; k < t_obs.size(); ++k) {
        DichotomyObservation obs;
        obs.t_obs = t_obs[k];
        DensityEstimate est = kde_density(samples[k]);
        obs.atom_detected = est.atom_detected;
        const double n = static_cast<double>(samples[k].size());
        double mean = std::accumulate(samples[k].begin(), samples[k].end(), 0.0) / n;
        for (double x : samples[k]) obs.variance += (x - mean) * (x - mean);
        obs.variance /= (n - 1.0);
        if (!est.atom_detected) {
            obs.kde_integral = est.integral;
            obs.kde_halving_change = kde_halving_change(est);
        }
        rep.observations.push_back(obs);
    }
    return rep;
}

double fractional_seminorm(const std::vector<double>& f, double h, double eps, double p) {
    if (!(p > 1.0 + eps))
        throw std::invalid_argument("fractional_seminorm: need p > 1 + eps");
    const int m = static_cast<int>(f.size());
    double tot = 0.0;
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            if (j == k) continue;
            const double dx = std::fabs(j - k) * h;
            tot += std::pow(std::fabs(f[j] - f[k]), p) / std::pow(dx, 2.0 + eps);
        }
    return h * h * tot;
}

namespace {

std::vector<double> sample_u0(const ConvergenceProblem& prob, const SpatialGrid& sg) {
    std::vector<double> u0(sg.m);
    for (int j = 0; j < sg.m; ++j) u0[j] = prob.u0(sg.node(j));
    return u0;
}

FieldPath solve_level(const ConvergenceProblem& prob, const NoiseSheet& sheet) {
    const auto u0 = sample_u0(prob, sheet.sg);
    if (prob.scheme == "galerkin") {
        GalerkinConfig cfg;
        cfg.n_modes = sheet.sg.m;
        return galerkin_solve(u0, sheet, prob.params, prob.g, cfg);
    }
    KernelConfig kcfg;
    kcfg.nu = prob.params.nu;
    KernelTable table(sheet.tg, sheet.sg, kcfg);
    return mild_solve(u0, sheet, prob.params, prob.g, prob.trunc, table);
}

// sup over the coarse nodes common to both grids; fine grid is dyadic in both
// directions (time factor ft, space in the m -> 2m+1 family).
double common_node_error(const FieldPath& coarse, const FieldPath& fine) {
    const int ft = fine.tg.n_steps / coarse.tg.n_steps;
    double err = 0.0;
    for (int i = 0; i <= coarse.tg.n_steps; ++i)
        for (int j = 0; j < coarse.sg.m; ++j) {
            const int jf = (coarse.sg.m == fine.sg.m) ? j : 2 * j + 1;
            err = std::max(err, std::fabs(coarse.at(i, j) - fine.at(i * ft, jf)));
        }
    return err;
}

}  // namespace

ConvergenceReport convergence_study(const ConvergenceProblem& prob, int m_coarsest,
                                    int n_coarsest, int levels) {
    if (levels < 3) throw std::invalid_argument("convergence_study: need >= 3 levels");
    ConvergenceReport rep;

    // spatial sweep at fixed (finest-level) N
    {
        std::vector<int> ms(levels);
        ms[0] = m_coarsest;
        for (int l = 1; l < levels; ++l) ms[l] = 2 * ms[l - 1] + 1;
        const int n_fixed = n_coarsest << (levels - 1);
        NoiseSheet fine_sheet = sample_sheet(prob.seed, TimeGrid(n_fixed, prob.params.T),
                                             SpatialGrid(ms[levels - 1]));
        std::vector<NoiseSheet> sheets(levels);
        sheets[levels - 1] = fine_sheet;
        for (int l = levels - 2; l >= 0; --l) sheets[l] = coarsen_space(sheets[l + 1]);
        FieldPath reference = solve_level(prob, sheets[levels - 1]);
        for (int l = 0; l < levels - 1; ++l) {
            FieldPath u = solve_level(prob, sheets[l]);
            // coarse node j sits at fine index 2j+1 per gap in the dyadic family
            double err = 0.0;
            for (int i = 0; i <= u.tg.n_steps; ++i)
                for (int j = 0; j < u.sg.m; ++j) {
                    int jf = j;
                    for (int lev = l; lev < levels - 1; ++lev) jf = 2 * jf + 1;
                    err = std::max(err, std::fabs(u.at(i, j) - reference.at(i, jf)));
                }
            rep.spatial.steps.push_back(u.sg.h);
            rep.spatial.errors.push_back(err);
        }
    }

    // temporal sweep at fixed (finest-level) m
    {
        const int m_fixed = [&] {
            int m = m_coarsest;
            for (int l = 1; l < levels; ++l) m = 2 * m + 1;
            return m;
        }();
        std::vector<int> ns(levels);
        ns[0] = n_coarsest;
        for (int l = 1; l < levels; ++l) ns[l] = 2 * ns[l - 1];
        NoiseSheet fine_sheet =
            sample_sheet(prob.seed + 1, TimeGrid(ns[levels - 1], prob.params.T), SpatialGrid(m_fixed));
        std::vector<NoiseSheet> sheets(levels);
        sheets[levels - 1] = fine_sheet;
        for (int l = levels - 2; l >= 0; --l) sheets[l] = coarsen_time(sheets[l + 1]);
        FieldPath reference = solve_level(prob, sheets[levels - 1]);
        for (int l = 0; l < levels - 1; ++l) {
            FieldPath u = solve_level(prob, sheets[l]);
            rep.temporal.steps.push_back(u.tg.dt);
            rep.temporal.errors.push_back(common_node_error(u, reference));
        }
    }

    auto finish = [](ConvergenceSweep& sw) {
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < sw.steps.size(); ++i) {
            if (sw.errors[i] <= 0.0) continue;
            lx.push_back(std::log(sw.steps[i]));
            ly.push_back(std::log(sw.errors[i]));
        }
        sw.order = lx.size() >= 2 ? lsq_slope(lx, ly) : 0.0;
        for (std::size_t i = 1; i < sw.errors.size(); ++i)
            if (sw.errors[i] > sw.errors[i - 1]) sw.monotone = false;
    };
    finish(rep.spatial);
    finish(rep.temporal);
    return rep;
}

}  // namespace sgbh
