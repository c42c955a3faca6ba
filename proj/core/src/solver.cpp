#include "sgbh/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace sgbh {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Eigen::MatrixXd;
using Eigen::VectorXd;
using CMap = Eigen::Map<const MatrixXd>;

CMap table_block(const double* ptr, int m) { return CMap(ptr, m, m); }

void check_finite_slice(const double* v, int m, int i, double t) {
    for (int j = 0; j < m; ++j)
        if (!std::isfinite(v[j])) throw BlowupError(i, t);
}

// Columns of the drift/noise source matrices at one time slice.
struct SliceSources {
    VectorXd c;  // reaction_expanded(pi_n u)
    VectorXd p;  // (pi_n u)^{delta+1}
    VectorXd w;  // g(t_k, y_j, pi_n u) * dW[k][j]
};

SliceSources slice_sources(const double* u, int k, const NoiseSheet* sheet,
                           const ModelParams& params, const NoiseCoefficient& g,
                           const TruncationLevel* trunc, const double* phi,
                           const TimeGrid& tg, const SpatialGrid& sg) {
    const int m = sg.m;
    std::vector<double> state(u, u + m);
    if (phi)
        for (int j = 0; j < m; ++j) state[j] += phi[j];
    if (trunc) state = truncate_field(state, *trunc, sg);
    SliceSources s;
    s.c.resize(m);
    s.p.resize(m);
    for (int j = 0; j < m; ++j) {
        s.c[j] = reaction_expanded(state[j], params.gamma, params.delta);
        s.p[j] = advection_nonlinearity(state[j], params.delta);
    }
    if (sheet) {
        s.w.resize(m);
        const double tk = tg.node(k);
        for (int j = 0; j < m; ++j)
            s.w[j] = g(tk, sg.node(j), state[j]) * (*sheet)(k, j);
    }
    return s;
}

// OUT columns 1..N get the kernel-smoothed initial datum; column 0 is u0.
MatrixXd smoothed_initial(const std::vector<double>& u0, const KernelTable& table) {
    const int n = table.time_grid().n_steps;
    const int m = table.spatial_grid().m;
    MatrixXd out(m, n + 1);
    VectorXd v0 = Eigen::Map<const VectorXd>(u0.data(), m);
    out.col(0) = v0;
    for (int i = 1; i <= n; ++i) out.col(i).noalias() = table_block(table.cell_int(i), m) * v0;
    return out;
}

FieldPath matrix_to_field(const MatrixXd& cols, const TimeGrid& tg, const SpatialGrid& sg,
                          const std::vector<double>& u0) {
    FieldPath f(tg, sg);
    f.u0 = u0;
    for (int i = 0; i <= tg.n_steps; ++i)
        for (int j = 0; j < sg.m; ++j) f.at(i, j) = cols(j, i);
    return f;
}

double bracket_value(double lam, double C1, double C2, double C3, double C4, double C5,
                     double delta, double p) {
    const double a1 = 1.0 - delta / (2.0 * p);
    const double a3 = 1.0 - delta / p;
    const double a4 = 0.5 - delta / (2.0 * p);
    const double a5 = 0.25;  // vartheta = 1/4
    return C1 * std::tgamma(a1) / std::pow(lam, a1) + C2 / lam +
           C3 * std::tgamma(a3) / std::pow(lam, a3) + C4 * std::tgamma(a4) / std::pow(lam, a4) +
           C5 * std::tgamma(a5) / std::pow(lam, a5);
}

}  // namespace

double FieldPath::sup_norm() const {
    double s = 0.0;
    for (double v : values) s = std::max(s, std::fabs(v));
    return s;
}

int FieldPath::first_exit(double level, double p) const {
    for (int i = 0; i <= tg.n_steps; ++i) {
        if (lp_norm(slice_vec(i), sg.h, p) >= level) return i;
    }
    return -1;
}

LambdaChoice choose_lambda(const ModelParams& params, const NoiseCoefficient& g,
                           const TruncationLevel& trunc) {
    const double n2 = 2.0 * trunc.n;
    const double d = params.delta;
    const double C1 = 2.0 * params.beta * (1.0 + params.gamma) * (d + 1.0) * std::pow(n2, d);
    const double C2 = 2.0 * params.beta * params.gamma;
    const double C3 = 2.0 * params.beta * (2.0 * d + 1.0) * std::pow(n2, 2.0 * d);
    const double C4 = 2.0 * params.alpha * std::pow(n2, d);
    const double C5 = 2.0 * g.lipschitz_L;

    double lo = 1e-6, hi = 1e-6;
    while (bracket_value(hi, C1, C2, C3, C4, C5, d, trunc.p) > 0.5 && hi < 1e18) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (bracket_value(mid, C1, C2, C3, C4, C5, d, trunc.p) > 0.5)
            lo = mid;
        else
            hi = mid;
    }
    LambdaChoice choice;
    choice.bisect = hi;
    choice.used = std::clamp(choice.bisect, 4.0 / params.T, 20.0 / params.T);
    return choice;
}

double weighted_time_norm(const FieldPath& a, const FieldPath& b, double p, double lambda) {
    const int n = a.tg.n_steps;
    const int m = a.sg.m;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        double sp = 0.0;
        const double* av = a.slice(i);
        const double* bv = b.slice(i);
        for (int j = 0; j < m; ++j) sp += std::pow(std::fabs(av[j] - bv[j]), p);
        acc += std::exp(-lambda * a.tg.node(i)) * a.sg.h * sp;
    }
    return std::pow(a.tg.dt * acc, 1.0 / p);
}

FieldPath apply_A(const FieldPath& u, const NoiseSheet& sheet, const ModelParams& params,
                  const NoiseCoefficient& g, const TruncationLevel& trunc,
                  const KernelTable& table) {
    const TimeGrid& tg = table.time_grid();
    const SpatialGrid& sg = table.spatial_grid();
    if (u.tg != tg || u.sg != sg || sheet.tg != tg || sheet.sg != sg)
        throw std::invalid_argument("apply_A: field/sheet grids do not match the kernel table");
    const int n = tg.n_steps;
    const int m = sg.m;
    for (int i = 0; i <= n; ++i) check_finite_slice(u.slice(i), m, i, tg.node(i));

    MatrixXd C(m, n), P(m, n), W(m, n);
    for (int k = 0; k < n; ++k) {
        SliceSources s = slice_sources(u.slice(k), k, &sheet, params, g, &trunc, nullptr, tg, sg);
        C.col(k) = s.c;
        P.col(k) = s.p;
        W.col(k) = s.w;
    }
    MatrixXd out = smoothed_initial(u.u0, table);
    const double adv = params.alpha / (params.delta + 1.0);
    for (int d = 1; d <= n; ++d) {
        const int cols = n - d + 1;
        const double wd = table.drift_weight(d);
        out.block(0, d, m, cols).noalias() +=
            (params.beta * wd) * (table_block(table.cell_mid(d), m) * C.block(0, 0, m, cols));
        out.block(0, d, m, cols).noalias() +=
            (adv * wd) * (table_block(table.flux_mid(d), m) * P.block(0, 0, m, cols));
        out.block(0, d, m, cols).noalias() +=
            table_block(table.point_int(d), m) * W.block(0, 0, m, cols);
    }
    FieldPath f = matrix_to_field(out, tg, sg, u.u0);
    f.meta = u.meta;
    return f;
}

std::pair<FieldPath, PicardTrace> picard_solve(const std::vector<double>& u0,
                                               const NoiseSheet& sheet, const ModelParams& params,
                                               const NoiseCoefficient& g, const PicardConfig& cfg,
                                               const KernelTable& table) {
    cfg.trunc.validate(params.delta);
    if (cfg.max_iters < 1) throw std::invalid_argument("picard_solve: max_iters >= 1");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("picard_solve: tol > 0");
    const TimeGrid& tg = table.time_grid();
    const SpatialGrid& sg = table.spatial_grid();
    if (static_cast<int>(u0.size()) != sg.m)
        throw std::invalid_argument("picard_solve: u0 size does not match the grid");

    PicardTrace trace;
    if (cfg.lambda_mode == PicardConfig::LambdaMode::Auto) {
        LambdaChoice lc = choose_lambda(params, g, cfg.trunc);
        trace.lambda_bisect = lc.bisect;
        trace.lambda_used = lc.used;
    } else {
        trace.lambda_bisect = cfg.lambda;
        trace.lambda_used = cfg.lambda;
    }
    const double lambda = trace.lambda_used;
    const double p = cfg.trunc.p;

    FieldPath zero(tg, sg);
    FieldPath cur = matrix_to_field(smoothed_initial(u0, table), tg, sg, u0);
    cur.meta.scheme = "picard";
    cur.meta.seed = sheet.seed;
    cur.meta.trunc_n = cfg.trunc.n;
    cur.meta.trunc_p = cfg.trunc.p;
    cur.meta.lambda = lambda;

    for (int it = 1; it <= cfg.max_iters; ++it) {
        FieldPath next = apply_A(cur, sheet, params, g, cfg.trunc, table);
        const double res = weighted_time_norm(next, cur, p, lambda);
        trace.residuals.push_back(res);
        trace.iterations = it;
        const double scale = 1.0 + weighted_time_norm(cur, zero, p, lambda);
        cur = std::move(next);
        if (res < cfg.tol * scale) {
            trace.converged = true;
            break;
        }
    }
    return {std::move(cur), std::move(trace)};
}

FieldPath mild_solve(const std::vector<double>& u0, const NoiseSheet& sheet,
                     const ModelParams& params, const NoiseCoefficient& g,
                     const TruncationLevel& trunc, const KernelTable& table) {
    trunc.validate(params.delta);
    const TimeGrid& tg = table.time_grid();
    const SpatialGrid& sg = table.spatial_grid();
    if (sheet.tg != tg || sheet.sg != sg)
        throw std::invalid_argument("mild_solve: sheet grids do not match the kernel table");
    if (static_cast<int>(u0.size()) != sg.m)
        throw std::invalid_argument("mild_solve: u0 size does not match the grid");
    const int n = tg.n_steps;
    const int m = sg.m;

    MatrixXd out = smoothed_initial(u0, table);
    const double adv = params.alpha / (params.delta + 1.0);
    // slice k is final once every k' < k has scattered; scatter k forward
    for (int k = 0; k < n; ++k) {
        check_finite_slice(out.col(k).data(), m, k, tg.node(k));
        SliceSources s =
            slice_sources(out.col(k).data(), k, &sheet, params, g, &trunc, nullptr, tg, sg);
        for (int d = 1; d + k <= n; ++d) {
            const double wd = table.drift_weight(d);
            out.col(k + d).noalias() +=
                (params.beta * wd) * (table_block(table.cell_mid(d), m) * s.c);
            out.col(k + d).noalias() += (adv * wd) * (table_block(table.flux_mid(d), m) * s.p);
            out.col(k + d).noalias() += table_block(table.point_int(d), m) * s.w;
        }
    }
    check_finite_slice(out.col(n).data(), m, n, tg.T);
    FieldPath f = matrix_to_field(out, tg, sg, u0);
    f.meta.scheme = "mild-direct";
    f.meta.seed = sheet.seed;
    f.meta.trunc_n = trunc.n;
    f.meta.trunc_p = trunc.p;
    return f;
}

std::pair<FieldPath, StoppingRecord> global_solve(const std::vector<double>& u0,
                                                  const NoiseSheet& sheet,
                                                  const ModelParams& params,
                                                  const NoiseCoefficient& g,
                                                  const PicardConfig& base_cfg,
                                                  const std::vector<double>& n_schedule,
                                                  const KernelTable& table) {
    if (n_schedule.empty()) throw std::invalid_argument("global_solve: empty truncation schedule");
    for (std::size_t i = 1; i < n_schedule.size(); ++i)
        if (!(n_schedule[i] > n_schedule[i - 1]))
            throw std::invalid_argument("global_solve: schedule must be increasing");

    StoppingRecord rec;
    FieldPath path;
    const TimeGrid& tg = table.time_grid();
    for (double level : n_schedule) {
        PicardConfig cfg = base_cfg;
        cfg.trunc.n = level;
        rec.levels.push_back(level);
        double tau = tg.T;
        bool exited = false;
        try {
            auto [field, trace] = picard_solve(u0, sheet, params, g, cfg, table);
            path = std::move(field);
            const int idx = path.first_exit(level, cfg.trunc.p);
            if (idx >= 0) {
                tau = tg.node(idx);
                exited = true;
            }
        } catch (const BlowupError& b) {
            tau = b.time;
            exited = true;
        }
        rec.tau_levels.push_back(tau);
        rec.tau_n = tau;
        rec.achieved_n = level;
        if (!exited) {
            rec.capped = false;
            return {std::move(path), std::move(rec)};
        }
    }
    rec.capped = true;
    return {std::move(path), std::move(rec)};
}

FieldPath galerkin_solve(const std::vector<double>& u0, const NoiseSheet& sheet,
                         const ModelParams& params, const NoiseCoefficient& g,
                         const GalerkinConfig& cfg) {
    const TimeGrid& tg = sheet.tg;
    const SpatialGrid& sg = sheet.sg;
    const int n = tg.n_steps;
    const int m = sg.m;
    const int K = cfg.n_modes;
    if (K < 1 || K > m) throw std::invalid_argument("galerkin_solve: need 1 <= n_modes <= m");
    if (static_cast<int>(u0.size()) != m)
        throw std::invalid_argument("galerkin_solve: u0 size does not match the grid");

    MatrixXd S(m, K), Scos(m, K);
    VectorXd decay(K);
    for (int k = 0; k < K; ++k) {
        const double kk = (k + 1) * kPi;
        for (int j = 0; j < m; ++j) {
            S(j, k) = std::sqrt(2.0) * std::sin(kk * sg.node(j));
            Scos(j, k) = std::sqrt(2.0) * kk * std::cos(kk * sg.node(j));
        }
        // exact exponential propagation of the stiff linear part, or the
        // rational implicit-Euler factor when semi_implicit is cleared
        decay[k] = cfg.semi_implicit ? std::exp(-params.nu * kk * kk * tg.dt)
                                     : 1.0 / (1.0 + params.nu * kk * kk * tg.dt);
    }

    FieldPath f(tg, sg);
    f.u0 = u0;
    f.meta.scheme = "galerkin";
    f.meta.seed = sheet.seed;

    VectorXd a = sg.h * (S.transpose() * Eigen::Map<const VectorXd>(u0.data(), m));
    VectorXd u = Eigen::Map<const VectorXd>(u0.data(), m);
    for (int j = 0; j < m; ++j) f.at(0, j) = u0[j];
    const double adv = params.alpha / (params.delta + 1.0);
    VectorXd cvec(m), pvec(m), gdW(m);
    for (int i = 0; i < n; ++i) {
        const double t = tg.node(i);
        for (int j = 0; j < m; ++j) {
            const double uj = u[j];
            cvec[j] = reaction_expanded(uj, params.gamma, params.delta);
            pvec[j] = advection_nonlinearity(uj, params.delta);
            gdW[j] = g(t, sg.node(j), uj) * sheet(i, j);
        }
        VectorXd drift = params.beta * (sg.h * (S.transpose() * cvec)) +
                         adv * (sg.h * (Scos.transpose() * pvec));
        VectorXd noise = S.transpose() * gdW;
        a = (decay.array() * (a + tg.dt * drift + noise).array()).matrix();
        u.noalias() = S * a;
        for (int j = 0; j < m; ++j) {
            if (!std::isfinite(u[j])) throw BlowupError(i + 1, tg.node(i + 1));
            f.at(i + 1, j) = u[j];
        }
    }
    return f;
}

FieldPath stochastic_convolution(const NoiseSheet& sheet, const FieldPath& base,
                                 const NoiseCoefficient& g, const KernelTable& table) {
    const TimeGrid& tg = table.time_grid();
    const SpatialGrid& sg = table.spatial_grid();
    if (base.tg != tg || base.sg != sg || sheet.tg != tg || sheet.sg != sg)
        throw std::invalid_argument("stochastic_convolution: grid mismatch");
    const int n = tg.n_steps;
    const int m = sg.m;
    MatrixXd W(m, n);
    for (int k = 0; k < n; ++k) {
        const double t = tg.node(k);
        for (int j = 0; j < m; ++j) W(j, k) = g(t, sg.node(j), base.at(k, j)) * sheet(k, j);
    }
    MatrixXd out = MatrixXd::Zero(m, n + 1);
    for (int d = 1; d <= n; ++d)
        out.block(0, d, m, n - d + 1).noalias() +=
            table_block(table.point_int(d), m) * W.block(0, 0, m, n - d + 1);
    FieldPath f = matrix_to_field(out, tg, sg, std::vector<double>(m, 0.0));
    f.meta.scheme = "stochastic-convolution";
    f.meta.seed = sheet.seed;
    return f;
}

FieldPath transformed_solve(const std::vector<double>& u0, const FieldPath& phi,
                            const ModelParams& params, const KernelTable& table,
                            const TransformedOptions& opts) {
    const TimeGrid& tg = table.time_grid();
    const SpatialGrid& sg = table.spatial_grid();
    if (phi.tg != tg || phi.sg != sg)
        throw std::invalid_argument("transformed_solve: phi grids do not match the kernel table");
    const int n = tg.n_steps;
    const int m = sg.m;
    const double adv = params.alpha / (params.delta + 1.0);
    ModelParams p = params;
    NoiseCoefficient no_noise;  // unused by the drift-only sources

    auto drift_sweep = [&](const MatrixXd& vcols) {
        MatrixXd out = smoothed_initial(u0, table);
        MatrixXd C(m, n), P(m, n);
        for (int k = 0; k < n; ++k) {
            SliceSources s =
                slice_sources(vcols.col(k).data(), k, nullptr, p, no_noise, nullptr, phi.slice(k), tg, sg);
            C.col(k) = s.c;
            P.col(k) = s.p;
        }
        for (int d = 1; d <= n; ++d) {
            const int cols = n - d + 1;
            const double wd = table.drift_weight(d);
            out.block(0, d, m, cols).noalias() +=
                (p.beta * wd) * (table_block(table.cell_mid(d), m) * C.block(0, 0, m, cols));
            out.block(0, d, m, cols).noalias() +=
                (adv * wd) * (table_block(table.flux_mid(d), m) * P.block(0, 0, m, cols));
        }
        return out;
    };

    MatrixXd v;
    if (opts.use_picard) {
        v = smoothed_initial(u0, table);
        bool converged = false;
        for (int it = 0; it < opts.max_iters; ++it) {
            MatrixXd next = drift_sweep(v);
            if (!next.allFinite()) throw BlowupError(n, tg.T);
            const double res = (next - v).cwiseAbs().maxCoeff();
            const double scale = 1.0 + v.cwiseAbs().maxCoeff();
            v = std::move(next);
            if (res < opts.tol * scale) {
                converged = true;
                break;
            }
        }
        if (!converged) throw std::runtime_error("transformed_solve: Picard did not converge at cap");
    } else {
        v = smoothed_initial(u0, table);
        for (int k = 0; k < n; ++k) {
            check_finite_slice(v.col(k).data(), m, k, tg.node(k));
            SliceSources s =
                slice_sources(v.col(k).data(), k, nullptr, p, no_noise, nullptr, phi.slice(k), tg, sg);
            for (int d = 1; d + k <= n; ++d) {
                const double wd = table.drift_weight(d);
                v.col(k + d).noalias() += (p.beta * wd) * (table_block(table.cell_mid(d), m) * s.c);
                v.col(k + d).noalias() += (adv * wd) * (table_block(table.flux_mid(d), m) * s.p);
            }
        }
        check_finite_slice(v.col(n).data(), m, n, tg.T);
    }
    FieldPath f = matrix_to_field(v, tg, sg, u0);
    f.meta.scheme = "transformed";
    return f;
}

}  // namespace sgbh
