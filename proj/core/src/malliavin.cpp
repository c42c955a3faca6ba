#include "sgbh/malliavin.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace sgbh {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using CMap = Eigen::Map<const MatrixXd>;

CMap table_block(const double* ptr, int m) { return CMap(ptr, m, m); }

// Truncated base slices plus the frozen linearization coefficients.
struct FrozenCoefficients {
    MatrixXd state;  // pi_n u, columns = time slices 0..N
    MatrixXd R;      // reaction linearization
    MatrixXd P;      // (pi_n u)^delta
    MatrixXd M;      // dg/dr along the path
};

FrozenCoefficients freeze(const FieldPath& base, const ModelParams& params,
                          const NoiseCoefficient& g, const TruncationLevel& trunc) {
    const int n = base.tg.n_steps;
    const int m = base.sg.m;
    trunc.validate(params.delta);
    FrozenCoefficients fz;
    fz.state.resize(m, n + 1);
    fz.R.resize(m, n + 1);
    fz.P.resize(m, n + 1);
    fz.M.resize(m, n + 1);
    const double ga = params.gamma;
    const int de = params.delta;
    for (int i = 0; i <= n; ++i) {
        std::vector<double> slice = base.slice_vec(i);
        const double norm = lp_norm(slice, base.sg.h, trunc.p);
        if (norm >= trunc.n)
            throw LocalizationError("base path exits the localization ball ||u||_p >= n at t = " +
                                    std::to_string(base.tg.node(i)));
        // inside the ball pi_n is the identity; keep the truncated value anyway
        std::vector<double> pu = truncate_field(slice, trunc, base.sg);
        const double t = base.tg.node(i);
        for (int j = 0; j < m; ++j) {
            const double u = pu[j];
            const double ud = int_pow(u, de);
            fz.state(j, i) = u;
            fz.R(j, i) = (1.0 + ga) * (de + 1.0) * ud - ga - (2.0 * de + 1.0) * int_pow(u, 2 * de);
            fz.P(j, i) = ud;
            fz.M(j, i) = g.d_dr(t, base.sg.node(j), u);
        }
    }
    return fz;
}

// Forward solve of the linearized Volterra equation given the source columns
// (already zero for i <= r).
MatrixXd solve_linearized(MatrixXd cols, const FrozenCoefficients& fz, const NoiseSheet& sheet,
                          const ModelParams& params, int r_index, const KernelTable& table) {
    const int n = table.time_grid().n_steps;
    const int m = table.spatial_grid().m;
    VectorXd rc(m), pc(m), wc(m);
    for (int k = r_index; k < n; ++k) {
        const double* dk = cols.col(k).data();
        for (int j = 0; j < m; ++j) {
            const double d = dk[j];
            rc[j] = fz.R(j, k) * d;
            pc[j] = fz.P(j, k) * d;
            wc[j] = fz.M(j, k) * d * sheet(k, j);
        }
        for (int d = 1; d + k <= n; ++d) {
            const double wd = table.drift_weight(d);
            cols.col(k + d).noalias() +=
                (params.beta * wd) * (table_block(table.cell_mid(d), m) * rc);
            cols.col(k + d).noalias() +=
                (params.alpha * wd) * (table_block(table.flux_mid(d), m) * pc);
            cols.col(k + d).noalias() += table_block(table.point_int(d), m) * wc;
        }
    }
    return cols;
}

void check_source_cell(const FieldPath& base, int r_index, int z_index) {
    if (r_index < 0 || r_index >= base.tg.n_steps)
        throw std::out_of_range("malliavin: r_index out of range");
    if (z_index < 0 || z_index >= base.sg.m)
        throw std::out_of_range("malliavin: z_index out of range");
}

}  // namespace

DerivativeField derivative_solve(const FieldPath& base, const NoiseSheet& sheet,
                                 const ModelParams& params, const NoiseCoefficient& g,
                                 const TruncationLevel& trunc, int r_index, int z_index,
                                 const KernelTable& table) {
    check_source_cell(base, r_index, z_index);
    const int n = base.tg.n_steps;
    const int m = base.sg.m;
    FrozenCoefficients fz = freeze(base, params, g, trunc);
    const double gval = g(base.tg.node(r_index), base.sg.node(z_index), fz.state(z_index, r_index));

    MatrixXd cols = MatrixXd::Zero(m, n + 1);
    for (int i = r_index + 1; i <= n; ++i) {
        const double* G = table.point_int(i - r_index);
        for (int j = 0; j < m; ++j) cols(j, i) = G[z_index * m + j] * gval;
    }
    cols = solve_linearized(std::move(cols), fz, sheet, params, r_index, table);

    DerivativeField out;
    out.r_index = r_index;
    out.z_index = z_index;
    out.tg = base.tg;
    out.sg = base.sg;
    out.values.resize(static_cast<std::size_t>(n + 1) * m);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j < m; ++j) out.at(i, j) = cols(j, i);
    return out;
}

DerivativeField fd_oracle(const std::vector<double>& u0, const NoiseSheet& sheet,
                          const ModelParams& params, const NoiseCoefficient& g,
                          const TruncationLevel& trunc, int r_index, int z_index, double epsilon,
                          const KernelTable& table, bool central) {
    if (epsilon == 0.0) throw std::invalid_argument("fd_oracle: epsilon must be nonzero");
    const double cell = epsilon * sheet.tg.dt * sheet.sg.h;
    FieldPath up = mild_solve(u0, bump_sheet(sheet, r_index, z_index, epsilon), params, g, trunc, table);
    FieldPath um = central
                       ? mild_solve(u0, bump_sheet(sheet, r_index, z_index, -epsilon), params, g,
                                    trunc, table)
                       : mild_solve(u0, sheet, params, g, trunc, table);
    const double denom = central ? 2.0 * cell : cell;

    DerivativeField out;
    out.r_index = r_index;
    out.z_index = z_index;
    out.epsilon = epsilon;
    out.tg = sheet.tg;
    out.sg = sheet.sg;
    out.values.resize(up.values.size());
    for (std::size_t k = 0; k < up.values.size(); ++k)
        out.values[k] = (up.values[k] - um.values[k]) / denom;
    return out;
}

IntegratedDerivative integrated_derivative(const FieldPath& base, const NoiseSheet& sheet,
                                           const ModelParams& params, const NoiseCoefficient& g,
                                           const TruncationLevel& trunc, int r_index,
                                           double a_prime, double b_prime,
                                           const KernelTable& table) {
    check_source_cell(base, r_index, 0);
    if (!(a_prime < b_prime) || !(a_prime > 0.0) || !(b_prime < 1.0))
        throw std::invalid_argument("integrated_derivative: need 0 < a' < b' < 1");
    const int n = base.tg.n_steps;
    const int m = base.sg.m;
    const double h = base.sg.h;
    int z_lo = -1, z_hi = -1;
    for (int j = 0; j < m; ++j) {
        const double y = base.sg.node(j);
        if (y >= a_prime - 1e-12 && y <= b_prime + 1e-12) {
            if (z_lo < 0) z_lo = j;
            z_hi = j;
        }
    }
    if (z_lo < 0) throw std::invalid_argument("integrated_derivative: [a', b'] contains no z-cell");

    FrozenCoefficients fz = freeze(base, params, g, trunc);
    const double tr = base.tg.node(r_index);
    std::vector<double> gvals(m, 0.0);
    for (int z = z_lo; z <= z_hi; ++z) gvals[z] = g(tr, base.sg.node(z), fz.state(z, r_index));

    MatrixXd cols = MatrixXd::Zero(m, n + 1);
    for (int i = r_index + 1; i <= n; ++i) {
        const double* G = table.point_int(i - r_index);
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int z = z_lo; z <= z_hi; ++z) s += G[z * m + j] * gvals[z];
            cols(j, i) = h * s;
        }
    }
    cols = solve_linearized(std::move(cols), fz, sheet, params, r_index, table);

    IntegratedDerivative out;
    out.r_index = r_index;
    out.a = a_prime;
    out.b = b_prime;
    out.z_lo = z_lo;
    out.z_hi = z_hi;
    out.tg = base.tg;
    out.sg = base.sg;
    out.values.resize(static_cast<std::size_t>(n + 1) * m);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j < m; ++j) out.at(i, j) = cols(j, i);
    return out;
}

PositivityStats positivity_fraction(const IntegratedDerivative& v, double s_lo, double s_hi,
                                    double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("positivity_fraction: threshold >= 0");
    PositivityStats st;
    std::vector<double> vals;
    for (int i = 0; i <= v.tg.n_steps; ++i) {
        const double t = v.tg.node(i);
        if (t <= s_lo || t > s_hi + 1e-12) continue;
        for (int j = 0; j < v.sg.m; ++j) vals.push_back(v.at(i, j));
    }
    st.count = static_cast<long>(vals.size());
    if (vals.empty()) return st;
    long pos = 0;
    double mn = vals[0];
    for (double x : vals) {
        if (x > threshold) ++pos;
        mn = std::min(mn, x);
    }
    st.fraction = static_cast<double>(pos) / vals.size();
    st.min_value = mn;
    std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
    st.median_value = vals[vals.size() / 2];
    return st;
}

}  // namespace sgbh
