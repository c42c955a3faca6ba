#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sgbh/grid.hpp"

namespace sgbh {

// Coefficients of the reaction-advection-diffusion equation
//   du/dt = nu u_xx - alpha u^delta u_x + beta u (1 - u^delta)(u^delta - gamma) + g dW
// on (0,1) with homogeneous Dirichlet conditions.
struct ModelParams {
    double nu = 1.0;     // diffusion, > 0
    double alpha = 1.0;  // advection, >= 0 (0 admits the linear oracle cases)
    double beta = 1.0;   // reaction, >= 0
    double gamma = 0.5;  // reaction root, in (0,1)
    int delta = 1;       // nonlinearity degree, integer >= 1
    double T = 1.0;      // horizon, > 0

    ModelParams() = default;
    ModelParams(double nu_, double alpha_, double beta_, double gamma_, int delta_, double T_)
        : nu(nu_), alpha(alpha_), beta(beta_), gamma(gamma_), delta(delta_), T(T_) {
        validate();
    }

    void validate() const {
        if (!(nu > 0.0)) throw std::invalid_argument("ModelParams: nu must be > 0");
        if (!(alpha >= 0.0)) throw std::invalid_argument("ModelParams: alpha must be >= 0");
        if (!(beta >= 0.0)) throw std::invalid_argument("ModelParams: beta must be >= 0");
        if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("ModelParams: gamma must lie in (0,1)");
        if (delta < 1) throw std::invalid_argument("ModelParams: delta must be an integer >= 1");
        if (!(T > 0.0)) throw std::invalid_argument("ModelParams: T must be > 0");
    }
};

// Multiplicative noise coefficient g(t, x, r) with its analytic bounds:
// |g| <= bound_K and |g(t,x,r) - g(t,x,s)| <= lipschitz_L |r - s|.
// derivative_in_r may be empty; consumers fall back to central differences.
struct NoiseCoefficient {
    std::function<double(double, double, double)> evaluate;
    double bound_K = 0.0;
    double lipschitz_L = 0.0;
    std::function<double(double, double, double)> derivative_in_r;

    std::string name = "custom";  // preset echo for run metadata
    double sigma = 0.0;
    double t_switch = 0.0;

    double operator()(double t, double x, double r) const { return evaluate(t, x, r); }

    // dg/dr along the state, analytic when available, otherwise a central
    // difference with relative step 1e-6 (1 + |r|).
    double d_dr(double t, double x, double r) const {
        if (derivative_in_r) return derivative_in_r(t, x, r);
        const double eps = 1e-6 * (1.0 + std::fabs(r));
        return (evaluate(t, x, r + eps) - evaluate(t, x, r - eps)) / (2.0 * eps);
    }
};

// Radius and exponent of the L^p-ball retraction pi_n.
struct TruncationLevel {
    double n = 1.0;  // > 0
    double p = 3.0;  // >= 2 delta + 1

    void validate(int delta) const {
        if (!(n > 0.0)) throw std::invalid_argument("TruncationLevel: n must be > 0");
        if (!(p >= 2.0 * delta + 1.0))
            throw std::invalid_argument("TruncationLevel: p must be >= 2*delta + 1");
    }
};

// u^k by repeated multiplication, exact for integer k >= 0.
inline double int_pow(double u, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= u;
    return r;
}

// p(u) = u^{delta+1}
inline double advection_nonlinearity(double u, int delta) { return int_pow(u, delta + 1); }

// c(u) = u (1 - u^delta)(u^delta - gamma)
inline double reaction_nonlinearity(double u, double gamma, int delta) {
    const double ud = int_pow(u, delta);
    return u * (1.0 - ud) * (ud - gamma);
}

// (1+gamma) u^{delta+1} - gamma u - u^{2 delta + 1}; algebraically equal to c(u)
inline double reaction_expanded(double u, double gamma, int delta) {
    return (1.0 + gamma) * int_pow(u, delta + 1) - gamma * u - int_pow(u, 2 * delta + 1);
}

// Discrete L^p norm on the uniform grid, rectangle rule: (h sum |y_j|^p)^{1/p}.
double lp_norm(const std::vector<double>& y, double h, double p);

// phi_n(r) = 1 on [0, n^p] (closed right endpoint), n r^{-1/p} beyond.
double phi_n(double r, const TruncationLevel& trunc);

// pi_n y = y * phi_n(||y||_p^p): identity inside the L^p ball of radius n,
// radial retraction onto it outside.
std::vector<double> truncate_field(const std::vector<double>& y, const TruncationLevel& trunc,
                                   const SpatialGrid& grid);

// Piecewise-linear cutoff: 1 on [0,n], n+1-x on (n, n+1], 0 beyond.
double eta_n(double x, double n);

// (p_n(u), c_n(u)) = eta_n(|u|) * (u^{delta+1}, c(u))
std::pair<double, double> truncated_nonlinearities(double u, double n, double gamma, int delta);

}  // namespace sgbh
