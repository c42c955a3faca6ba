#include "sgbh/presets.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sgbh {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

NoiseCoefficient make_noise_preset(const std::string& name, double sigma, double t_switch) {
    NoiseCoefficient g;
    g.name = name;
    g.sigma = sigma;
    g.t_switch = t_switch;
    if (name == "zero") {
        g.evaluate = [](double, double, double) { return 0.0; };
        g.derivative_in_r = [](double, double, double) { return 0.0; };
        g.bound_K = 0.0;
        g.lipschitz_L = 0.0;
    } else if (name == "constant") {
        g.evaluate = [sigma](double, double, double) { return sigma; };
        g.derivative_in_r = [](double, double, double) { return 0.0; };
        g.bound_K = std::fabs(sigma);
        g.lipschitz_L = 0.0;
    } else if (name == "lipschitz-sin") {
        g.evaluate = [sigma](double, double x, double r) {
            return sigma * (1.0 + 0.5 * std::sin(r)) * std::sin(kPi * x);
        };
        g.derivative_in_r = [sigma](double, double x, double r) {
            return 0.5 * sigma * std::cos(r) * std::sin(kPi * x);
        };
        g.bound_K = 1.5 * std::fabs(sigma);
        g.lipschitz_L = 0.5 * std::fabs(sigma);
    } else if (name == "switch") {
        g.evaluate = [sigma, t_switch](double t, double, double) {
            return t < t_switch ? 0.0 : sigma;
        };
        g.derivative_in_r = [](double, double, double) { return 0.0; };
        g.bound_K = std::fabs(sigma);
        g.lipschitz_L = 0.0;
    } else if (name == "one-plus-sin-x") {
        g.evaluate = [sigma](double, double x, double) { return sigma * (1.0 + std::sin(kPi * x)); };
        g.derivative_in_r = [](double, double, double) { return 0.0; };
        g.bound_K = 2.0 * std::fabs(sigma);
        g.lipschitz_L = 0.0;
    } else {
        throw std::invalid_argument("unknown noise preset: " + name);
    }
    return g;
}

std::vector<std::string> noise_preset_names() {
    return {"zero", "constant", "lipschitz-sin", "switch", "one-plus-sin-x"};
}

std::vector<double> make_initial_preset(const std::string& name, double amplitude,
                                        const SpatialGrid& grid) {
    std::vector<double> u0(grid.m, 0.0);
    if (name == "zero") {
        return u0;
    } else if (name == "constant") {
        for (int j = 0; j < grid.m; ++j) u0[j] = amplitude;
    } else if (name == "sine") {
        for (int j = 0; j < grid.m; ++j) u0[j] = amplitude * std::sin(kPi * grid.node(j));
    } else if (name == "parabola") {
        for (int j = 0; j < grid.m; ++j) {
            const double x = grid.node(j);
            u0[j] = 4.0 * amplitude * x * (1.0 - x);
        }
    } else {
        throw std::invalid_argument("unknown initial-condition preset: " + name);
    }
    return u0;
}

std::vector<std::string> initial_preset_names() { return {"zero", "constant", "sine", "parabola"}; }

std::string describe_presets() {
    std::ostringstream os;
    os << "noise presets (g(t,x,r), bounds per unit sigma):\n"
       << "  zero            g = 0                                  K = 0,         L = 0\n"
       << "  constant        g = sigma                              K = sigma,     L = 0\n"
       << "  lipschitz-sin   g = sigma*(1 + sin(r)/2)*sin(pi x)     K = 1.5*sigma, L = 0.5*sigma\n"
       << "                  (sup over r of |1 + sin(r)/2| = 3/2 by interval bound)\n"
       << "  switch          g = 0 for t < t_switch, sigma after    K = sigma,     L = 0\n"
       << "  one-plus-sin-x  g = sigma*(1 + sin(pi x))              K = 2*sigma,   L = 0\n"
       << "initial-condition presets (amplitude a):\n"
       << "  zero, constant (a), sine (a sin(pi x)), parabola (4 a x (1-x))\n";
    return os.str();
}

}  // namespace sgbh
