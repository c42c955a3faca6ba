#pragma once

#include <string>
#include <vector>

#include "sgbh/grid.hpp"
#include "sgbh/model.hpp"

namespace sgbh {

// Named noise coefficients with their analytic (K, L) bounds:
//   zero            g = 0                                K = 0,        L = 0
//   constant        g = sigma                            K = |sigma|,  L = 0
//   lipschitz-sin   g = sigma (1 + sin(r)/2) sin(pi x)   K = 1.5|s|,   L = |s|/2
//   switch          g = 0 for t < t_switch, sigma after  K = |sigma|,  L = 0
//   one-plus-sin-x  g = sigma (1 + sin(pi x))            K = 2|sigma|, L = 0
NoiseCoefficient make_noise_preset(const std::string& name, double sigma, double t_switch = 0.0);
std::vector<std::string> noise_preset_names();

// Initial-condition presets: zero, constant, sine (a sin(pi x)),
// parabola (4 a x (1-x)).
std::vector<double> make_initial_preset(const std::string& name, double amplitude,
                                        const SpatialGrid& grid);
std::vector<std::string> initial_preset_names();

// Human-readable preset listing with the (K, L) metadata.
std::string describe_presets();

}  // namespace sgbh
