#pragma once

#include <stdexcept>
#include <vector>

namespace sgbh {

// Interior nodes x_j = j*h, j = 1..m, h = 1/(m+1). The Dirichlet endpoints
// x = 0 and x = 1 carry the implicit value 0 and are never stored.
struct SpatialGrid {
    int m = 0;
    double h = 0.0;

    SpatialGrid() = default;
    explicit SpatialGrid(int m_) : m(m_), h(1.0 / (m_ + 1)) {
        if (m_ < 3) throw std::invalid_argument("SpatialGrid: m must be >= 3");
    }

    // 0-based storage index j -> node x_{j+1}
    double node(int j) const { return (j + 1) * h; }

    std::vector<double> nodes() const {
        std::vector<double> xs(m);
        for (int j = 0; j < m; ++j) xs[j] = node(j);
        return xs;
    }

    bool operator==(const SpatialGrid&) const = default;
};

struct TimeGrid {
    int n_steps = 0;  // N
    double T = 0.0;
    double dt = 0.0;

    TimeGrid() = default;
    TimeGrid(int n, double horizon) : n_steps(n), T(horizon), dt(horizon / n) {
        if (n < 1) throw std::invalid_argument("TimeGrid: need at least one step");
        if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: T must be positive");
    }

    double node(int i) const { return i * dt; }

    bool operator==(const TimeGrid&) const = default;
};

}  // namespace sgbh
