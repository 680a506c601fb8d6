#pragma once

// Seeded generators shared by the test binaries.

#include <random>
#include <utility>
#include <vector>

#include "pcube/cube.hpp"

namespace testutil {

inline pcube::CubeFunction random_function(const pcube::BiasedCube& c, std::mt19937_64& rng,
                                           double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(c.size());
    for (double& x : v) x = dist(rng);
    return pcube::CubeFunction(c, std::move(v));
}

inline pcube::CubeFunction random_boolean(const pcube::BiasedCube& c, std::mt19937_64& rng,
                                          double density = 0.5) {
    std::bernoulli_distribution bit(density);
    std::vector<double> v(c.size());
    for (double& x : v) x = bit(rng) ? 1.0 : 0.0;
    return pcube::CubeFunction(c, std::move(v));
}

}  // namespace testutil
