#pragma once

// A fixed catalog of named example functions used by the test suite and the
// CLI.  Each entry records its generator spec, dimension, and monotonicity so
// sweeps can filter without rebuilding the function first.

#include <string>
#include <vector>

#include "pcube/cube.hpp"

namespace pcube {

struct ZooInstance {
    std::string id;
    std::string spec;
    int n = 0;
    bool monotone = false;
};

const std::vector<ZooInstance>& zoo_catalog();

/// Catalog entries with dimension at most max_n (monotone_only filters further).
std::vector<ZooInstance> zoo_instances(int max_n, bool monotone_only = false);

CubeFunction zoo_build(const ZooInstance& inst, double p);

}  // namespace pcube
