#include "pcube/zoo.hpp"

namespace pcube {

const std::vector<ZooInstance>& zoo_catalog() {
    static const std::vector<ZooInstance> catalog = {
        {"dictator_n5", "dictator:i=1", 5, true},
        {"and_n3", "and", 3, true},
        {"or_n3", "or", 3, true},
        {"majority_n5", "majority", 5, true},
        {"parity_n4", "parity", 4, false},
        {"tribes_s2_w2", "tribes:s=2,w=2", 4, true},
        {"tribes_s2_w3", "tribes:s=2,w=3", 6, true},
        {"tribes_s3_w3", "tribes:s=3,w=3", 9, true},
        {"antitribes_s2_w2", "antitribes:s=2,w=2", 4, true},
        {"antitribes_s2_w3", "antitribes:s=2,w=3", 6, true},
        {"antitribes_s3_w2", "antitribes:s=3,w=2", 6, true},
        {"antitribes_s4_w3", "antitribes:s=4,w=3", 12, true},
        {"antitribes_s7_w2", "antitribes:s=7,w=2", 14, true},
        {"antitribes_s5_w3", "antitribes:s=5,w=3", 15, true},
        {"antitribes_pinned_s2_w3_t2", "antitribes_pinned:s=2,w=3,t=2", 8, true},
        {"hamming_ball_n7", "hamming_ball:alpha=0.3", 7, true},
        {"hamming_ball_n9", "hamming_ball:alpha=0.5", 9, true},
    };
    return catalog;
}

std::vector<ZooInstance> zoo_instances(int max_n, bool monotone_only) {
    std::vector<ZooInstance> out;
    for (const auto& inst : zoo_catalog())
        if (inst.n <= max_n && (!monotone_only || inst.monotone)) out.push_back(inst);
    return out;
}

CubeFunction zoo_build(const ZooInstance& inst, double p) {
    return generate(BiasedCube::make(inst.n, p), inst.spec);
}

}  // namespace pcube
