#pragma once
// Low-degree spectral concentration for global sparse functions, and witness
// searches for the isoperimetric statements they sharpen.

#include <string>

#include "pcube/cube.hpp"
#include "pcube/influence.hpp"

namespace pcube {

SpectralForm truncate(const SpectralForm& F, int r);   // zero out |S| > r
CubeFunction low_degree_part(const CubeFunction& f, int r);

struct WarmupReport {
    int r = 0;
    double lhs = 0.0;    // ||f^{<=r}||_2^2
    double rhs = 0.0;    // 3^r mu(f)^{3/2}
    double margin = 0.0;
};

// Uniform-cube warm-up bound; requires p = 1/2 and boolean f.
WarmupReport warmup_check(const CubeFunction& f, int r);

struct ConcentrationReport {
    int r = 0;
    double delta = 0.0;
    double low_mass = 0.0;     // ||f^{<=r}||_2^2
    // Influence-driven variant: delta0 is the witnessed max I_S(f^{<=r}),
    // |S| <= r; bound is 5^r delta0^{1/3} E[f^2].
    double delta0 = 0.0;
    double bound_influence = 0.0;
    bool pass_influence = false;
    // Globalness-driven variant: needs (r,delta)-globalness and mu < delta;
    // bound is 10^r delta^{1/3} mu(f).
    bool hyp_global = false;
    bool hyp_sparse = false;
    bool hyp_met = false;
    double bound_global = 0.0;
    bool pass_global = false;
};

// Both spectral-concentration bounds on one function; the globalness-driven
// conclusion is only asserted when its hypotheses hold.
ConcentrationReport concentration_check(const CubeFunction& f, int r, double delta);

struct NormTruncateReport {
    int r = 0;
    double delta = 0.0;   // must dominate max nonempty I_S(f^{<=r}), |S| <= r
    double lhs = 0.0;     // ||f^{<=r}||_2^2
    double rhs = 0.0;     // mu(f)^2 + 5^{r-1} delta^{1/3} sigma^2 I[f]
    double margin = 0.0;
};

NormTruncateReport normtruncate_check(const CubeFunction& f, int r, double delta);

struct RestrictionWitness {
    double K = 0.0;
    double C_trial = 0.0;
    int size_bound = 0;
    bool hypothesis_met = false;   // p I[f] < K mu(f)
    double hyp_lhs = 0.0, hyp_rhs = 0.0;
    mask_t witness = 0;            // best restriction J
    double witness_measure = 0.0;  // mu_p(f_{J->1})
    double threshold = 0.0;        // e^{-C_trial K}
    bool pass = false;
    // Smallest c such that some |J| <= cK reaches measure e^{-cK}.
    double min_constant = 0.0;
};

// Searches restrictions up to size C_trial*K for a near-constant subcube.
RestrictionWitness kahn_kalai_variant_search(const CubeFunction& f, double K, double C_trial);

struct InfluenceWitness {
    double K = 0.0;
    int size_bound = 0;            // ceil(2K), capped at n
    bool hypothesis_met = false;   // p I[f] <= K mu (1 - mu)
    double hyp_lhs = 0.0, hyp_rhs = 0.0;
    mask_t witness = 0;
    double witness_influence = 0.0;
    double threshold = 0.0;        // 5^{-8K}
    bool pass = false;
    // Monotone refinement: best restriction bump within the same size bound,
    // with the empirical constants it certifies.
    bool monotone = false;
    mask_t bump_witness = 0;
    double bump = 0.0;             // mu(f_{J->1}) - mu(f)
    double bump_size_constant = 0.0;   // |J| / K
    double bump_decay_constant = 0.0;  // -ln(bump) / K
};

// Searches for a large generalized influence on a set of O(K) coordinates.
InfluenceWitness bourgain_witness_search(const CubeFunction& f, double K);

struct SharpnessRow {
    int t = 0;                 // restriction size
    double enumerated = 0.0;   // max over |J| = t of mu_p(f_{J->1})
    double closed_form = 0.0;
    double ratio_bound = 0.0;  // 2^{t/s} mu_p(f)
    bool within_ratio_bound = false;
};

struct SharpnessTable {
    std::string example;
    int s = 0, w = 0, pinned = 0;
    double p = 0.0;
    double mu_closed = 0.0, mu_enum = 0.0;
    double influence_closed = 0.0, influence_enum = 0.0;
    double influence_fd = 0.0;    // central-difference d mu / d p at step 1e-6
    double K = 0.0;               // p I[f] / mu(f)
    std::vector<SharpnessRow> bump;
};

// Closed forms vs enumeration for the block-construction families.
SharpnessTable sharpness_table_blocks(const BiasedCube& c, int s, int w);
SharpnessTable sharpness_table_pinned_blocks(const BiasedCube& c, int s, int w, int t);

}  // namespace pcube
