#pragma once
// Discrete derivatives, generalized influences, and restriction globalness.
//
// D_S f = sigma^|S| * sum over assignments x of S of (-1)^{|S|-|x|} f_{S->x},
// kept as a function on the full cube (constant on the coordinates of S).
// I_S(f) = sigma^{-2|S|} ||D_S f||_2^2, which spectrally is
// sigma^{-2|S|} * sum_{E >= S} fhat(E)^2.  I_{emptyset}(f) = E[f^2].

#include <utility>

#include "pcube/cube.hpp"

namespace pcube {

CubeFunction derivative(const CubeFunction& f, mask_t S);

// Definitional path: alternating sum over restrictions, then the squared
// 2-norm on the remaining coordinates.  Used as the verification oracle.
double gen_influence(const CubeFunction& f, mask_t S);
// Spectral path.
double gen_influence_spectral(const SpectralForm& F, mask_t S);

// [S] -> sum_{E >= S} fhat(E)^2 for every S at once (zeta transform).
std::vector<double> superset_energy(const SpectralForm& F);

// sum_i ||f_{i->1} - f_{i->0}||_2^2; for boolean f this is
// sum_i Pr[f(x + e_i) != f(x)].
double total_influence(const CubeFunction& f);
double total_influence_spectral(const SpectralForm& F);
// Same definitional sum with the table reweighted at an arbitrary bias.
double total_influence_at(const CubeFunction& f, double bias);
// Boolean path via disagreement probabilities (independent of the above).
double flip_total_influence(const CubeFunction& f);

struct GeneralizedInfluenceTable {
    BiasedCube cube;
    int r_max = 0;
    std::vector<std::pair<mask_t, double>> entries;  // sorted by mask, |S| <= r_max

    double at(mask_t S) const;                        // throws if not materialized
    double max_influence(bool nonempty_only) const;
};

// r_max < 0 materializes the full 2^n table.
GeneralizedInfluenceTable influence_table(const CubeFunction& f, int r_max = 4);

// Smallest beta with I_S(f) <= beta E[f^2] for every |S| <= r_max
// (r_max < 0 scans all S).  Throws on E[f^2] = 0.
double beta_small_check(const CubeFunction& f, int r_max = -1);

struct GlobalnessReport {
    int r = 0;
    double delta = 0.0;
    bool is_global = false;
    double base_measure = 0.0;     // mu_p(f)
    double max_bump = 0.0;         // max over |J| <= r of mu_p(f_{J->1}) - mu_p(f)
    mask_t witness = 0;            // maximizing J
    double witness_measure = 0.0;  // mu_p(f_{J->1}) at the witness
};

// Exhaustive scan over |J| <= r.  f boolean.
GlobalnessReport globalness(const CubeFunction& f, int r, double delta);

// max over |J| == size (resp. |J| <= size) of mu_p(f_{J->1}); for monotone f
// the <= variant short-circuits to the == variant at the full size.
double max_restriction_measure(const CubeFunction& f, int size);
double max_restriction_measure_upto(const CubeFunction& f, int size);

struct LemmaCheck {
    bool applicable = false;   // hypothesis met
    double delta = 0.0;        // witnessed hypothesis constant
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;       // rhs - lhs
};

struct EquivalenceReport {
    int r = 0;
    bool monotone = false;
    // globalness + sparseness => small generalized influences (8^r delta),
    // including I_S(f^{<=r}) <= I_S(f) along the way.
    LemmaCheck sparse;
    double truncation_margin = 0.0;  // min over |S|<=r of I_S(f) - I_S(f^{<=r})
    // monotone + globalness => small influences for nonempty S.
    LemmaCheck monotone_route;
    // small influences => (r, 4^r delta)-globalness.
    LemmaCheck converse;
};

// Witnessed-delta check of the globalness/influence equivalence lemmas.
// f must be boolean; inapplicable branches are reported, not failed.
EquivalenceReport equivalence_suite(const CubeFunction& f, int r);

}  // namespace pcube
