#pragma once
// Dense exact arithmetic on the p-biased discrete cube {0,1}^n.
//
// A function is stored as a table of 2^n doubles.  Bit i of a table index
// encodes coordinate i, so bit 0 is the first coordinate.  The biased Walsh
// basis is chi_S(x) = prod_{i in S} (x_i - p)/sigma with sigma = sqrt(p(1-p));
// it is orthonormal under the product measure mu_p.
//
// The bias p is kept in (0, 1/2].  Callers that need p > 1/2 should dualize
// (f*(x) = 1 - f(1-x)) or work with raw tables via measure_at, which accepts
// any bias in (0,1).

#include <cstdint>
#include <string>
#include <vector>

namespace pcube {

using mask_t = std::uint32_t;

// Dimension cap for freshly constructed cubes; default 24, overridable.
int dimension_cap();
void set_dimension_cap(int cap);

struct BiasedCube {
    int n = 0;
    double p = 0.5;
    double sigma = 0.5;

    // Validates 0 <= n <= dimension_cap() and 0 < p <= 1/2.  The n = 0 cube
    // (a single point) shows up as the residual of a full restriction.
    static BiasedCube make(int n, double p);

    std::size_t size() const { return std::size_t{1} << n; }
    double point_weight(mask_t x) const;   // p^|x| (1-p)^(n-|x|)
    std::vector<double> weights() const;   // all 2^n point weights
};

bool same_cube(const BiasedCube& a, const BiasedCube& b);

struct CubeFunction {
    BiasedCube cube;
    std::vector<double> values;

    CubeFunction() = default;
    CubeFunction(BiasedCube c, std::vector<double> v);
    static CubeFunction constant(const BiasedCube& c, double value);

    double operator[](mask_t x) const { return values[x]; }
    bool is_boolean(double tol = 1e-12) const;         // every value in {0,1}
    bool is_signed_boolean(double tol = 1e-12) const;  // every value in {-1,1}
    bool is_monotone() const;
    double max_abs() const;
};

struct SpectralForm {
    BiasedCube cube;
    std::vector<double> coeffs;   // coeffs[S] = fhat(S), S a subset bitmask

    int degree(double tol = 0.0) const;    // max |S| with |fhat(S)| > tol; -1 if all zero
    double energy() const;                 // sum_S fhat(S)^2
    double low_degree_energy(int r) const; // sum over |S| <= r
};

// E[f] under mu_p of the function's own cube.
double mu_measure(const CubeFunction& f);
// E[f] with the table reweighted at an arbitrary bias in (0,1).
double measure_at(const CubeFunction& f, double bias);
// L^r norm under mu_p, r >= 1.
double lr_norm(const CubeFunction& f, double r);
// E[f^k] for integer k >= 1 (exact product loop, no pow).
double moment(const CubeFunction& f, int k);
double inner_product(const CubeFunction& f, const CubeFunction& g);

SpectralForm forward_transform(const CubeFunction& f);
CubeFunction inverse_transform(const SpectralForm& F);

// f_{S -> x}: coordinates of S are fixed to the bits of `assignment` (which
// must lie inside S); the remaining coordinates are renumbered upward
// preserving order.  Same bias.
CubeFunction restrict_to(const CubeFunction& f, mask_t S, mask_t assignment);

// Named generators.  Boolean outputs are exactly 0/1.
CubeFunction make_dictator(const BiasedCube& c, int coord = 0);
CubeFunction make_and(const BiasedCube& c);
CubeFunction make_or(const BiasedCube& c);
CubeFunction make_parity(const BiasedCube& c);
CubeFunction make_majority(const BiasedCube& c);   // 1 iff 2|x| > n
// tribes: OR of ANDs over s disjoint blocks of w coordinates (s*w <= n).
CubeFunction make_tribes(const BiasedCube& c, int s, int w);
// antitribes: AND of ORs over s disjoint blocks of w coordinates.
CubeFunction make_antitribes(const BiasedCube& c, int s, int w);
// antitribes times an AND of t further coordinates (s*w + t <= n).
CubeFunction make_antitribes_pinned(const BiasedCube& c, int s, int w, int t);
// Hamming ball 1{|x| >= threshold} with threshold chosen so mu_p is closest
// to alpha; ties resolved toward the smaller threshold.
CubeFunction make_hamming_ball(const BiasedCube& c, double alpha);
int hamming_ball_threshold(const BiasedCube& c, double alpha);

// chi_S as a table (handy for tests and examples).
CubeFunction make_character(const BiasedCube& c, mask_t S);

// Spec strings: "name" or "name:k=v,k=v", e.g. "antitribes:s=2,w=3".
// Coordinate parameters (dictator's i) are 1-based in the string.
CubeFunction generate(const BiasedCube& c, const std::string& spec);
std::vector<std::string> generator_names();

}  // namespace pcube
