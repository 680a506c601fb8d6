#pragma once
// Orthogonal (Efron-Stein) decomposition of functions on finite product
// probability spaces, the matching Laplacians and smoothing operator, and the
// q-th moment bound they satisfy.
//
// A space is a list of factors, each an arity-k probability vector with
// every atom positive and the smallest atom p_t strictly below 1/2 (merge
// atoms if a factor violates this; the bound's per-factor constant is
// sigma_t = sqrt(p_t(1-p_t))).  Points are encoded in mixed radix with
// factor 0 varying fastest: index = sum_t digit_t * prod_{u<t} arity_u.

#include <cstdint>
#include <vector>

#include "pcube/cube.hpp"   // mask_t

namespace pcube {

struct Factor {
    std::vector<double> probs;
    double min_prob = 0.0;
    double sigma = 0.0;        // sqrt(min_prob (1 - min_prob))
};

struct ProductSpace {
    std::vector<Factor> factors;
    std::vector<std::size_t> strides;
    std::size_t points = 1;

    static ProductSpace make(const std::vector<std::vector<double>>& factor_probs);
    int n() const { return static_cast<int>(factors.size()); }
    std::size_t arity(int t) const { return factors[t].probs.size(); }
    int digit(std::size_t idx, int t) const {
        return static_cast<int>(idx / strides[t] % arity(t));
    }
    std::vector<double> weights() const;
};

bool same_space(const ProductSpace& a, const ProductSpace& b);

struct ProductFunction {
    ProductSpace space;
    std::vector<double> values;

    ProductFunction() = default;
    ProductFunction(ProductSpace s, std::vector<double> v);
    static ProductFunction constant(const ProductSpace& s, double value);
};

double expectation(const ProductFunction& f);
double inner_product(const ProductFunction& f, const ProductFunction& g);
double moment(const ProductFunction& f, int k);   // E[f^k]
double l2_norm(const ProductFunction& f);

// Conditional expectation over coordinate t (the result no longer depends
// on it).
ProductFunction average_out(const ProductFunction& f, int t);
// f^{subset J}: average over every coordinate outside J.
ProductFunction project_onto(const ProductFunction& f, mask_t J);
// f - E_t f.
ProductFunction laplacian_coordinate(const ProductFunction& f, int t);

struct ESDecomposition {
    ProductSpace space;
    std::vector<std::vector<double>> components;   // [S] -> table of f^{=S}
};

// Conditional averaging for every J, then Mobius inversion down the subset
// lattice.
ESDecomposition es_decompose(const ProductFunction& f);
ProductFunction es_component(const ESDecomposition& d, mask_t S);
ProductFunction es_reconstruct(const ESDecomposition& d);

// L_S f = prod_{t in S} (id - E_t) f, by passes.
ProductFunction laplacian(const ProductFunction& f, mask_t S);
// Same via the decomposition: sum_{E >= S} f^{=E}.
ProductFunction laplacian_spectral(const ESDecomposition& d, mask_t S);

// Keep each coordinate with probability rho, otherwise resample its factor.
ProductFunction product_noise(const ProductFunction& f, double rho);                  // passes
ProductFunction product_noise_spectral(const ESDecomposition& d, double rho);         // sum rho^|S| f^{=S}
ProductFunction product_noise_kernel(const ProductFunction& f, double rho);           // full kernel, small spaces

struct EsMomentReport {
    int q = 4;
    double rho = 0.0;
    double lhs = 0.0;    // ||T_rho f||_q^q
    double rhs = 0.0;    // sum_S sigma_S^{2-q} ||L_S f||_2^q
    double margin = 0.0;
    bool pass = false;
};

// Even q, rho <= 1/(8 q^{3/2}).
EsMomentReport es_moment_check(const ProductFunction& f, int q, double rho);

struct HolderTermReport {
    double lhs = 0.0;            // |E[prod f_i]|
    double rhs = 0.0;            // prod ||f_i||_2 * prod_{j>=3} sigma_{T_j}^{2-j}
    bool pass = false;
    std::vector<int> cover_count;   // how many of the S_i contain each coordinate
    bool single_cover = false;      // some coordinate covered exactly once
};

// Each f_i must depend only on the coordinates of deps[i] (verified).
HolderTermReport holder_term_check(const std::vector<ProductFunction>& fs,
                                   const std::vector<mask_t>& deps);

// E[prod_i g^{=S_i}] for components of one decomposition; vanishes whenever
// some coordinate lies in exactly one S_i.
double es_component_product(const ESDecomposition& d, const std::vector<mask_t>& sets);

}  // namespace pcube
