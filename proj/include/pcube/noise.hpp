#pragma once
// Noise smoothing on the biased cube and the directed operator that couples
// two biases.
//
// T_rho keeps each coordinate with probability rho and otherwise resamples it
// from mu_p; spectrally it multiplies fhat(S) by rho^|S|.
//
// The directed operator T(p->q), for 0 < p < q < 1, conditions on the larger-
// bias end of the monotone coupling in which x_i <= y_i always, x ~ mu_p and
// y ~ mu_q coordinatewise independently.  The single-coordinate kernel it
// induces is Pr[x_i=1 | y_i=1] = p/q and Pr[x_i=1 | y_i=0] = 0; the adjoint
// conditions the other way (Pr[y_i=1 | x_i=0] = (q-p)/(1-p)).  Composing the
// adjoint with the operator reduces to T_rho at rho = p(1-q)/(q(1-p)).
//
// Tables produced for a bias above 1/2 are returned raw rather than as
// CubeFunction (the cube type keeps p <= 1/2).

#include <random>
#include <utility>

#include "pcube/cube.hpp"
#include "pcube/influence.hpp"

namespace pcube {

CubeFunction apply_noise(const CubeFunction& f, double rho);          // spectral path
CubeFunction apply_noise_kernel(const CubeFunction& f, double rho);   // full 4^n enumeration, n <= 12

// Per-coordinate kernel passes at an arbitrary bias in (0,1); used where the
// spectral route is unavailable.
std::vector<double> noise_passes(const std::vector<double>& table, int n, double bias, double rho);

double noise_stability(const CubeFunction& f, double rho);            // sum_S rho^|S| fhat(S)^2
double noise_stability_direct(const CubeFunction& f, double rho);     // <f, T_rho f> via passes
double stability_at(const CubeFunction& f, double bias, double rho);  // same at any bias in (0,1)

struct NoiseSensitivityReport {
    double rho = 0.0, eps = 0.0;
    double r_real = 0.0;       // log(2/eps)/log(1/rho)
    int r = 0;                 // restriction budget actually scanned
    double delta = 0.0;        // 10^{-3 r_real - 1} eps^3
    bool hypothesis_global = false;
    bool hypothesis_sparse = false;   // mu_p(f) < delta
    bool hypotheses_met = false;
    double mu = 0.0, stab = 0.0, bound = 0.0;  // bound = eps * mu
    bool conclusion_holds = false;
    GlobalnessReport globalness;
};

// Small-stability criterion for global sparse functions.
NoiseSensitivityReport noise_sensitivity_check(const CubeFunction& f, double rho, double eps);

struct DirectedOperator {
    double p = 0.0, q = 0.0;
    static DirectedOperator make(double p, double q);   // 0 < p < q < 1
    double rho() const;                                 // p(1-q)/(q(1-p))
};

// f lives on bias p; the result table lives on bias q.
std::vector<double> directed_apply(const CubeFunction& f, const DirectedOperator& d);
// g lives on bias q; the result table lives on bias p.
std::vector<double> directed_coapply(const std::vector<double>& g_on_q, int n, const DirectedOperator& d);

// <T(p->q) f, g>_{mu_q} for tables on the respective biases.
double directed_inner(const CubeFunction& f, const std::vector<double>& g_on_q, const DirectedOperator& d);

// max |adjoint(directed(f)) - T_rho f| over the cube.
double calcrho_identity_check(const CubeFunction& f, double q);

// Seeded sampler for the monotone coupling; emitted pairs satisfy x <= y.
struct CoupledSampler {
    DirectedOperator d;
    int n = 0;
    std::mt19937_64 rng;

    CoupledSampler(DirectedOperator d, int n, std::uint64_t seed);
    std::pair<mask_t, mask_t> sample();   // (x, y)
};

}  // namespace pcube
