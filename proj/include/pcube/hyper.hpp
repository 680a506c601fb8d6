#pragma once
// Fourth-moment (and general q-th moment) smoothing bounds driven by
// generalized influences, verified by exact enumeration.
//
// The hybrid device: given coefficients fhat on the p-biased characters,
// f_t denotes the same coefficients read against characters that are uniform
// on the first t coordinates and p-biased on the rest.  Norms of f_t are
// taken over the matching product measure; ||f_t||_2 is independent of t.
// The mixed smoothing operator scales fhat(S) by rho_u^|S ∩ [t]| *
// rho_b^|S \ [t]|.

#include "pcube/cube.hpp"
#include "pcube/influence.hpp"

namespace pcube {

// E[(chi^p)^4] = sigma^{-2} ((1-p)^3 + p^3); equals 1 at p = 1/2 and is
// bounded by sigma^{-2}.
double lambda_of(double p);

// Per-coordinate biases of the t-th hybrid (1/2 on [0,t), p after).
std::vector<double> hybrid_biases(const BiasedCube& c, int t);
// Product-measure point weights for arbitrary per-coordinate biases.
std::vector<double> product_weights(const std::vector<double>& biases);
// Inverse transform against per-coordinate-biased characters.
std::vector<double> eval_on_biases(const std::vector<double>& coeffs, const std::vector<double>& biases);
// E[values^k] under the product measure of the given biases.
double biased_moment(const std::vector<double>& values, const std::vector<double>& biases, int k);

// ||f_t||_r over the t-th hybrid measure (even r exact).
double hybrid_norm(const SpectralForm& F, int t, int r);
// Coefficients after the mixed smoothing operator.
std::vector<double> mixed_noise_coeffs(const SpectralForm& F, int t, double rho_u, double rho_b);

// One interpolation step at coordinate t (1-based): the fourth moment of the
// (t-1)-hybrid smoothed at (2 rho, rho) is at most the same at the t-hybrid
// plus 3 lambda rho^4 times the fourth moment of the smoothed t-hybrid of the
// t-th derivative.  Returns rhs - lhs (expected >= 0).
double replacement_step_slack(const SpectralForm& F, int t, double rho);

// Fully telescoped form: ||T_rho f||_4^4 <= sum_S (3 lambda rho^4)^|S| *
// ||T_{2rho} (D_S f)_n||_4^4 with the inner norms on the uniform cube.
// Returns the right-hand side.
double telescoped_fourth_moment_bound(const SpectralForm& F, double rho);

struct HyprefReport {
    double rho = 0.0;
    double lhs = 0.0;     // ||T_rho f||_4^4
    double middle = 0.0;  // sum_S (3 lambda rho^4)^|S| ||D_S f||_2^4
    double rhs = 0.0;     // sum_S (3 sigma^2 rho^4)^|S| I_S(f)^2
    bool pass = false;
};

// Requires rho <= 1/sqrt(12) (rejected strictly above).
HyprefReport hypref_bound_check(const CubeFunction& f, double rho);

struct SmallInfluenceSmoothingReport {
    double norm2 = 0.0;            // ||f||_2
    double beta_influences = 0.0;  // max_S I_S(f) / E[f^2], all S
    double beta_derivative = 0.0;  // max_S lambda^|S| ||D_S f||_2^2 / E[f^2]
    double lhs_fifth = 0.0;        // ||T_{1/5} f||_4
    double lhs_root24 = 0.0;       // ||T_{1/sqrt 24} f||_4
    double rhs_fifth = 0.0;        // beta_influences^{1/4} ||f||_2
    double rhs_root24 = 0.0;       // beta_derivative^{1/4} ||f||_2
    bool pass_fifth = false;
    bool pass_root24 = false;
};

// The two small-influence fourth-moment bounds, with both hypothesis
// constants witnessed exactly (the derivative variant is tighter).
SmallInfluenceSmoothingReport small_influence_smoothing_check(const CubeFunction& f);

struct PracticeReport {
    int r = 0;            // spectral degree of f
    double delta = 0.0;
    double lhs = 0.0;     // ||f||_4
    double rhs = 0.0;     // 5^{3r/4} delta^{1/4} ||f||_2^{1/2}
    bool pass = false;
};

// For low-degree f with all I_S(f) <= delta (|S| <= degree, empty set
// included); rejects delta below the witnessed maximum.
PracticeReport practice_bound_check(const CubeFunction& f, double delta);

struct MomentEnvelope {
    int q = 4;
    std::vector<double> sigmas;   // per coordinate, each in (0, 1/2]

    // sigma_i = sigma(p) for every coordinate; E|chi|^q <= sigma^{2-q} holds.
    static MomentEnvelope uniform_cube(const BiasedCube& c, int q);
    double subset_factor(mask_t S) const;   // prod_{i in S} sigma_i^{2-q}
};

struct QNormReport {
    int q = 4;
    double rho = 0.0;
    double lhs = 0.0;   // ||T_rho f||_q^q
    double rhs = 0.0;   // sum_S sigma_S^{2-q} ||D_S f||_2^q
    bool pass = false;
};

// Even q only (4, 6, 8 supported); requires rho <= (2q)^{-3/2} and a valid
// envelope for the cube's bias.
QNormReport qnorm_bound_check(const CubeFunction& f, int q, double rho, const MomentEnvelope& env);

}  // namespace pcube
