#pragma once
// Measure-vs-bias curves, the derivative identity d mu_p / dp = I_p[f] for
// monotone boolean f, and sharp-threshold certificates.
//
// The bias here is a sweep parameter in (0,1): everything is computed from
// the raw table with reweighting, so it is not limited by the cube type's
// p <= 1/2 convention.

#include <string>
#include <vector>

#include "pcube/cube.hpp"

namespace pcube {

struct ThresholdProfile {
    std::string family;
    std::vector<std::pair<double, double>> curve;   // (p, mu_p(f))
    double p_c = 0.0;        // mu = 1/2 crossing (NaN if the curve never crosses)
    bool monotone = false;
    bool crossed = false;
    bool first_crossing_only = false;   // set when f is not monotone
};

ThresholdProfile measure_curve(const CubeFunction& f, const std::vector<double>& grid,
                               const std::string& family = "");

// p with mu_p(f) = target, by bisection to 1e-10 (monotone f).
double threshold_location(const CubeFunction& f, double target);

struct RussoReport {
    double p = 0.0, h = 0.0;
    double finite_difference = 0.0;   // (mu_{p+h} - mu_{p-h}) / 2h
    double influence = 0.0;           // I_p[f]
    double deviation = 0.0;
};

// Central-difference check of the derivative identity, monotone boolean f.
RussoReport russo_check(const CubeFunction& f, double p, double h = 1e-4);

struct MGlobalCertificate {
    int M = 0;
    double p_lo = 0.0, p_hi = 0.0;
    std::vector<double> grid;   // log-spaced biases actually checked
    bool pass = false;
    double worst_p = 0.0;
    mask_t worst_J = 0;
    double worst_excess = 0.0;  // mu_p(f_{J->1}) - mu_p(f)^{0.01}, most positive
};

// mu_p(f_{J->1}) <= mu_p(f)^{0.01} for every |J| <= M and every grid bias;
// a zero measure passes against a zero bound.
MGlobalCertificate m_global_certify(const CubeFunction& f, int M, double p_lo, double p_hi,
                                    int grid_size = 32);

struct SharpThresholdReport {
    double p = 0.0, q = 0.0;
    int M = 0;
    double C_trial = 0.0;
    MGlobalCertificate certificate;
    bool hyp_measure = false;      // mu_p(f) >= e^{-M/C}
    bool hypotheses_met = false;
    double mu_p = 0.0, mu_q = 0.0;
    double rhs = 0.0;              // mu_p^{(p/q)^{1/C}}
    bool conclusion_holds = false;
    double min_constant = 0.0;     // smallest C making the conclusion true
};

// Bootstrapped threshold comparison for M-global monotone functions.
SharpThresholdReport sharp_threshold_check(const CubeFunction& f, double p, double q, int M,
                                           double C_trial);

struct NoiseRouteReport {
    double p = 0.0, q = 0.0, eps = 0.0, C_trial = 0.0;
    double zeta = 0.0;             // q/p - 1
    double rho = 0.0;              // p(1-q)/(q(1-p))
    double mu_p = 0.0, mu_q = 0.0, stab = 0.0;
    double lower_bound = 0.0;      // mu_p^2 / Stab_rho
    bool comparison_holds = false; // mu_q >= mu_p^2 / Stab_rho
    int r = 0;
    double delta = 0.0;
    bool hyp_monotone = false, hyp_global = false, hyp_sparse = false, hypotheses_met = false;
    double amplification = 0.0;    // mu_p / eps
    bool conclusion_holds = false; // mu_q >= mu_p / eps
};

// The stability route to sharp thresholds: the unconditional two-bias
// comparison plus the global amplification statement at r = C ln(1/eps),
// delta = C^{-r}.
NoiseRouteReport noise_route_check(const CubeFunction& f, double p, double q, double eps,
                                   double C_trial);

// mu_q(f) >= mu_p(f)^2 / Stab_rho(f) for monotone f; returns the slack.
double two_bias_comparison_slack(const CubeFunction& f, double p, double q);

}  // namespace pcube
