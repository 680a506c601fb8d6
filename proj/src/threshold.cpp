#include "pcube/threshold.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pcube/influence.hpp"
#include "pcube/noise.hpp"

namespace pcube {

namespace {
template <typename Fn>
void for_each_subset_of_size(int n, int k, Fn&& fn) {
    if (k == 0) { fn(mask_t{0}); return; }
    if (k > n) return;
    mask_t v = (mask_t{1} << k) - 1;
    const mask_t limit = mask_t{1} << n;
    while (v < limit) {
        fn(v);
        mask_t t = v | (v - 1);
        v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
    }
}

double bisect_measure(const CubeFunction& f, double target) {
    double lo = 1e-12, hi = 1.0 - 1e-12;
    double flo = measure_at(f, lo) - target;
    double fhi = measure_at(f, hi) - target;
    if (flo * fhi > 0.0) return std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = measure_at(f, mid) - target;
        if ((fm <= 0.0) == (flo <= 0.0)) { lo = mid; flo = fm; }
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}
}  // namespace

ThresholdProfile measure_curve(const CubeFunction& f, const std::vector<double>& grid,
                               const std::string& family) {
    ThresholdProfile prof;
    prof.family = family;
    for (double p : grid) prof.curve.emplace_back(p, measure_at(f, p));
    prof.monotone = f.is_monotone();
    if (prof.monotone) {
        prof.p_c = bisect_measure(f, 0.5);
        prof.crossed = !std::isnan(prof.p_c);
    } else {
        // First crossing of 1/2 along a fine sweep, flagged as such.
        prof.first_crossing_only = true;
        prof.p_c = std::numeric_limits<double>::quiet_NaN();
        const int steps = 4096;
        double prev_p = 1.0 / (steps + 1.0);
        double prev = measure_at(f, prev_p) - 0.5;
        for (int i = 2; i <= steps; ++i) {
            double p = static_cast<double>(i) / (steps + 1.0);
            double cur = measure_at(f, p) - 0.5;
            if (prev == 0.0 || prev * cur < 0.0) {
                double lo = prev_p, hi = p;
                for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
                    double mid = 0.5 * (lo + hi);
                    double fm = measure_at(f, mid) - 0.5;
                    if ((fm <= 0.0) == (prev <= 0.0)) lo = mid;
                    else hi = mid;
                }
                prof.p_c = 0.5 * (lo + hi);
                prof.crossed = true;
                break;
            }
            prev = cur;
            prev_p = p;
        }
    }
    return prof;
}

double threshold_location(const CubeFunction& f, double target) {
    if (!(target > 0.0) || !(target < 1.0)) throw std::invalid_argument("target must lie in (0,1)");
    if (!f.is_monotone()) throw std::invalid_argument("threshold location needs a monotone function");
    return bisect_measure(f, target);
}

RussoReport russo_check(const CubeFunction& f, double p, double h) {
    if (!f.is_boolean() || !f.is_monotone())
        throw std::invalid_argument("derivative identity needs a monotone boolean function");
    if (!(p - h > 0.0) || !(p + h < 1.0)) throw std::invalid_argument("difference step leaves (0,1)");
    RussoReport rep;
    rep.p = p;
    rep.h = h;
    rep.finite_difference = (measure_at(f, p + h) - measure_at(f, p - h)) / (2.0 * h);
    rep.influence = total_influence_at(f, p);
    rep.deviation = std::abs(rep.finite_difference - rep.influence);
    return rep;
}

MGlobalCertificate m_global_certify(const CubeFunction& f, int M, double p_lo, double p_hi,
                                    int grid_size) {
    if (!f.is_boolean()) throw std::invalid_argument("globalness certificate needs a boolean function");
    if (M < 0 || M > f.cube.n) throw std::invalid_argument("restriction budget out of range");
    if (!(p_lo > 0.0) || !(p_lo <= p_hi) || !(p_hi < 1.0))
        throw std::invalid_argument("bias interval must satisfy 0 < lo <= hi < 1");
    if (grid_size < 1) throw std::invalid_argument("grid size must be >= 1");
    MGlobalCertificate cert;
    cert.M = M;
    cert.p_lo = p_lo;
    cert.p_hi = p_hi;
    if (grid_size == 1 || p_lo == p_hi) {
        cert.grid.push_back(p_lo);
    } else {
        double llo = std::log(p_lo), lhi = std::log(p_hi);
        for (int i = 0; i < grid_size; ++i)
            cert.grid.push_back(std::exp(llo + (lhi - llo) * i / (grid_size - 1)));
    }
    cert.worst_excess = -std::numeric_limits<double>::infinity();
    for (int t = 0; t <= M; ++t) {
        for_each_subset_of_size(f.cube.n, t, [&](mask_t J) {
            CubeFunction sub = restrict_to(f, J, J);
            for (double p : cert.grid) {
                double restricted = measure_at(sub, p);
                double base = measure_at(f, p);
                double bound = base > 0.0 ? std::pow(base, 0.01) : 0.0;
                double excess = restricted - bound;
                if (excess > cert.worst_excess) {
                    cert.worst_excess = excess;
                    cert.worst_p = p;
                    cert.worst_J = J;
                }
            }
        });
    }
    cert.pass = cert.worst_excess <= 0.0;
    return cert;
}

SharpThresholdReport sharp_threshold_check(const CubeFunction& f, double p, double q, int M,
                                           double C_trial) {
    if (!(p > 0.0) || !(p < q) || !(q < 1.0))
        throw std::invalid_argument("biases must satisfy 0 < p < q < 1");
    if (!(C_trial > 0.0)) throw std::invalid_argument("trial constant must be positive");
    SharpThresholdReport rep;
    rep.p = p;
    rep.q = q;
    rep.M = M;
    rep.C_trial = C_trial;
    rep.certificate = m_global_certify(f, M, p, q);
    rep.mu_p = measure_at(f, p);
    rep.mu_q = measure_at(f, q);
    rep.hyp_measure = rep.mu_p >= std::exp(-static_cast<double>(M) / C_trial);
    rep.hypotheses_met = rep.certificate.pass && rep.hyp_measure && f.is_monotone();
    double expo = std::pow(p / q, 1.0 / C_trial);
    rep.rhs = std::pow(rep.mu_p, expo);
    rep.conclusion_holds = rep.mu_q >= rep.rhs;
    // Smallest C with mu_q >= mu_p^{(p/q)^{1/C}}: solve for the exponent.
    if (rep.mu_p > 0.0 && rep.mu_p < 1.0 && rep.mu_q > 0.0) {
        double e0 = std::log(rep.mu_q) / std::log(rep.mu_p);   // need (p/q)^{1/C} >= e0
        if (e0 >= 1.0) rep.min_constant = std::numeric_limits<double>::infinity();
        else if (e0 <= 0.0) rep.min_constant = 0.0;
        else rep.min_constant = std::log(p / q) / std::log(e0);
    } else {
        rep.min_constant = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

double two_bias_comparison_slack(const CubeFunction& f, double p, double q) {
    if (!(p > 0.0) || !(p < q) || !(q < 1.0))
        throw std::invalid_argument("biases must satisfy 0 < p < q < 1");
    double rho = p * (1.0 - q) / (q * (1.0 - p));
    double stab = stability_at(f, p, rho);
    double mu_p = measure_at(f, p);
    double mu_q = measure_at(f, q);
    if (stab <= 0.0) return mu_q;   // zero function: 0 >= 0
    return mu_q - mu_p * mu_p / stab;
}

NoiseRouteReport noise_route_check(const CubeFunction& f, double p, double q, double eps,
                                   double C_trial) {
    if (!(p > 0.0) || !(p < q) || !(q < 1.0))
        throw std::invalid_argument("biases must satisfy 0 < p < q < 1");
    if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
    if (!(C_trial > 1.0)) throw std::invalid_argument("trial constant must exceed 1");
    NoiseRouteReport rep;
    rep.p = p;
    rep.q = q;
    rep.eps = eps;
    rep.C_trial = C_trial;
    rep.zeta = q / p - 1.0;
    rep.rho = p * (1.0 - q) / (q * (1.0 - p));
    rep.mu_p = measure_at(f, p);
    rep.mu_q = measure_at(f, q);
    rep.stab = stability_at(f, p, rep.rho);
    rep.lower_bound = rep.stab > 0.0 ? rep.mu_p * rep.mu_p / rep.stab : 0.0;
    rep.comparison_holds = rep.mu_q >= rep.lower_bound - 1e-15;

    rep.r = static_cast<int>(std::floor(C_trial * std::log(1.0 / eps)));
    rep.delta = std::pow(C_trial, -C_trial * std::log(1.0 / eps));
    rep.hyp_monotone = f.is_monotone();
    int r_scan = std::min(rep.r, f.cube.n);
    double base = rep.mu_p;
    double worst_bump = 0.0;
    for (int t = 1; t <= r_scan; ++t) {
        for_each_subset_of_size(f.cube.n, t, [&](mask_t J) {
            double b = measure_at(restrict_to(f, J, J), p) - base;
            worst_bump = std::max(worst_bump, b);
        });
    }
    rep.hyp_global = worst_bump <= rep.delta;
    rep.hyp_sparse = rep.mu_p <= rep.delta;
    rep.hypotheses_met = rep.hyp_monotone && rep.hyp_global && rep.hyp_sparse;
    rep.amplification = rep.mu_p / eps;
    rep.conclusion_holds = rep.mu_q >= rep.amplification;
    return rep;
}

}  // namespace pcube
