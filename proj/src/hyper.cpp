#include "pcube/hyper.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "pcube/noise.hpp"

namespace pcube {

namespace {
int popcount(mask_t m) { return std::popcount(m); }

double pow_int(double x, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= x;
    return v;
}
}  // namespace

double lambda_of(double p) {
    double s2 = p * (1.0 - p);
    return ((1.0 - p) * (1.0 - p) * (1.0 - p) + p * p * p) / s2;
}

std::vector<double> hybrid_biases(const BiasedCube& c, int t) {
    if (t < 0 || t > c.n) throw std::invalid_argument("hybrid index out of range");
    std::vector<double> b(c.n, c.p);
    for (int i = 0; i < t; ++i) b[i] = 0.5;
    return b;
}

std::vector<double> product_weights(const std::vector<double>& biases) {
    std::vector<double> w(std::size_t{1} << biases.size(), 1.0);
    for (std::size_t i = 0; i < biases.size(); ++i) {
        const mask_t bit = mask_t{1} << i;
        for (mask_t m = 0; m < w.size(); ++m) w[m] *= (m & bit) ? biases[i] : 1.0 - biases[i];
    }
    return w;
}

std::vector<double> eval_on_biases(const std::vector<double>& coeffs, const std::vector<double>& biases) {
    if (coeffs.size() != (std::size_t{1} << biases.size()))
        throw std::invalid_argument("coefficient table does not match bias count");
    std::vector<double> a = coeffs;
    for (std::size_t i = 0; i < biases.size(); ++i) {
        const double p = biases[i], s = std::sqrt(p * (1.0 - p));
        const mask_t bit = mask_t{1} << i;
        for (mask_t m = 0; m < a.size(); ++m) {
            if (m & bit) continue;
            double c0 = a[m], c1 = a[m | bit];
            a[m] = c0 - c1 * (p / s);
            a[m | bit] = c0 + c1 * ((1.0 - p) / s);
        }
    }
    return a;
}

double biased_moment(const std::vector<double>& values, const std::vector<double>& biases, int k) {
    auto w = product_weights(biases);
    if (values.size() != w.size()) throw std::invalid_argument("table size mismatch");
    double acc = 0.0;
    for (mask_t m = 0; m < w.size(); ++m) {
        double v = 1.0;
        for (int j = 0; j < k; ++j) v *= values[m];
        acc += w[m] * v;
    }
    return acc;
}

double hybrid_norm(const SpectralForm& F, int t, int r) {
    if (r < 1 || r % 2) throw std::invalid_argument("hybrid norms are exact for even exponents only");
    auto biases = hybrid_biases(F.cube, t);
    auto values = eval_on_biases(F.coeffs, biases);
    return std::pow(biased_moment(values, biases, r), 1.0 / r);
}

std::vector<double> mixed_noise_coeffs(const SpectralForm& F, int t, double rho_u, double rho_b) {
    if (t < 0 || t > F.cube.n) throw std::invalid_argument("hybrid index out of range");
    const mask_t head = (t == 0) ? 0 : ((mask_t{1} << t) - 1);
    std::vector<double> out = F.coeffs;
    for (mask_t s = 0; s < out.size(); ++s)
        out[s] *= pow_int(rho_u, popcount(s & head)) * pow_int(rho_b, popcount(s & ~head));
    return out;
}

namespace {
double mixed_fourth_moment(const SpectralForm& F, const std::vector<double>& coeffs, int t, double rho) {
    SpectralForm scaled{F.cube, coeffs};
    auto smoothed = mixed_noise_coeffs(scaled, t, 2.0 * rho, rho);
    auto biases = hybrid_biases(F.cube, t);
    return biased_moment(eval_on_biases(smoothed, biases), biases, 4);
}
}  // namespace

double replacement_step_slack(const SpectralForm& F, int t, double rho) {
    if (t < 1 || t > F.cube.n) throw std::invalid_argument("replacement step index out of range");
    const double lam = lambda_of(F.cube.p);
    double lhs = mixed_fourth_moment(F, F.coeffs, t - 1, rho);
    double main_term = mixed_fourth_moment(F, F.coeffs, t, rho);
    // Coefficients of the derivative along coordinate t (1-based).
    const mask_t bit = mask_t{1} << (t - 1);
    std::vector<double> deriv(F.coeffs.size(), 0.0);
    for (mask_t s = 0; s < deriv.size(); ++s)
        if (s & bit) deriv[s & ~bit] = F.coeffs[s];
    double deriv_term = mixed_fourth_moment(F, deriv, t, rho);
    return main_term + 3.0 * lam * pow_int(rho, 4) * deriv_term - lhs;
}

double telescoped_fourth_moment_bound(const SpectralForm& F, double rho) {
    const double lam = lambda_of(F.cube.p);
    const double step = 3.0 * lam * pow_int(rho, 4);
    auto uniform = hybrid_biases(F.cube, F.cube.n);
    double acc = 0.0;
    std::vector<double> shifted(F.coeffs.size());
    for (mask_t S = 0; S < F.coeffs.size(); ++S) {
        std::fill(shifted.begin(), shifted.end(), 0.0);
        for (mask_t T = 0; T < F.coeffs.size(); ++T)
            if ((T & S) == 0) shifted[T] = F.coeffs[T | S] * pow_int(2.0 * rho, popcount(T));
        double m4 = biased_moment(eval_on_biases(shifted, uniform), uniform, 4);
        acc += pow_int(step, popcount(S)) * m4;
    }
    return acc;
}

HyprefReport hypref_bound_check(const CubeFunction& f, double rho) {
    if (!(rho >= 0.0) || rho > 1.0 / std::sqrt(12.0))
        throw std::invalid_argument("smoothing rate must lie in [0, 1/sqrt(12)]");
    HyprefReport rep;
    rep.rho = rho;
    rep.lhs = moment(apply_noise(f, rho), 4);
    SpectralForm F = forward_transform(f);
    auto sup = superset_energy(F);   // ||D_S f||_2^2
    const double lam = lambda_of(f.cube.p);
    const double s2 = f.cube.sigma * f.cube.sigma;
    const double a = 3.0 * lam * pow_int(rho, 4);
    const double b = 3.0 * s2 * pow_int(rho, 4);
    for (mask_t S = 0; S < sup.size(); ++S) {
        int k = popcount(S);
        double infl = sup[S] / pow_int(s2, k);   // I_S(f)
        rep.middle += pow_int(a, k) * sup[S] * sup[S];
        rep.rhs += pow_int(b, k) * infl * infl;
    }
    double tol = 1e-10 * std::max(1.0, rep.rhs);
    rep.pass = rep.lhs <= rep.middle + tol && rep.middle <= rep.rhs + tol;
    return rep;
}

SmallInfluenceSmoothingReport small_influence_smoothing_check(const CubeFunction& f) {
    SmallInfluenceSmoothingReport rep;
    double energy = moment(f, 2);
    if (energy <= 0.0) throw std::invalid_argument("smoothing check undefined for the zero function");
    rep.norm2 = std::sqrt(energy);
    SpectralForm F = forward_transform(f);
    auto sup = superset_energy(F);
    const double lam = lambda_of(f.cube.p);
    const double s2 = f.cube.sigma * f.cube.sigma;
    for (mask_t S = 0; S < sup.size(); ++S) {
        int k = popcount(S);
        rep.beta_influences = std::max(rep.beta_influences, sup[S] / pow_int(s2, k) / energy);
        rep.beta_derivative = std::max(rep.beta_derivative, pow_int(lam, k) * sup[S] / energy);
    }
    rep.lhs_fifth = lr_norm(apply_noise(f, 0.2), 4.0);
    rep.lhs_root24 = lr_norm(apply_noise(f, 1.0 / std::sqrt(24.0)), 4.0);
    rep.rhs_fifth = std::pow(rep.beta_influences, 0.25) * rep.norm2;
    rep.rhs_root24 = std::pow(rep.beta_derivative, 0.25) * rep.norm2;
    rep.pass_fifth = rep.lhs_fifth <= rep.rhs_fifth * (1.0 + 1e-12);
    rep.pass_root24 = rep.lhs_root24 <= rep.rhs_root24 * (1.0 + 1e-12);
    return rep;
}

PracticeReport practice_bound_check(const CubeFunction& f, double delta) {
    PracticeReport rep;
    SpectralForm F = forward_transform(f);
    rep.r = std::max(F.degree(1e-12), 0);
    auto table = influence_table(f, rep.r);
    double witnessed = table.max_influence(false);
    if (delta < witnessed * (1.0 - 1e-12))
        throw std::invalid_argument("delta is below the witnessed generalized influence");
    rep.delta = delta;
    rep.lhs = lr_norm(f, 4.0);
    rep.rhs = std::pow(5.0, 0.75 * rep.r) * std::pow(delta, 0.25) * std::sqrt(lr_norm(f, 2.0));
    rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-12);
    return rep;
}

MomentEnvelope MomentEnvelope::uniform_cube(const BiasedCube& c, int q) {
    if (q < 4 || q % 2) throw std::invalid_argument("envelope exponent must be even and >= 4");
    MomentEnvelope env;
    env.q = q;
    env.sigmas.assign(c.n, c.sigma);
    return env;
}

double MomentEnvelope::subset_factor(mask_t S) const {
    double v = 1.0;
    for (std::size_t i = 0; i < sigmas.size(); ++i)
        if (S >> i & 1u) v *= std::pow(sigmas[i], 2.0 - q);
    return v;
}

QNormReport qnorm_bound_check(const CubeFunction& f, int q, double rho, const MomentEnvelope& env) {
    if (q != 4 && q != 6 && q != 8) throw std::invalid_argument("exact q-th moments support q in {4,6,8}");
    if (env.q != q || static_cast<int>(env.sigmas.size()) != f.cube.n)
        throw std::invalid_argument("envelope does not match the check");
    double rho_cap = std::pow(2.0 * q, -1.5);
    if (!(rho >= 0.0) || rho > rho_cap)
        throw std::invalid_argument("smoothing rate exceeds (2q)^{-3/2}");
    // Envelope admissibility for the cube's own characters:
    // E|chi|^q = sigma^{-q} (p(1-p)^q + (1-p)p^q) must be <= sigma_i^{2-q}.
    const double p = f.cube.p, s = f.cube.sigma;
    double chi_q = (p * pow_int(1.0 - p, q) + (1.0 - p) * pow_int(p, q)) / pow_int(s, q);
    for (double si : env.sigmas)
        if (chi_q > std::pow(si, 2.0 - q) * (1.0 + 1e-12))
            throw std::invalid_argument("envelope does not dominate the character moments");
    QNormReport rep;
    rep.q = q;
    rep.rho = rho;
    rep.lhs = moment(apply_noise(f, rho), q);
    SpectralForm F = forward_transform(f);
    auto sup = superset_energy(F);
    for (mask_t S = 0; S < sup.size(); ++S)
        rep.rhs += env.subset_factor(S) * pow_int(std::sqrt(sup[S]), q);
    rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-10);
    return rep;
}

}  // namespace pcube
