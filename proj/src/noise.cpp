#include "pcube/noise.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace pcube {

namespace {
int popcount(mask_t m) { return std::popcount(m); }

std::vector<double> weights_at(int n, double bias) {
    std::vector<double> lw(n + 1);
    for (int k = 0; k <= n; ++k) {
        double v = 1.0;
        for (int i = 0; i < k; ++i) v *= bias;
        for (int i = 0; i < n - k; ++i) v *= 1.0 - bias;
        lw[k] = v;
    }
    std::vector<double> w(std::size_t{1} << n);
    for (mask_t m = 0; m < w.size(); ++m) w[m] = lw[popcount(m)];
    return w;
}

void check_rho(double rho) {
    if (!(rho >= 0.0) || !(rho <= 1.0)) throw std::invalid_argument("noise rate must lie in [0,1]");
}
}  // namespace

CubeFunction apply_noise(const CubeFunction& f, double rho) {
    check_rho(rho);
    SpectralForm F = forward_transform(f);
    for (mask_t s = 0; s < F.coeffs.size(); ++s) {
        double scale = 1.0;
        for (int i = 0; i < popcount(s); ++i) scale *= rho;
        F.coeffs[s] *= scale;
    }
    return inverse_transform(F);
}

CubeFunction apply_noise_kernel(const CubeFunction& f, double rho) {
    check_rho(rho);
    const int n = f.cube.n;
    if (n > 12) throw std::invalid_argument("kernel enumeration is gated to n <= 12");
    const double p = f.cube.p;
    // Single-coordinate transition probabilities Pr[y_i = b | x_i = a].
    const double t11 = rho + (1.0 - rho) * p, t10 = (1.0 - rho) * (1.0 - p);
    const double t01 = (1.0 - rho) * p, t00 = rho + (1.0 - rho) * (1.0 - p);
    std::vector<double> out(f.cube.size(), 0.0);
    for (mask_t x = 0; x < f.cube.size(); ++x) {
        double acc = 0.0;
        for (mask_t y = 0; y < f.cube.size(); ++y) {
            double k = 1.0;
            for (int i = 0; i < n; ++i) {
                bool xa = x >> i & 1u, yb = y >> i & 1u;
                k *= xa ? (yb ? t11 : t10) : (yb ? t01 : t00);
            }
            acc += k * f.values[y];
        }
        out[x] = acc;
    }
    return CubeFunction(f.cube, std::move(out));
}

std::vector<double> noise_passes(const std::vector<double>& table, int n, double bias, double rho) {
    check_rho(rho);
    if (!(bias > 0.0) || !(bias < 1.0)) throw std::invalid_argument("bias must lie in (0,1)");
    std::vector<double> a = table;
    for (int i = 0; i < n; ++i) {
        const mask_t bit = mask_t{1} << i;
        for (mask_t m = 0; m < a.size(); ++m) {
            if (m & bit) continue;
            double f0 = a[m], f1 = a[m | bit];
            double mean = (1.0 - bias) * f0 + bias * f1;
            a[m] = rho * f0 + (1.0 - rho) * mean;
            a[m | bit] = rho * f1 + (1.0 - rho) * mean;
        }
    }
    return a;
}

double noise_stability(const CubeFunction& f, double rho) {
    check_rho(rho);
    SpectralForm F = forward_transform(f);
    double acc = 0.0;
    for (mask_t s = 0; s < F.coeffs.size(); ++s) {
        double scale = 1.0;
        for (int i = 0; i < popcount(s); ++i) scale *= rho;
        acc += scale * F.coeffs[s] * F.coeffs[s];
    }
    return acc;
}

double noise_stability_direct(const CubeFunction& f, double rho) {
    auto smoothed = noise_passes(f.values, f.cube.n, f.cube.p, rho);
    auto w = f.cube.weights();
    double acc = 0.0;
    for (mask_t m = 0; m < w.size(); ++m) acc += w[m] * f.values[m] * smoothed[m];
    return acc;
}

double stability_at(const CubeFunction& f, double bias, double rho) {
    auto smoothed = noise_passes(f.values, f.cube.n, bias, rho);
    auto w = weights_at(f.cube.n, bias);
    double acc = 0.0;
    for (mask_t m = 0; m < w.size(); ++m) acc += w[m] * f.values[m] * smoothed[m];
    return acc;
}

NoiseSensitivityReport noise_sensitivity_check(const CubeFunction& f, double rho, double eps) {
    if (!(rho > 0.0) || !(rho < 1.0)) throw std::invalid_argument("noise rate must lie in (0,1)");
    if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("target must lie in (0,1)");
    NoiseSensitivityReport rep;
    rep.rho = rho;
    rep.eps = eps;
    rep.r_real = std::log(2.0 / eps) / std::log(1.0 / rho);
    rep.r = std::min(static_cast<int>(std::floor(rep.r_real)), f.cube.n);
    rep.delta = std::pow(10.0, -3.0 * rep.r_real - 1.0) * eps * eps * eps;
    rep.globalness = globalness(f, rep.r, rep.delta);
    rep.mu = rep.globalness.base_measure;
    rep.hypothesis_global = rep.globalness.is_global;
    rep.hypothesis_sparse = rep.mu < rep.delta;
    rep.hypotheses_met = rep.hypothesis_global && rep.hypothesis_sparse;
    rep.stab = noise_stability(f, rho);
    rep.bound = eps * rep.mu;
    rep.conclusion_holds = rep.stab <= rep.bound;
    return rep;
}

DirectedOperator DirectedOperator::make(double p, double q) {
    if (!(p > 0.0) || !(p < q) || !(q < 1.0))
        throw std::invalid_argument("directed operator needs 0 < p < q < 1");
    return DirectedOperator{p, q};
}

double DirectedOperator::rho() const { return p * (1.0 - q) / (q * (1.0 - p)); }

std::vector<double> directed_apply(const CubeFunction& f, const DirectedOperator& d) {
    if (f.cube.p != d.p) throw std::invalid_argument("function bias does not match the operator");
    // Condition on y: y_i = 0 forces x_i = 0; y_i = 1 keeps x_i = 1 w.p. p/q.
    const double keep = d.p / d.q;
    std::vector<double> a = f.values;
    for (int i = 0; i < f.cube.n; ++i) {
        const mask_t bit = mask_t{1} << i;
        for (mask_t m = 0; m < a.size(); ++m) {
            if (m & bit) continue;
            double f0 = a[m], f1 = a[m | bit];
            a[m | bit] = keep * f1 + (1.0 - keep) * f0;
        }
    }
    return a;
}

std::vector<double> directed_coapply(const std::vector<double>& g_on_q, int n, const DirectedOperator& d) {
    if (g_on_q.size() != (std::size_t{1} << n)) throw std::invalid_argument("table size mismatch");
    // Condition on x: x_i = 1 forces y_i = 1; x_i = 0 lifts w.p. (q-p)/(1-p).
    const double lift = (d.q - d.p) / (1.0 - d.p);
    std::vector<double> a = g_on_q;
    for (int i = 0; i < n; ++i) {
        const mask_t bit = mask_t{1} << i;
        for (mask_t m = 0; m < a.size(); ++m) {
            if (m & bit) continue;
            double g0 = a[m], g1 = a[m | bit];
            a[m] = lift * g1 + (1.0 - lift) * g0;
        }
    }
    return a;
}

double directed_inner(const CubeFunction& f, const std::vector<double>& g_on_q, const DirectedOperator& d) {
    auto tf = directed_apply(f, d);
    auto w = weights_at(f.cube.n, d.q);
    if (g_on_q.size() != w.size()) throw std::invalid_argument("table size mismatch");
    double acc = 0.0;
    for (mask_t m = 0; m < w.size(); ++m) acc += w[m] * tf[m] * g_on_q[m];
    return acc;
}

double calcrho_identity_check(const CubeFunction& f, double q) {
    DirectedOperator d = DirectedOperator::make(f.cube.p, q);
    auto composite = directed_coapply(directed_apply(f, d), f.cube.n, d);
    CubeFunction smoothed = apply_noise(f, d.rho());
    double dev = 0.0;
    for (mask_t m = 0; m < composite.size(); ++m)
        dev = std::max(dev, std::abs(composite[m] - smoothed.values[m]));
    return dev;
}

CoupledSampler::CoupledSampler(DirectedOperator op, int dim, std::uint64_t seed)
    : d(op), n(dim), rng(seed) {
    if (dim < 1 || dim > 30) throw std::invalid_argument("sampler dimension out of range");
}

std::pair<mask_t, mask_t> CoupledSampler::sample() {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    mask_t x = 0, y = 0;
    for (int i = 0; i < n; ++i) {
        double u = unif(rng);
        // P(x=1,y=1) = p, P(x=0,y=1) = q-p, P(x=0,y=0) = 1-q.
        if (u < d.p) { x |= mask_t{1} << i; y |= mask_t{1} << i; }
        else if (u < d.q) { y |= mask_t{1} << i; }
    }
    return {x, y};
}

}  // namespace pcube
