#include "pcube/invariance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

namespace pcube {

namespace {

double pow2(double x) { return x * x; }

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double to_u01(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

// Rational approximation of the standard normal quantile (relative error
// below 1.2e-9 across the open unit interval).
double inv_normal_cdf(double u) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double lo = 0.02425, hi = 1.0 - lo;
    u = std::clamp(u, 1e-300, 1.0 - 1e-16);
    if (u < lo) {
        double q = std::sqrt(-2.0 * std::log(u));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (u > hi) {
        double q = std::sqrt(-2.0 * std::log(1.0 - u));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = u - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double coordinate_draw(const EnsembleCoordinate& coord, double u) {
    if (coord.gaussian) return inv_normal_cdf(u);
    double cum = 0.0;
    for (std::size_t k = 0; k + 1 < coord.values.size(); ++k) {
        cum += coord.probs[k];
        if (u < cum) return coord.values[k];
    }
    return coord.values.back();
}

void validate_discrete(const std::vector<double>& values, const std::vector<double>& probs) {
    if (values.size() != probs.size() || values.size() < 2)
        throw std::invalid_argument("discrete coordinate needs matching value/probability lists");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p > 0.0)) throw std::invalid_argument("probabilities must be positive");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("probabilities must sum to 1");
    double mean = 0.0, var = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) mean += probs[k] * values[k];
    for (std::size_t k = 0; k < values.size(); ++k) var += probs[k] * pow2(values[k] - mean);
    if (std::abs(mean) > 1e-9 || std::abs(var - 1.0) > 1e-9)
        throw std::invalid_argument("coordinate must have mean 0 and variance 1");
}

double abs_third_moment(const std::vector<double>& values, const std::vector<double>& probs) {
    double m = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k)
        m += probs[k] * std::abs(values[k] * values[k] * values[k]);
    return m;
}

}  // namespace

MultilinearPoly MultilinearPoly::make(int n, std::vector<PolyTerm> in_terms) {
    if (n < 0 || n > 30) throw std::invalid_argument("variable count out of range");
    std::map<mask_t, double> merged;
    for (const auto& t : in_terms) {
        if (n < 32 && (t.vars >> n) != 0) throw std::invalid_argument("term uses an unknown variable");
        merged[t.vars] += t.coeff;
    }
    MultilinearPoly f;
    f.n = n;
    for (const auto& [vars, coeff] : merged)
        if (coeff != 0.0) f.terms.push_back({vars, coeff});
    return f;
}

int MultilinearPoly::degree() const {
    int d = 0;
    for (const auto& t : terms) d = std::max(d, std::popcount(t.vars));
    return d;
}

double MultilinearPoly::total_weight() const {
    double w = 0.0;
    for (const auto& t : terms) w += t.coeff * t.coeff;
    return w;
}

double MultilinearPoly::evaluate(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("point has wrong dimension");
    double acc = 0.0;
    for (const auto& t : terms) {
        double prod = t.coeff;
        mask_t m = t.vars;
        while (m) {
            int i = std::countr_zero(m);
            prod *= x[i];
            m &= m - 1;
        }
        acc += prod;
    }
    return acc;
}

MultilinearPoly poly_from_spectral(const SpectralForm& F) {
    std::vector<PolyTerm> terms;
    for (mask_t S = 0; S < F.coeffs.size(); ++S)
        if (F.coeffs[S] != 0.0) terms.push_back({S, F.coeffs[S]});
    return MultilinearPoly::make(F.cube.n, std::move(terms));
}

bool Ensemble::all_discrete() const {
    for (const auto& c : coords)
        if (c.gaussian) return false;
    return true;
}

std::vector<double> Ensemble::sigmas() const {
    std::vector<double> s;
    s.reserve(coords.size());
    for (const auto& c : coords) s.push_back(c.sigma);
    return s;
}

double Ensemble::default_gaussian_sigma() {
    // Largest sigma with E|g|^3 = 2 sqrt(2/pi) <= 1/sigma.
    return std::sqrt(3.14159265358979323846) / (2.0 * std::sqrt(2.0));
}

Ensemble Ensemble::biased_characters(int n, double p) {
    if (n < 1) throw std::invalid_argument("ensemble needs at least one coordinate");
    if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("bias must lie in (0,1)");
    double sigma = std::sqrt(p * (1.0 - p));
    EnsembleCoordinate c;
    c.values = {-p / sigma, (1.0 - p) / sigma};
    c.probs = {1.0 - p, p};
    c.sigma = sigma;  // E|X|^3 = (p^2 + (1-p)^2)/sigma <= 1/sigma
    Ensemble e;
    e.coords.assign(static_cast<std::size_t>(n), c);
    return e;
}

Ensemble Ensemble::uniform_characters(int n) {
    if (n < 1) throw std::invalid_argument("ensemble needs at least one coordinate");
    EnsembleCoordinate c;
    c.values = {-1.0, 1.0};
    c.probs = {0.5, 0.5};
    c.sigma = 0.5;
    Ensemble e;
    e.coords.assign(static_cast<std::size_t>(n), c);
    return e;
}

Ensemble Ensemble::gaussians(int n, double sigma) {
    if (n < 1) throw std::invalid_argument("ensemble needs at least one coordinate");
    if (!(sigma > 0.0) || sigma > default_gaussian_sigma() * (1.0 + 1e-12))
        throw std::invalid_argument("gaussian third-moment certificate requires a smaller sigma");
    EnsembleCoordinate c;
    c.gaussian = true;
    c.sigma = sigma;
    Ensemble e;
    e.coords.assign(static_cast<std::size_t>(n), c);
    return e;
}

Ensemble Ensemble::custom_discrete(int n, const std::vector<double>& values,
                                   const std::vector<double>& probs) {
    if (n < 1) throw std::invalid_argument("ensemble needs at least one coordinate");
    validate_discrete(values, probs);
    EnsembleCoordinate c;
    c.values = values;
    c.probs = probs;
    c.sigma = 1.0 / abs_third_moment(values, probs);
    Ensemble e;
    e.coords.assign(static_cast<std::size_t>(n), c);
    return e;
}

Ensemble hybrid_ensemble(const Ensemble& x, const Ensemble& y, int t) {
    if (x.n() != y.n()) throw std::invalid_argument("ensembles differ in dimension");
    if (t < 0 || t > x.n()) throw std::invalid_argument("hybrid cut out of range");
    Ensemble z = x;
    for (int i = 0; i < t; ++i) z.coords[i] = y.coords[i];
    return z;
}

Ensemble ensemble_from_spec(int n, const std::string& spec) {
    std::string kind = spec;
    std::map<std::string, double> params;
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
        kind = spec.substr(0, colon);
        std::string rest = spec.substr(colon + 1);
        std::size_t pos = 0;
        while (pos < rest.size()) {
            auto comma = rest.find(',', pos);
            std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            auto eq = item.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("bad ensemble parameter: " + item);
            params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    if (kind == "biased") {
        auto it = params.find("p");
        if (it == params.end()) throw std::invalid_argument("biased ensemble needs p=");
        return Ensemble::biased_characters(n, it->second);
    }
    if (kind == "uniform") return Ensemble::uniform_characters(n);
    if (kind == "gaussian") {
        auto it = params.find("sigma");
        return it == params.end() ? Ensemble::gaussians(n)
                                  : Ensemble::gaussians(n, it->second);
    }
    throw std::invalid_argument("unknown ensemble kind: " + kind);
}

double PolyInfluenceTable::at(mask_t S) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), S,
                               [](const auto& e, mask_t v) { return e.first < v; });
    return it != entries.end() && it->first == S ? it->second : 0.0;
}

double PolyInfluenceTable::max_nonempty() const {
    double m = 0.0;
    for (const auto& [mask, v] : entries)
        if (mask != 0) m = std::max(m, v);
    return m;
}

PolyInfluenceTable poly_influences(const MultilinearPoly& f, const std::vector<double>& sigmas) {
    if (static_cast<int>(sigmas.size()) != f.n)
        throw std::invalid_argument("need one sigma per variable");
    for (double s : sigmas)
        if (!(s > 0.0)) throw std::invalid_argument("sigmas must be positive");
    std::map<mask_t, double> weight;
    for (const auto& t : f.terms) {
        double c2 = t.coeff * t.coeff;
        mask_t S = t.vars;
        while (true) {
            weight[S] += c2;
            if (S == 0) break;
            S = (S - 1) & t.vars;
        }
    }
    PolyInfluenceTable table;
    for (const auto& [S, w] : weight) {
        double scale = 1.0;
        for (int i = 0; i < f.n; ++i)
            if (S >> i & 1u) scale /= sigmas[i] * sigmas[i];
        table.entries.emplace_back(S, w * scale);
    }
    return table;
}

PolyInfluenceTable poly_influences(const MultilinearPoly& f, const Ensemble& e) {
    return poly_influences(f, e.sigmas());
}

TestFunction TestFunction::smooth_step(double center, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("window width must be positive");
    TestFunction phi;
    phi.name = "step";
    double left = center - width / 2.0;
    phi.eval = [left, width](double u) {
        double t = (u - left) / width;
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return t * t * (3.0 - 2.0 * t);
    };
    phi.third_derivative_bound = 12.0 / (width * width * width);
    phi.range_width = 1.0;
    return phi;
}

TestFunction TestFunction::smooth_sigmoid(double center, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("window width must be positive");
    TestFunction phi;
    phi.name = "sigmoid";
    phi.eval = [center, width](double u) { return 1.0 / (1.0 + std::exp(-(u - center) / width)); };
    phi.third_derivative_bound = 1.0 / (8.0 * width * width * width);
    phi.range_width = 1.0;
    return phi;
}

TestFunction TestFunction::custom(std::string name, std::function<double(double)> eval,
                                  double third_derivative_bound, double range_width) {
    if (!(third_derivative_bound >= 0.0))
        throw std::invalid_argument("certificate must be nonnegative");
    TestFunction phi;
    phi.name = std::move(name);
    phi.eval = std::move(eval);
    phi.third_derivative_bound = third_derivative_bound;
    phi.range_width = range_width;
    return phi;
}

TestFunction test_function_from_spec(const std::string& spec) {
    std::string kind = spec;
    double center = 0.5, width = 0.25;
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
        kind = spec.substr(0, colon);
        std::string rest = spec.substr(colon + 1);
        std::size_t pos = 0;
        while (pos < rest.size()) {
            auto comma = rest.find(',', pos);
            std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            auto eq = item.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("bad test-function parameter: " + item);
            std::string key = item.substr(0, eq);
            double val = std::stod(item.substr(eq + 1));
            if (key == "center") center = val;
            else if (key == "width") width = val;
            else throw std::invalid_argument("unknown test-function parameter: " + key);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    if (kind == "step") return TestFunction::smooth_step(center, width);
    if (kind == "sigmoid") return TestFunction::smooth_sigmoid(center, width);
    throw std::invalid_argument("unknown test function: " + kind);
}

namespace {

std::size_t discrete_support(const Ensemble& e) {
    std::size_t points = 1;
    for (const auto& c : e.coords) {
        points *= c.values.size();
        if (points > exact_mode_support_cap) return exact_mode_support_cap + 1;
    }
    return points;
}

double exact_expectation(const MultilinearPoly& f, const Ensemble& e,
                         const std::function<double(double)>& phi) {
    const int n = e.n();
    std::vector<std::size_t> digits(n, 0);
    std::vector<double> x(n);
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
        x[i] = e.coords[i].values[0];
        w[i] = e.coords[i].probs[0];
    }
    double acc = 0.0;
    while (true) {
        double weight = 1.0;
        for (int i = 0; i < n; ++i) weight *= w[i];
        acc += weight * phi(f.evaluate(x));
        int i = 0;
        for (; i < n; ++i) {
            if (++digits[i] < e.coords[i].values.size()) {
                x[i] = e.coords[i].values[digits[i]];
                w[i] = e.coords[i].probs[digits[i]];
                break;
            }
            digits[i] = 0;
            x[i] = e.coords[i].values[0];
            w[i] = e.coords[i].probs[0];
        }
        if (i == n) break;
    }
    return acc;
}

}  // namespace

bool exact_mode_available(const MultilinearPoly& f, const Ensemble& x, const Ensemble& y) {
    if (f.n != x.n() || f.n != y.n()) return false;
    if (f.n > 14) return false;
    if (!x.all_discrete() || !y.all_discrete()) return false;
    return discrete_support(x) <= exact_mode_support_cap &&
           discrete_support(y) <= exact_mode_support_cap;
}

double exact_moment(const MultilinearPoly& f, const Ensemble& x, int k) {
    if (f.n != x.n()) throw std::invalid_argument("ensemble dimension mismatch");
    if (!x.all_discrete()) throw std::invalid_argument("exact moments need a discrete ensemble");
    if (k < 1) throw std::invalid_argument("moment order must be >= 1");
    return exact_expectation(f, x, [k](double v) {
        double r = 1.0;
        for (int j = 0; j < k; ++j) r *= v;
        return r;
    });
}

DistributionDiff hybrid_distribution_diff(const MultilinearPoly& f, const Ensemble& x,
                                          const Ensemble& y, const TestFunction& phi,
                                          std::size_t samples, std::uint64_t seed) {
    if (f.n != x.n() || f.n != y.n()) throw std::invalid_argument("ensemble dimension mismatch");
    DistributionDiff out;
    if (exact_mode_available(f, x, y)) {
        double ex = exact_expectation(f, x, phi.eval);
        double ey = exact_expectation(f, y, phi.eval);
        out.signed_diff = ex - ey;
        out.estimate = std::abs(out.signed_diff);
        out.exact = true;
        return out;
    }
    if (samples < 10000) throw std::invalid_argument("Monte Carlo mode needs at least 1e4 samples");
    const int n = f.n;
    const std::size_t batches = 50;
    const std::size_t batch_size = samples / batches;
    std::vector<double> batch_mean(batches, 0.0);
    std::vector<double> px(n), py(n);
    double total = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
        std::uint64_t key = mix64(seed ^ mix64(b + 1));
        double sum = 0.0;
        for (std::size_t s = 0; s < batch_size; ++s) {
            for (int i = 0; i < n; ++i) {
                double u = to_u01(mix64(key ^ (s * static_cast<std::uint64_t>(n) + i)));
                px[i] = coordinate_draw(x.coords[i], u);
                py[i] = coordinate_draw(y.coords[i], u);
            }
            sum += phi.eval(f.evaluate(px)) - phi.eval(f.evaluate(py));
        }
        batch_mean[b] = sum / static_cast<double>(batch_size);
        total += sum;
    }
    out.samples_used = batches * batch_size;
    out.signed_diff = total / static_cast<double>(out.samples_used);
    out.estimate = std::abs(out.signed_diff);
    double var = 0.0;
    for (double m : batch_mean) var += pow2(m - out.signed_diff);
    out.mc_error = std::sqrt(var / (static_cast<double>(batches) * (batches - 1)));
    return out;
}

InvarianceReport invariance_bound_check(const MultilinearPoly& f, const Ensemble& x,
                                        const Ensemble& y, const TestFunction& phi,
                                        std::size_t samples, std::uint64_t seed) {
    if (f.n != x.n() || f.n != y.n()) throw std::invalid_argument("ensemble dimension mismatch");
    InvarianceReport rep;
    rep.degree = f.degree();
    rep.total_weight = f.total_weight();
    // Pessimize per coordinate over both ensembles so the influence bound
    // also covers every hybrid between them.
    std::vector<double> sig(static_cast<std::size_t>(f.n));
    auto sx = x.sigmas(), sy = y.sigmas();
    for (int i = 0; i < f.n; ++i) sig[i] = std::min(sx[i], sy[i]);
    rep.epsilon = poly_influences(f, sig).max_nonempty();
    double base = phi.third_derivative_bound * rep.total_weight * std::sqrt(rep.epsilon);
    rep.rhs = std::pow(2.0, 12.0 * rep.degree) * base;
    rep.rhs_stated = std::pow(2.0, 5.0 * rep.degree) * base;
    DistributionDiff diff = hybrid_distribution_diff(f, x, y, phi, samples, seed);
    rep.lhs = diff.estimate;
    rep.mc_error = diff.mc_error;
    rep.exact = diff.exact;
    double lhs_low = rep.exact ? rep.lhs : rep.lhs - 3.0 * rep.mc_error;
    double tol = 1e-12 * std::max(1.0, rep.rhs);
    rep.pass = lhs_low <= rep.rhs + tol;
    rep.stated_pass = lhs_low <= rep.rhs_stated + tol;
    rep.vacuous = phi.range_width > 0.0 && rep.rhs >= phi.range_width;
    return rep;
}

}  // namespace pcube
