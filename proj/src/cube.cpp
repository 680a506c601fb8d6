#include "pcube/cube.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pcube {

namespace {
std::atomic<int> g_dimension_cap{24};

int popcount(mask_t m) { return std::popcount(m); }

// p^k (1-p)^(n-k) for k = 0..n by repeated multiplication.
std::vector<double> level_weights(int n, double p) {
    std::vector<double> w(n + 1);
    for (int k = 0; k <= n; ++k) {
        double v = 1.0;
        for (int i = 0; i < k; ++i) v *= p;
        for (int i = 0; i < n - k; ++i) v *= 1.0 - p;
        w[k] = v;
    }
    return w;
}
}  // namespace

int dimension_cap() { return g_dimension_cap.load(); }

void set_dimension_cap(int cap) {
    if (cap < 1 || cap > 30) throw std::invalid_argument("dimension cap must be in [1,30]");
    g_dimension_cap.store(cap);
}

BiasedCube BiasedCube::make(int n, double p) {
    if (n < 0 || n > dimension_cap())
        throw std::invalid_argument("cube dimension " + std::to_string(n) +
                                    " outside [0," + std::to_string(dimension_cap()) + "]");
    if (!(p > 0.0) || !(p <= 0.5))
        throw std::invalid_argument("bias must lie in (0, 1/2]; dualize for larger biases");
    BiasedCube c;
    c.n = n;
    c.p = p;
    c.sigma = std::sqrt(p * (1.0 - p));
    return c;
}

double BiasedCube::point_weight(mask_t x) const {
    double v = 1.0;
    for (int i = 0; i < n; ++i) v *= (x >> i & 1u) ? p : 1.0 - p;
    return v;
}

std::vector<double> BiasedCube::weights() const {
    auto lw = level_weights(n, p);
    std::vector<double> w(size());
    for (mask_t m = 0; m < size(); ++m) w[m] = lw[popcount(m)];
    return w;
}

bool same_cube(const BiasedCube& a, const BiasedCube& b) {
    return a.n == b.n && a.p == b.p;
}

CubeFunction::CubeFunction(BiasedCube c, std::vector<double> v) : cube(c), values(std::move(v)) {
    if (values.size() != cube.size())
        throw std::invalid_argument("table size does not match cube dimension");
}

CubeFunction CubeFunction::constant(const BiasedCube& c, double value) {
    return CubeFunction(c, std::vector<double>(c.size(), value));
}

bool CubeFunction::is_boolean(double tol) const {
    for (double v : values)
        if (std::abs(v) > tol && std::abs(v - 1.0) > tol) return false;
    return true;
}

bool CubeFunction::is_signed_boolean(double tol) const {
    for (double v : values)
        if (std::abs(v - 1.0) > tol && std::abs(v + 1.0) > tol) return false;
    return true;
}

bool CubeFunction::is_monotone() const {
    for (int i = 0; i < cube.n; ++i) {
        mask_t bit = mask_t{1} << i;
        for (mask_t m = 0; m < cube.size(); ++m)
            if (!(m & bit) && values[m] > values[m | bit]) return false;
    }
    return true;
}

double CubeFunction::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

int SpectralForm::degree(double tol) const {
    int d = -1;
    for (mask_t s = 0; s < coeffs.size(); ++s)
        if (std::abs(coeffs[s]) > tol) d = std::max(d, popcount(s));
    return d;
}

double SpectralForm::energy() const {
    double e = 0.0;
    for (double c : coeffs) e += c * c;
    return e;
}

double SpectralForm::low_degree_energy(int r) const {
    double e = 0.0;
    for (mask_t s = 0; s < coeffs.size(); ++s)
        if (popcount(s) <= r) e += coeffs[s] * coeffs[s];
    return e;
}

double mu_measure(const CubeFunction& f) {
    auto lw = level_weights(f.cube.n, f.cube.p);
    double acc = 0.0;
    for (mask_t m = 0; m < f.cube.size(); ++m) acc += lw[popcount(m)] * f.values[m];
    return acc;
}

double measure_at(const CubeFunction& f, double bias) {
    if (!(bias > 0.0) || !(bias < 1.0)) throw std::invalid_argument("bias must lie in (0,1)");
    auto lw = level_weights(f.cube.n, bias);
    double acc = 0.0;
    for (mask_t m = 0; m < f.cube.size(); ++m) acc += lw[popcount(m)] * f.values[m];
    return acc;
}

double lr_norm(const CubeFunction& f, double r) {
    if (r < 1.0) throw std::invalid_argument("norm exponent must be >= 1");
    auto lw = level_weights(f.cube.n, f.cube.p);
    double acc = 0.0;
    for (mask_t m = 0; m < f.cube.size(); ++m)
        acc += lw[popcount(m)] * std::pow(std::abs(f.values[m]), r);
    return std::pow(acc, 1.0 / r);
}

double moment(const CubeFunction& f, int k) {
    if (k < 1) throw std::invalid_argument("moment order must be >= 1");
    auto lw = level_weights(f.cube.n, f.cube.p);
    double acc = 0.0;
    for (mask_t m = 0; m < f.cube.size(); ++m) {
        double v = 1.0;
        for (int j = 0; j < k; ++j) v *= f.values[m];
        acc += lw[popcount(m)] * v;
    }
    return acc;
}

double inner_product(const CubeFunction& f, const CubeFunction& g) {
    if (!same_cube(f.cube, g.cube)) throw std::invalid_argument("inner product across different cubes");
    auto lw = level_weights(f.cube.n, f.cube.p);
    double acc = 0.0;
    for (mask_t m = 0; m < f.cube.size(); ++m) acc += lw[popcount(m)] * f.values[m] * g.values[m];
    return acc;
}

SpectralForm forward_transform(const CubeFunction& f) {
    const double p = f.cube.p, s = f.cube.sigma;
    std::vector<double> a = f.values;
    for (int i = 0; i < f.cube.n; ++i) {
        const mask_t bit = mask_t{1} << i;
        for (mask_t m = 0; m < a.size(); ++m) {
            if (m & bit) continue;
            double f0 = a[m], f1 = a[m | bit];
            a[m] = (1.0 - p) * f0 + p * f1;
            a[m | bit] = s * (f1 - f0);
        }
    }
    return SpectralForm{f.cube, std::move(a)};
}

CubeFunction inverse_transform(const SpectralForm& F) {
    const double p = F.cube.p, s = F.cube.sigma;
    std::vector<double> a = F.coeffs;
    if (a.size() != F.cube.size()) throw std::invalid_argument("coefficient table size mismatch");
    for (int i = 0; i < F.cube.n; ++i) {
        const mask_t bit = mask_t{1} << i;
        for (mask_t m = 0; m < a.size(); ++m) {
            if (m & bit) continue;
            double c0 = a[m], c1 = a[m | bit];
            a[m] = c0 - c1 * (p / s);
            a[m | bit] = c0 + c1 * ((1.0 - p) / s);
        }
    }
    return CubeFunction(F.cube, std::move(a));
}

CubeFunction restrict_to(const CubeFunction& f, mask_t S, mask_t assignment) {
    const int n = f.cube.n;
    if (S >= f.cube.size()) throw std::invalid_argument("restricted set outside the cube");
    if (assignment & ~S) throw std::invalid_argument("assignment touches coordinates outside the set");
    const int k = popcount(S);
    const int m = n - k;
    std::vector<int> rem;
    rem.reserve(m);
    for (int i = 0; i < n; ++i)
        if (!(S >> i & 1u)) rem.push_back(i);
    BiasedCube sub = BiasedCube::make(m, f.cube.p);
    std::vector<double> vals(sub.size());
    for (mask_t x = 0; x < sub.size(); ++x) {
        mask_t full = assignment;
        for (int j = 0; j < m; ++j)
            if (x >> j & 1u) full |= mask_t{1} << rem[j];
        vals[x] = f.values[full];
    }
    return CubeFunction(sub, std::move(vals));
}

CubeFunction make_dictator(const BiasedCube& c, int coord) {
    if (coord < 0 || coord >= c.n) throw std::invalid_argument("dictator coordinate out of range");
    std::vector<double> v(c.size());
    for (mask_t m = 0; m < c.size(); ++m) v[m] = (m >> coord) & 1u;
    return CubeFunction(c, std::move(v));
}

CubeFunction make_and(const BiasedCube& c) {
    std::vector<double> v(c.size(), 0.0);
    v[c.size() - 1] = 1.0;
    return CubeFunction(c, std::move(v));
}

CubeFunction make_or(const BiasedCube& c) {
    std::vector<double> v(c.size(), 1.0);
    v[0] = 0.0;
    return CubeFunction(c, std::move(v));
}

CubeFunction make_parity(const BiasedCube& c) {
    std::vector<double> v(c.size());
    for (mask_t m = 0; m < c.size(); ++m) v[m] = popcount(m) & 1;
    return CubeFunction(c, std::move(v));
}

CubeFunction make_majority(const BiasedCube& c) {
    std::vector<double> v(c.size());
    for (mask_t m = 0; m < c.size(); ++m) v[m] = 2 * popcount(m) > c.n ? 1.0 : 0.0;
    return CubeFunction(c, std::move(v));
}

namespace {
void check_blocks(const BiasedCube& c, int s, int w, int t) {
    if (s < 1 || w < 1 || t < 0) throw std::invalid_argument("block parameters must be positive");
    if (s * w + t > c.n) throw std::invalid_argument("block layout does not fit the cube");
}
}  // namespace

CubeFunction make_tribes(const BiasedCube& c, int s, int w) {
    check_blocks(c, s, w, 0);
    std::vector<double> v(c.size());
    for (mask_t m = 0; m < c.size(); ++m) {
        bool any = false;
        for (int j = 0; j < s && !any; ++j) {
            bool all = true;
            for (int i = 0; i < w; ++i)
                if (!(m >> (j * w + i) & 1u)) { all = false; break; }
            any = all;
        }
        v[m] = any ? 1.0 : 0.0;
    }
    return CubeFunction(c, std::move(v));
}

CubeFunction make_antitribes(const BiasedCube& c, int s, int w) {
    check_blocks(c, s, w, 0);
    std::vector<double> v(c.size());
    for (mask_t m = 0; m < c.size(); ++m) {
        bool all = true;
        for (int j = 0; j < s && all; ++j) {
            bool any = false;
            for (int i = 0; i < w; ++i)
                if (m >> (j * w + i) & 1u) { any = true; break; }
            all = any;
        }
        v[m] = all ? 1.0 : 0.0;
    }
    return CubeFunction(c, std::move(v));
}

CubeFunction make_antitribes_pinned(const BiasedCube& c, int s, int w, int t) {
    check_blocks(c, s, w, t);
    CubeFunction f = make_antitribes(c, s, w);
    for (mask_t m = 0; m < c.size(); ++m)
        for (int i = 0; i < t; ++i)
            if (!(m >> (s * w + i) & 1u)) { f.values[m] = 0.0; break; }
    return f;
}

int hamming_ball_threshold(const BiasedCube& c, double alpha) {
    if (!(alpha >= 0.0) || !(alpha <= 1.0)) throw std::invalid_argument("target measure must lie in [0,1]");
    // mu_p(|x| >= t) is decreasing in t; t = 0 gives 1, t = n+1 gives 0.
    std::vector<double> tail(c.n + 2, 0.0);
    auto lw = std::vector<double>(c.n + 1);
    for (int k = 0; k <= c.n; ++k) {
        double binom = 1.0;
        for (int i = 0; i < k; ++i) binom = binom * (c.n - i) / (i + 1);
        lw[k] = binom * std::pow(c.p, k) * std::pow(1.0 - c.p, c.n - k);
    }
    for (int t = c.n; t >= 0; --t) tail[t] = tail[t + 1] + lw[t];
    int best = 0;
    double err = std::abs(tail[0] - alpha);
    for (int t = 1; t <= c.n + 1; ++t) {
        double e = std::abs(tail[t] - alpha);
        if (e < err) { err = e; best = t; }
    }
    return best;
}

CubeFunction make_hamming_ball(const BiasedCube& c, double alpha) {
    int t = hamming_ball_threshold(c, alpha);
    std::vector<double> v(c.size());
    for (mask_t m = 0; m < c.size(); ++m) v[m] = popcount(m) >= t ? 1.0 : 0.0;
    return CubeFunction(c, std::move(v));
}

CubeFunction make_character(const BiasedCube& c, mask_t S) {
    if (S >= c.size()) throw std::invalid_argument("character set outside the cube");
    std::vector<double> v(c.size());
    const double lo = -c.p / c.sigma, hi = (1.0 - c.p) / c.sigma;
    for (mask_t m = 0; m < c.size(); ++m) {
        double prod = 1.0;
        for (int i = 0; i < c.n; ++i)
            if (S >> i & 1u) prod *= (m >> i & 1u) ? hi : lo;
        v[m] = prod;
    }
    return CubeFunction(c, std::move(v));
}

namespace {
std::map<std::string, int> parse_params(const std::string& text) {
    std::map<std::string, int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
            throw std::invalid_argument("malformed generator parameter '" + item + "'");
        out[item.substr(0, eq)] = std::stoi(item.substr(eq + 1));
    }
    return out;
}

int need(const std::map<std::string, int>& m, const std::string& key) {
    auto it = m.find(key);
    if (it == m.end()) throw std::invalid_argument("generator parameter '" + key + "' missing");
    return it->second;
}
}  // namespace

CubeFunction generate(const BiasedCube& c, const std::string& spec) {
    std::string name = spec;
    std::map<std::string, int> params;
    double alpha = 0.5;
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
        name = spec.substr(0, colon);
        std::string rest = spec.substr(colon + 1);
        if (name == "hamming_ball") {
            auto eq = rest.find('=');
            if (eq == std::string::npos || rest.substr(0, eq) != "alpha")
                throw std::invalid_argument("hamming_ball takes alpha=<real>");
            alpha = std::stod(rest.substr(eq + 1));
        } else {
            params = parse_params(rest);
        }
    }
    if (name == "dictator") {
        int i = params.count("i") ? need(params, "i") : 1;
        return make_dictator(c, i - 1);
    }
    if (name == "and") return make_and(c);
    if (name == "or") return make_or(c);
    if (name == "parity") return make_parity(c);
    if (name == "majority") return make_majority(c);
    if (name == "tribes") return make_tribes(c, need(params, "s"), need(params, "w"));
    if (name == "antitribes") return make_antitribes(c, need(params, "s"), need(params, "w"));
    if (name == "antitribes_pinned")
        return make_antitribes_pinned(c, need(params, "s"), need(params, "w"), need(params, "t"));
    if (name == "hamming_ball") return make_hamming_ball(c, alpha);
    throw std::invalid_argument("unknown generator '" + name + "'");
}

std::vector<std::string> generator_names() {
    return {"dictator", "and", "or", "parity", "majority",
            "tribes", "antitribes", "antitribes_pinned", "hamming_ball"};
}

}  // namespace pcube
