#include "pcube/product.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace pcube {

namespace {
int popcount(mask_t m) { return std::popcount(m); }

double pow_int(double x, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= x;
    return v;
}
}  // namespace

ProductSpace ProductSpace::make(const std::vector<std::vector<double>>& factor_probs) {
    if (factor_probs.empty() || factor_probs.size() > 20)
        throw std::invalid_argument("product space needs 1..20 factors");
    ProductSpace s;
    for (const auto& probs : factor_probs) {
        if (probs.size() < 2) throw std::invalid_argument("every factor needs at least two atoms");
        double sum = 0.0, mn = 1.0;
        for (double v : probs) {
            if (!(v > 0.0)) throw std::invalid_argument("factor atoms must have positive probability");
            sum += v;
            mn = std::min(mn, v);
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("factor probabilities must sum to 1");
        if (!(mn < 0.5))
            throw std::invalid_argument(
                "smallest atom must be strictly below 1/2; merge atoms to sharpen the factor");
        Factor f;
        f.probs = probs;
        f.min_prob = mn;
        f.sigma = std::sqrt(mn * (1.0 - mn));
        s.factors.push_back(std::move(f));
    }
    s.strides.resize(s.factors.size());
    s.points = 1;
    for (std::size_t t = 0; t < s.factors.size(); ++t) {
        s.strides[t] = s.points;
        s.points *= s.factors[t].probs.size();
        if (s.points > (std::size_t{1} << 24))
            throw std::invalid_argument("product space too large to enumerate");
    }
    return s;
}

std::vector<double> ProductSpace::weights() const {
    std::vector<double> w(points, 1.0);
    for (std::size_t idx = 0; idx < points; ++idx)
        for (int t = 0; t < n(); ++t) w[idx] *= factors[t].probs[digit(idx, t)];
    return w;
}

bool same_space(const ProductSpace& a, const ProductSpace& b) {
    if (a.factors.size() != b.factors.size()) return false;
    for (std::size_t t = 0; t < a.factors.size(); ++t)
        if (a.factors[t].probs != b.factors[t].probs) return false;
    return true;
}

ProductFunction::ProductFunction(ProductSpace s, std::vector<double> v)
    : space(std::move(s)), values(std::move(v)) {
    if (values.size() != space.points)
        throw std::invalid_argument("table size does not match the space");
}

ProductFunction ProductFunction::constant(const ProductSpace& s, double value) {
    return ProductFunction(s, std::vector<double>(s.points, value));
}

double expectation(const ProductFunction& f) {
    auto w = f.space.weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * f.values[i];
    return acc;
}

double inner_product(const ProductFunction& f, const ProductFunction& g) {
    if (!same_space(f.space, g.space)) throw std::invalid_argument("inner product across spaces");
    auto w = f.space.weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * f.values[i] * g.values[i];
    return acc;
}

double moment(const ProductFunction& f, int k) {
    if (k < 1) throw std::invalid_argument("moment order must be >= 1");
    auto w = f.space.weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        double v = 1.0;
        for (int j = 0; j < k; ++j) v *= f.values[i];
        acc += w[i] * v;
    }
    return acc;
}

double l2_norm(const ProductFunction& f) { return std::sqrt(moment(f, 2)); }

ProductFunction average_out(const ProductFunction& f, int t) {
    if (t < 0 || t >= f.space.n()) throw std::invalid_argument("coordinate out of range");
    const auto& probs = f.space.factors[t].probs;
    const std::size_t stride = f.space.strides[t];
    const std::size_t arity = probs.size();
    ProductFunction out = f;
    const std::size_t block = stride * arity;
    for (std::size_t base = 0; base < f.space.points; base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
            double mean = 0.0;
            for (std::size_t d = 0; d < arity; ++d)
                mean += probs[d] * f.values[base + off + d * stride];
            for (std::size_t d = 0; d < arity; ++d)
                out.values[base + off + d * stride] = mean;
        }
    }
    return out;
}

ProductFunction project_onto(const ProductFunction& f, mask_t J) {
    ProductFunction out = f;
    for (int t = 0; t < f.space.n(); ++t)
        if (!(J >> t & 1u)) out = average_out(out, t);
    return out;
}

ProductFunction laplacian_coordinate(const ProductFunction& f, int t) {
    ProductFunction avg = average_out(f, t);
    ProductFunction out = f;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= avg.values[i];
    return out;
}

ESDecomposition es_decompose(const ProductFunction& f) {
    const int n = f.space.n();
    if (n > 16) throw std::invalid_argument("decomposition is gated to 16 factors");
    ESDecomposition d;
    d.space = f.space;
    const mask_t full = (mask_t{1} << n) - 1;
    d.components.resize(std::size_t{1} << n);
    for (mask_t J = 0; J <= full; ++J) d.components[J] = project_onto(f, J).values;
    // Mobius inversion over the subset lattice, one coordinate at a time.
    for (int t = 0; t < n; ++t) {
        const mask_t bit = mask_t{1} << t;
        for (mask_t S = 0; S <= full; ++S) {
            if (!(S & bit)) continue;
            auto& hi = d.components[S];
            const auto& lo = d.components[S ^ bit];
            for (std::size_t i = 0; i < hi.size(); ++i) hi[i] -= lo[i];
        }
    }
    return d;
}

ProductFunction es_component(const ESDecomposition& d, mask_t S) {
    if (S >= d.components.size()) throw std::invalid_argument("component set out of range");
    return ProductFunction(d.space, d.components[S]);
}

ProductFunction es_reconstruct(const ESDecomposition& d) {
    ProductFunction out = ProductFunction::constant(d.space, 0.0);
    for (const auto& comp : d.components)
        for (std::size_t i = 0; i < comp.size(); ++i) out.values[i] += comp[i];
    return out;
}

ProductFunction laplacian(const ProductFunction& f, mask_t S) {
    ProductFunction out = f;
    for (int t = 0; t < f.space.n(); ++t)
        if (S >> t & 1u) out = laplacian_coordinate(out, t);
    return out;
}

ProductFunction laplacian_spectral(const ESDecomposition& d, mask_t S) {
    ProductFunction out = ProductFunction::constant(d.space, 0.0);
    for (mask_t E = 0; E < d.components.size(); ++E) {
        if ((E & S) != S) continue;
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += d.components[E][i];
    }
    return out;
}

ProductFunction product_noise(const ProductFunction& f, double rho) {
    if (!(rho >= 0.0) || !(rho <= 1.0)) throw std::invalid_argument("noise rate must lie in [0,1]");
    ProductFunction out = f;
    for (int t = 0; t < f.space.n(); ++t) {
        ProductFunction avg = average_out(out, t);
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] = rho * out.values[i] + (1.0 - rho) * avg.values[i];
    }
    return out;
}

ProductFunction product_noise_spectral(const ESDecomposition& d, double rho) {
    ProductFunction out = ProductFunction::constant(d.space, 0.0);
    for (mask_t S = 0; S < d.components.size(); ++S) {
        double scale = pow_int(rho, popcount(S));
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += scale * d.components[S][i];
    }
    return out;
}

ProductFunction product_noise_kernel(const ProductFunction& f, double rho) {
    if (f.space.points > 4096) throw std::invalid_argument("kernel enumeration is for small spaces");
    ProductFunction out = ProductFunction::constant(f.space, 0.0);
    for (std::size_t x = 0; x < f.space.points; ++x) {
        double acc = 0.0;
        for (std::size_t y = 0; y < f.space.points; ++y) {
            double k = 1.0;
            for (int t = 0; t < f.space.n(); ++t) {
                int dx = f.space.digit(x, t), dy = f.space.digit(y, t);
                double resample = (1.0 - rho) * f.space.factors[t].probs[dy];
                k *= dx == dy ? rho + resample : resample;
            }
            acc += k * f.values[y];
        }
        out.values[x] = acc;
    }
    return out;
}

EsMomentReport es_moment_check(const ProductFunction& f, int q, double rho) {
    if (q < 4 || q % 2) throw std::invalid_argument("exact moments need even q >= 4");
    double cap = 1.0 / (8.0 * std::pow(static_cast<double>(q), 1.5));
    if (!(rho >= 0.0) || rho > cap * (1.0 + 1e-15))
        throw std::invalid_argument("smoothing rate exceeds 1/(8 q^{3/2})");
    EsMomentReport rep;
    rep.q = q;
    rep.rho = rho;
    rep.lhs = moment(product_noise(f, rho), q);
    ESDecomposition d = es_decompose(f);
    const int n = f.space.n();
    // ||L_S f||_2^2 = sum_{E >= S} ||f^{=E}||_2^2 by orthogonality.
    std::vector<double> comp_energy(d.components.size());
    for (mask_t S = 0; S < d.components.size(); ++S)
        comp_energy[S] = moment(es_component(d, S), 2);
    for (int t = 0; t < n; ++t) {
        const mask_t bit = mask_t{1} << t;
        for (mask_t m = 0; m < comp_energy.size(); ++m)
            if (!(m & bit)) comp_energy[m] += comp_energy[m | bit];
    }
    for (mask_t S = 0; S < comp_energy.size(); ++S) {
        double factor = 1.0;
        for (int t = 0; t < n; ++t)
            if (S >> t & 1u) factor *= std::pow(f.space.factors[t].sigma, 2.0 - q);
        rep.rhs += factor * pow_int(std::sqrt(comp_energy[S]), q);
    }
    rep.margin = rep.rhs - rep.lhs;
    rep.pass = rep.margin >= -1e-12 * std::max(1.0, std::abs(rep.rhs));
    return rep;
}

HolderTermReport holder_term_check(const std::vector<ProductFunction>& fs,
                                   const std::vector<mask_t>& deps) {
    if (fs.empty() || fs.size() != deps.size())
        throw std::invalid_argument("need one dependency set per function");
    const ProductSpace& space = fs[0].space;
    const int n = space.n();
    for (const auto& f : fs)
        if (!same_space(f.space, space)) throw std::invalid_argument("functions live on different spaces");
    // Verify the declared dependencies: averaging an untouched coordinate
    // must not change the function.
    for (std::size_t i = 0; i < fs.size(); ++i) {
        for (int t = 0; t < n; ++t) {
            if (deps[i] >> t & 1u) continue;
            ProductFunction avg = average_out(fs[i], t);
            for (std::size_t j = 0; j < avg.values.size(); ++j)
                if (std::abs(avg.values[j] - fs[i].values[j]) > 1e-9 * std::max(1.0, std::abs(fs[i].values[j])))
                    throw std::invalid_argument("function depends on a coordinate outside its set");
        }
    }
    HolderTermReport rep;
    rep.cover_count.assign(n, 0);
    for (mask_t d : deps)
        for (int t = 0; t < n; ++t)
            if (d >> t & 1u) ++rep.cover_count[t];
    for (int t = 0; t < n; ++t)
        if (rep.cover_count[t] == 1) rep.single_cover = true;

    ProductFunction prod = ProductFunction::constant(space, 1.0);
    for (const auto& f : fs)
        for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] *= f.values[i];
    rep.lhs = std::abs(expectation(prod));

    rep.rhs = 1.0;
    for (const auto& f : fs) rep.rhs *= l2_norm(f);
    const int qmax = static_cast<int>(fs.size());
    for (int j = 3; j <= qmax; ++j) {
        for (int t = 0; t < n; ++t)
            if (rep.cover_count[t] == j) rep.rhs *= std::pow(space.factors[t].sigma, 2.0 - j);
    }
    rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-12) + 1e-15;
    return rep;
}

double es_component_product(const ESDecomposition& d, const std::vector<mask_t>& sets) {
    ProductFunction prod = ProductFunction::constant(d.space, 1.0);
    for (mask_t S : sets) {
        if (S >= d.components.size()) throw std::invalid_argument("component set out of range");
        for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] *= d.components[S][i];
    }
    return expectation(prod);
}

}  // namespace pcube
