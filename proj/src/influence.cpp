#include "pcube/influence.hpp"

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

// Visit every mask with the given popcount (Gosper's hack).
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
}  // namespace

CubeFunction derivative(const CubeFunction& f, mask_t S) {
    if (S >= f.cube.size()) throw std::invalid_argument("derivative set outside the cube");
    const double s = f.cube.sigma;
    std::vector<double> a = f.values;
    for (int i = 0; i < f.cube.n; ++i) {
        if (!(S >> i & 1u)) continue;
        const mask_t bit = mask_t{1} << i;
        for (mask_t m = 0; m < a.size(); ++m) {
            if (m & bit) continue;
            double d = s * (a[m | bit] - a[m]);
            a[m] = d;
            a[m | bit] = d;
        }
    }
    return CubeFunction(f.cube, std::move(a));
}

double gen_influence(const CubeFunction& f, mask_t S) {
    const int k = popcount(S);
    // Alternating sum over the 2^|S| restrictions, on the remaining cube; the
    // all-zeros term carries sign (-1)^|S|.
    std::vector<double> acc;
    CubeFunction first = restrict_to(f, S, 0);
    acc = first.values;
    if (k & 1)
        for (double& v : acc) v = -v;
    BiasedCube sub = first.cube;
    std::vector<mask_t> bits;
    for (int i = 0; i < f.cube.n; ++i)
        if (S >> i & 1u) bits.push_back(mask_t{1} << i);
    for (mask_t a = 1; a < (mask_t{1} << k); ++a) {
        mask_t assignment = 0;
        for (int j = 0; j < k; ++j)
            if (a >> j & 1u) assignment |= bits[j];
        CubeFunction part = restrict_to(f, S, assignment);
        double sign = (k - popcount(a)) & 1 ? -1.0 : 1.0;
        for (mask_t m = 0; m < part.values.size(); ++m) acc[m] += sign * part.values[m];
    }
    CubeFunction g(sub, std::move(acc));
    return moment(g, 2);
}

double gen_influence_spectral(const SpectralForm& F, mask_t S) {
    double e = 0.0;
    for (mask_t E = 0; E < F.coeffs.size(); ++E)
        if ((E & S) == S) e += F.coeffs[E] * F.coeffs[E];
    return e / pow_int(F.cube.sigma * F.cube.sigma, popcount(S));
}

std::vector<double> superset_energy(const SpectralForm& F) {
    std::vector<double> g(F.coeffs.size());
    for (mask_t m = 0; m < g.size(); ++m) g[m] = F.coeffs[m] * F.coeffs[m];
    for (int i = 0; i < F.cube.n; ++i) {
        const mask_t bit = mask_t{1} << i;
        for (mask_t m = 0; m < g.size(); ++m)
            if (!(m & bit)) g[m] += g[m | bit];
    }
    return g;
}

double total_influence(const CubeFunction& f) {
    double acc = 0.0;
    for (int i = 0; i < f.cube.n; ++i) {
        const mask_t bit = mask_t{1} << i;
        CubeFunction diff = f;
        for (mask_t m = 0; m < f.cube.size(); ++m) {
            if (m & bit) continue;
            double d = f.values[m | bit] - f.values[m];
            diff.values[m] = d;
            diff.values[m | bit] = d;
        }
        acc += moment(diff, 2);
    }
    return acc;
}

double total_influence_spectral(const SpectralForm& F) {
    double acc = 0.0;
    for (mask_t s = 0; s < F.coeffs.size(); ++s)
        acc += popcount(s) * F.coeffs[s] * F.coeffs[s];
    return acc / (F.cube.sigma * F.cube.sigma);
}

double total_influence_at(const CubeFunction& f, double bias) {
    if (!(bias > 0.0) || !(bias < 1.0)) throw std::invalid_argument("bias must lie in (0,1)");
    const int n = f.cube.n;
    std::vector<double> lw(n, 0.0);  // weights on the remaining n-1 coordinates
    for (int k = 0; k < n; ++k) {
        double v = 1.0;
        for (int i = 0; i < k; ++i) v *= bias;
        for (int i = 0; i < n - 1 - k; ++i) v *= 1.0 - bias;
        lw[k] = v;
    }
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const mask_t bit = mask_t{1} << i;
        for (mask_t m = 0; m < f.cube.size(); ++m) {
            if (m & bit) continue;
            double d = f.values[m | bit] - f.values[m];
            acc += lw[popcount(m)] * d * d;
        }
    }
    return acc;
}

double flip_total_influence(const CubeFunction& f) {
    if (!f.is_boolean()) throw std::invalid_argument("flip influence needs a boolean function");
    auto w = f.cube.weights();
    double acc = 0.0;
    for (int i = 0; i < f.cube.n; ++i) {
        const mask_t bit = mask_t{1} << i;
        for (mask_t m = 0; m < f.cube.size(); ++m)
            if (f.values[m] != f.values[m ^ bit]) acc += w[m];
    }
    return acc;
}

double GeneralizedInfluenceTable::at(mask_t S) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), S,
                               [](const auto& e, mask_t s) { return e.first < s; });
    if (it == entries.end() || it->first != S)
        throw std::out_of_range("influence not materialized for this set");
    return it->second;
}

double GeneralizedInfluenceTable::max_influence(bool nonempty_only) const {
    double m = 0.0;
    for (const auto& [s, v] : entries)
        if (!nonempty_only || s != 0) m = std::max(m, v);
    return m;
}

GeneralizedInfluenceTable influence_table(const CubeFunction& f, int r_max) {
    SpectralForm F = forward_transform(f);
    auto sup = superset_energy(F);
    const double s2 = f.cube.sigma * f.cube.sigma;
    const int cap = r_max < 0 ? f.cube.n : std::min(r_max, f.cube.n);
    GeneralizedInfluenceTable table;
    table.cube = f.cube;
    table.r_max = cap;
    for (mask_t S = 0; S < sup.size(); ++S) {
        int k = popcount(S);
        if (k > cap) continue;
        table.entries.emplace_back(S, sup[S] / pow_int(s2, k));
    }
    return table;
}

double beta_small_check(const CubeFunction& f, int r_max) {
    double energy = moment(f, 2);
    if (energy <= 0.0) throw std::invalid_argument("beta undefined for the zero function");
    auto table = influence_table(f, r_max);
    return table.max_influence(false) / energy;
}

GlobalnessReport globalness(const CubeFunction& f, int r, double delta) {
    if (!f.is_boolean()) throw std::invalid_argument("globalness is defined for boolean functions");
    if (r < 0 || r > f.cube.n) throw std::invalid_argument("restriction budget out of range");
    GlobalnessReport rep;
    rep.r = r;
    rep.delta = delta;
    rep.base_measure = mu_measure(f);
    rep.witness = 0;
    rep.witness_measure = rep.base_measure;
    rep.max_bump = 0.0;
    for (int k = 1; k <= r; ++k) {
        for_each_subset_of_size(f.cube.n, k, [&](mask_t J) {
            double m = mu_measure(restrict_to(f, J, J));
            if (m - rep.base_measure > rep.max_bump) {
                rep.max_bump = m - rep.base_measure;
                rep.witness = J;
                rep.witness_measure = m;
            }
        });
    }
    rep.is_global = rep.max_bump <= delta;
    return rep;
}

double max_restriction_measure(const CubeFunction& f, int size) {
    if (size < 0 || size > f.cube.n) throw std::invalid_argument("restriction size out of range");
    double best = -1.0;
    for_each_subset_of_size(f.cube.n, size, [&](mask_t J) {
        best = std::max(best, mu_measure(restrict_to(f, J, J)));
    });
    return best;
}

double max_restriction_measure_upto(const CubeFunction& f, int size) {
    if (f.is_monotone()) return max_restriction_measure(f, std::min(size, f.cube.n));
    double best = -1.0;
    for (int k = 0; k <= std::min(size, f.cube.n); ++k)
        best = std::max(best, max_restriction_measure(f, k));
    return best;
}

EquivalenceReport equivalence_suite(const CubeFunction& f, int r) {
    if (!f.is_boolean()) throw std::invalid_argument("equivalence suite needs a boolean function");
    EquivalenceReport rep;
    rep.r = r;
    rep.monotone = f.is_monotone();

    GlobalnessReport glob = globalness(f, r, 0.0);
    const double mu = glob.base_measure;
    auto table = influence_table(f, r);
    CubeFunction low = inverse_transform([&] {
        SpectralForm F = forward_transform(f);
        for (mask_t s = 0; s < F.coeffs.size(); ++s)
            if (popcount(s) > r) F.coeffs[s] = 0.0;
        return F;
    }());
    auto low_table = influence_table(low, r);

    rep.truncation_margin = 0.0;
    bool first = true;
    for (const auto& [s, v] : table.entries) {
        double m = v - low_table.at(s);
        if (first || m < rep.truncation_margin) rep.truncation_margin = m;
        first = false;
    }

    // Sparse route: delta witnessed by both the worst bump and the measure.
    rep.sparse.delta = std::max(glob.max_bump, mu);
    rep.sparse.applicable = true;
    rep.sparse.lhs = table.max_influence(false);
    rep.sparse.rhs = pow_int(8.0, r) * rep.sparse.delta;
    rep.sparse.margin = rep.sparse.rhs - rep.sparse.lhs;

    // Monotone route: delta is the worst bump alone; nonempty sets only.
    rep.monotone_route.applicable = rep.monotone;
    if (rep.monotone) {
        rep.monotone_route.delta = glob.max_bump;
        rep.monotone_route.lhs = table.max_influence(true);
        rep.monotone_route.rhs = pow_int(8.0, r) * rep.monotone_route.delta;
        rep.monotone_route.margin = rep.monotone_route.rhs - rep.monotone_route.lhs;
    }

    // Converse: delta witnessed by the largest nonempty influence.
    rep.converse.applicable = true;
    rep.converse.delta = table.max_influence(true);
    rep.converse.lhs = glob.max_bump;
    rep.converse.rhs = pow_int(4.0, r) * rep.converse.delta;
    rep.converse.margin = rep.converse.rhs - rep.converse.lhs;

    return rep;
}

}  // namespace pcube
