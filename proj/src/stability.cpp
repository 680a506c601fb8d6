#include "pcube/stability.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pcube {

namespace {
int popcount(mask_t m) { return std::popcount(m); }

double pow_int(double x, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= x;
    return v;
}

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

SpectralForm truncate(const SpectralForm& F, int r) {
    if (r < 0) throw std::invalid_argument("truncation degree must be >= 0");
    SpectralForm out = F;
    for (mask_t s = 0; s < out.coeffs.size(); ++s)
        if (popcount(s) > r) out.coeffs[s] = 0.0;
    return out;
}

CubeFunction low_degree_part(const CubeFunction& f, int r) {
    return inverse_transform(truncate(forward_transform(f), r));
}

WarmupReport warmup_check(const CubeFunction& f, int r) {
    if (f.cube.p != 0.5) throw std::invalid_argument("warm-up bound is for the uniform cube");
    if (!f.is_boolean()) throw std::invalid_argument("warm-up bound needs a boolean function");
    WarmupReport rep;
    rep.r = r;
    rep.lhs = truncate(forward_transform(f), r).energy();
    double mu = mu_measure(f);
    rep.rhs = pow_int(3.0, r) * mu * std::sqrt(mu);
    rep.margin = rep.rhs - rep.lhs;
    return rep;
}

ConcentrationReport concentration_check(const CubeFunction& f, int r, double delta) {
    if (!f.is_boolean()) throw std::invalid_argument("concentration check needs a boolean function");
    ConcentrationReport rep;
    rep.r = r;
    rep.delta = delta;
    SpectralForm F = forward_transform(f);
    rep.low_mass = truncate(F, r).energy();
    double energy = F.energy();
    double mu = mu_measure(f);

    CubeFunction low = inverse_transform(truncate(F, r));
    rep.delta0 = influence_table(low, r).max_influence(false);
    rep.bound_influence = pow_int(5.0, r) * std::cbrt(rep.delta0) * energy;
    rep.pass_influence = rep.low_mass <= rep.bound_influence * (1.0 + 1e-12);

    GlobalnessReport glob = globalness(f, r, delta);
    rep.hyp_global = glob.is_global;
    rep.hyp_sparse = mu < delta;
    rep.hyp_met = rep.hyp_global && rep.hyp_sparse;
    rep.bound_global = pow_int(10.0, r) * std::cbrt(delta) * mu;
    rep.pass_global = !rep.hyp_met || rep.low_mass <= rep.bound_global * (1.0 + 1e-12);
    return rep;
}

NormTruncateReport normtruncate_check(const CubeFunction& f, int r, double delta) {
    NormTruncateReport rep;
    rep.r = r;
    SpectralForm F = forward_transform(f);
    CubeFunction low = inverse_transform(truncate(F, r));
    double witnessed = influence_table(low, r).max_influence(true);
    if (delta < witnessed * (1.0 - 1e-12))
        throw std::invalid_argument("delta is below the witnessed truncated influence");
    rep.delta = delta;
    rep.lhs = truncate(F, r).energy();
    double mu = F.coeffs[0];
    double total = total_influence_spectral(F);
    double s2 = f.cube.sigma * f.cube.sigma;
    rep.rhs = mu * mu + std::pow(5.0, r - 1) * std::cbrt(delta) * s2 * total;
    rep.margin = rep.rhs - rep.lhs;
    return rep;
}

RestrictionWitness kahn_kalai_variant_search(const CubeFunction& f, double K, double C_trial) {
    if (!f.is_boolean()) throw std::invalid_argument("restriction search needs a boolean function");
    if (!(K > 0.0) || !(C_trial > 0.0)) throw std::invalid_argument("constants must be positive");
    RestrictionWitness rep;
    rep.K = K;
    rep.C_trial = C_trial;
    double mu = mu_measure(f);
    rep.hyp_lhs = f.cube.p * total_influence(f);
    rep.hyp_rhs = K * mu;
    rep.hypothesis_met = rep.hyp_lhs < rep.hyp_rhs;
    rep.size_bound = std::min(f.cube.n, static_cast<int>(std::ceil(C_trial * K)));
    rep.threshold = std::exp(-C_trial * K);

    rep.witness_measure = -1.0;
    rep.min_constant = std::numeric_limits<double>::infinity();
    for (int t = 0; t <= rep.size_bound; ++t) {
        mask_t best_mask = 0;
        double best = -1.0;
        for_each_subset_of_size(f.cube.n, t, [&](mask_t J) {
            double m = mu_measure(restrict_to(f, J, J));
            if (m > best) { best = m; best_mask = J; }
        });
        if (best > rep.witness_measure) {
            rep.witness_measure = best;
            rep.witness = best_mask;
        }
        if (best > 0.0) {
            double c = std::max(static_cast<double>(t) / K, -std::log(best) / K);
            rep.min_constant = std::min(rep.min_constant, c);
        }
    }
    rep.pass = rep.witness_measure >= rep.threshold;
    return rep;
}

InfluenceWitness bourgain_witness_search(const CubeFunction& f, double K) {
    if (!f.is_boolean()) throw std::invalid_argument("influence search needs a boolean function");
    if (!(K > 0.0)) throw std::invalid_argument("K must be positive");
    InfluenceWitness rep;
    rep.K = K;
    double mu = mu_measure(f);
    rep.hyp_lhs = f.cube.p * total_influence(f);
    rep.hyp_rhs = K * mu * (1.0 - mu);
    rep.hypothesis_met = rep.hyp_lhs <= rep.hyp_rhs;
    rep.size_bound = std::min(f.cube.n, static_cast<int>(std::ceil(2.0 * K)));
    rep.threshold = std::pow(5.0, -8.0 * K);
    auto table = influence_table(f, rep.size_bound);
    for (const auto& [s, v] : table.entries) {
        if (s == 0) continue;
        if (v > rep.witness_influence) {
            rep.witness_influence = v;
            rep.witness = s;
        }
    }
    rep.pass = rep.witness_influence >= rep.threshold;

    rep.monotone = f.is_monotone();
    if (rep.monotone) {
        for (int t = 1; t <= rep.size_bound; ++t) {
            for_each_subset_of_size(f.cube.n, t, [&](mask_t J) {
                double b = mu_measure(restrict_to(f, J, J)) - mu;
                if (b > rep.bump) { rep.bump = b; rep.bump_witness = J; }
            });
        }
        if (rep.bump > 0.0) {
            rep.bump_size_constant = popcount(rep.bump_witness) / K;
            rep.bump_decay_constant = -std::log(rep.bump) / K;
        }
    }
    return rep;
}

namespace {
SharpnessTable sharpness_common(const CubeFunction& f, double mu_closed, double infl_closed,
                                int s, int restrictable) {
    SharpnessTable tab;
    tab.p = f.cube.p;
    tab.mu_closed = mu_closed;
    tab.mu_enum = mu_measure(f);
    tab.influence_closed = infl_closed;
    tab.influence_enum = total_influence(f);
    const double h = 1e-6;
    tab.influence_fd = (measure_at(f, f.cube.p + h) - measure_at(f, f.cube.p - h)) / (2.0 * h);
    tab.K = f.cube.p * tab.influence_enum / tab.mu_enum;
    for (int t = 0; t <= restrictable; ++t) {
        SharpnessRow row;
        row.t = t;
        row.enumerated = max_restriction_measure(f, t);
        row.ratio_bound = std::pow(2.0, static_cast<double>(t) / s) * tab.mu_enum;
        row.within_ratio_bound = row.enumerated <= row.ratio_bound * (1.0 + 1e-12);
        tab.bump.push_back(row);
    }
    return tab;
}
}  // namespace

SharpnessTable sharpness_table_blocks(const BiasedCube& c, int s, int w) {
    CubeFunction f = make_antitribes(c, s, w);
    const double p = c.p;
    double block = 1.0 - pow_int(1.0 - p, w);
    double mu = pow_int(block, s);
    double infl = s * w * pow_int(1.0 - p, w - 1) * pow_int(block, s - 1);
    SharpnessTable tab = sharpness_common(f, mu, infl, s, s);
    tab.example = "blocks";
    tab.s = s;
    tab.w = w;
    for (auto& row : tab.bump) row.closed_form = pow_int(block, s - row.t);
    return tab;
}

SharpnessTable sharpness_table_pinned_blocks(const BiasedCube& c, int s, int w, int t) {
    CubeFunction f = make_antitribes_pinned(c, s, w, t);
    const double p = c.p;
    double block = 1.0 - pow_int(1.0 - p, w);
    double mu = pow_int(p, t) * pow_int(block, s);
    double infl = t * pow_int(p, t - 1) * pow_int(block, s) +
                  pow_int(p, t) * s * w * pow_int(1.0 - p, w - 1) * pow_int(block, s - 1);
    SharpnessTable tab = sharpness_common(f, mu, infl, s, s + t);
    tab.example = "pinned_blocks";
    tab.s = s;
    tab.w = w;
    tab.pinned = t;
    // Best restrictions release the pinned coordinates first (factor 1/p per
    // coordinate beats 1/block), then satisfy whole blocks.
    for (auto& row : tab.bump) {
        int m = row.t;
        if (m <= t)
            row.closed_form = pow_int(p, t - m) * pow_int(block, s);
        else
            row.closed_form = pow_int(block, s - (m - t));
    }
    return tab;
}

}  // namespace pcube
