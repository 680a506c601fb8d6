#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "pcube/stability.hpp"

using namespace pcube;

TEST_CASE("degree truncation keeps exactly the low coefficients") {
    auto c = BiasedCube::make(2, 0.25);
    auto f = make_and(c);
    auto F = truncate(forward_transform(f), 1);
    CHECK(F.energy() == doctest::Approx(7.0 / 256.0).epsilon(1e-14));
    CHECK(F.coeffs[3] == 0.0);
    auto low = low_degree_part(f, 1);
    auto back = inverse_transform(F);
    for (mask_t m = 0; m < c.size(); ++m)
        CHECK(low.values[m] == doctest::Approx(back.values[m]).epsilon(1e-13));
    CHECK_THROWS(truncate(forward_transform(f), -1));
}

TEST_CASE("warm-up concentration on the uniform cube") {
    auto c = BiasedCube::make(5, 0.5);
    auto rep = warmup_check(make_majority(c), 2);
    CHECK(rep.margin >= 0.0);

    CHECK_THROWS(warmup_check(make_majority(BiasedCube::make(5, 0.3)), 2));
    std::mt19937_64 rng(1);
    CHECK_THROWS(warmup_check(testutil::random_function(c, rng), 2));

    // Random boolean tables of very different densities.
    for (int trial = 0; trial < 100; ++trial) {
        double density = (trial % 10 + 0.5) / 10.0;
        auto f = testutil::random_boolean(c, rng, density);
        for (int r = 0; r <= 3; ++r) {
            auto w = warmup_check(f, r);
            CHECK(w.margin >= -1e-12 * std::max(1.0, w.rhs));
        }
    }
}

TEST_CASE("spectral concentration for a sparse global conjunction") {
    auto c = BiasedCube::make(12, 0.3);
    auto f = make_and(c);
    auto rep = concentration_check(f, 1, 1e-4);
    CHECK(rep.hyp_global);
    CHECK(rep.hyp_sparse);
    CHECK(rep.hyp_met);
    CHECK(rep.pass_global);
    CHECK(rep.pass_influence);
    CHECK(rep.low_mass <= rep.bound_global);

    // A dictator at the same delta is not sparse; the gated conclusion is
    // reported as inapplicable rather than failed.
    auto d = make_dictator(c, 0);
    auto rep2 = concentration_check(d, 1, 1e-4);
    CHECK(!rep2.hyp_met);
    CHECK(rep2.pass_global);
    CHECK(rep2.pass_influence);
}

TEST_CASE("influence-driven concentration on random boolean tables") {
    std::mt19937_64 rng(2);
    auto c = BiasedCube::make(6, 0.25);
    for (int trial = 0; trial < 50; ++trial) {
        auto f = testutil::random_boolean(c, rng, 0.3);
        auto rep = concentration_check(f, 2, 0.5);
        CHECK(rep.pass_influence);
        CHECK(rep.delta0 >= 0.0);
    }
}

TEST_CASE("truncated norm bound with a witnessed influence budget") {
    std::mt19937_64 rng(3);
    auto c = BiasedCube::make(6, 0.25);
    for (int trial = 0; trial < 50; ++trial) {
        auto f = testutil::random_boolean(c, rng, 0.4);
        auto low = low_degree_part(f, 2);
        double witnessed = influence_table(low, 2).max_influence(true);
        auto rep = normtruncate_check(f, 2, witnessed);
        CHECK(rep.margin >= -1e-12 * std::max(1.0, rep.rhs));
        if (witnessed > 1e-6) CHECK_THROWS(normtruncate_check(f, 2, witnessed / 2.0));
    }
}

TEST_CASE("restriction witness search on a conjunction") {
    auto c = BiasedCube::make(6, 0.5);
    auto f = make_and(c);
    auto rep = kahn_kalai_variant_search(f, 7.0, 1.0);
    CHECK(rep.hypothesis_met);  // p I[f] = 3/32 < 7/64
    CHECK(rep.size_bound == 6);
    CHECK(rep.pass);
    CHECK(rep.witness_measure == doctest::Approx(1.0).epsilon(1e-13));
    // Best tradeoff pins 2 of 6 coordinates: max(2/7, 4 ln2 / 7).
    CHECK(rep.min_constant == doctest::Approx(4.0 * std::log(2.0) / 7.0).epsilon(1e-9));

    auto weak = kahn_kalai_variant_search(f, 1.0, 1.0);
    CHECK(!weak.hypothesis_met);
    std::mt19937_64 rng(4);
    CHECK_THROWS(kahn_kalai_variant_search(testutil::random_function(c, rng), 2.0, 1.0));
    CHECK_THROWS(kahn_kalai_variant_search(f, -1.0, 1.0));
}

TEST_CASE("influence witness search with the monotone refinement") {
    auto c = BiasedCube::make(4, 0.5);
    auto f = make_tribes(c, 2, 2);
    auto rep = bourgain_witness_search(f, 3.1);
    CHECK(rep.hypothesis_met);  // p I[f] = 0.75 <= 3.1 * (7/16)(9/16)
    CHECK(rep.pass);
    CHECK(rep.witness_influence >= rep.threshold);
    CHECK(rep.monotone);
    CHECK(rep.bump == doctest::Approx(9.0 / 16.0).epsilon(1e-12));
    CHECK(rep.bump_size_constant > 0.0);
    CHECK(rep.bump_decay_constant > 0.0);
    CHECK_THROWS(bourgain_witness_search(f, 0.0));
}

TEST_CASE("block family table: measure, influence, and bump curve") {
    auto tab = sharpness_table_blocks(BiasedCube::make(6, 0.5), 3, 2);
    CHECK(tab.mu_closed == doctest::Approx(27.0 / 64.0).epsilon(1e-15));
    CHECK(tab.mu_enum == doctest::Approx(tab.mu_closed).epsilon(1e-12));
    CHECK(tab.influence_closed == doctest::Approx(27.0 / 16.0).epsilon(1e-15));
    CHECK(tab.influence_enum == doctest::Approx(tab.influence_closed).epsilon(1e-12));
    CHECK(std::abs(tab.influence_fd - tab.influence_closed) <= 1e-5);
    CHECK(tab.K == doctest::Approx(2.0).epsilon(1e-12));

    REQUIRE(tab.bump.size() == 4);
    double block = 0.75;
    for (const auto& row : tab.bump) {
        double want = std::pow(block, 3 - row.t);
        CHECK(row.closed_form == doctest::Approx(want).epsilon(1e-15));
        CHECK(row.enumerated == doctest::Approx(want).epsilon(1e-12));
    }
    // The doubling-per-block ratio bound only covers the empty restriction
    // here; the deeper rows overshoot it and the table reports that honestly.
    CHECK(tab.bump[0].within_ratio_bound);
    CHECK(!tab.bump[1].within_ratio_bound);
    CHECK(!tab.bump[2].within_ratio_bound);
    CHECK(!tab.bump[3].within_ratio_bound);
}

TEST_CASE("pinned block family table") {
    auto tab = sharpness_table_pinned_blocks(BiasedCube::make(10, 0.4), 4, 2, 2);
    CHECK(tab.mu_closed == doctest::Approx(0.0268435456).epsilon(1e-12));
    CHECK(tab.mu_enum == doctest::Approx(tab.mu_closed).epsilon(1e-11));
    CHECK(tab.influence_closed == doctest::Approx(0.33554432).epsilon(1e-11));
    CHECK(tab.influence_enum == doctest::Approx(tab.influence_closed).epsilon(1e-10));
    CHECK(tab.K == doctest::Approx(5.0).epsilon(1e-9));

    REQUIRE(tab.bump.size() == 7);
    // Releasing a pinned coordinate multiplies the measure by 1/p, which
    // beats satisfying a block; the closed form switches over at t = 2.
    double block = 0.64;
    CHECK(tab.bump[1].closed_form == doctest::Approx(0.4 * std::pow(block, 4)).epsilon(1e-12));
    CHECK(tab.bump[2].closed_form == doctest::Approx(std::pow(block, 4)).epsilon(1e-12));
    CHECK(tab.bump[3].closed_form == doctest::Approx(std::pow(block, 3)).epsilon(1e-12));
    for (const auto& row : tab.bump)
        CHECK(row.enumerated == doctest::Approx(row.closed_form).epsilon(1e-11));
}
