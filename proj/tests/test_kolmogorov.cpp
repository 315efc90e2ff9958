#include "doctest.h"

#include <cmath>
#include <random>

#include "ultradiff/kolmogorov.hpp"
#include "ultradiff/oracle.hpp"

using namespace ultradiff;

namespace {

// Half-occupied window: support on leaves 0..3, complement 4..7.
MeasureTree half_tree() {
    std::vector<Rational> dens(8, Rational(0));
    dens[0] = 1;
    dens[1] = 2;
    dens[2] = Rational(1, 2);
    dens[3] = 1;
    return MeasureTree(Base(2), Window(-3, 0), std::move(dens));
}

}  // namespace

TEST_CASE("restrict_to_support") {
    auto t = half_tree();
    auto ones = PiecewiseFunction::constant(t.base(), t.window(), 1.0);
    auto restricted = restrict_to_support(t, ones);
    for (std::int64_t i = 0; i < 8; ++i) {
        CHECK(restricted[i] == (i < 4 ? 1.0 : 0.0));
    }
    // idempotent, and the identity on functions already supported in m
    auto twice = restrict_to_support(t, restricted);
    CHECK(sup_diff(twice, restricted) == 0.0);

    auto split = split_solution(t, ones);
    for (std::int64_t i = 0; i < 8; ++i) {
        CHECK(split.on_support[i] + split.off_support[i] == ones[i]);
        CHECK(split.on_support[i] * split.off_support[i] == 0.0);
    }
}

TEST_CASE("complement evolution: pure decay with empty source") {
    auto t = half_tree();
    auto prof = RateProfile::vladimirov(t.base(), t.window(), 1.0);
    SpectralSolver solver(t, prof);

    PiecewiseFunction phi0(t.base(), t.window());
    phi0[5] = 2.0;
    phi0[7] = -1.0;
    auto zero_proj = solver.project(PiecewiseFunction(t.base(), t.window()));

    const std::vector<double> times{0.0, 0.5, 2.0};
    auto states = evolve_complement(solver, phi0, zero_proj, times);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const double time = times[ti];
        for (std::int64_t x = 4; x < 8; ++x) {
            CHECK(states[ti][x] ==
                  doctest::Approx(phi0[x] * std::exp(-solver.rate_at(x) * time))
                      .epsilon(1e-14));
        }
        for (std::int64_t x = 0; x < 4; ++x) CHECK(states[ti][x] == 0.0);
    }

    PiecewiseFunction bad(t.base(), t.window());
    bad[0] = 1.0;  // support leaf
    CHECK_THROWS(evolve_complement(solver, bad, zero_proj, {1.0}));
}

TEST_CASE("complement evolution: stationary source is the fixed point") {
    auto t = half_tree();
    auto prof = RateProfile::vladimirov(t.base(), t.window(), 1.0);
    SpectralSolver solver(t, prof);

    const double c = 3.0;
    auto proj = solver.project(PiecewiseFunction::constant(t.base(), t.window(), c));
    PiecewiseFunction phi0(t.base(), t.window());  // starts at zero off-support

    auto states = evolve_complement(solver, phi0, proj, {0.0, 50.0});
    for (std::int64_t x = 4; x < 8; ++x) {
        CHECK(states[0][x] == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(states[1][x] == doctest::Approx(c).epsilon(1e-12));
    }
}

TEST_CASE("complement evolution matches the dense oracle") {
    std::mt19937 rng(57);
    std::uniform_int_distribution<int> num(0, 4);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    for (std::uint32_t p : {2u, 3u}) {
        Base base(p);
        Window w(-1, 1);
        std::vector<Rational> dens;
        for (std::int64_t i = 0; i < leaf_count(base, w); ++i) {
            dens.push_back(Rational(num(rng)));
        }
        MeasureTree t(base, w, std::move(dens));
        if (t.total_measure() == 0 || t.support_leaves().empty()) continue;
        auto prof = RateProfile::vladimirov(base, w, 1.0);
        SpectralSolver solver(t, prof);

        PiecewiseFunction f0(base, w);
        for (std::int64_t i = 0; i < t.leaf_count(); ++i) f0[i] = val(rng);
        auto split = split_solution(t, f0);
        auto proj = solver.project(split.on_support);

        const std::vector<double> times{0.1, 1.0, 3.0};
        auto complement = evolve_complement(solver, split.off_support, proj, times);
        auto oracle = expm_apply(build_generator(t, prof), f0, times);
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            for (std::int64_t x = 0; x < t.leaf_count(); ++x) {
                if (t.is_support_leaf(x)) continue;
                CHECK(std::abs(complement[ti][x] - oracle[ti][x]) <= 1e-8);
            }
        }
    }
}

TEST_CASE("potential reduction") {
    auto t = half_tree();
    auto prof = RateProfile::vladimirov(t.base(), t.window(), 1.0);

    SUBCASE("constant potential has no reaction") {
        auto U = PiecewiseFunction::constant(t.base(), t.window(), 4.0);
        auto red = reduce_potential(t, prof, U);
        for (std::int64_t i = 0; i < 8; ++i) {
            CHECK(red.reaction[i] == 0.0);  // exact: all increments vanish
            CHECK(red.weighted_measure.density(i) == 4 * t.density(i));
        }
    }

    SUBCASE("zero potential") {
        PiecewiseFunction U(t.base(), t.window());
        auto red = reduce_potential(t, prof, U);
        CHECK(red.weighted_measure.total_measure() == 0);
        for (std::int64_t i = 0; i < 8; ++i) CHECK(red.reaction[i] == 0.0);
    }

    SUBCASE("negative potential is rejected") {
        auto U = PiecewiseFunction::constant(t.base(), t.window(), -1.0);
        CHECK_THROWS_AS(reduce_potential(t, prof, U), std::invalid_argument);
    }

    SUBCASE("generator identity on random potentials") {
        std::mt19937 rng(61);
        std::uniform_real_distribution<double> val(0.0, 3.0);
        for (std::uint32_t p : {2u, 3u}) {
            Base base(p);
            Window w(p == 2 ? -1 : 0, 1);
            auto haar = MeasureTree::uniform(base, w, Rational(1));
            auto k2 = RateProfile::vladimirov(base, w, 0.5);
            PiecewiseFunction U(base, w);
            for (std::int64_t i = 0; i < U.leaf_count(); ++i) U[i] = val(rng);
            CHECK(potential_generator_residual(haar, k2, U) <= 1e-12);

            auto Uc = PiecewiseFunction::constant(base, w, 2.0);
            CHECK(potential_generator_residual(haar, k2, Uc) <= 1e-12);
        }
    }
}
