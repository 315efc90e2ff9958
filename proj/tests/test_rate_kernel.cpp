#include "doctest.h"

#include "ultradiff/rate_kernel.hpp"

using namespace ultradiff;

TEST_CASE("vladimirov profile values") {
    Base p2(2);
    Window w(-2, 1);
    auto prof = RateProfile::vladimirov(p2, w, 1.0);
    CHECK(prof.value(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(prof.value(-1) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(prof.value(1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(prof.value(2) == 0.0);  // vanishing tail beyond the window
    CHECK_THROWS(prof.value(-3));
    for (int i = w.gamma_min; i < w.gamma_max; ++i) {
        CHECK(prof.value(i) > prof.value(i + 1));  // strictly decreasing
    }
    CHECK_THROWS_AS(RateProfile::vladimirov(p2, w, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(RateProfile::vladimirov(p2, w, -1.0), std::invalid_argument);
}

TEST_CASE("delta_w and telescoping") {
    Base p2(2);
    Window w(-1, 1);
    auto prof = RateProfile::vladimirov(p2, w, 1.0);
    CHECK(prof.delta_w(0) == doctest::Approx(0.75).epsilon(1e-15));
    // (4-1) + (1-1/4) + 1/4 = 4 = W(1/2)
    CHECK(prof.delta_w(-1) + prof.delta_w(0) + prof.delta_w(1) ==
          doctest::Approx(prof.value(-1)).epsilon(1e-14));
    for (int gamma = w.gamma_min; gamma <= w.gamma_max; ++gamma) {
        double sum = 0.0;
        for (int i = gamma; i < w.gamma_max; ++i) sum += prof.delta_w(i);
        CHECK(sum == doctest::Approx(prof.value(gamma) - prof.value(w.gamma_max))
                         .epsilon(1e-14));
    }
}

TEST_CASE("table profiles") {
    Base p2(2);
    Window w(0, 2);
    auto prof = RateProfile::table(p2, w, {3.0, 1.0, 1.0});
    CHECK(prof.value(0) == 3.0);
    CHECK(prof.value(1) == 1.0);
    CHECK(prof.value(2) == 1.0);  // equal adjacent values are allowed
    CHECK(prof.delta_w(1) == 0.0);
    CHECK(prof.delta_w(2) == 1.0);  // tail step: W vanishes past the window

    CHECK_THROWS_AS(RateProfile::table(p2, w, {1.0, 2.0, 3.0}), MonotonicityViolation);
    CHECK_THROWS_AS(RateProfile::table(p2, w, {1.0, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(RateProfile::table(p2, w, {1.0}), std::invalid_argument);
}

TEST_CASE("constant table annihilates fine structure increments") {
    auto prof = RateProfile::table(Base(3), Window(-1, 1), {2.0, 2.0, 2.0});
    CHECK(prof.delta_w(-1) == 0.0);
    CHECK(prof.delta_w(0) == 0.0);
    CHECK(prof.delta_w(1) == 2.0);  // only the tail term survives
}

TEST_CASE("json round trip") {
    Base p2(2);
    Window w(-1, 1);
    auto vlad = RateProfile::from_json(p2, w, {{"type", "vladimirov"}, {"alpha", 0.5}});
    CHECK(vlad.kind() == "vladimirov");
    CHECK(vlad.alpha() == 0.5);
    auto back = RateProfile::from_json(p2, w, vlad.to_json());
    for (int i = w.gamma_min; i <= w.gamma_max; ++i) CHECK(back.value(i) == vlad.value(i));

    nlohmann::json tbl = {{"type", "table"},
                          {"values", {{"-1", 4.0}, {"0", 1.0}, {"1", 0.25}}},
                          {"tail", "vanishing"}};
    auto prof = RateProfile::from_json(p2, w, tbl);
    CHECK(prof.value(-1) == 4.0);
    CHECK(prof.value(1) == 0.25);
    auto again = RateProfile::from_json(p2, w, prof.to_json());
    CHECK(again.value(0) == 1.0);

    CHECK_THROWS(RateProfile::from_json(p2, w, {{"type", "table"}, {"values", {{"0", 1.0}}}}));
    CHECK_THROWS(RateProfile::from_json(p2, w, {{"type", "mystery"}}));
    CHECK_THROWS(RateProfile::from_json(
        p2, w, {{"type", "table"},
                {"values", {{"-1", 4.0}, {"0", 1.0}, {"1", 0.25}}},
                {"tail", "polynomial"}}));
}
