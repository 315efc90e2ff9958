#include "doctest.h"

#include <random>

#include "ultradiff/padic.hpp"

using namespace ultradiff;

TEST_CASE("base and window validation") {
    CHECK_THROWS_AS(Base(1), std::invalid_argument);
    CHECK_THROWS_AS(Base(0), std::invalid_argument);
    CHECK_NOTHROW(Base(2));
    CHECK_NOTHROW(Base(10));  // composite bases are fine
    CHECK_THROWS_AS(Window(1, 0), std::invalid_argument);
    CHECK(Window(-2, 3).depth() == 5);
}

TEST_CASE("ball and leaf counts") {
    Base p2(2);
    Window w(-3, 0);
    CHECK(leaf_count(p2, w) == 8);
    CHECK(ball_count_at_level(p2, w, 0) == 1);
    CHECK(ball_count_at_level(p2, w, -1) == 2);
    CHECK(ball_count_at_level(p2, w, -3) == 8);
    CHECK(leaf_count(Base(3), Window(0, 4)) == 81);
    CHECK_THROWS(leaf_count(Base(5), Window(0, 40)));
}

TEST_CASE("digit expansions from rationals") {
    Base p2(2);
    auto x = PAdicApprox::from_rational(p2, Rational(5, 2));
    CHECK(x.valuation() == -1);
    CHECK(x.digit_at(-1) == 1);
    CHECK(x.digit_at(0) == 0);
    CHECK(x.digit_at(1) == 1);
    CHECK(x.digit_at(5) == 0);
    CHECK(x.to_rational() == Rational(5, 2));

    auto z = PAdicApprox::zero(p2);
    CHECK(z.is_zero());
    CHECK(z.to_rational() == 0);

    auto nine = PAdicApprox::from_rational(Base(3), Rational(9));
    CHECK(nine.valuation() == 2);

    CHECK_THROWS_AS(PAdicApprox::from_rational(p2, Rational(-1)), std::invalid_argument);
    CHECK_THROWS_AS(PAdicApprox::from_rational(p2, Rational(1, 3)), std::invalid_argument);
}

TEST_CASE("norm") {
    CHECK(norm(PAdicApprox::from_rational(Base(3), Rational(9))) == Rational(1, 9));
    CHECK(norm(PAdicApprox::zero(Base(2))) == 0);
    CHECK(norm(PAdicApprox::from_rational(Base(2), Rational(5, 2))) == 2);
}

TEST_CASE("distance") {
    Base p2(2);
    auto zero = PAdicApprox::zero(p2);
    auto half = PAdicApprox::from_rational(p2, Rational(1, 2));
    auto quarter = PAdicApprox::from_rational(p2, Rational(1, 4));
    CHECK(distance(zero, half) == 2);
    CHECK(distance(half, half) == 0);
    CHECK(distance(zero, quarter) == 4);
    CHECK_THROWS(distance(zero, PAdicApprox::zero(Base(3))));
}

TEST_CASE("ultrametric inequality on random digit strings") {
    std::mt19937 rng(42);
    for (std::uint32_t p : {2u, 3u, 5u}) {
        Base base(p);
        std::uniform_int_distribution<std::uint32_t> digit(0, p - 1);
        auto random_value = [&] {
            std::vector<std::uint32_t> digits(6);
            for (auto& d : digits) d = digit(rng);
            while (!digits.empty() && digits.front() == 0) digits.erase(digits.begin());
            while (!digits.empty() && digits.back() == 0) digits.pop_back();
            return digits.empty() ? PAdicApprox::zero(base)
                                  : PAdicApprox(base, -3, digits);
        };
        for (int trial = 0; trial < 200; ++trial) {
            auto x = random_value(), y = random_value(), z = random_value();
            CHECK(distance(x, z) <= std::max(distance(x, y), distance(y, z)));
        }
    }
}

TEST_CASE("split into fractional and integer parts") {
    Base p2(2);
    auto [frac, integer] = split_parts(PAdicApprox::from_rational(p2, Rational(5, 2)));
    CHECK(frac.to_rational() == Rational(1, 2));
    CHECK(integer.to_rational() == 2);

    auto [f7, i7] = split_parts(PAdicApprox::from_rational(Base(3), Rational(7)));
    CHECK(f7.is_zero());
    CHECK(i7.to_rational() == 7);

    // n = 1/2 shifted by p: {n p} = 0, [n p] = 1, so the digit recursion
    // n_0 p^{-g+1} = n_1 p^{-g} + [n_0 p] p^{-g} holds.
    auto n = PAdicApprox::from_rational(p2, Rational(1, 2));
    auto [n1, carry] = split_parts(n.shifted(1));
    CHECK(n1.is_zero());
    CHECK(carry.to_rational() == 1);

    // Round trip on random values.
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::uint32_t> digit(0, 2);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::uint32_t> digits{1};
        for (int k = 0; k < 5; ++k) digits.push_back(digit(rng));
        digits.push_back(1);
        PAdicApprox x(Base(3), -3, digits);
        auto [fx, ix] = split_parts(x);
        CHECK(fx.to_rational() + ix.to_rational() == x.to_rational());
    }
}

TEST_CASE("ball addresses and navigation") {
    Base p2(2);
    Window w(-2, 0);
    auto root = root_ball(p2, w);
    CHECK(root.is_root());
    CHECK(root.level == 0);
    CHECK(root.radius() == 1);
    CHECK(root.path_string().empty());

    auto b = ball_from_path(p2, w, "10");
    CHECK(b.is_leaf());
    CHECK(b.level == -2);
    CHECK(b.center().to_rational() == 1);  // digit 1 at exponent -gamma_max = 0
    CHECK(b.radius() == Rational(1, 4));
    CHECK(parent(parent(b)) == root);
    CHECK_THROWS(parent(root));
    CHECK_THROWS(child(b, 0));
    CHECK_THROWS(ball_from_path(p2, w, "12"));

    auto kids = children(root_ball(Base(3), Window(-1, 0)));
    REQUIRE(kids.size() == 3);
    CHECK(kids[0].path_string() == "0");
    CHECK(kids[1].path_string() == "1");
    CHECK(kids[2].path_string() == "2");
    for (std::uint32_t a = 0; a < 3; ++a) {
        CHECK(parent(kids[a]) == root_ball(Base(3), Window(-1, 0)));
    }
}

TEST_CASE("ball_of locates points") {
    Base p2(2);
    Window w(0, 2);  // root radius 4, leaves of radius 1
    auto x = PAdicApprox::from_rational(p2, Rational(3, 4));  // digits 1,1 at 2^-2, 2^-1
    auto leaf = ball_of(x, 0, w);
    CHECK(leaf.path_string() == "11");
    CHECK(ball_of(x, 2, w) == root_ball(p2, w));
    CHECK(parent(ball_of(x, 0, w)) == ball_of(x, 1, w));
    CHECK_THROWS(ball_of(PAdicApprox::from_rational(p2, Rational(1, 8)), 0, w));

    // distance <= p^g iff same ball at level g
    auto y = PAdicApprox::from_rational(p2, Rational(1, 4));
    CHECK(distance(x, y) == 2);
    CHECK(ball_of(x, 0, w) != ball_of(y, 0, w));
    CHECK(ball_of(x, 1, w) == ball_of(y, 1, w));
}

TEST_CASE("leaf order is lexicographic in digit paths") {
    Base p3(3);
    Window w(-2, 0);
    std::string previous;
    for (std::int64_t i = 0; i < leaf_count(p3, w); ++i) {
        auto leaf = leaf_address(p3, w, i);
        CHECK(leaf_index(leaf) == i);
        if (i > 0) CHECK(previous < leaf.path_string());
        previous = leaf.path_string();
    }
    auto b = ball_from_path(p3, w, "2");
    auto [begin, end] = leaf_range(b);
    CHECK(begin == 6);
    CHECK(end == 9);
    CHECK(ancestor_at(leaf_address(p3, w, 7), -1) == b);
    CHECK(ball_at_ordinal(p3, w, -1, 2) == b);
}

TEST_CASE("alphanumeric digit paths beyond base 10") {
    Base p12(12);
    Window w(-1, 0);
    auto b = ball_from_path(p12, w, "b");
    CHECK(leaf_index(b) == 11);
    CHECK(b.path_string() == "b");
}
