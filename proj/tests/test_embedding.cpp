#include "doctest.h"

#include "ultradiff/embedding.hpp"

using namespace ultradiff;

namespace {

FiniteUltrametricSpace three_points() {
    FiniteUltrametricSpace s;
    s.labels = {"u1", "u2", "u3"};
    s.dist = {{Rational(0), Rational(1, 2), Rational(1)},
              {Rational(1, 2), Rational(0), Rational(1)},
              {Rational(1), Rational(1), Rational(0)}};
    return s;
}

}  // namespace

TEST_CASE("ultrametric validation") {
    CHECK(validate_ultrametric(three_points()).empty());

    FiniteUltrametricSpace one;
    one.labels = {"x"};
    one.dist = {{Rational(0)}};
    CHECK(validate_ultrametric(one).empty());

    SUBCASE("strong triangle inequality") {
        auto s = three_points();
        s.dist[0][2] = s.dist[2][0] = Rational(4);  // 4 > max(1/2, 1)
        auto v = validate_ultrametric(s);
        REQUIRE(!v.empty());
        CHECK(v[0].kind == "triangle");
    }
    SUBCASE("symmetry") {
        auto s = three_points();
        s.dist[0][1] = Rational(2);
        auto v = validate_ultrametric(s);
        REQUIRE(!v.empty());
        CHECK(v[0].kind == "symmetry");
    }
    SUBCASE("diagonal") {
        auto s = three_points();
        s.dist[1][1] = Rational(1);
        auto v = validate_ultrametric(s);
        REQUIRE(!v.empty());
        CHECK(v[0].kind == "diagonal");
    }
    SUBCASE("positivity") {
        auto s = three_points();
        s.dist[0][1] = s.dist[1][0] = Rational(0);
        auto v = validate_ultrametric(s);
        REQUIRE(!v.empty());
        CHECK(v[0].kind == "positivity");
    }
    SUBCASE("shape") {
        FiniteUltrametricSpace s;
        s.labels = {"a", "b"};
        s.dist = {{Rational(0)}};
        auto v = validate_ultrametric(s);
        REQUIRE(!v.empty());
        CHECK(v[0].kind == "shape");
    }
}

TEST_CASE("three-point embedding") {
    auto res = embed(three_points(), Base(2));

    CHECK(res.window.gamma_min == 0);
    CHECK(res.window.gamma_max == 2);
    REQUIRE(res.assignment.size() == 3);
    CHECK(res.assignment[0].first == "u1");
    CHECK(res.assignment[0].second.path_string() == "00");
    CHECK(res.assignment[1].second.path_string() == "01");
    CHECK(res.assignment[2].second.path_string() == "10");

    REQUIRE(res.level_map.size() == 2);
    CHECK(res.level_map.at(Rational(1, 2)) == 1);
    CHECK(res.level_map.at(Rational(1)) == 2);

    // isometry after rescaling: |x_i - x_j|_p == p^{level_map(d_ij)}
    auto s = three_points();
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            auto xi = res.assignment[i].second.center();
            auto xj = res.assignment[j].second.center();
            Rational expected =
                i == j ? Rational(0)
                       : rational_pow(2, res.level_map.at(s.dist[i][j]));
            CHECK(distance(xi, xj) == expected);
        }
    }

    CHECK(res.leaf_of("u3").level == 0);
    CHECK_THROWS(res.leaf_of("nope"));
}

TEST_CASE("embedding edge cases") {
    SUBCASE("single point") {
        FiniteUltrametricSpace s;
        s.labels = {"only"};
        s.dist = {{Rational(0)}};
        auto res = embed(s, Base(3));
        CHECK(res.window.gamma_max == 0);
        CHECK(res.assignment.size() == 1);
        CHECK(res.level_map.empty());
    }

    SUBCASE("branch overflow at p = 2") {
        FiniteUltrametricSpace s;  // three mutually equidistant points
        s.labels = {"a", "b", "c"};
        s.dist = {{Rational(0), Rational(1), Rational(1)},
                  {Rational(1), Rational(0), Rational(1)},
                  {Rational(1), Rational(1), Rational(0)}};
        CHECK_THROWS_AS(embed(s, Base(2)), BranchOverflow);
        try {
            embed(s, Base(2));
        } catch (const BranchOverflow& e) {
            CHECK(e.child_count == 3);
        }
        auto res = embed(s, Base(3));  // fits with one more digit
        CHECK(res.assignment.size() == 3);
        CHECK(res.assignment[2].second.path_string() == "2");
    }

    SUBCASE("non-ultrametric input is rejected") {
        auto s = three_points();
        s.dist[0][1] = s.dist[1][0] = Rational(4);
        CHECK_THROWS_AS(embed(s, Base(2)), std::invalid_argument);
    }
}

TEST_CASE("embedding to measure tree") {
    auto res = embed(three_points(), Base(2));

    auto t = to_measure_tree(res, Window(0, 2), Rational(1));
    CHECK(t.leaf_count() == 4);
    CHECK(t.support_leaves() == std::vector<std::int64_t>{0, 1, 2});
    CHECK(t.total_measure() == 3);  // three unit-density leaves of volume 1

    auto t2 = to_measure_tree(res, Window(-1, 3), Rational(2));
    CHECK(t2.leaf_count() == 16);
    CHECK(t2.total_measure() == 3);  // density 2 x leaf volume 1/2 x 3 leaves
    CHECK(t2.support_leaves().size() == 3);

    CHECK_THROWS(to_measure_tree(res, Window(0, 1), Rational(1)));  // too shallow
    CHECK_THROWS(to_measure_tree(res, Window(1, 3), Rational(1)));  // misses level 0
    CHECK_THROWS(to_measure_tree(res, Window(0, 2), Rational(-1)));
}

TEST_CASE("distance matrix CSV parsing") {
    const std::string csv =
        "# three points\n"
        "u1,u2,u3\n"
        "0,0.5,1\n"
        "0.5,0,1\n"
        "1,1,0\n";
    auto s = parse_distance_csv(csv);
    REQUIRE(s.size() == 3);
    CHECK(s.labels == std::vector<std::string>{"u1", "u2", "u3"});
    CHECK(s.dist[0][1] == Rational(1, 2));
    CHECK(validate_ultrametric(s).empty());

    CHECK_THROWS(parse_distance_csv(""));
    CHECK_THROWS(parse_distance_csv("u1,u2\n0,oops\n"));

    auto ragged = parse_distance_csv("a,b\n0,1\n");  // one body row missing
    CHECK(!validate_ultrametric(ragged).empty());
    CHECK(validate_ultrametric(ragged)[0].kind == "shape");
}

TEST_CASE("dendrogram parsing") {
    auto s = parse_dendrogram("((u1,u2):1/2,u3):1");
    REQUIRE(s.size() == 3);
    CHECK(s.labels == std::vector<std::string>{"u1", "u2", "u3"});
    CHECK(s.dist[0][1] == Rational(1, 2));
    CHECK(s.dist[0][2] == Rational(1));
    CHECK(s.dist[1][2] == Rational(1));
    CHECK(validate_ultrametric(s).empty());

    // equivalent inputs, equivalent embeddings
    auto from_csv = embed(three_points(), Base(2));
    auto from_tree = embed(s, Base(2));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(from_csv.assignment[i].second.path_string() ==
              from_tree.assignment[i].second.path_string());
    }

    CHECK_THROWS(parse_dendrogram("((u1,u2):1"));  // unbalanced
    CHECK_THROWS(parse_dendrogram("(u1,u2)"));     // missing height
    CHECK_THROWS(parse_dendrogram("(u1,u2):1 x")); // trailing junk

    // decreasing merge heights parse fine but fail ultrametric validation
    auto bad = parse_dendrogram("((u1,u2):2,u3):1");
    CHECK(!validate_ultrametric(bad).empty());
    CHECK_THROWS_AS(embed(bad, Base(2)), std::invalid_argument);
}

TEST_CASE("embedding report") {
    auto res = embed(three_points(), Base(2));
    auto j = embedding_report_json(res);
    CHECK(j["p"] == 2);
    CHECK(j["window"]["gamma_max"] == 2);
    CHECK(j["window"]["gamma_min"] == 0);
    CHECK(j["assignment"].size() == 3);
    CHECK(j["assignment"]["u1"] == "00");
    CHECK(j["assignment"]["u3"] == "10");
    CHECK(j["level_map"]["1/2"] == 1);
    CHECK(j["level_map"]["1"] == 2);
}
