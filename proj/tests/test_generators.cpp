#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "tising/errors.hpp"
#include "tising/generators.hpp"
#include "tising/rng.hpp"

using namespace tising;

TEST_CASE("regular hypergraphs") {
    const auto h = regular_hypergraph(6, 3, 1, 3);
    CHECK(h.edges.size() == 2);
    std::set<int> seen;
    for (const auto& e : h.edges) seen.insert(e.begin(), e.end());
    CHECK(seen.size() == 6);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = regular_hypergraph(32, 3, 3, seed);
        CHECK(g.edges.size() == 32);
        for (int d : g.degrees()) CHECK(d == 3);
        CHECK(std::set<Subset>(g.edges.begin(), g.edges.end()).size() == 32);
        for (const auto& e : g.edges) CHECK(std::adjacent_find(e.begin(), e.end()) == e.end());
    }
    CHECK(regular_hypergraph(32, 3, 3, 5).edges == regular_hypergraph(32, 3, 3, 5).edges);
    CHECK_THROWS_AS(regular_hypergraph(5, 3, 2, 0), ArgumentError);
    CHECK_THROWS_AS(regular_hypergraph(6, 3, 0, 0), ArgumentError);
    // Four vertices, k = 3, d = 3: only the complete 3-uniform hypergraph works.
    CHECK(regular_hypergraph(4, 3, 3, 1).edges.size() == 4);
    CHECK_THROWS_AS(regular_hypergraph(32, 3, 3, 1, 0), GenerationError);
}

TEST_CASE("coefficient assignment") {
    const auto h = regular_hypergraph(12, 3, 2, 4);
    const auto t = assign_coefficients(h);
    for (const auto& e : t.edges()) CHECK(e.coef == 0.5 / 6);
    const auto m = assign_coefficients(h, {0.2, SignMode::all_plus, 0});
    for (const auto& e : m.edges()) CHECK(e.coef == 0.2);
    const auto a = assign_coefficients(h, {0.2, SignMode::rademacher, 9});
    const auto b = assign_coefficients(h, {0.2, SignMode::rademacher, 9});
    CHECK(a.edge_map() == b.edge_map());
    CHECK(degrees(a).per_vertex == h.degrees());
    CHECK_THROWS_AS(assign_coefficients(h, {-1.0, SignMode::all_plus, 0}), ArgumentError);
}

TEST_CASE("sample-size scaling law") {
    CHECK(scaling_n(1.0, 32, 3, 3, 6e6) == 47);
    CHECK(scaling_n(2.0, 32, 3, 3, 6e6) == 93);
    CHECK(scaling_n(2.0, 32, 3, 3, 1.5e6) == 372);
    // Divisor 1 gives the threshold form itself.
    const double form = 1679616.0 * 27.0 * std::log(465.0);
    CHECK(scaling_n(1.0, 32, 3, 3, 1.0) == static_cast<std::int64_t>(std::ceil(form)));
    CHECK_THROWS_AS(scaling_n(0.0, 32, 3, 3), ArgumentError);
    CHECK_THROWS_AS(scaling_n(1.0, 32, 3, 3, -1.0), ArgumentError);
}

TEST_CASE("triangle extraction") {
    CHECK(triangles_from_graph({{0, 1}, {1, 2}, {0, 2}}).edges == std::vector<Subset>{{0, 1, 2}});
    CHECK(triangles_from_graph({{0, 1}, {1, 2}, {1, 3}, {3, 4}}).edges.empty());
    GraphEdges k5;
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b) k5.emplace_back(b, a);
    CHECK(triangles_from_graph(k5).edges.size() == 10);

    Rng rng(3);
    for (int rep = 0; rep < 5; ++rep) {
        const int p = 40;
        GraphEdges g;
        std::set<std::pair<int, int>> adj;
        for (int a = 0; a < p; ++a)
            for (int b = a + 1; b < p; ++b)
                if (rng.uniform() < 0.15) {
                    g.emplace_back(a, b);
                    adj.emplace(a, b);
                }
        std::set<Subset> brute;
        for (int a = 0; a < p; ++a)
            for (int b = a + 1; b < p; ++b)
                for (int c = b + 1; c < p; ++c)
                    if (adj.count({a, b}) && adj.count({a, c}) && adj.count({b, c})) brute.insert({a, b, c});
        const auto h = triangles_from_graph(g);
        CHECK(std::set<Subset>(h.edges.begin(), h.edges.end()) == brute);
        CHECK(h.edges.size() == brute.size());
    }

    std::istringstream ok("# comment\n0 1\n\n1 2\n");
    CHECK(read_edge_list(ok).size() == 2);
    std::istringstream bad("0 1\n2 x\n");
    try {
        read_edge_list(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream loop("3 3\n");
    CHECK_THROWS_AS(read_edge_list(loop), ParseError);
}

TEST_CASE("series binarization") {
    Series up;
    up.columns = {{1, 2, 3, 4, 5, 6, 7, 8}, {0, 1, 2, 3, 4, 5, 6, 7}};
    const auto m = binarize_series(up, 3);
    CHECK(m.n() == 7 / 3);
    for (int i = 0; i < m.n(); ++i) CHECK((m.at(i, 0) == 1 && m.at(i, 1) == 1));
    CHECK(binarize_series(up, 1).n() == 7);

    Series flat;
    flat.columns = {{2, 2, 2, 2}, {1, 2, 3, 4}};
    CHECK_THROWS_AS(binarize_series(flat, 1), ArgumentError);

    Series saw;
    saw.columns = {{0, 1, 0, 1, 0, 1}};
    const auto s = binarize_series(saw, 1);
    REQUIRE(s.n() == 5);
    for (int i = 0; i < 5; ++i) CHECK(s.at(i, 0) == (i % 2 == 0 ? 1 : -1));

    // Drop first, then thin: the zero step at t=1 is removed before counting.
    Series mixed;
    mixed.columns = {{0, 1, 1, 2, 3, 2, 5}};
    const auto d = binarize_series(mixed, 2);
    REQUIRE(d.n() == 2);
    CHECK(d.at(0, 0) == 1);  // retained differences +1 +1 +1 -1 +3; keep the 2nd and 4th
    CHECK(d.at(1, 0) == -1);

    Series uneven;
    uneven.columns = {{0, 1, 2}, {0, 1}};
    CHECK_THROWS_AS(binarize_series(uneven), DimensionError);

    std::istringstream csv("a,b\n0,1\n1,0\n2,3\n");
    const auto rs = read_series_csv(csv);
    CHECK(rs.columns.size() == 2);
    CHECK(rs.length() == 3);
    std::istringstream badcsv("0,1\n1\n");
    CHECK_THROWS_AS(read_series_csv(badcsv), ParseError);
}
