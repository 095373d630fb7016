#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../golden.hpp"
#include "stresscert/errors.hpp"
#include "stresscert/graph.hpp"

using namespace stresscert;

namespace {

EdgeSet edges_of(const std::vector<std::pair<int, int>>& v) {
    EdgeSet e;
    for (auto [a, b] : v) e.add(a, b);
    return e;
}

EdgeSet complete(int n) {
    EdgeSet e;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) e.add(i, j);
    return e;
}

const std::vector<int> natural7 = {1, 2, 3, 4, 5, 6, 7};

}  // namespace

TEST_CASE("edge set normalizes and deduplicates") {
    EdgeSet e;
    e.add(3, 1);
    e.add(1, 3);
    e.add(2, 5);
    CHECK(e.size() == 2);
    CHECK(e.has(1, 3));
    CHECK(e.has(3, 1));
    CHECK_FALSE(e.has(1, 2));
    CHECK_FALSE(e.has(4, 4));
    CHECK(e.sorted() == std::vector<std::pair<int, int>>{{1, 3}, {2, 5}});
    CHECK_THROWS_AS(e.add(2, 2), ParseError);
}

TEST_CASE("predecessor neighborhoods in the worked examples") {
    EdgeSet e1 = edges_of(golden::edges_ex1());
    CHECK(neighbors_before(e1, natural7, 1).empty());
    CHECK(neighbors_before(e1, natural7, 4) == std::vector<int>{1, 2, 3});
    CHECK(neighbors_before(e1, natural7, 5) == std::vector<int>{1, 3, 4});
    CHECK(neighbors_before(e1, natural7, 6) == std::vector<int>{1, 2, 4});
    CHECK(neighbors_before(e1, natural7, 7) == std::vector<int>{3, 4, 5});

    EdgeSet e2 = edges_of(golden::edges_ex2());
    CHECK(neighbors_before(e2, natural7, 5) == std::vector<int>{1, 3, 4});
    CHECK(neighbors_before(e2, natural7, 6) == std::vector<int>{2, 4, 5});
    CHECK(neighbors_before(e2, natural7, 7) == std::vector<int>{1, 3, 6});

    // Positions index the order, not the labels: under the reversed order the
    // vertex at position 3 is 5, whose only earlier neighbor is 7.
    std::vector<int> rev = {7, 6, 5, 4, 3, 2, 1};
    CHECK(neighbors_before(e1, rev, 2).empty());
    CHECK(neighbors_before(e1, rev, 3) == std::vector<int>{7});
}

TEST_CASE("order validation") {
    EdgeSet e1 = edges_of(golden::edges_ex1());
    SUBCASE("the natural order of example 1 is valid with exact sizes") {
        auto v = validate_lateration_order(e1, natural7, 2, 7);
        CHECK(v.ok);
        CHECK(v.exact_sizes);
    }
    SUBCASE("example 2 is also built one vertex at a time") {
        EdgeSet e2 = edges_of(golden::edges_ex2());
        auto v = validate_lateration_order(e2, natural7, 2, 7);
        CHECK(v.ok);
        CHECK(v.exact_sizes);
    }
    SUBCASE("the reversed order fails and names the violator") {
        std::vector<int> rev = {7, 6, 5, 4, 3, 2, 1};
        auto v = validate_lateration_order(e1, rev, 2, 7);
        CHECK_FALSE(v.ok);
        CHECK(v.failing_vertex == 6);  // position 2: vertex 6 is not adjacent to 7
    }
    SUBCASE("length and permutation defects are rejected") {
        CHECK_FALSE(validate_lateration_order(e1, {1, 2, 3}, 2, 7).ok);
        CHECK_FALSE(validate_lateration_order(e1, {1, 2, 3, 4, 5, 6, 6}, 2, 7).ok);
        CHECK_FALSE(validate_lateration_order(e1, {0, 2, 3, 4, 5, 6, 7}, 2, 7).ok);
    }
    SUBCASE("any order works on a complete graph") {
        EdgeSet k4 = complete(4);
        CHECK(validate_lateration_order(k4, {1, 2, 3, 4}, 2, 4).ok);
        CHECK(validate_lateration_order(k4, {4, 2, 1, 3}, 2, 4).ok);
        CHECK(validate_lateration_order(k4, {3, 1, 4, 2}, 2, 4).exact_sizes);
    }
    SUBCASE("more than d+1 predecessors clears exactness but stays valid") {
        EdgeSet k5 = complete(5);
        auto v = validate_lateration_order(k5, {1, 2, 3, 4, 5}, 2, 5);
        CHECK(v.ok);
        CHECK_FALSE(v.exact_sizes);  // vertex 5 has four predecessors
    }
}

TEST_CASE("order search") {
    SUBCASE("finds the natural order of both examples") {
        for (int which : {1, 2}) {
            EdgeSet e = edges_of(which == 1 ? golden::edges_ex1() : golden::edges_ex2());
            auto r = find_lateration_order(e, 2, 7);
            REQUIRE(r.status == FindStatus::found);
            CHECK(r.order.order == natural7);
            CHECK(r.order.d == 2);
            CHECK(r.states_explored > 0);
        }
    }
    SUBCASE("a path graph has no valid order in the plane") {
        EdgeSet path;
        for (int i = 1; i < 5; ++i) path.add(i, i + 1);
        auto r = find_lateration_order(path, 2, 5);
        CHECK(r.status == FindStatus::not_found);
    }
    SUBCASE("missing edges push the search off the identity order") {
        EdgeSet e = complete(5);
        e.pairs.erase({1, 2});
        auto r = find_lateration_order(e, 2, 5);
        REQUIRE(r.status == FindStatus::found);
        CHECK(r.order.order == std::vector<int>{1, 3, 4, 5, 2});
        CHECK(validate_lateration_order(e, r.order.order, 2, 5).ok);
    }
    SUBCASE("a starved budget reports exhaustion, not absence") {
        EdgeSet empty;
        auto r = find_lateration_order(empty, 2, 10, 5);
        CHECK(r.status == FindStatus::budget_exhausted);
        CHECK(r.states_explored >= 5);
    }
    SUBCASE("single clique instances") {
        auto r = find_lateration_order(complete(3), 2, 3);
        REQUIRE(r.status == FindStatus::found);
        CHECK(r.order.order == std::vector<int>{1, 2, 3});
    }
}

TEST_CASE("clique-attachment detection") {
    EdgeSet e1 = edges_of(golden::edges_ex1());
    EdgeSet e2 = edges_of(golden::edges_ex2());
    CHECK(is_dplus1_tree(e1, natural7, 2));
    // Vertex 6 of example 2 attaches to {2,4,5} and 2-5 is not an edge.
    CHECK_FALSE(is_dplus1_tree(e2, natural7, 2));
    CHECK(is_dplus1_tree(complete(4), {1, 2, 3, 4}, 2));
}
