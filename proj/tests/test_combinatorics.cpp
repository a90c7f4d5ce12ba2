#include "doctest.h"

#include <cmath>

#include "tising/combinatorics.hpp"
#include "tising/errors.hpp"

using namespace tising;

TEST_CASE("factorial and binomials") {
    CHECK(factorial(0) == 1.0);
    CHECK(factorial(3) == 6.0);
    CHECK(factorial(20) == 2432902008176640000.0);
    CHECK_THROWS(factorial(21));
    CHECK(binomial(31, 2) == 465);
    CHECK(binomial(5, 0) == 1);
    CHECK(binomial(3, 5) == 0);
    CHECK(binomial(200, 100) == UINT64_MAX);
    CHECK(log_binomial(31, 2) == doctest::Approx(std::log(465.0)).epsilon(1e-14));
}

TEST_CASE("lexicographic subset enumeration") {
    const std::vector<int> u{0, 2, 3, 5};
    const auto s = enumerate_subsets(u, 2);
    REQUIRE(s.size() == 6);
    CHECK(s.front() == Subset{0, 2});
    CHECK(s[1] == Subset{0, 3});
    CHECK(s.back() == Subset{3, 5});
    CHECK(enumerate_subsets(u, 0).size() == 1);
    CHECK(enumerate_subsets(u, 5).empty());
}

TEST_CASE("subset edits") {
    CHECK(remove_vertex({1, 4, 7}, 4) == Subset{1, 7});
    CHECK(insert_vertex({1, 7}, 4) == Subset{1, 4, 7});
    CHECK(is_strictly_increasing(std::vector<int>{1, 2, 9}));
    CHECK_FALSE(is_strictly_increasing(std::vector<int>{1, 1, 9}));
}
