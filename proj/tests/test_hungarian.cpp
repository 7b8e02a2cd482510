#include "kgalign/errors.hpp"
#include "kgalign/hungarian.hpp"

#include "assignment_oracle.hpp"

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

using namespace kgalign;

using kgalign::testing::brute_force_assignment;

TEST_CASE("hungarian basics") {
    Eigen::MatrixXd cost(2, 2);
    cost << 0, 1, 1, 0;
    const Assignment a = hungarian(cost);
    CHECK(a.total_cost == doctest::Approx(0.0));
    REQUIRE(a.pairs.size() == 2);
    CHECK(a.pairs[0] == std::pair<int, int>{0, 0});
    CHECK(a.pairs[1] == std::pair<int, int>{1, 1});

    Eigen::MatrixXd single(1, 1);
    single << 5;
    const Assignment s = hungarian(single);
    CHECK(s.total_cost == doctest::Approx(5.0));
    CHECK(s.pairs == std::vector<std::pair<int, int>>{{0, 0}});

    Eigen::MatrixXd bad(1, 2);
    bad << 0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(hungarian(bad), InvalidArgument);
}

TEST_CASE("hungarian equals brute force on random matrices") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-5.0, 5.0);
    std::uniform_int_distribution<int> dim(1, 7);
    for (int trial = 0; trial < 120; ++trial) {
        const int r = dim(rng);
        const int c = dim(rng);
        Eigen::MatrixXd cost(r, c);
        for (long k = 0; k < cost.size(); ++k) cost.data()[k] = uni(rng);
        const Assignment got = hungarian(cost);
        const Assignment expected = brute_force_assignment(cost);
        CHECK(got.total_cost == doctest::Approx(expected.total_cost).epsilon(1e-9));
        CHECK(got.pairs == expected.pairs);
    }
}

TEST_CASE("rectangular 6x8 matches brute force") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(0.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd cost(6, 8);
        for (long k = 0; k < cost.size(); ++k) cost.data()[k] = uni(rng);
        const Assignment got = hungarian(cost);
        const Assignment expected = brute_force_assignment(cost);
        CHECK(got.pairs.size() == 6);
        CHECK(got.total_cost == doctest::Approx(expected.total_cost).epsilon(1e-9));
        CHECK(got.pairs == expected.pairs);
    }
}

TEST_CASE("ties resolve to the lexicographically smallest pair list") {
    // integer costs force exact ties
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> cost_val(0, 3);
    std::uniform_int_distribution<int> dim(1, 6);
    for (int trial = 0; trial < 150; ++trial) {
        const int r = dim(rng);
        const int c = dim(rng);
        Eigen::MatrixXd cost(r, c);
        for (long k = 0; k < cost.size(); ++k) cost.data()[k] = cost_val(rng);
        const Assignment got = hungarian(cost);
        const Assignment expected = brute_force_assignment(cost);
        CHECK(got.total_cost == doctest::Approx(expected.total_cost));
        CHECK(got.pairs == expected.pairs);
    }

    Eigen::MatrixXd flat(3, 3);
    flat.setConstant(1.0);
    const Assignment a = hungarian(flat);
    CHECK(a.pairs == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}, {2, 2}});
}

TEST_CASE("fast mode reaches the same optimum") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXd cost(5, 9);
        for (long k = 0; k < cost.size(); ++k) cost.data()[k] = uni(rng);
        const Assignment strict = hungarian(cost);
        const Assignment fast = hungarian(cost, HungarianOptions{.lexicographic = false});
        CHECK(fast.total_cost == doctest::Approx(strict.total_cost).epsilon(1e-9));
    }
}
