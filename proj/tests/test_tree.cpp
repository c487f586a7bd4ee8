#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "treecol/errors.hpp"
#include "treecol/rng.hpp"
#include "treecol/tree.hpp"

using namespace treecol;

namespace {

Colouring col(std::initializer_list<int> values) {
    Colouring c;
    for (int v : values) c.colours.push_back(static_cast<std::uint8_t>(v));
    return c;
}

}  // namespace

TEST_SUITE_BEGIN("tree");

TEST_CASE("shape vertex counts") {
    CHECK(TreeShape(2, 2).n() == 7);
    CHECK(TreeShape(3, 1).n() == 4);
    CHECK(TreeShape(2, 0).n() == 1);
    CHECK(TreeShape(20, 2).n() == 421);
    CHECK_THROWS_AS(TreeShape(1, 2), std::invalid_argument);
    CHECK_THROWS_AS(TreeShape(2, -1), std::invalid_argument);
}

TEST_CASE("indexing round-trips and heights") {
    for (int b : {2, 3}) {
        for (int H : {0, 1, 2}) {
            TreeShape shape(b, H);
            CHECK(shape.height(0) == H);
            for (std::int64_t v = 1; v < shape.n(); ++v) {
                std::int64_t p = shape.parent(v);
                std::int64_t first = shape.first_child(p);
                CHECK(v >= first);
                CHECK(v < first + b);
                CHECK(shape.depth(v) == shape.depth(p) + 1);
            }
            for (std::int64_t v = shape.leaf_start(); v < shape.n(); ++v) {
                CHECK(shape.is_leaf(v));
                CHECK(shape.height(v) == 0);
            }
            CHECK(shape.leaf_count() == std::llround(std::pow(b, H)));
        }
    }
}

TEST_CASE("properness") {
    TreeShape shape(2, 1);
    CHECK(is_proper(shape, 3, col({0, 1, 2})));
    CHECK_FALSE(is_proper(shape, 3, col({0, 0, 2})));
    CHECK(is_proper(TreeShape(2, 0), 3, col({1})));
    CHECK_THROWS_AS(is_proper(shape, 3, col({0, 1})), std::invalid_argument);
    CHECK_THROWS_AS(is_proper(shape, 3, col({0, 1, 3})), std::invalid_argument);
}

TEST_CASE("enumeration counts, order, and cap") {
    CHECK(enumerate_omega(TreeShape(2, 0), 3).size() == 3);
    CHECK(enumerate_omega(TreeShape(2, 1), 3).size() == 12);
    CHECK(enumerate_omega(TreeShape(2, 2), 3).size() == 192);
    CHECK(enumerate_omega(TreeShape(3, 1), 3).size() == 24);
    CHECK(enumerate_omega(TreeShape(2, 1), 4).size() == 36);

    for (int b : {2, 3})
        for (int H : {0, 1, 2})
            for (int q : {3, 4}) {
                TreeShape shape(b, H);
                auto states = enumerate_omega(shape, q);
                // q (q-1)^(n-1)
                double expected = q * std::pow(q - 1, static_cast<double>(shape.n() - 1));
                CHECK(static_cast<double>(states.size()) == expected);
                CHECK(std::is_sorted(states.begin(), states.end()));
                CHECK(std::adjacent_find(states.begin(), states.end()) == states.end());
                for (const auto& x : states) CHECK(is_proper(shape, q, x));
            }

    CHECK_THROWS_AS(enumerate_omega(TreeShape(2, 3), 5, 1000), CapExceeded);
    CHECK(omega_size(TreeShape(2, 3), 5, 1000) == std::nullopt);
    CHECK(omega_size(TreeShape(2, 1), 3).value() == 12);
}

TEST_CASE("uniform sampling is deterministic per seed") {
    TreeShape shape(3, 2);
    RngStream a(42), b(42), c(43);
    Colouring xa = sample_uniform_colouring(shape, 4, a);
    Colouring xb = sample_uniform_colouring(shape, 4, b);
    Colouring xc = sample_uniform_colouring(shape, 4, c);
    CHECK(xa == xb);
    CHECK(xa != xc);
    CHECK(is_proper(shape, 4, xa));
}

TEST_CASE("root colour frequencies on the single vertex tree") {
    TreeShape shape(2, 0);
    RngStream rng(7);
    const int draws = 30000;
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < draws; ++i) counts[sample_uniform_colouring(shape, 3, rng)[0]]++;
    const double sigma = std::sqrt((1.0 / 3) * (2.0 / 3) / draws);
    for (int c = 0; c < 3; ++c)
        CHECK(std::abs(counts[c] / double(draws) - 1.0 / 3) <= 4 * sigma);
}

TEST_CASE("specific colouring frequency matches 1/12") {
    TreeShape shape(2, 1);
    RngStream rng(11);
    const int draws = 120000;
    const Colouring target = col({0, 1, 2});
    int hits = 0;
    for (int i = 0; i < draws; ++i)
        if (sample_uniform_colouring(shape, 3, rng) == target) ++hits;
    const double p = 1.0 / 12;
    const double sigma = std::sqrt(p * (1 - p) / draws);
    CHECK(std::abs(hits / double(draws) - p) <= 4 * sigma);
}

TEST_CASE("chi-square goodness of fit against the enumerated state space") {
    TreeShape shape(2, 1);
    auto states = enumerate_omega(shape, 3);
    std::map<Colouring, int> counts;
    RngStream rng(5);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) counts[sample_uniform_colouring(shape, 3, rng)]++;
    REQUIRE(counts.size() == states.size());
    const double expected = double(draws) / double(states.size());
    double chi2 = 0.0;
    for (const auto& [state, n] : counts) chi2 += (n - expected) * (n - expected) / expected;
    // 11 degrees of freedom, significance 0.001
    CHECK(chi2 <= 31.2641);
}

TEST_SUITE_END();
