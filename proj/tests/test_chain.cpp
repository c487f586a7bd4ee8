#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "treecol/chain.hpp"
#include "treecol/errors.hpp"
#include "treecol/tree.hpp"

using namespace treecol;

namespace {

Colouring col(std::initializer_list<int> values) {
    Colouring c;
    for (int v : values) c.colours.push_back(static_cast<std::uint8_t>(v));
    return c;
}

int hamming(const Colouring& a, const Colouring& b) {
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.colours[i] != b.colours[i]) ++d;
    return d;
}

}  // namespace

TEST_SUITE_BEGIN("chain");

TEST_CASE("single proposals") {
    ChainSpec one(TreeShape(2, 0), 3);
    CHECK(apply_proposal(one, col({0}), 0, 1) == col({1}));

    ChainSpec spec(TreeShape(2, 1), 3);
    Colouring x = col({0, 1, 2});
    CHECK(apply_proposal(spec, x, 0, 1) == x);             // rejected: child has colour 1
    CHECK(apply_proposal(spec, x, 1, 2) == col({0, 2, 2}));  // accepted
    CHECK(is_proper(spec.shape, spec.q, apply_proposal(spec, x, 1, 2)));
    CHECK(apply_proposal(spec, x, 1, 1) == x);             // same-colour no-op
    CHECK_THROWS_AS(apply_proposal(spec, x, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(apply_proposal(spec, x, 0, 3), std::invalid_argument);
}

TEST_CASE("single-vertex chain has the uniform kernel") {
    TransitionMatrix m(ChainSpec(TreeShape(2, 0), 3));
    REQUIRE(m.size() == 3);
    for (std::int64_t i = 0; i < 3; ++i)
        for (std::int64_t j = 0; j < 3; ++j) CHECK(m.entry(i, j) == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("matrix entries on the 3-vertex tree") {
    ChainSpec spec(TreeShape(2, 1), 3);
    TransitionMatrix m(spec);
    REQUIRE(m.size() == 12);
    std::int64_t i = m.index().find(col({0, 1, 2}));
    std::int64_t j = m.index().find(col({0, 2, 2}));
    REQUIRE(i >= 0);
    REQUIRE(j >= 0);
    CHECK(m.entry(i, j) == doctest::Approx(1.0 / 9).epsilon(1e-15));

    // Off-diagonal entries are 1/(nq) exactly when the states differ at one
    // vertex (both already proper), else 0.
    for (std::int64_t a = 0; a < m.size(); ++a)
        for (std::int64_t b = 0; b < m.size(); ++b) {
            if (a == b) continue;
            double expected =
                hamming(m.states()[std::size_t(a)], m.states()[std::size_t(b)]) == 1 ? 1.0 / 9 : 0.0;
            CHECK(m.entry(a, b) == expected);
        }
}

TEST_CASE("matrix structure invariants over the small grid") {
    for (int b : {2, 3})
        for (int H : {0, 1})
            for (int q : {3, 4}) {
                ChainSpec spec(TreeShape(b, H), q);
                TransitionMatrix m(spec);
                CHECK(m.symmetric_exact());
                CHECK(m.uniform_stationarity_gap() <= 1e-12);
                CHECK(m.min_diagonal() >= 1.0 / q - 1e-15);
                for (std::int64_t i = 0; i < m.size(); ++i) {
                    double row = m.entry(i, i);
                    for (std::int32_t j : m.neighbours(i)) row += m.entry(i, j);
                    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
                }
            }
    ChainSpec big(TreeShape(2, 2), 3);
    TransitionMatrix m(big);
    CHECK(m.size() == 192);
    CHECK(m.symmetric_exact());
    CHECK(m.uniform_stationarity_gap() <= 1e-12);
}

TEST_CASE("variation distance") {
    std::vector<double> a{1, 0}, b{0, 1}, c{1, 0, 0}, u{1.0 / 3, 1.0 / 3, 1.0 / 3};
    CHECK(variation_distance(a, a) == 0.0);
    CHECK(variation_distance(a, b) == 1.0);
    CHECK(variation_distance(c, u) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK_THROWS_AS(variation_distance(a, c), std::invalid_argument);
    std::vector<double> bad{0.7, 0.2};
    CHECK_THROWS_AS(variation_distance(bad, a), std::invalid_argument);
}

TEST_CASE("exact mixing times") {
    const double delta = 1.0 / (2.0 * std::exp(1.0));
    CHECK(mixing_time_exact(ChainSpec(TreeShape(2, 0), 3), delta) == 1);
    CHECK(mixing_time_exact(ChainSpec(TreeShape(2, 0), 3), 0.999) == 1);
    CHECK(mixing_time_exact(ChainSpec(TreeShape(2, 1), 3), 0.999) == 1);
    std::int64_t tau = mixing_time_exact(ChainSpec(TreeShape(2, 1), 3), delta);
    CHECK(tau >= 1);
    CHECK_THROWS_AS(mixing_time_exact(ChainSpec(TreeShape(2, 1), 3), 1.5), std::invalid_argument);
}

TEST_CASE("empirical step frequencies match the matrix") {
    ChainSpec spec(TreeShape(2, 1), 3);
    TransitionMatrix m(spec);
    RngStream rng(123);
    const std::int64_t steps = 1'000'000;

    std::vector<std::int64_t> visits(std::size_t(m.size()), 0);
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> moves;
    std::int64_t cur = 0;
    Colouring x = m.states()[0];
    for (std::int64_t t = 0; t < steps; ++t) {
        visits[std::size_t(cur)]++;
        Colouring y = step(spec, x, rng);
        std::int64_t nxt = (y == x) ? cur : m.index().find(y);
        REQUIRE(nxt >= 0);
        moves[{cur, nxt}]++;
        x = y;
        cur = nxt;
    }
    for (std::int64_t i = 0; i < m.size(); ++i) {
        const double n = double(visits[std::size_t(i)]);
        REQUIRE(n > 0);
        for (std::int64_t j = 0; j < m.size(); ++j) {
            const double p = m.entry(i, j);
            auto it = moves.find({i, j});
            const double freq = (it == moves.end() ? 0.0 : double(it->second)) / n;
            const double sigma = std::sqrt(p * (1 - p) / n);
            CHECK(std::abs(freq - p) <= 4 * sigma + 1e-12);
        }
    }
}

TEST_CASE("ergodicity") {
    CHECK(check_ergodic(ChainSpec(TreeShape(2, 1), 3)));
    CHECK(check_ergodic(ChainSpec(TreeShape(2, 2), 3)));
    // q = 2 admitted purely as a connectivity probe
    CHECK(check_ergodic(ChainSpec(TreeShape(2, 0), 2)));
    CHECK_THROWS_AS(ChainSpec(TreeShape(2, 0), 1), std::invalid_argument);
    CHECK_THROWS_AS(check_ergodic(ChainSpec(TreeShape(2, 3), 5), 1000), CapExceeded);
}

TEST_SUITE_END();
