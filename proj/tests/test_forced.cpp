#include <doctest.h>

#include <cmath>

#include "treecol/chain.hpp"
#include "treecol/errors.hpp"
#include "treecol/forced.hpp"
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

TEST_SUITE_BEGIN("forced");

TEST_CASE("forced sets on the 3-vertex tree") {
    TreeShape shape(2, 1);
    CHECK(forced_set(shape, 3, col({0, 1, 2})).members() == std::vector<std::int64_t>{0, 1, 2});
    CHECK(forced_set(shape, 3, col({0, 1, 1})).members() == std::vector<std::int64_t>{1, 2});
    CHECK(forced_set(TreeShape(2, 0), 3, col({2})).members() == std::vector<std::int64_t>{0});
}

TEST_CASE("recursive forcing equals brute-force extension counting") {
    struct Grid { int b, H, q; };
    for (Grid g : {Grid{2, 1, 3}, Grid{2, 2, 3}, Grid{3, 1, 3}, Grid{2, 1, 4}}) {
        TreeShape shape(g.b, g.H);
        for (const Colouring& x : enumerate_omega(shape, g.q)) {
            CHECK(forced_set(shape, g.q, x).forced == forced_set_bruteforce(shape, g.q, x).forced);
        }
    }
}

TEST_CASE("looseness") {
    TreeShape shape(2, 1);
    CHECK(is_loose(shape, 3, col({0, 1, 2}), 0, 1));
    CHECK(is_loose(shape, 3, col({0, 1, 1}), 0, 1));  // root already unforced
    CHECK(is_loose(shape, 3, col({0, 1, 1}), 0, 2));
    CHECK_THROWS_AS(is_loose(shape, 3, col({0, 1, 2}), 1, 1), std::invalid_argument);  // v is a leaf

    TreeShape deep(2, 2);
    Colouring x = col({0, 1, 2, 0, 2, 0, 1});
    REQUIRE(is_proper(deep, 3, x));
    CHECK_THROWS_AS(is_loose(deep, 3, x, 1, 5), std::invalid_argument);  // leaf 5 sits under vertex 2
}

TEST_CASE("classification into forced colour classes") {
    TreeShape shape(2, 1);
    CHECK(classify(shape, 3, col({0, 1, 2})) == 0);
    CHECK(classify(shape, 3, col({0, 1, 1})) == 3);
    CHECK(classify(TreeShape(2, 0), 3, col({2})) == 2);
}

TEST_CASE("unforced probability recursion against enumeration") {
    CHECK(unforced_probability(2, 3, 0) == 0.0);
    CHECK(unforced_probability(5, 4, 0) == 0.0);
    CHECK(unforced_probability(2, 3, 1) == 0.5);

    struct Grid { int b, q, h; };
    for (Grid g : {Grid{2, 3, 1}, Grid{2, 3, 2}, Grid{3, 3, 1}, Grid{2, 4, 1}, Grid{3, 3, 2}}) {
        double exact = unforced_probability(g.b, g.q, g.h);
        double enumerated = unforced_fraction_enumerated(g.b, g.q, g.h);
        CHECK(std::abs(exact - enumerated) <= 1e-12);
    }
    // two children can never pin one of three alternative colours
    CHECK(unforced_probability(2, 4, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("unforced probability stays under 1/b in regime") {
    for (int h = 0; h <= 10; ++h) CHECK(unforced_probability(20, 3, h) <= 1.0 / 20);
    // the chain of ceilings from the proof, evaluated numerically
    for (int b : {20, 64})
        for (int h = 1; h <= 10; ++h) {
            int q = 3;
            double u = unforced_probability(b, q, h);
            double step1 = (q - 1) * std::exp(-double(b - 1) / (q - 1));
            double step2 = double(q - 1) / (double(b) * b);
            CHECK(u <= step1 + 1e-15);
            CHECK(step1 <= step2);
            CHECK(step2 <= 1.0 / b);
        }
}

TEST_CASE("loose probability recursion against enumeration") {
    CHECK(loose_probability(2, 3, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(loose_probability(3, 3, 1) == doctest::Approx(0.5).epsilon(1e-15));
    struct Grid { int b, q, h; };
    for (Grid g : {Grid{2, 3, 1}, Grid{2, 3, 2}, Grid{3, 3, 1}, Grid{2, 4, 1}}) {
        double exact = loose_probability(g.b, g.q, g.h);
        double enumerated = loose_fraction_enumerated(g.b, g.q, g.h);
        CHECK(std::abs(exact - enumerated) <= 1e-12);
    }
    CHECK_THROWS_AS(loose_probability(2, 3, 0), std::invalid_argument);
}

TEST_CASE("loose probability ceiling") {
    double eps = loose_probability_bound(20, 3);
    CHECK(std::abs(eps - 2.0 * std::exp(-9.0)) <= 1e-9 * eps);
    for (int h = 1; h <= 10; ++h) CHECK(loose_probability(20, 3, h) <= eps);
}

TEST_CASE("Monte Carlo unforced probability") {
    RngStream rng(31);
    McEstimate est = unforced_probability_mc(2, 3, 1, 50'000, rng);
    double sigma = std::sqrt(0.25 / 50'000);
    CHECK(std::abs(est.mean - 0.5) <= 4 * sigma);

    // u is ~2e-6 here, so the hit count is nearly Poisson; 4 sigma around
    // the null mean allows at most one hit in 1e5 trials
    RngStream rng2(32);
    double exact = unforced_probability(20, 3, 2);
    McEstimate est2 = unforced_probability_mc(20, 3, 2, 100'000, rng2);
    double sigma2 = std::sqrt(exact * (1 - exact) / 100'000);
    CHECK(std::abs(est2.mean - exact) <= 4 * sigma2 + 1e-12);

    // same seed, same estimate
    RngStream rng3(31);
    CHECK(unforced_probability_mc(2, 3, 1, 50'000, rng3).mean == est.mean);
}

TEST_CASE("exact conductance of the forced-root cut") {
    ConductanceEstimate est = conductance_exact(ChainSpec(TreeShape(2, 1), 3));
    CHECK(est.phi_exact == "4/15");
    CHECK(est.pi_s == doctest::Approx(1.0 / 6).epsilon(1e-15));
    CHECK(est.flow == doctest::Approx(2.0 / 27).epsilon(1e-15));
    CHECK(est.phi_s == doctest::Approx(4.0 / 15).epsilon(1e-15));
    CHECK(est.cut_size == 2);
    CHECK(est.crossing_pairs == 8);

    // two children cannot force the root among four colours: empty cut
    CHECK_THROWS_WITH_AS(conductance_exact(ChainSpec(TreeShape(2, 1), 4)),
                         "degenerate cut: pi(S) is 0 or 1", std::runtime_error);
}

TEST_CASE("Monte Carlo conductance agrees with the exact value") {
    ChainSpec spec(TreeShape(2, 1), 3);
    RngStream rng(77);
    ConductanceEstimate mc = conductance_mc(spec, 100'000, rng);
    CHECK(std::abs(mc.phi_s - 4.0 / 15) <= 4 * mc.stderr_phi);
    CHECK(mc.stderr_phi > 0);
    CHECK(mc.trials == 100'000);

    // incremental membership updates change nothing
    RngStream rng2(77);
    ConductanceEstimate inc = conductance_mc(spec, 100'000, rng2, 1, true);
    CHECK(inc.phi_s == mc.phi_s);
    CHECK(inc.pi_s == mc.pi_s);
    CHECK(inc.flow == mc.flow);

    // threading partitions trials but the per-trial streams are indexed
    // globally, so the sums are identical
    RngStream rng3(77);
    ConductanceEstimate thr = conductance_mc(spec, 100'000, rng3, 4);
    CHECK(thr.phi_s == mc.phi_s);
}

TEST_CASE("incremental tracker agrees on a deeper tree") {
    ChainSpec spec(TreeShape(3, 2), 3);
    RngStream a(5), b(5);
    ConductanceEstimate plain = conductance_mc(spec, 2'000, a);
    ConductanceEstimate inc = conductance_mc(spec, 2'000, b, 1, true);
    CHECK(plain.phi_s == inc.phi_s);
    CHECK(plain.flow == inc.flow);
    CHECK(plain.pi_s == inc.pi_s);
}

TEST_CASE("exhaustive minimum conductance lower-bounds the mixing time") {
    ChainSpec spec(TreeShape(2, 1), 3);
    double phi_min = conductance_min_exhaustive(spec);
    CHECK(phi_min <= 4.0 / 15 + 1e-15);
    CHECK(phi_min > 0);
    std::int64_t tau = mixing_time_exact(spec, 1.0 / (2.0 * std::exp(1.0)));
    double lower = (0.5 - 0.5 / std::exp(1.0)) / phi_min;
    CHECK(double(tau) >= lower);
    CHECK_THROWS_AS(conductance_min_exhaustive(ChainSpec(TreeShape(2, 2), 3)), std::invalid_argument);
}

TEST_SUITE_END();
