#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "treecol/chain.hpp"
#include "treecol/errors.hpp"
#include "treecol/paths.hpp"
#include "treecol/rng.hpp"
#include "treecol/tree.hpp"

using namespace treecol;

namespace {

Colouring col(std::initializer_list<int> values) {
    Colouring c;
    for (int v : values) c.colours.push_back(static_cast<std::uint8_t>(v));
    return c;
}

TransitionPath run_cycle(void (*proc)(const TreeShape&, int, std::int64_t, Colouring&, const MoveSink&),
                         const TreeShape& shape, int q, const Colouring& x, Colouring& final_state) {
    TransitionPath path;
    path.start = x;
    final_state = x;
    proc(shape, q, 0, final_state, [&](std::int64_t v, std::uint8_t to) { path.moves.push_back({v, to}); });
    return path;
}

Colouring shifted(const Colouring& x, int q, int delta) {
    Colouring y = x;
    for (auto& c : y.colours) c = static_cast<std::uint8_t>((c + delta + q) % q);
    return y;
}

}  // namespace

TEST_SUITE_BEGIN("paths");

TEST_CASE("cycle_plus on the single vertex") {
    TreeShape shape(2, 0);
    Colouring out;
    TransitionPath p = run_cycle(cycle_plus, shape, 3, col({0}), out);
    CHECK(p.moves == std::vector<Move>{{0, 1}});
    CHECK(out == col({1}));
}

TEST_CASE("cycle_plus hand trace on the 3-vertex tree") {
    TreeShape shape(2, 1);
    Colouring out;
    TransitionPath p = run_cycle(cycle_plus, shape, 3, col({0, 1, 2}), out);
    // child coloured 1 is safe to advance early; child coloured 2 would
    // collide with the root and goes after it
    CHECK(p.moves == std::vector<Move>{{1, 2}, {0, 1}, {2, 0}});
    CHECK(out == col({1, 2, 0}));
}

TEST_CASE("cycle_minus inverts cycle_plus") {
    TreeShape shape(2, 1);
    Colouring out;
    run_cycle(cycle_minus, shape, 3, col({1, 2, 0}), out);
    CHECK(out == col({0, 1, 2}));

    Colouring single;
    TransitionPath p = run_cycle(cycle_minus, TreeShape(2, 0), 3, col({0}), single);
    CHECK(single == col({2}));
    CHECK(p.moves.size() == 1);
}

TEST_CASE("cycle procedures rotate the whole subtree, properly throughout") {
    RngStream rng(99);
    for (int b : {2, 3})
        for (int H : {0, 1, 2})
            for (int q : {3, 4}) {
                TreeShape shape(b, H);
                for (int rep = 0; rep < 10; ++rep) {
                    Colouring x = sample_uniform_colouring(shape, q, rng);
                    Colouring state = x;
                    std::int64_t moves = 0;
                    cycle_plus(shape, q, 0, state, [&](std::int64_t v, std::uint8_t to) {
                        Colouring next = state;
                        next[v] = to;
                        CHECK(is_proper(shape, q, next));
                        ++moves;
                    });
                    CHECK(state == shifted(x, q, 1));
                    CHECK(moves == shape.n());

                    cycle_minus(shape, q, 0, state, MoveSink{});
                    CHECK(state == x);
                }
            }
}

TEST_CASE("cycle chooses nothing, plus, minus in that order") {
    TreeShape shape(2, 0);
    int q = 3;

    Colouring state = col({2});
    std::int64_t moves = 0;
    MoveSink count = [&](std::int64_t, std::uint8_t) { ++moves; };
    cycle(shape, q, 0, colour_mask({0, 1}), state, count);
    CHECK(moves == 0);
    CHECK(state == col({2}));

    state = col({0});
    cycle(shape, q, 0, colour_mask({0, 1}), state, count);  // +1 lands on 1, forbidden
    CHECK(state == col({2}));

    state = col({0});
    cycle(shape, q, 0, colour_mask({0, 2}), state, count);
    CHECK(state == col({1}));

    CHECK_THROWS_AS(cycle(shape, q, 0, colour_mask({0, 1, 2}), state, count), std::invalid_argument);
}

TEST_CASE("recolour of identical colourings emits nothing") {
    TreeShape shape(2, 2);
    Colouring x = col({0, 1, 2, 0, 2, 0, 1});
    TransitionPath p = canonical_path(shape, 3, x, x);
    CHECK(p.moves.empty());
}

TEST_CASE("recolour hand trace") {
    TreeShape shape(2, 1);
    TransitionPath p = canonical_path(shape, 3, col({0, 1, 2}), col({1, 0, 2}));
    CHECK(p.moves == std::vector<Move>{{1, 2}, {0, 1}, {1, 0}});
    CHECK(p.length() == 3);
}

TEST_CASE("all pairs on the 3-vertex tree: valid, deterministic, within length bound") {
    TreeShape shape(2, 1);
    const int q = 3;
    auto states = enumerate_omega(shape, q);
    const std::int64_t lambda = path_length_bound(2, 1);
    CHECK(lambda == 5);
    for (const auto& x : states)
        for (const auto& y : states) {
            TransitionPath p = canonical_path(shape, q, x, y);
            auto walk = path_states(shape, q, p);  // throws on improper or no-op moves
            CHECK(walk.back() == y);
            CHECK(p.length() <= lambda);
            TransitionPath again = canonical_path(shape, q, x, y);
            CHECK(again.moves == p.moves);
        }
}

TEST_CASE("path length bound values") {
    CHECK(path_length_bound(2, 0) == 1);
    CHECK(path_length_bound(2, 1) == 5);
    CHECK(path_length_bound(2, 2) == 17);
    CHECK(path_length_bound(3, 1) == 7);
}

TEST_CASE("congestion of the single-vertex chain is exactly 1") {
    CongestionReport rep = congestion(ChainSpec(TreeShape(2, 0), 3));
    CHECK(rep.max_load == 1);
    CHECK(rep.a_f == 1.0);  // (nq/|Omega|) * max_load = (3/3) * 1
    CHECK(rep.bound == 6.0);
    CHECK(rep.ok);
    CHECK(rep.pair_count == 6);
    for (auto [z, w, load] : rep.loads) CHECK(load == 1);
}

TEST_CASE("congestion on the 3-vertex tree respects the closed-form bound") {
    CongestionReport rep = congestion(ChainSpec(TreeShape(2, 1), 3));
    CHECK(rep.bound == doctest::Approx(2 * 3 * 2 * 9 * 81.0));  // b q (H+1) n^2 9^{bH}
    CHECK(rep.ok);
    CHECK(rep.max_path_length <= rep.length_bound);
    // a_f is max_load scaled by nq/|Omega|
    CHECK(rep.a_f == doctest::Approx(double(rep.max_load) * 9.0 / 12.0).epsilon(1e-15));
    // threading changes nothing
    CongestionReport rep4 = congestion(ChainSpec(TreeShape(2, 1), 3), kDefaultOmegaCap,
                                       kDefaultPairBudget, 4);
    CHECK(rep4.max_load == rep.max_load);
    CHECK(rep4.loads == rep.loads);
}

TEST_CASE("congestion respects the pair budget") {
    CHECK_THROWS_AS(congestion(ChainSpec(TreeShape(2, 1), 3), kDefaultOmegaCap, 100), CapExceeded);
}

TEST_CASE("consistent-state counts for cycle_plus stay under 2^(bH)") {
    ReplayCounts zero = consistent_counts(ChainSpec(TreeShape(2, 0), 3), PathProcedure::CyclePlus);
    CHECK(zero.max_count == 1);
    for (auto [z, w, c] : zero.used) CHECK(c == 1);

    ReplayCounts one = consistent_counts(ChainSpec(TreeShape(2, 1), 3), PathProcedure::CyclePlus);
    CHECK(one.max_count <= 4);  // 2^(bH) with b = 2, H = 1

    ReplayCounts rec = consistent_counts(ChainSpec(TreeShape(2, 1), 3), PathProcedure::Recolour);
    CHECK(rec.max_count <= 12 * 81);  // C(1) 9^(b)
}

TEST_CASE("count for one observed transition") {
    ChainSpec spec(TreeShape(2, 0), 3);
    CHECK(count_consistent_states(spec, col({0}), col({1}), PathProcedure::CyclePlus) == 1);
    // the -1 rotation never appears in a +1 replay
    CHECK(count_consistent_states(spec, col({0}), col({2}), PathProcedure::CyclePlus) == 0);
    CHECK_THROWS_AS(count_consistent_states(spec, col({0, 0}), col({1}), PathProcedure::CyclePlus),
                    std::invalid_argument);
}

TEST_SUITE_END();
