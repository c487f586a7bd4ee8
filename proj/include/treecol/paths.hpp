#pragma once

#include <cstdint>
#include <functional>
#include <tuple>
#include <vector>

#include "treecol/chain.hpp"
#include "treecol/tree.hpp"

namespace treecol {

struct Move {
    std::int64_t vertex;
    std::uint8_t to;

    auto operator<=>(const Move&) const = default;
};

// A canonical walk of chain transitions. Applying the moves in order to
// `start` keeps the colouring proper after every move, and no move is a
// no-op.
struct TransitionPath {
    Colouring start;
    std::vector<Move> moves;

    std::int64_t length() const { return static_cast<std::int64_t>(moves.size()); }
};

// Observer for the recolouring procedures. Called once per move with the
// state still holding the pre-move colouring; the move is applied
// immediately after the sink returns.
using MoveSink = std::function<void(std::int64_t vertex, std::uint8_t to)>;

using ColourMask = std::uint64_t;

inline ColourMask colour_mask(std::initializer_list<int> colours) {
    ColourMask m = 0;
    for (int c : colours) m |= ColourMask{1} << c;
    return m;
}

// Adds 1 (mod q) to every colour in the subtree rooted at v, one proper
// single-vertex move per vertex. Children whose colour would collide with
// the still-unchanged subtree root are processed after it, the rest before.
void cycle_plus(const TreeShape& shape, int q, std::int64_t v, Colouring& state, const MoveSink& sink);

// Mirror image: subtracts 1 (mod q) from every colour in the subtree.
void cycle_minus(const TreeShape& shape, int q, std::int64_t v, Colouring& state, const MoveSink& sink);

// Brings a colour outside `forbidden` (at most two colours) to the subtree
// root by applying cycle_plus, cycle_minus, or nothing, preferred in the
// order: nothing, cycle_plus, cycle_minus.
void cycle(const TreeShape& shape, int q, std::int64_t v, ColourMask forbidden, Colouring& state,
           const MoveSink& sink);

// Transforms the subtree rooted at v from its current colouring to the
// target, emitting the canonical move sequence.
void recolour(const TreeShape& shape, int q, std::int64_t v, const Colouring& target, Colouring& state,
              const MoveSink& sink);

// The canonical path gamma_{x,y}: the move sequence of recolour() run on
// the whole tree. Validates that both endpoints are proper and that the
// walk terminates at y.
TransitionPath canonical_path(const TreeShape& shape, int q, const Colouring& x, const Colouring& y);

// start plus every intermediate colouring, ending at the path's endpoint.
std::vector<Colouring> path_states(const TreeShape& shape, int q, const TransitionPath& path);

// lambda(h) from the recurrence lambda(h) = (b^{h+1}-1)/(b-1) + b lambda(h-1),
// lambda(0) = 1: the worst-case number of moves for a subtree of height h.
std::int64_t path_length_bound(int b, int h);

inline constexpr std::int64_t kDefaultPairBudget = 100'000'000;

struct CongestionReport {
    std::int64_t omega_size = 0;
    std::int64_t pair_count = 0;       // ordered pairs x != y routed
    std::uint64_t max_load = 0;        // max over transitions of sum of |gamma|
    double a_f = 0.0;                  // (nq/|Omega|) * max_load
    std::int64_t max_path_length = 0;  // longest |gamma| observed
    std::int64_t length_bound = 0;     // lambda(H)
    double bound = 0.0;                // b q (H+1) n^2 9^{bH}
    bool ok = false;                   // a_f <= bound
    // (z, w, load) for every transition carrying at least one path.
    std::vector<std::tuple<std::int32_t, std::int32_t, std::uint64_t>> loads;
};

// Routes all ordered pairs of distinct colourings through their canonical
// paths and measures the flow congestion A(f). Every path edge is checked
// to be a legal chain transition.
CongestionReport congestion(const ChainSpec& spec, std::int64_t omega_cap = kDefaultOmegaCap,
                            std::int64_t pair_budget = kDefaultPairBudget, int threads = 1);

enum class PathProcedure { CyclePlus, Recolour };

struct ReplayCounts {
    std::int64_t omega_size = 0;
    std::uint64_t max_count = 0;
    // (z, w, count): how many replayed initial colourings (CyclePlus) or
    // ordered pairs (Recolour) route a path through transition (z, w).
    std::vector<std::tuple<std::int32_t, std::int32_t, std::uint64_t>> used;
};

// Exhaustive replay of the procedure from every start (or every ordered
// pair), counting, per transition, how many runs pass through it.
ReplayCounts consistent_counts(const ChainSpec& spec, PathProcedure procedure,
                               std::int64_t omega_cap = kDefaultOmegaCap,
                               std::int64_t pair_budget = kDefaultPairBudget);

// Count for one observed transition (z, w); 0 if no replay uses it.
std::uint64_t count_consistent_states(const ChainSpec& spec, const Colouring& z, const Colouring& w,
                                      PathProcedure procedure, std::int64_t omega_cap = kDefaultOmegaCap,
                                      std::int64_t pair_budget = kDefaultPairBudget);

}  // namespace treecol
