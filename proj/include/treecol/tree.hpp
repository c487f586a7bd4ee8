#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "treecol/rng.hpp"

namespace treecol {

// Complete b-ary tree of height H (edges on any root-to-leaf path).
// Vertices are numbered 0..n-1 in breadth-first order with the root at 0,
// so parent(v) = (v-1)/b and the children of v are v*b+1 .. v*b+b. No
// adjacency is stored; navigation is arithmetic on ids.
class TreeShape {
public:
    TreeShape(int b, int H);

    int b() const { return b_; }
    int H() const { return H_; }
    std::int64_t n() const { return n_; }

    std::int64_t parent(std::int64_t v) const { return (v - 1) / b_; }
    std::int64_t first_child(std::int64_t v) const { return v * b_ + 1; }
    bool is_leaf(std::int64_t v) const { return v >= level_start_[H_]; }
    int depth(std::int64_t v) const;
    int height(std::int64_t v) const { return H_ - depth(v); }

    std::int64_t leaf_start() const { return level_start_[H_]; }
    std::int64_t leaf_count() const { return n_ - level_start_[H_]; }
    // First vertex id at the given depth (0 = root).
    std::int64_t level_start(int d) const { return level_start_[d]; }

    // True iff a is v itself or lies in the subtree rooted at v.
    bool in_subtree(std::int64_t v, std::int64_t a) const;

private:
    int b_;
    int H_;
    std::int64_t n_;
    std::vector<std::int64_t> level_start_;  // size H+2, sentinel n at [H+1]
};

// An assignment of colours in [q] to the vertices, indexed by vertex id.
// Properness is not an invariant of the type; it is checked by is_proper
// and asserted by the operations that require it.
struct Colouring {
    std::vector<std::uint8_t> colours;

    Colouring() = default;
    explicit Colouring(std::vector<std::uint8_t> c) : colours(std::move(c)) {}

    std::size_t size() const { return colours.size(); }
    std::uint8_t operator[](std::int64_t v) const { return colours[static_cast<std::size_t>(v)]; }
    std::uint8_t& operator[](std::int64_t v) { return colours[static_cast<std::size_t>(v)]; }

    auto operator<=>(const Colouring&) const = default;
};

inline constexpr std::int64_t kDefaultOmegaCap = 10'000'000;

// Validates length and colour range (throws std::invalid_argument), then
// checks that every child differs in colour from its parent.
bool is_proper(const TreeShape& shape, int q, const Colouring& x);

// |Omega| = q (q-1)^(n-1) when it does not exceed cap, std::nullopt otherwise.
std::optional<std::int64_t> omega_size(const TreeShape& shape, int q, std::int64_t cap = kDefaultOmegaCap);

// All proper q-colourings in lexicographic order of the colour sequence.
// Throws CapExceeded("state space too large") when |Omega| > cap.
std::vector<Colouring> enumerate_omega(const TreeShape& shape, int q, std::int64_t cap = kDefaultOmegaCap);

// Exactly uniform on Omega: root uniform on [q], every other vertex uniform
// on [q] minus its parent's colour, assigned in breadth-first order.
Colouring sample_uniform_colouring(const TreeShape& shape, int q, RngStream& rng);

}  // namespace treecol
