#include "treecol/tree.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "treecol/errors.hpp"

namespace treecol {

TreeShape::TreeShape(int b, int H) : b_(b), H_(H) {
    if (b < 2) throw std::invalid_argument("branching factor must be >= 2, got " + std::to_string(b));
    if (H < 0) throw std::invalid_argument("height must be >= 0, got " + std::to_string(H));
    level_start_.resize(static_cast<std::size_t>(H) + 2);
    std::int64_t level_size = 1;
    std::int64_t total = 0;
    for (int d = 0; d <= H; ++d) {
        level_start_[static_cast<std::size_t>(d)] = total;
        if (total > std::numeric_limits<std::int64_t>::max() - level_size)
            throw std::invalid_argument("tree too large for 64-bit vertex ids");
        total += level_size;
        if (d < H) {
            if (level_size > std::numeric_limits<std::int64_t>::max() / b)
                throw std::invalid_argument("tree too large for 64-bit vertex ids");
            level_size *= b;
        }
    }
    level_start_[static_cast<std::size_t>(H) + 1] = total;
    n_ = total;
}

int TreeShape::depth(std::int64_t v) const {
    // H is tiny (<= ~60), linear scan over level offsets.
    int d = 0;
    while (v >= level_start_[static_cast<std::size_t>(d) + 1]) ++d;
    return d;
}

bool TreeShape::in_subtree(std::int64_t v, std::int64_t a) const {
    int dv = depth(v);
    int da = depth(a);
    if (da < dv) return false;
    while (da > dv) {
        a = parent(a);
        --da;
    }
    return a == v;
}

namespace {

void check_colouring_arguments(const TreeShape& shape, int q, const Colouring& x) {
    if (q < 2) throw std::invalid_argument("q must be >= 2");
    if (static_cast<std::int64_t>(x.size()) != shape.n())
        throw std::invalid_argument("colouring length " + std::to_string(x.size()) +
                                    " does not match vertex count " + std::to_string(shape.n()));
    for (std::int64_t v = 0; v < shape.n(); ++v)
        if (x[v] >= q)
            throw std::invalid_argument("colour " + std::to_string(int(x[v])) + " out of range [0," +
                                        std::to_string(q) + ") at vertex " + std::to_string(v));
}

}  // namespace

bool is_proper(const TreeShape& shape, int q, const Colouring& x) {
    check_colouring_arguments(shape, q, x);
    for (std::int64_t v = 1; v < shape.n(); ++v)
        if (x[v] == x[shape.parent(v)]) return false;
    return true;
}

std::optional<std::int64_t> omega_size(const TreeShape& shape, int q, std::int64_t cap) {
    // q (q-1)^(n-1), bailing out as soon as the product exceeds cap.
    std::int64_t size = q;
    if (size > cap) return std::nullopt;
    for (std::int64_t i = 1; i < shape.n(); ++i) {
        if (size > cap / (q - 1)) return std::nullopt;
        size *= q - 1;
        if (size > cap) return std::nullopt;
    }
    return size;
}

std::vector<Colouring> enumerate_omega(const TreeShape& shape, int q, std::int64_t cap) {
    if (q < 2) throw std::invalid_argument("q must be >= 2");
    auto count = omega_size(shape, q, cap);
    if (!count) throw CapExceeded("state space too large: |Omega| exceeds cap " + std::to_string(cap));

    std::vector<Colouring> out;
    out.reserve(static_cast<std::size_t>(*count));
    const std::int64_t n = shape.n();
    Colouring work;
    work.colours.assign(static_cast<std::size_t>(n), 0);

    // Vertex ids are assigned in increasing order, trying colours 0..q-1 at
    // each, so the output is lexicographic over the colour sequence.
    std::int64_t v = 0;
    std::vector<int> next(static_cast<std::size_t>(n), 0);
    while (v >= 0) {
        if (v == n) {
            out.push_back(work);
            --v;
            continue;
        }
        bool placed = false;
        for (int c = next[static_cast<std::size_t>(v)]; c < q; ++c) {
            if (v > 0 && c == work[shape.parent(v)]) continue;
            work[v] = static_cast<std::uint8_t>(c);
            next[static_cast<std::size_t>(v)] = c + 1;
            placed = true;
            break;
        }
        if (placed) {
            ++v;
            if (v < n) next[static_cast<std::size_t>(v)] = 0;
        } else {
            next[static_cast<std::size_t>(v)] = 0;
            --v;
        }
    }
    return out;
}

Colouring sample_uniform_colouring(const TreeShape& shape, int q, RngStream& rng) {
    if (q < 2) throw std::invalid_argument("q must be >= 2");
    Colouring x;
    x.colours.resize(static_cast<std::size_t>(shape.n()));
    x[0] = static_cast<std::uint8_t>(rng.below(q));
    for (std::int64_t v = 1; v < shape.n(); ++v) {
        std::uint8_t p = x[shape.parent(v)];
        std::int64_t r = rng.below(q - 1);
        x[v] = static_cast<std::uint8_t>(r < p ? r : r + 1);
    }
    return x;
}

}  // namespace treecol
