#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "treecol/rng.hpp"
#include "treecol/tree.hpp"

namespace treecol {

// Metropolis single-site dynamics on proper q-colourings of the tree:
// propose (vertex, colour) uniformly, accept iff the result is proper.
// q >= 3 makes the chain ergodic; q = 2 is accepted at construction only so
// that connectivity can be probed on degenerate instances.
struct ChainSpec {
    TreeShape shape;
    int q;

    ChainSpec(TreeShape s, int q_);
    std::int64_t proposals() const { return shape.n() * q; }  // n*q, the 1/P(x,y) scale
};

// Apply one proposal (v, c) to x: returns x with v recoloured iff that is
// proper. Proposing the current colour is an accepted no-op.
Colouring apply_proposal(const ChainSpec& spec, const Colouring& x, std::int64_t v, int c);

// One chain step with the proposal drawn from rng.
Colouring step(const ChainSpec& spec, const Colouring& x, RngStream& rng);

// Colouring -> enumeration index lookup over a fixed state list.
class StateIndex {
public:
    explicit StateIndex(const std::vector<Colouring>& states);
    // Index of x, or -1 if absent.
    std::int64_t find(const Colouring& x) const;

private:
    struct Hash {
        std::size_t operator()(const Colouring& c) const {
            std::size_t h = 1469598103934665603ULL;
            for (std::uint8_t b : c.colours) {
                h ^= b;
                h *= 1099511628211ULL;
            }
            return h;
        }
    };
    std::unordered_map<Colouring, std::int64_t, Hash> map_;
};

// Exact dense representation of the transition matrix over the enumerated
// state space. Every entry is an integer multiple of 1/(nq): off-diagonal
// weights are 0 or 1 (the proper single-vertex moves), and the diagonal
// weight of a state is nq minus its degree. Symmetry and stationarity of
// the uniform distribution are therefore integer identities.
class TransitionMatrix {
public:
    TransitionMatrix(ChainSpec spec, std::int64_t omega_cap = kDefaultOmegaCap);

    const ChainSpec& spec() const { return spec_; }
    const std::vector<Colouring>& states() const { return states_; }
    std::int64_t size() const { return static_cast<std::int64_t>(states_.size()); }
    const StateIndex& index() const { return index_; }

    // Sorted ids of the states one proper move away from state i.
    const std::vector<std::int32_t>& neighbours(std::int64_t i) const {
        return neighbours_[static_cast<std::size_t>(i)];
    }
    // Number of proposals that leave state i unchanged; P(i,i) = diag(i)/(nq).
    std::int64_t diag(std::int64_t i) const { return diag_[static_cast<std::size_t>(i)]; }

    double entry(std::int64_t i, std::int64_t j) const;
    double min_diagonal() const;

    // True iff the weighted adjacency is exactly symmetric (integer check).
    bool symmetric_exact() const;
    // ||uP - u||_1 for the uniform vector u, evaluated in doubles.
    double uniform_stationarity_gap() const;

    // dist <- dist * P, in place.
    void multiply_row(std::span<const double> dist, std::span<double> out) const;

private:
    ChainSpec spec_;
    std::vector<Colouring> states_;
    StateIndex index_;
    std::vector<std::vector<std::int32_t>> neighbours_;
    std::vector<std::int64_t> diag_;
};

// 1/2 * sum |theta1 - theta2|. Validates lengths, non-negativity, and that
// both sum to 1 within 1e-9.
double variation_distance(std::span<const double> theta1, std::span<const double> theta2);

// Least t > 0 with max_x ||P^t(x,.) - pi|| <= delta. Distance to
// stationarity is non-increasing in t, so the first crossing is the mixing
// time; the decrease is asserted along the way.
std::int64_t mixing_time_exact(const TransitionMatrix& matrix, double delta,
                               std::int64_t max_iterations = 1'000'000);
std::int64_t mixing_time_exact(const ChainSpec& spec, double delta,
                               std::int64_t omega_cap = kDefaultOmegaCap,
                               std::int64_t max_iterations = 1'000'000);

// True iff the move graph on Omega is connected.
bool check_ergodic(const ChainSpec& spec, std::int64_t omega_cap = kDefaultOmegaCap);

}  // namespace treecol
