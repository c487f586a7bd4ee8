#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treecol/chain.hpp"
#include "treecol/rng.hpp"
#include "treecol/tree.hpp"

namespace treecol {

// The set of vertices whose colour is forced by the leaf colouring of their
// subtree: w is a member iff every proper colouring of the subtree below w
// that agrees with x on the leaves gives w the colour x(w). Leaves are
// always members.
struct ForcedSet {
    std::vector<bool> forced;  // indexed by vertex id

    bool contains(std::int64_t v) const { return forced[static_cast<std::size_t>(v)]; }
    std::vector<std::int64_t> members() const;
};

// Bottom-up recursion: an internal v is forced iff for every colour
// c != x(v) some child w has x(w) = c and w forced.
ForcedSet forced_set(const TreeShape& shape, int q, const Colouring& x);

// Definitional check by exhaustive enumeration of subtree colourings with
// the leaves pinned. Independent of forced_set; used as its oracle.
ForcedSet forced_set_bruteforce(const TreeShape& shape, int q, const Colouring& x,
                                std::int64_t enumeration_budget = 10'000'000);

// A child w permits colour c at its parent when x(w) != c or w is unforced.
// v (height >= 1) is loose towards leaf `l` iff some colour c != x(v) is
// permitted by every child except possibly the one on the path to l.
bool is_loose(const TreeShape& shape, int q, const Colouring& x, std::int64_t v, std::int64_t l);

// Partition index of x: c when the root is forced and x(root) = c, q when
// the root is unforced.
int classify(const TreeShape& shape, int q, const Colouring& x);

// P(vertex at height h is unforced) under the uniform distribution, from
// the inclusion-exclusion recursion over missing colours:
//   u_h = sum_{j=1}^{q-1} (-1)^{j+1} C(q-1,j) (1 - j(1-u_{h-1})/(q-1))^b,
// u_0 = 0. The recursion relies on the independence of child subtrees and
// of a child's colour from its forced status; it is validated against
// enumeration before anything downstream depends on it.
double unforced_probability(int b, int q, int h);

// P(vertex at height h >= 1 is loose towards a fixed descendant leaf): the
// same inclusion-exclusion with b-1 children.
double loose_probability(int b, int q, int h);

// (q-1) exp(-(b-2)/(q-1)), the closed-form ceiling for loose_probability.
double loose_probability_bound(int b, int q);

// Enumeration oracles over the full state space of a height-h tree.
double unforced_fraction_enumerated(int b, int q, int h, std::int64_t omega_cap = kDefaultOmegaCap);
double loose_fraction_enumerated(int b, int q, int h, std::int64_t omega_cap = kDefaultOmegaCap);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;
};

// Monte Carlo estimate of unforced_probability by lazy top-down sampling:
// children are generated only until the forced status of a vertex is
// decided, which leaves the marginal distribution untouched.
McEstimate unforced_probability_mc(int b, int q, int h, std::int64_t trials, const RngStream& rng);

// Conductance of the cut S = {x : root forced with colour < floor(q/2)}.
struct ConductanceEstimate {
    bool exact = false;
    double pi_s = 0.0;   // pi(S)
    double flow = 0.0;   // sum over boundary pairs, both directions, of pi(x) P(x,y)
    double phi_s = 0.0;  // flow / (2 pi(S) (1 - pi(S)))
    // Monte Carlo extras.
    std::int64_t trials = 0;
    double stderr_pi = 0.0;
    double stderr_flow = 0.0;
    double stderr_phi = 0.0;
    bool zero_crossings = false;
    double flow_upper_bound = 0.0;  // one-sided 95% bound when no crossing was seen
    // Exact-mode extras.
    std::int64_t omega_size = 0;
    std::int64_t cut_size = 0;
    std::int64_t crossing_pairs = 0;  // ordered boundary pairs, both directions
    std::string phi_exact;            // reduced fraction, exact mode only
};

ConductanceEstimate conductance_exact(const ChainSpec& spec, std::int64_t omega_cap = kDefaultOmegaCap);

// Estimates pi(S) and the boundary flow by sampling x uniformly and
// scanning all proper single-vertex recolourings for cut crossings. The
// membership test for each neighbour recomputes the forced set from
// scratch unless incremental updates are enabled.
ConductanceEstimate conductance_mc(const ChainSpec& spec, std::int64_t trials, const RngStream& rng,
                                   int threads = 1, bool incremental = false);

// Exhaustive min over all nontrivial cuts; debug aid for |Omega| <= 16.
double conductance_min_exhaustive(const ChainSpec& spec);

}  // namespace treecol
