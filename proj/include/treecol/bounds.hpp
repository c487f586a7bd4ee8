#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace treecol {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// One evaluated inequality (or plain value, marked in note): holds is
// lhs <= rhs with the orientation fixed per bound.
struct BoundReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    std::map<std::string, double> params;
    std::string note;
};

// Vertex count of the complete b-ary tree of height h, (b^{h+1}-1)/(b-1).
BigInt tree_size(int b, int h);

// Number of proper colourings, q (q-1)^(tree_size - 1).
BigInt colouring_count(int b, int q, int h);

// Height of the complete b-ary tree with n vertices, if n is realizable.
std::optional<int> height_from_vertex_count(int b, std::int64_t n);

// H+1 <= lg(n)+1, H <= ln(n)/ln(b), and (for n >= b^3) H-1 >= ln(n)/(3 ln b).
std::vector<BoundReport> height_bounds(int b, std::int64_t n);

// Exact recurrence values at height h together with their closed-form
// ceilings.
struct RecurrenceValues {
    BigInt colourings;              // C(h); only when colourings_available
    bool colourings_available = false;  // false when C(h) has too many digits
    BigInt path_length;             // lambda(h) = (b^{h+1}-1)/(b-1) + b lambda(h-1)
    BigInt path_length_ceiling;     // (h+1) b^{h+1}
    BigInt cycle_count_bound;       // 2^{bh}
    BigInt pair_ratio_bound;        // 9^{bh}
    BigRational pair_ratio;         // chi(h) propagated as equality from chi(0)=1/q
    bool path_length_ok = false;    // lambda(h) <= (h+1) b^{h+1}
    bool pair_ratio_ok = false;     // chi(h) <= 9^{bh}
};

RecurrenceValues recurrences(int b, int q, int h);

// q^{b-1} C(h) == (q-1)^b C(h-1)^b, exactly.
bool colour_count_identity_holds(int b, int q, int h);

// 3 b q^2 (1 + lg n) n^{3 + 3b/ln b}; may overflow to +inf for large inputs.
double mixing_time_upper_value(int b, int q, std::int64_t n);

// (1/2 - 1/(2e)) (2/9) n^{(b-2)/(6(q-1) ln b)}.
double mixing_time_lower_value(int b, int q, std::int64_t n);

// 2q <= b / ln(b), the regime in which the lower-bound analysis operates.
bool assumption_holds(int b, int q);

// b - 2 >= 2 (q-1) ln(q-1); implied by the regime when q >= 3.
bool branching_margin_holds(int b, int q);

// Value reports for both mixing-time bounds plus the regime checks.
std::vector<BoundReport> theorem_bounds(int b, int q, std::int64_t n);

// max{A_f (tau_aux / ln(1/(2 delta')) + 1), 1/(2c)} * ln(1/(delta pi_min)):
// an upper bound on the mixing time obtained by comparing against the
// trivial uniform chain, whose own mixing time tau_aux is 1.
double comparison_time_bound(double a_f, std::int64_t tau_aux, double delta_prime, double c,
                             double delta, double pi_min);

// The chain eps^{-(H-1)} >= e^{(H-1)(b-2)/(2(q-1))} >= n^{(b-2)/(6(q-1) ln b)}
// (the last step needs n >= b^3), each step evaluated numerically.
std::vector<BoundReport> lower_bound_chain(int b, int q, int H);

}  // namespace treecol
