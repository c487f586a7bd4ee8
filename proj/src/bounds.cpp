#include "treecol/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace treecol {

namespace {

BigInt big_pow(BigInt base, unsigned exp) { return boost::multiprecision::pow(base, exp); }

BoundReport make_report(std::string name, double lhs, double rhs,
                        std::map<std::string, double> params = {}, std::string note = "") {
    BoundReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.holds = lhs <= rhs;
    r.params = std::move(params);
    r.note = std::move(note);
    return r;
}

BoundReport make_value(std::string name, double value, std::map<std::string, double> params = {}) {
    BoundReport r;
    r.name = std::move(name);
    r.lhs = value;
    r.rhs = value;
    r.holds = true;
    r.params = std::move(params);
    r.note = "value";
    return r;
}

}  // namespace

BigInt tree_size(int b, int h) {
    if (b < 2 || h < 0) throw std::invalid_argument("need b >= 2 and h >= 0");
    return (big_pow(b, static_cast<unsigned>(h) + 1) - 1) / (b - 1);
}

BigInt colouring_count(int b, int q, int h) {
    if (q < 2) throw std::invalid_argument("q must be >= 2");
    BigInt n = tree_size(b, h);
    if (n - 1 > 1'000'000'000)
        throw std::invalid_argument("colouring count exponent too large to materialize");
    return q * big_pow(q - 1, static_cast<unsigned>(n - 1));
}

std::optional<int> height_from_vertex_count(int b, std::int64_t n) {
    BigInt total = 1;
    BigInt level = 1;
    int h = 0;
    while (total < n) {
        level *= b;
        total += level;
        ++h;
        if (h > 200) return std::nullopt;
    }
    if (total != n) return std::nullopt;
    return h;
}

std::vector<BoundReport> height_bounds(int b, std::int64_t n) {
    auto H = height_from_vertex_count(b, n);
    if (!H) throw std::invalid_argument(std::to_string(n) + " is not the size of a complete " +
                                        std::to_string(b) + "-ary tree");
    std::map<std::string, double> params{{"b", double(b)}, {"n", double(n)}, {"H", double(*H)}};
    const double ln_n = std::log(static_cast<double>(n));
    const double ln_b = std::log(static_cast<double>(b));
    std::vector<BoundReport> out;
    out.push_back(make_report("height_plus_1_le_lg_n_plus_1", double(*H) + 1,
                              std::log2(static_cast<double>(n)) + 1, params));
    out.push_back(make_report("height_le_ln_n_over_ln_b", double(*H), ln_n / ln_b, params));
    BigInt b_cubed = BigInt(b) * b * b;
    if (BigInt(n) >= b_cubed) {
        out.push_back(
            make_report("height_minus_1_ge_ln_n_over_3_ln_b", ln_n / (3 * ln_b), double(*H) - 1, params));
    }
    return out;
}

RecurrenceValues recurrences(int b, int q, int h) {
    if (b < 2 || q < 2 || h < 0) throw std::invalid_argument("need b >= 2, q >= 2, h >= 0");
    RecurrenceValues vals;
    if (tree_size(b, h) <= 1'000'000) {
        vals.colourings = colouring_count(b, q, h);
        vals.colourings_available = true;
    }

    BigInt lambda = 1;
    for (int i = 1; i <= h; ++i) lambda = tree_size(b, i) + b * lambda;
    vals.path_length = lambda;
    vals.path_length_ceiling = BigInt(h + 1) * big_pow(b, static_cast<unsigned>(h) + 1);
    vals.path_length_ok = vals.path_length <= vals.path_length_ceiling;

    vals.cycle_count_bound = big_pow(2, static_cast<unsigned>(b) * static_cast<unsigned>(h));
    vals.pair_ratio_bound = big_pow(9, static_cast<unsigned>(b) * static_cast<unsigned>(h));

    // chi(i) = (3q/(q-1))^b (2^{(i-1)b} + chi(i-1)), chi(0) = 1/q, taken as
    // equality so the propagated value dominates the true ratio.
    BigRational chi(1, q);
    BigRational factor_b(big_pow(BigInt(3) * q, static_cast<unsigned>(b)),
                         big_pow(BigInt(q - 1), static_cast<unsigned>(b)));
    for (int i = 1; i <= h; ++i)
        chi = factor_b * (BigRational(big_pow(2, static_cast<unsigned>((i - 1) * b))) + chi);
    vals.pair_ratio = chi;
    vals.pair_ratio_ok = chi <= BigRational(vals.pair_ratio_bound);
    return vals;
}

bool colour_count_identity_holds(int b, int q, int h) {
    if (h < 1) throw std::invalid_argument("identity needs h >= 1");
    BigInt lhs = big_pow(q, static_cast<unsigned>(b) - 1) * colouring_count(b, q, h);
    BigInt rhs = big_pow(q - 1, static_cast<unsigned>(b)) *
                 big_pow(colouring_count(b, q, h - 1), static_cast<unsigned>(b));
    return lhs == rhs;
}

double mixing_time_upper_value(int b, int q, std::int64_t n) {
    const double ln_n = std::log(static_cast<double>(n));
    const double exponent = 3.0 + 3.0 * b / std::log(static_cast<double>(b));
    return 3.0 * b * q * q * (1.0 + std::log2(static_cast<double>(n))) * std::exp(exponent * ln_n);
}

double mixing_time_lower_value(int b, int q, std::int64_t n) {
    const double exponent =
        static_cast<double>(b - 2) / (6.0 * (q - 1) * std::log(static_cast<double>(b)));
    return (0.5 - 0.5 / std::exp(1.0)) * (2.0 / 9.0) *
           std::exp(exponent * std::log(static_cast<double>(n)));
}

bool assumption_holds(int b, int q) {
    return 2.0 * q <= static_cast<double>(b) / std::log(static_cast<double>(b));
}

bool branching_margin_holds(int b, int q) {
    return static_cast<double>(b - 2) >= 2.0 * (q - 1) * std::log(static_cast<double>(q - 1));
}

std::vector<BoundReport> theorem_bounds(int b, int q, std::int64_t n) {
    if (q < 3) throw std::invalid_argument("q must be >= 3");
    std::map<std::string, double> params{{"b", double(b)}, {"q", double(q)}, {"n", double(n)}};
    std::vector<BoundReport> out;
    out.push_back(make_value("mixing_time_upper_value", mixing_time_upper_value(b, q, n), params));
    out.push_back(make_value("mixing_time_lower_value", mixing_time_lower_value(b, q, n), params));
    out.push_back(make_report("regime_2q_le_b_over_ln_b", 2.0 * q,
                              static_cast<double>(b) / std::log(static_cast<double>(b)), params));
    out.push_back(make_report("margin_2_qm1_ln_qm1_le_b_minus_2",
                              2.0 * (q - 1) * std::log(static_cast<double>(q - 1)),
                              static_cast<double>(b - 2), params));
    return out;
}

double comparison_time_bound(double a_f, std::int64_t tau_aux, double delta_prime, double c,
                             double delta, double pi_min) {
    if (!(delta_prime > 0.0 && delta_prime < 0.5)) throw std::invalid_argument("delta' must be in (0, 1/2)");
    if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
    const double flow_term = a_f * (static_cast<double>(tau_aux) / std::log(1.0 / (2.0 * delta_prime)) + 1.0);
    const double lazy_term = 1.0 / (2.0 * c);
    return std::max(flow_term, lazy_term) * std::log(1.0 / (delta * pi_min));
}

std::vector<BoundReport> lower_bound_chain(int b, int q, int H) {
    if (H < 1) throw std::invalid_argument("H must be >= 1");
    if (q < 3) throw std::invalid_argument("q must be >= 3");
    std::map<std::string, double> params{{"b", double(b)}, {"q", double(q)}, {"H", double(H)}};

    const double eps = (q - 1) * std::exp(-static_cast<double>(b - 2) / (q - 1));
    const double eps_inv_pow = std::exp(-(H - 1) * std::log(eps));
    const double mid = std::exp((H - 1) * static_cast<double>(b - 2) / (2.0 * (q - 1)));

    std::vector<BoundReport> out;
    out.push_back(make_report("regime_2q_le_b_over_ln_b", 2.0 * q,
                              static_cast<double>(b) / std::log(static_cast<double>(b)), params));
    out.push_back(make_value("eps_inverse_pow_H_minus_1", eps_inv_pow, params));
    out.push_back(make_report("exp_margin_le_eps_inverse_pow", mid, eps_inv_pow, params));

    BigInt n_big = tree_size(b, H);
    params["n"] = n_big.convert_to<double>();
    if (n_big >= BigInt(b) * b * b) {
        const double ln_n = std::log(n_big.convert_to<double>());
        const double final_form = std::exp(ln_n * static_cast<double>(b - 2) /
                                           (6.0 * (q - 1) * std::log(static_cast<double>(b))));
        out.push_back(make_report("n_power_le_exp_margin", final_form, mid, params));
        out.push_back(make_report("n_power_le_eps_inverse_pow", final_form, eps_inv_pow, params));
    }
    return out;
}

}  // namespace treecol
