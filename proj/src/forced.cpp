#include "treecol/forced.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>

#include "treecol/errors.hpp"

namespace treecol {

namespace {

using boost::multiprecision::cpp_int;

void require_mask_width(int q) {
    if (q < 2 || q > 64) throw std::invalid_argument("q must be in [2,64]");
}

// Writes the forced flags bottom-up. Children have larger ids than their
// parent, so a single reverse scan suffices. blocked is the set of colours
// c for which some forced child carries c.
void compute_forced(const TreeShape& shape, int q, const Colouring& x, std::vector<char>& out) {
    const std::int64_t n = shape.n();
    out.assign(static_cast<std::size_t>(n), 0);
    const std::uint64_t full = (q == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << q) - 1);
    for (std::int64_t v = n - 1; v >= 0; --v) {
        if (shape.is_leaf(v)) {
            out[static_cast<std::size_t>(v)] = 1;
            continue;
        }
        std::uint64_t blocked = 0;
        const std::int64_t first = shape.first_child(v);
        for (int i = 0; i < shape.b(); ++i) {
            const std::int64_t w = first + i;
            if (out[static_cast<std::size_t>(w)]) blocked |= std::uint64_t{1} << x[w];
        }
        const std::uint64_t need = full & ~(std::uint64_t{1} << x[v]);
        out[static_cast<std::size_t>(v)] = (blocked & need) == need;
    }
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// sum_{j=1}^{q-1} (-1)^{j+1} C(q-1,j) (1 - j(1-u_child)/(q-1))^exponent:
// the probability that some colour other than the vertex's own is permitted
// by all `exponent` children, each independently forced with probability
// 1-u_child and coloured uniformly over the q-1 colours.
double permitted_somewhere(int exponent, int q, double u_child) {
    double acc = 0.0;
    for (int j = 1; j <= q - 1; ++j) {
        double base = 1.0 - static_cast<double>(j) * (1.0 - u_child) / (q - 1);
        double term = binomial(q - 1, j) * std::pow(base, exponent);
        acc += (j % 2 == 1) ? term : -term;
    }
    return acc;
}

bool in_cut(int cls, int q) { return cls < q / 2; }

}  // namespace

std::vector<std::int64_t> ForcedSet::members() const {
    std::vector<std::int64_t> out;
    for (std::size_t v = 0; v < forced.size(); ++v)
        if (forced[v]) out.push_back(static_cast<std::int64_t>(v));
    return out;
}

ForcedSet forced_set(const TreeShape& shape, int q, const Colouring& x) {
    require_mask_width(q);
    if (static_cast<std::int64_t>(x.size()) != shape.n())
        throw std::invalid_argument("colouring length mismatch");
    std::vector<char> buf;
    compute_forced(shape, q, x, buf);
    ForcedSet f;
    f.forced.assign(buf.begin(), buf.end());
    return f;
}

ForcedSet forced_set_bruteforce(const TreeShape& shape, int q, const Colouring& x,
                                std::int64_t enumeration_budget) {
    require_mask_width(q);
    const std::int64_t n = shape.n();
    ForcedSet f;
    f.forced.assign(static_cast<std::size_t>(n), false);

    for (std::int64_t w = 0; w < n; ++w) {
        if (shape.is_leaf(w)) {
            f.forced[static_cast<std::size_t>(w)] = true;
            continue;
        }
        // Subtree vertices in id order; internal ones get free colours,
        // leaves keep x's colours.
        std::vector<std::int64_t> vertices;
        for (std::int64_t v = w; v < n; ++v)
            if (shape.in_subtree(w, v)) vertices.push_back(v);
        std::vector<std::size_t> internal_slots;
        for (std::size_t s = 0; s < vertices.size(); ++s)
            if (!shape.is_leaf(vertices[s])) internal_slots.push_back(s);

        double combos = std::pow(static_cast<double>(q), static_cast<double>(internal_slots.size()));
        if (combos > static_cast<double>(enumeration_budget))
            throw CapExceeded("state space too large: brute-force forcing check over budget");

        std::vector<std::int64_t> slot_of(static_cast<std::size_t>(n), -1);
        for (std::size_t s = 0; s < vertices.size(); ++s)
            slot_of[static_cast<std::size_t>(vertices[s])] = static_cast<std::int64_t>(s);

        std::vector<std::uint8_t> cols(vertices.size());
        for (std::size_t s = 0; s < vertices.size(); ++s) cols[s] = x[vertices[s]];

        std::vector<int> digits(internal_slots.size(), 0);
        bool seen_own = false, seen_other = false;
        while (true) {
            for (std::size_t d = 0; d < digits.size(); ++d)
                cols[internal_slots[d]] = static_cast<std::uint8_t>(digits[d]);
            bool proper = true;
            for (std::size_t s = 1; s < vertices.size() && proper; ++s) {
                std::int64_t p = shape.parent(vertices[s]);
                proper = cols[s] != cols[static_cast<std::size_t>(slot_of[static_cast<std::size_t>(p)])];
            }
            if (proper) {
                if (cols[0] == x[w])
                    seen_own = true;
                else
                    seen_other = true;
                if (seen_other) break;
            }
            // odometer over the internal slots
            std::size_t d = 0;
            while (d < digits.size() && ++digits[d] == q) digits[d++] = 0;
            if (d == digits.size()) break;
        }
        if (!seen_own && !seen_other)
            throw std::logic_error("no proper extension found; input colouring was not proper");
        f.forced[static_cast<std::size_t>(w)] = !seen_other;
    }
    return f;
}

bool is_loose(const TreeShape& shape, int q, const Colouring& x, std::int64_t v, std::int64_t l) {
    require_mask_width(q);
    if (shape.height(v) < 1) throw std::invalid_argument("vertex must have height >= 1");
    if (!shape.is_leaf(l) || !shape.in_subtree(v, l))
        throw std::invalid_argument("l must be a leaf descendant of v");

    // Child of v on the path to l.
    std::int64_t on_path = l;
    while (shape.parent(on_path) != v) on_path = shape.parent(on_path);

    std::vector<char> forced;
    compute_forced(shape, q, x, forced);

    const std::uint64_t full = (q == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << q) - 1);
    std::uint64_t blocked = 0;
    const std::int64_t first = shape.first_child(v);
    for (int i = 0; i < shape.b(); ++i) {
        const std::int64_t w = first + i;
        if (w == on_path) continue;
        if (forced[static_cast<std::size_t>(w)]) blocked |= std::uint64_t{1} << x[w];
    }
    return (blocked | (std::uint64_t{1} << x[v])) != full;
}

int classify(const TreeShape& shape, int q, const Colouring& x) {
    require_mask_width(q);
    std::vector<char> forced;
    compute_forced(shape, q, x, forced);
    return forced[0] ? x[0] : q;
}

double unforced_probability(int b, int q, int h) {
    if (b < 2) throw std::invalid_argument("b must be >= 2");
    if (q < 3) throw std::invalid_argument("q must be >= 3");
    if (h < 0) throw std::invalid_argument("h must be >= 0");
    double u = 0.0;  // u_0
    for (int i = 1; i <= h; ++i) u = permitted_somewhere(b, q, u);
    return u;
}

double loose_probability(int b, int q, int h) {
    if (h < 1) throw std::invalid_argument("looseness is defined for height >= 1");
    return permitted_somewhere(b - 1, q, unforced_probability(b, q, h - 1));
}

double loose_probability_bound(int b, int q) {
    return (q - 1) * std::exp(-static_cast<double>(b - 2) / (q - 1));
}

double unforced_fraction_enumerated(int b, int q, int h, std::int64_t omega_cap) {
    TreeShape shape(b, h);
    auto states = enumerate_omega(shape, q, omega_cap);
    std::vector<char> forced;
    std::int64_t unforced = 0;
    for (const Colouring& x : states) {
        compute_forced(shape, q, x, forced);
        if (!forced[0]) ++unforced;
    }
    return static_cast<double>(unforced) / static_cast<double>(states.size());
}

double loose_fraction_enumerated(int b, int q, int h, std::int64_t omega_cap) {
    if (h < 1) throw std::invalid_argument("looseness is defined for height >= 1");
    TreeShape shape(b, h);
    auto states = enumerate_omega(shape, q, omega_cap);
    const std::int64_t leaf = shape.leaf_start();
    std::int64_t loose = 0;
    for (const Colouring& x : states)
        if (is_loose(shape, q, x, 0, leaf)) ++loose;
    return static_cast<double>(loose) / static_cast<double>(states.size());
}

namespace {

// One lazily sampled vertex: colour uniform over [q] minus the parent's
// colour, forced status decided by generating children only until the
// outcome is fixed. Unvisited subtrees are independent of everything
// already used, so skipping them leaves the marginal exact.
std::pair<int, bool> sample_vertex(int b, int q, int h, int parent_colour, RngStream& rng) {
    int col;
    if (parent_colour < 0) {
        col = static_cast<int>(rng.below(q));
    } else {
        std::int64_t r = rng.below(q - 1);
        col = static_cast<int>(r < parent_colour ? r : r + 1);
    }
    if (h == 0) return {col, true};
    const std::uint64_t full = (q == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << q) - 1);
    const std::uint64_t need = full & ~(std::uint64_t{1} << col);
    std::uint64_t blocked = 0;
    for (int i = 0; i < b; ++i) {
        auto [cc, cf] = sample_vertex(b, q, h - 1, col, rng);
        if (cf) blocked |= std::uint64_t{1} << cc;
        if ((blocked & need) == need) return {col, true};
    }
    return {col, false};
}

}  // namespace

McEstimate unforced_probability_mc(int b, int q, int h, std::int64_t trials, const RngStream& rng) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    require_mask_width(q);
    std::int64_t unforced = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        RngStream stream = rng.split(static_cast<std::uint64_t>(t));
        if (!sample_vertex(b, q, h, -1, stream).second) ++unforced;
    }
    McEstimate est;
    est.trials = trials;
    est.mean = static_cast<double>(unforced) / static_cast<double>(trials);
    est.std_error = std::sqrt(std::max(est.mean * (1.0 - est.mean), 0.0) / static_cast<double>(trials));
    return est;
}

ConductanceEstimate conductance_exact(const ChainSpec& spec, std::int64_t omega_cap) {
    require_mask_width(spec.q);
    TransitionMatrix matrix(spec, omega_cap);
    const std::int64_t N = matrix.size();

    std::vector<char> side(static_cast<std::size_t>(N));
    std::vector<char> forced;
    for (std::int64_t i = 0; i < N; ++i) {
        const Colouring& x = matrix.states()[static_cast<std::size_t>(i)];
        compute_forced(spec.shape, spec.q, x, forced);
        int cls = forced[0] ? x[0] : spec.q;
        side[static_cast<std::size_t>(i)] = in_cut(cls, spec.q);
    }
    const std::int64_t cut = std::count(side.begin(), side.end(), char(1));
    if (cut == 0 || cut == N) throw std::runtime_error("degenerate cut: pi(S) is 0 or 1");

    std::int64_t out_pairs = 0, in_pairs = 0;
    for (std::int64_t i = 0; i < N; ++i)
        for (std::int32_t j : matrix.neighbours(i)) {
            if (side[static_cast<std::size_t>(i)] && !side[static_cast<std::size_t>(j)]) ++out_pairs;
            if (!side[static_cast<std::size_t>(i)] && side[static_cast<std::size_t>(j)]) ++in_pairs;
        }
    if (out_pairs != in_pairs) throw std::logic_error("boundary flow not symmetric");
    const std::int64_t crossing = out_pairs + in_pairs;

    ConductanceEstimate est;
    est.exact = true;
    est.omega_size = N;
    est.cut_size = cut;
    est.crossing_pairs = crossing;
    est.pi_s = static_cast<double>(cut) / static_cast<double>(N);
    est.flow = static_cast<double>(crossing) /
               (static_cast<double>(N) * static_cast<double>(spec.proposals()));

    cpp_int num = cpp_int(crossing) * N;
    cpp_int den = cpp_int(2) * spec.proposals() * cut * (N - cut);
    cpp_int g = boost::multiprecision::gcd(num, den);
    num /= g;
    den /= g;
    est.phi_exact = num.str() + "/" + den.str();
    est.phi_s = static_cast<double>(num) / static_cast<double>(den);
    return est;
}

namespace {

// Incremental forced-status maintenance: per vertex, counts of forced
// children by colour. A single-vertex recolouring only disturbs statuses on
// the path to the root, and the walk stops as soon as a status is unchanged.
class ForcedTracker {
public:
    ForcedTracker(const TreeShape& shape, int q, Colouring x)
        : shape_(shape), q_(q), x_(std::move(x)),
          full_((q == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << q) - 1)) {
        const std::int64_t n = shape_.n();
        forced_.assign(static_cast<std::size_t>(n), 0);
        counts_.assign(static_cast<std::size_t>(n) * q_, 0);
        blocked_.assign(static_cast<std::size_t>(n), 0);
        for (std::int64_t v = n - 1; v >= 0; --v) {
            if (shape_.is_leaf(v)) {
                forced_[static_cast<std::size_t>(v)] = 1;
            } else {
                recompute_status(v);
            }
            if (v > 0 && forced_[static_cast<std::size_t>(v)]) add_count(shape_.parent(v), x_[v], +1);
        }
    }

    int classify() const { return forced_[0] ? x_[0] : q_; }
    std::uint8_t colour(std::int64_t v) const { return x_[v]; }

    // Recolours v (assumed proper) and repairs statuses along the path.
    void set_colour(std::int64_t v, std::uint8_t c) {
        if (x_[v] == c) return;
        std::uint8_t prev_col = x_[v];
        bool prev_forced = forced_[static_cast<std::size_t>(v)];
        x_[v] = c;
        if (!shape_.is_leaf(v)) recompute_status(v);

        std::int64_t u = v;
        while (u > 0) {
            std::int64_t p = shape_.parent(u);
            bool now_forced = forced_[static_cast<std::size_t>(u)];
            if (prev_forced) add_count(p, prev_col, -1);
            if (now_forced) add_count(p, x_[u], +1);
            bool before = forced_[static_cast<std::size_t>(p)];
            recompute_status(p);
            if (forced_[static_cast<std::size_t>(p)] == before) break;
            prev_col = x_[p];  // p's colour did not change; only its status did
            prev_forced = before;
            u = p;
        }
    }

private:
    void add_count(std::int64_t p, std::uint8_t col, int delta) {
        auto& c = counts_[static_cast<std::size_t>(p) * q_ + col];
        c = static_cast<std::int32_t>(c + delta);
        if (c == 0)
            blocked_[static_cast<std::size_t>(p)] &= ~(std::uint64_t{1} << col);
        else
            blocked_[static_cast<std::size_t>(p)] |= std::uint64_t{1} << col;
    }

    void recompute_status(std::int64_t v) {
        const std::uint64_t need = full_ & ~(std::uint64_t{1} << x_[v]);
        forced_[static_cast<std::size_t>(v)] =
            (blocked_[static_cast<std::size_t>(v)] & need) == need;
    }

    const TreeShape& shape_;
    int q_;
    Colouring x_;
    std::uint64_t full_;
    std::vector<char> forced_;
    std::vector<std::int32_t> counts_;
    std::vector<std::uint64_t> blocked_;
};

struct McSums {
    std::int64_t trials = 0;
    std::int64_t in_cut_trials = 0;
    std::int64_t crossings = 0;       // sum of per-trial crossing counts
    std::int64_t crossings_sq = 0;    // sum of squares
    std::int64_t in_cut_crossings = 0;  // sum of pi_i * cnt_i
};

McSums conductance_mc_range(const ChainSpec& spec, std::int64_t lo, std::int64_t hi,
                            const RngStream& rng, bool incremental) {
    const TreeShape& shape = spec.shape;
    const int q = spec.q;
    const std::int64_t n = shape.n();
    McSums sums;
    std::vector<char> forced;
    std::vector<std::uint64_t> child_mask(static_cast<std::size_t>(n), 0);
    Colouring x;

    for (std::int64_t t = lo; t < hi; ++t) {
        RngStream stream = rng.split(static_cast<std::uint64_t>(t));
        x = sample_uniform_colouring(shape, q, stream);

        compute_forced(shape, q, x, forced);
        const bool side_x = in_cut(forced[0] ? x[0] : q, q);

        // Colour masks of children, so properness of a candidate move is O(1).
        std::fill(child_mask.begin(), child_mask.end(), 0);
        for (std::int64_t v = 1; v < n; ++v)
            child_mask[static_cast<std::size_t>(shape.parent(v))] |= std::uint64_t{1} << x[v];

        std::optional<ForcedTracker> tracker;
        if (incremental) tracker.emplace(shape, q, x);

        std::int64_t crossings = 0;
        for (std::int64_t v = 0; v < n; ++v) {
            for (int c = 0; c < q; ++c) {
                if (c == x[v]) continue;
                if (v > 0 && x[shape.parent(v)] == c) continue;
                if (!shape.is_leaf(v) && (child_mask[static_cast<std::size_t>(v)] >> c & 1)) continue;
                bool side_y;
                if (incremental) {
                    std::uint8_t old = tracker->colour(v);
                    tracker->set_colour(v, static_cast<std::uint8_t>(c));
                    side_y = in_cut(tracker->classify(), q);
                    tracker->set_colour(v, old);
                } else {
                    std::uint8_t old = x[v];
                    x[v] = static_cast<std::uint8_t>(c);
                    compute_forced(shape, q, x, forced);
                    side_y = in_cut(forced[0] ? x[0] : q, q);
                    x[v] = old;
                }
                if (side_y != side_x) ++crossings;
            }
        }
        ++sums.trials;
        sums.in_cut_trials += side_x ? 1 : 0;
        sums.crossings += crossings;
        sums.crossings_sq += crossings * crossings;
        sums.in_cut_crossings += side_x ? crossings : 0;
    }
    return sums;
}

}  // namespace

ConductanceEstimate conductance_mc(const ChainSpec& spec, std::int64_t trials, const RngStream& rng,
                                   int threads, bool incremental) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    require_mask_width(spec.q);
    if (threads < 1) threads = 1;
    threads = static_cast<int>(std::min<std::int64_t>(threads, trials));

    std::vector<McSums> parts(static_cast<std::size_t>(threads));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    auto work = [&](int task, std::int64_t lo, std::int64_t hi) {
        try {
            parts[static_cast<std::size_t>(task)] = conductance_mc_range(spec, lo, hi, rng, incremental);
        } catch (...) {
            errors[static_cast<std::size_t>(task)] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0, 0, trials);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(work, t, trials * t / threads, trials * (t + 1) / threads);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    McSums total;
    for (const McSums& p : parts) {
        total.trials += p.trials;
        total.in_cut_trials += p.in_cut_trials;
        total.crossings += p.crossings;
        total.crossings_sq += p.crossings_sq;
        total.in_cut_crossings += p.in_cut_crossings;
    }

    const double T = static_cast<double>(total.trials);
    const double nq = static_cast<double>(spec.proposals());
    const double p_hat = static_cast<double>(total.in_cut_trials) / T;
    const double cnt_mean = static_cast<double>(total.crossings) / T;
    const double flow_hat = cnt_mean / nq;
    if (p_hat <= 0.0 || p_hat >= 1.0)
        throw std::runtime_error("degenerate cut estimate: pi(S) is 0 or 1");

    ConductanceEstimate est;
    est.exact = false;
    est.trials = total.trials;
    est.pi_s = p_hat;
    est.flow = flow_hat;
    est.phi_s = flow_hat / (2.0 * p_hat * (1.0 - p_hat));

    if (total.trials > 1) {
        const double var_p = (static_cast<double>(total.in_cut_trials) - T * p_hat * p_hat) / (T - 1.0);
        const double var_cnt =
            (static_cast<double>(total.crossings_sq) - T * cnt_mean * cnt_mean) / (T - 1.0);
        const double cov_cnt_p =
            (static_cast<double>(total.in_cut_crossings) - T * p_hat * cnt_mean) / (T - 1.0);
        const double var_flow = var_cnt / (nq * nq);
        const double cov_flow_p = cov_cnt_p / nq;

        est.stderr_pi = std::sqrt(std::max(var_p, 0.0) / T);
        est.stderr_flow = std::sqrt(std::max(var_flow, 0.0) / T);
        const double d_flow = 1.0 / (2.0 * p_hat * (1.0 - p_hat));
        const double d_p = -flow_hat * (1.0 - 2.0 * p_hat) /
                           (2.0 * p_hat * p_hat * (1.0 - p_hat) * (1.0 - p_hat));
        const double var_phi =
            (d_flow * d_flow * var_flow + d_p * d_p * var_p + 2.0 * d_flow * d_p * cov_flow_p) / T;
        est.stderr_phi = std::sqrt(std::max(var_phi, 0.0));
    }

    if (total.crossings == 0) {
        est.zero_crossings = true;
        // Rule-of-three bound on the per-trial crossing probability, scaled
        // by the largest possible per-trial flow contribution.
        est.flow_upper_bound = (3.0 / T) * (static_cast<double>(spec.q - 1) / spec.q);
    }
    return est;
}

double conductance_min_exhaustive(const ChainSpec& spec) {
    TransitionMatrix matrix(spec, 1 << 16);
    const std::int64_t N = matrix.size();
    if (N > 16) throw std::invalid_argument("exhaustive cut search is limited to |Omega| <= 16");
    const double nq = static_cast<double>(spec.proposals());
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask + 1 < (std::uint32_t{1} << N); ++mask) {
        const int cut = std::popcount(mask);
        std::int64_t crossing = 0;
        for (std::int64_t i = 0; i < N; ++i)
            for (std::int32_t j : matrix.neighbours(i))
                if (((mask >> i) & 1) != ((mask >> j) & 1)) ++crossing;
        const double flow = static_cast<double>(crossing) / (static_cast<double>(N) * nq);
        const double pi = static_cast<double>(cut) / static_cast<double>(N);
        best = std::min(best, flow / (2.0 * pi * (1.0 - pi)));
    }
    return best;
}

}  // namespace treecol
