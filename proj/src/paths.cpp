#include "treecol/paths.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>
#include <thread>

#include "treecol/errors.hpp"

namespace treecol {

namespace {

void require_q3(int q) {
    if (q < 3) throw std::invalid_argument("recolouring procedures require q >= 3");
}

// Emits and applies one move, verifying properness against the current
// global colouring. A violation here is a bug in the procedures, not bad
// input, hence logic_error.
void apply_move(const TreeShape& shape, std::int64_t v, std::uint8_t to, Colouring& state,
                const MoveSink& sink) {
    if (state[v] == to) throw std::logic_error("procedure emitted a no-op move");
    if (v > 0 && state[shape.parent(v)] == to)
        throw std::logic_error("procedure emitted a move clashing with the parent");
    if (!shape.is_leaf(v)) {
        std::int64_t first = shape.first_child(v);
        for (int i = 0; i < shape.b(); ++i)
            if (state[first + i] == to) throw std::logic_error("procedure emitted a move clashing with a child");
    }
    if (sink) sink(v, to);
    state[v] = to;
}

void cycle_shift(const TreeShape& shape, int q, std::int64_t v, int shift, Colouring& state,
                 const MoveSink& sink) {
    const std::uint8_t root_entry = state[v];
    const std::uint8_t root_new = static_cast<std::uint8_t>((root_entry + shift) % q);
    if (shape.is_leaf(v)) {
        apply_move(shape, v, root_new, state, sink);
        return;
    }
    // Children whose shifted colour would equal the subtree root's current
    // colour must wait until the root has moved.
    const std::int64_t first = shape.first_child(v);
    const int b = shape.b();
    std::uint64_t before = 0;  // bitset over child slots, b <= 64 not required: use vector for large b
    std::vector<bool> pre;
    if (b > 64) pre.assign(static_cast<std::size_t>(b), false);
    for (int i = 0; i < b; ++i) {
        bool early = (state[first + i] + shift) % q != root_entry;
        if (b > 64)
            pre[static_cast<std::size_t>(i)] = early;
        else if (early)
            before |= std::uint64_t{1} << i;
    }
    auto processed_early = [&](int i) { return b > 64 ? bool(pre[static_cast<std::size_t>(i)]) : bool(before >> i & 1); };

    for (int i = 0; i < b; ++i)
        if (processed_early(i)) cycle_shift(shape, q, first + i, shift, state, sink);
    apply_move(shape, v, root_new, state, sink);
    for (int i = 0; i < b; ++i)
        if (!processed_early(i)) cycle_shift(shape, q, first + i, shift, state, sink);
}

}  // namespace

void cycle_plus(const TreeShape& shape, int q, std::int64_t v, Colouring& state, const MoveSink& sink) {
    require_q3(q);
    cycle_shift(shape, q, v, 1, state, sink);
}

void cycle_minus(const TreeShape& shape, int q, std::int64_t v, Colouring& state, const MoveSink& sink) {
    require_q3(q);
    cycle_shift(shape, q, v, q - 1, state, sink);
}

void cycle(const TreeShape& shape, int q, std::int64_t v, ColourMask forbidden, Colouring& state,
           const MoveSink& sink) {
    require_q3(q);
    if (std::popcount(forbidden) > 2) throw std::invalid_argument("at most two forbidden colours");
    const int cur = state[v];
    if (!(forbidden >> cur & 1)) return;  // already allowed, emit nothing
    const int plus = (cur + 1) % q;
    if (!(forbidden >> plus & 1)) {
        cycle_shift(shape, q, v, 1, state, sink);
        return;
    }
    const int minus = (cur + q - 1) % q;
    if (forbidden >> minus & 1)
        throw std::logic_error("forbidden set blocks all three candidate root colours");
    cycle_shift(shape, q, v, q - 1, state, sink);
}

void recolour(const TreeShape& shape, int q, std::int64_t v, const Colouring& target, Colouring& state,
              const MoveSink& sink) {
    require_q3(q);
    const std::uint8_t entry = state[v];
    const std::uint8_t want = target[v];
    if (!shape.is_leaf(v)) {
        const ColourMask forbidden = (ColourMask{1} << entry) | (ColourMask{1} << want);
        const std::int64_t first = shape.first_child(v);
        for (int i = 0; i < shape.b(); ++i) cycle(shape, q, first + i, forbidden, state, sink);
    }
    if (state[v] != want) apply_move(shape, v, want, state, sink);
    if (!shape.is_leaf(v)) {
        const std::int64_t first = shape.first_child(v);
        for (int i = 0; i < shape.b(); ++i) recolour(shape, q, first + i, target, state, sink);
    }
}

TransitionPath canonical_path(const TreeShape& shape, int q, const Colouring& x, const Colouring& y) {
    if (!is_proper(shape, q, x)) throw std::invalid_argument("start colouring is not proper");
    if (!is_proper(shape, q, y)) throw std::invalid_argument("target colouring is not proper");
    TransitionPath path;
    path.start = x;
    Colouring state = x;
    recolour(shape, q, 0, y, state,
             [&](std::int64_t v, std::uint8_t to) { path.moves.push_back({v, to}); });
    if (state != y) throw std::logic_error("canonical path did not terminate at the target colouring");
    return path;
}

std::vector<Colouring> path_states(const TreeShape& shape, int q, const TransitionPath& path) {
    std::vector<Colouring> states;
    states.reserve(path.moves.size() + 1);
    states.push_back(path.start);
    Colouring cur = path.start;
    for (const Move& m : path.moves) {
        if (m.to >= q || cur[m.vertex] == m.to) throw std::invalid_argument("invalid move in path");
        cur[m.vertex] = m.to;
        if (!is_proper(shape, q, cur)) throw std::invalid_argument("path leaves the proper colourings");
        states.push_back(cur);
    }
    return states;
}

std::int64_t path_length_bound(int b, int h) {
    std::int64_t lambda = 1;
    std::int64_t subtree = 1;  // vertices at height <= current
    for (int i = 1; i <= h; ++i) {
        subtree = subtree * b + 1;
        lambda = subtree + b * lambda;
    }
    return lambda;
}

namespace {

// Shared scaffolding for congestion and replay counting: run a procedure
// from a start state, tracking transitions as (state index, neighbour slot)
// pairs aligned with the matrix adjacency.
struct EdgeTracker {
    const TransitionMatrix& matrix;
    Colouring state;
    std::int64_t cur = -1;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;  // (z, slot in adj[z])
    Colouring scratch;

    explicit EdgeTracker(const TransitionMatrix& m) : matrix(m) {}

    void reset(std::int64_t start_index) {
        state = matrix.states()[static_cast<std::size_t>(start_index)];
        cur = start_index;
        edges.clear();
    }

    void on_move(std::int64_t v, std::uint8_t to) {
        scratch = state;
        scratch[v] = to;
        std::int64_t w = matrix.index().find(scratch);
        if (w < 0) throw std::logic_error("path move leads outside the state space");
        const auto& adj = matrix.neighbours(cur);
        auto it = std::lower_bound(adj.begin(), adj.end(), static_cast<std::int32_t>(w));
        if (it == adj.end() || *it != static_cast<std::int32_t>(w))
            throw std::logic_error("path edge is not a legal chain transition");
        edges.emplace_back(static_cast<std::int32_t>(cur),
                           static_cast<std::int32_t>(it - adj.begin()));
        cur = w;
    }
};

using LoadTable = std::vector<std::vector<std::uint64_t>>;

LoadTable make_load_table(const TransitionMatrix& matrix) {
    LoadTable loads(static_cast<std::size_t>(matrix.size()));
    for (std::int64_t i = 0; i < matrix.size(); ++i)
        loads[static_cast<std::size_t>(i)].assign(matrix.neighbours(i).size(), 0);
    return loads;
}

// Adds `amount` at each distinct transition of the tracked path.
void add_distinct_edges(EdgeTracker& tracker, LoadTable& loads, std::uint64_t amount) {
    auto& edges = tracker.edges;
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (auto [z, slot] : edges) loads[static_cast<std::size_t>(z)][static_cast<std::size_t>(slot)] += amount;
}

void merge_load_tables(LoadTable& into, const LoadTable& from) {
    for (std::size_t i = 0; i < into.size(); ++i)
        for (std::size_t k = 0; k < into[i].size(); ++k) into[i][k] += from[i][k];
}

std::vector<std::tuple<std::int32_t, std::int32_t, std::uint64_t>> nonzero_entries(
    const TransitionMatrix& matrix, const LoadTable& loads) {
    std::vector<std::tuple<std::int32_t, std::int32_t, std::uint64_t>> out;
    for (std::int64_t i = 0; i < matrix.size(); ++i) {
        const auto& adj = matrix.neighbours(i);
        for (std::size_t k = 0; k < adj.size(); ++k) {
            std::uint64_t v = loads[static_cast<std::size_t>(i)][k];
            if (v > 0) out.emplace_back(static_cast<std::int32_t>(i), adj[k], v);
        }
    }
    return out;
}

int clamp_threads(int threads, std::int64_t work_items) {
    if (threads < 1) threads = 1;
    return static_cast<int>(std::min<std::int64_t>(threads, std::max<std::int64_t>(work_items, 1)));
}

}  // namespace

CongestionReport congestion(const ChainSpec& spec, std::int64_t omega_cap, std::int64_t pair_budget,
                            int threads) {
    require_q3(spec.q);
    TransitionMatrix matrix(spec, omega_cap);
    const std::int64_t N = matrix.size();
    if (N > pair_budget / std::max<std::int64_t>(N, 1))
        throw CapExceeded("budget exceeded: " + std::to_string(N) + "^2 ordered pairs over cap " +
                          std::to_string(pair_budget));

    const std::int64_t lambda = path_length_bound(spec.shape.b(), spec.shape.H());
    threads = clamp_threads(threads, N);

    std::vector<LoadTable> tables(static_cast<std::size_t>(threads));
    std::vector<std::int64_t> longest(static_cast<std::size_t>(threads), 0);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));

    auto work = [&](int task, std::int64_t lo, std::int64_t hi) {
        try {
            LoadTable loads = make_load_table(matrix);
            EdgeTracker tracker(matrix);
            MoveSink sink = [&](std::int64_t v, std::uint8_t to) { tracker.on_move(v, to); };
            std::int64_t max_len = 0;
            for (std::int64_t i = lo; i < hi; ++i) {
                for (std::int64_t j = 0; j < N; ++j) {
                    if (j == i) continue;
                    tracker.reset(i);
                    recolour(spec.shape, spec.q, 0, matrix.states()[static_cast<std::size_t>(j)],
                             tracker.state, sink);
                    if (tracker.cur != j)
                        throw std::logic_error("canonical path did not terminate at the target");
                    const std::int64_t len = static_cast<std::int64_t>(tracker.edges.size());
                    if (len > lambda)
                        throw std::logic_error("canonical path longer than lambda(H)");
                    max_len = std::max(max_len, len);
                    add_distinct_edges(tracker, loads, static_cast<std::uint64_t>(len));
                }
            }
            tables[static_cast<std::size_t>(task)] = std::move(loads);
            longest[static_cast<std::size_t>(task)] = max_len;
        } catch (...) {
            errors[static_cast<std::size_t>(task)] = std::current_exception();
        }
    };

    if (threads == 1) {
        work(0, 0, N);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            std::int64_t lo = N * t / threads;
            std::int64_t hi = N * (t + 1) / threads;
            pool.emplace_back(work, t, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    LoadTable total = std::move(tables[0]);
    for (std::size_t t = 1; t < tables.size(); ++t) merge_load_tables(total, tables[t]);

    CongestionReport report;
    report.omega_size = N;
    report.pair_count = N * (N - 1);
    report.length_bound = lambda;
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(longest.size()); ++t)
        report.max_path_length = std::max(report.max_path_length, longest[static_cast<std::size_t>(t)]);
    for (const auto& row : total)
        for (std::uint64_t v : row) report.max_load = std::max(report.max_load, v);
    report.a_f = static_cast<double>(report.max_load) * static_cast<double>(spec.proposals()) /
                 static_cast<double>(N);
    const double bH = static_cast<double>(spec.shape.b()) * spec.shape.H();
    report.bound = static_cast<double>(spec.shape.b()) * spec.q * (spec.shape.H() + 1) *
                   static_cast<double>(spec.shape.n()) * static_cast<double>(spec.shape.n()) *
                   std::pow(9.0, bH);
    report.ok = report.a_f <= report.bound;
    report.loads = nonzero_entries(matrix, total);
    return report;
}

ReplayCounts consistent_counts(const ChainSpec& spec, PathProcedure procedure, std::int64_t omega_cap,
                               std::int64_t pair_budget) {
    require_q3(spec.q);
    TransitionMatrix matrix(spec, omega_cap);
    const std::int64_t N = matrix.size();
    if (procedure == PathProcedure::Recolour && N > pair_budget / std::max<std::int64_t>(N, 1))
        throw CapExceeded("budget exceeded: " + std::to_string(N) + "^2 ordered pairs over cap " +
                          std::to_string(pair_budget));

    LoadTable counts = make_load_table(matrix);
    EdgeTracker tracker(matrix);
    MoveSink sink = [&](std::int64_t v, std::uint8_t to) { tracker.on_move(v, to); };

    if (procedure == PathProcedure::CyclePlus) {
        for (std::int64_t i = 0; i < N; ++i) {
            tracker.reset(i);
            cycle_plus(spec.shape, spec.q, 0, tracker.state, sink);
            add_distinct_edges(tracker, counts, 1);
        }
    } else {
        for (std::int64_t i = 0; i < N; ++i) {
            for (std::int64_t j = 0; j < N; ++j) {
                if (j == i) continue;
                tracker.reset(i);
                recolour(spec.shape, spec.q, 0, matrix.states()[static_cast<std::size_t>(j)],
                         tracker.state, sink);
                add_distinct_edges(tracker, counts, 1);
            }
        }
    }

    ReplayCounts result;
    result.omega_size = N;
    for (const auto& row : counts)
        for (std::uint64_t v : row) result.max_count = std::max(result.max_count, v);
    result.used = nonzero_entries(matrix, counts);
    return result;
}

std::uint64_t count_consistent_states(const ChainSpec& spec, const Colouring& z, const Colouring& w,
                                      PathProcedure procedure, std::int64_t omega_cap,
                                      std::int64_t pair_budget) {
    TransitionMatrix matrix(spec, omega_cap);
    std::int64_t zi = matrix.index().find(z);
    std::int64_t wi = matrix.index().find(w);
    if (zi < 0 || wi < 0) throw std::invalid_argument("state is not a proper colouring of this tree");
    ReplayCounts counts = consistent_counts(spec, procedure, omega_cap, pair_budget);
    for (auto [a, b, c] : counts.used)
        if (a == zi && b == wi) return c;
    return 0;
}

}  // namespace treecol
