#include "treecol/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "treecol/errors.hpp"

namespace treecol {

ChainSpec::ChainSpec(TreeShape s, int q_) : shape(std::move(s)), q(q_) {
    if (q < 2) throw std::invalid_argument("q must be >= 2");
    if (q > 64) throw std::invalid_argument("q must be <= 64");
}

namespace {

// Properness of recolouring v with c, assuming x itself is proper.
bool move_is_proper(const ChainSpec& spec, const Colouring& x, std::int64_t v, int c) {
    const TreeShape& t = spec.shape;
    if (v > 0 && x[t.parent(v)] == c) return false;
    if (!t.is_leaf(v)) {
        std::int64_t first = t.first_child(v);
        for (int i = 0; i < t.b(); ++i)
            if (x[first + i] == c) return false;
    }
    return true;
}

}  // namespace

Colouring apply_proposal(const ChainSpec& spec, const Colouring& x, std::int64_t v, int c) {
    if (v < 0 || v >= spec.shape.n()) throw std::invalid_argument("vertex out of range");
    if (c < 0 || c >= spec.q) throw std::invalid_argument("colour out of range");
    Colouring y = x;
    if (move_is_proper(spec, x, v, c)) y[v] = static_cast<std::uint8_t>(c);
    return y;
}

Colouring step(const ChainSpec& spec, const Colouring& x, RngStream& rng) {
    std::int64_t v = rng.below(spec.shape.n());
    int c = static_cast<int>(rng.below(spec.q));
    return apply_proposal(spec, x, v, c);
}

StateIndex::StateIndex(const std::vector<Colouring>& states) {
    map_.reserve(states.size() * 2);
    for (std::size_t i = 0; i < states.size(); ++i)
        map_.emplace(states[i], static_cast<std::int64_t>(i));
}

std::int64_t StateIndex::find(const Colouring& x) const {
    auto it = map_.find(x);
    return it == map_.end() ? -1 : it->second;
}

TransitionMatrix::TransitionMatrix(ChainSpec spec, std::int64_t omega_cap)
    : spec_(std::move(spec)),
      states_(enumerate_omega(spec_.shape, spec_.q, omega_cap)),
      index_(states_) {
    const std::int64_t nq = spec_.proposals();
    neighbours_.resize(states_.size());
    diag_.resize(states_.size());
    Colouring work;
    for (std::size_t i = 0; i < states_.size(); ++i) {
        const Colouring& x = states_[i];
        auto& adj = neighbours_[i];
        for (std::int64_t v = 0; v < spec_.shape.n(); ++v) {
            for (int c = 0; c < spec_.q; ++c) {
                if (c == x[v]) continue;
                if (!move_is_proper(spec_, x, v, c)) continue;
                work = x;
                work[v] = static_cast<std::uint8_t>(c);
                std::int64_t j = index_.find(work);
                if (j < 0) throw std::logic_error("proper move leads outside enumerated state space");
                adj.push_back(static_cast<std::int32_t>(j));
            }
        }
        std::sort(adj.begin(), adj.end());
        diag_[i] = nq - static_cast<std::int64_t>(adj.size());
    }
}

double TransitionMatrix::entry(std::int64_t i, std::int64_t j) const {
    const double scale = 1.0 / static_cast<double>(spec_.proposals());
    if (i == j) return static_cast<double>(diag_[static_cast<std::size_t>(i)]) * scale;
    const auto& adj = neighbours_[static_cast<std::size_t>(i)];
    return std::binary_search(adj.begin(), adj.end(), static_cast<std::int32_t>(j)) ? scale : 0.0;
}

double TransitionMatrix::min_diagonal() const {
    std::int64_t d = *std::min_element(diag_.begin(), diag_.end());
    return static_cast<double>(d) / static_cast<double>(spec_.proposals());
}

bool TransitionMatrix::symmetric_exact() const {
    for (std::size_t i = 0; i < neighbours_.size(); ++i) {
        for (std::int32_t j : neighbours_[i]) {
            const auto& back = neighbours_[static_cast<std::size_t>(j)];
            if (!std::binary_search(back.begin(), back.end(), static_cast<std::int32_t>(i)))
                return false;
        }
    }
    return true;
}

double TransitionMatrix::uniform_stationarity_gap() const {
    const std::int64_t nq = spec_.proposals();
    const std::size_t N = states_.size();
    std::vector<std::int64_t> column(N, 0);
    for (std::size_t i = 0; i < N; ++i) {
        column[i] += diag_[i];
        for (std::int32_t j : neighbours_[i]) column[static_cast<std::size_t>(j)] += 1;
    }
    double gap = 0.0;
    const double pi = 1.0 / static_cast<double>(N);
    for (std::size_t j = 0; j < N; ++j) {
        double mass = static_cast<double>(column[j]) / static_cast<double>(nq) * pi;
        gap += std::abs(mass - pi);
    }
    return gap;
}

void TransitionMatrix::multiply_row(std::span<const double> dist, std::span<double> out) const {
    const std::size_t N = states_.size();
    if (dist.size() != N || out.size() != N) throw std::invalid_argument("distribution length mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < N; ++k) {
        double w = dist[k];
        if (w == 0.0) continue;
        out[k] += w * static_cast<double>(diag_[k]);
        for (std::int32_t j : neighbours_[k]) out[static_cast<std::size_t>(j)] += w;
    }
    const double scale = 1.0 / static_cast<double>(spec_.proposals());
    for (double& v : out) v *= scale;
}

double variation_distance(std::span<const double> theta1, std::span<const double> theta2) {
    if (theta1.size() != theta2.size()) throw std::invalid_argument("distribution length mismatch");
    double s1 = 0.0, s2 = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < theta1.size(); ++i) {
        if (theta1[i] < -1e-15 || theta2[i] < -1e-15)
            throw std::invalid_argument("distributions must be non-negative");
        s1 += theta1[i];
        s2 += theta2[i];
        acc += std::abs(theta1[i] - theta2[i]);
    }
    if (std::abs(s1 - 1.0) > 1e-9 || std::abs(s2 - 1.0) > 1e-9)
        throw std::invalid_argument("distributions must sum to 1 within 1e-9");
    return acc / 2.0;
}

std::int64_t mixing_time_exact(const TransitionMatrix& matrix, double delta, std::int64_t max_iterations) {
    if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("delta must be in (0,1)");
    const std::size_t N = static_cast<std::size_t>(matrix.size());
    const double pi = 1.0 / static_cast<double>(N);

    // rows[x] = P^t(x, .), advanced one multiplication per iteration.
    std::vector<std::vector<double>> rows(N, std::vector<double>(N, 0.0));
    for (std::size_t x = 0; x < N; ++x) rows[x][x] = 1.0;
    std::vector<double> scratch(N);

    double prev = 1.0;
    for (std::int64_t t = 1; t <= max_iterations; ++t) {
        double worst = 0.0;
        for (std::size_t x = 0; x < N; ++x) {
            matrix.multiply_row(rows[x], scratch);
            rows[x].swap(scratch);
            double dist = 0.0;
            for (double p : rows[x]) dist += std::abs(p - pi);
            worst = std::max(worst, dist / 2.0);
        }
        if (worst > prev + 1e-12)
            throw std::logic_error("distance to stationarity increased between steps");
        prev = worst;
        if (worst <= delta) return t;
    }
    throw std::runtime_error("mixing time exceeds iteration limit " + std::to_string(max_iterations));
}

std::int64_t mixing_time_exact(const ChainSpec& spec, double delta, std::int64_t omega_cap,
                               std::int64_t max_iterations) {
    TransitionMatrix matrix(spec, omega_cap);
    return mixing_time_exact(matrix, delta, max_iterations);
}

bool check_ergodic(const ChainSpec& spec, std::int64_t omega_cap) {
    TransitionMatrix matrix(spec, omega_cap);
    const std::int64_t N = matrix.size();
    if (N == 0) return false;
    std::vector<char> seen(static_cast<std::size_t>(N), 0);
    std::vector<std::int64_t> queue{0};
    seen[0] = 1;
    std::int64_t visited = 1;
    while (!queue.empty()) {
        std::int64_t i = queue.back();
        queue.pop_back();
        for (std::int32_t j : matrix.neighbours(i)) {
            if (!seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = 1;
                ++visited;
                queue.push_back(j);
            }
        }
    }
    return visited == N;
}

}  // namespace treecol
