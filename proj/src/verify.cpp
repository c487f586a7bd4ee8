#include "treecol/verify.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "treecol/bounds.hpp"
#include "treecol/chain.hpp"
#include "treecol/errors.hpp"
#include "treecol/forced.hpp"
#include "treecol/rng.hpp"

namespace treecol {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Reporter {
    std::vector<CheckResult> checks;

    void add(std::string name, bool ok, std::string detail) {
        checks.push_back({std::move(name), ok ? "pass" : "fail", std::move(detail)});
    }
    void skip(std::string name, std::string detail) {
        checks.push_back({std::move(name), "skip", std::move(detail)});
    }
    void warn(std::string name, std::string detail) {
        checks.push_back({std::move(name), "warn", std::move(detail)});
    }
};

// Exhaustive structural checks on the cut boundary: crossings happen only
// across leaf moves, and an unforcing leaf move needs a fully loose path.
void boundary_structure_checks(const ChainSpec& spec, const TransitionMatrix& matrix, Reporter& rep) {
    const TreeShape& shape = spec.shape;
    const int q = spec.q;
    std::vector<int> cls(static_cast<std::size_t>(matrix.size()));
    for (std::int64_t i = 0; i < matrix.size(); ++i)
        cls[static_cast<std::size_t>(i)] = classify(shape, q, matrix.states()[static_cast<std::size_t>(i)]);

    bool leaf_only = true;
    std::int64_t boundary_pairs = 0;
    for (std::int64_t i = 0; i < matrix.size() && leaf_only; ++i) {
        if (cls[static_cast<std::size_t>(i)] == q) continue;  // root unforced in x
        const Colouring& x = matrix.states()[static_cast<std::size_t>(i)];
        for (std::int32_t j : matrix.neighbours(i)) {
            if (cls[static_cast<std::size_t>(j)] == cls[static_cast<std::size_t>(i)]) continue;
            ++boundary_pairs;
            const Colouring& y = matrix.states()[static_cast<std::size_t>(j)];
            std::int64_t diff = -1;
            for (std::int64_t v = 0; v < shape.n(); ++v)
                if (x[v] != y[v]) diff = v;
            if (diff < 0 || !shape.is_leaf(diff)) {
                leaf_only = false;
                break;
            }
        }
    }
    rep.add("forced_boundary_moves_are_leaf_moves", leaf_only,
            std::to_string(boundary_pairs) + " boundary pairs from forced-root states inspected");

    bool loose_chain = true;
    std::int64_t unforcing_moves = 0;
    for (std::int64_t i = 0; i < matrix.size() && loose_chain; ++i) {
        if (cls[static_cast<std::size_t>(i)] == q) continue;
        const Colouring& x = matrix.states()[static_cast<std::size_t>(i)];
        for (std::int64_t l = shape.leaf_start(); l < shape.n() && loose_chain; ++l) {
            for (int c = 0; c < q && loose_chain; ++c) {
                if (c == x[l]) continue;
                Colouring y = apply_proposal(spec, x, l, c);
                if (y == x) continue;
                if (classify(shape, q, y) != q) continue;
                ++unforcing_moves;
                for (std::int64_t v = shape.parent(l); ; v = shape.parent(v)) {
                    if (!is_loose(shape, q, x, v, l)) {
                        loose_chain = false;
                        break;
                    }
                    if (v == 0) break;
                }
            }
        }
    }
    rep.add("unforcing_leaf_move_implies_loose_path", loose_chain,
            std::to_string(unforcing_moves) + " unforcing leaf moves inspected");
}

std::optional<double> exact_sections(const VerifyOptions& opt, const ChainSpec& spec, Reporter& rep) {
    TransitionMatrix matrix(spec, opt.omega_cap);
    const std::int64_t N = matrix.size();

    rep.add("transition_matrix_symmetric", matrix.symmetric_exact(),
            "|Omega| = " + std::to_string(N) + ", integer adjacency check");
    double gap = matrix.uniform_stationarity_gap();
    rep.add("uniform_distribution_stationary", gap <= 1e-12, "||uP - u||_1 = " + num(gap));
    double min_diag = matrix.min_diagonal();
    rep.add("min_diagonal_ge_1_over_q", min_diag >= 1.0 / spec.q - 1e-15,
            "min P(x,x) = " + num(min_diag));
    rep.add("ergodic", check_ergodic(spec, opt.omega_cap), "move graph connectivity by search");

    const double delta = 1.0 / (2.0 * std::exp(1.0));
    std::int64_t tau = mixing_time_exact(matrix, delta);
    double upper = mixing_time_upper_value(spec.shape.b(), spec.q, spec.shape.n());
    rep.add("mixing_time_le_upper_value", static_cast<double>(tau) <= upper,
            "tau = " + std::to_string(tau) + ", ceiling " + num(upper));

    CongestionReport cong = congestion(spec, opt.omega_cap, opt.pair_budget, opt.threads);
    rep.add("canonical_paths_valid", cong.max_path_length <= cong.length_bound,
            std::to_string(cong.pair_count) + " paths, longest " +
                std::to_string(cong.max_path_length) + " <= lambda(H) = " +
                std::to_string(cong.length_bound));
    rep.add("congestion_bound", cong.ok,
            "A(f) = " + num(cong.a_f) + " <= " + num(cong.bound));

    double rhs = comparison_time_bound(cong.a_f, 1, 1.0 / (2.0 * std::exp(2.0)), 1.0 / spec.q, delta,
                                       1.0 / static_cast<double>(N));
    rep.add("mixing_time_le_comparison_bound", static_cast<double>(tau) <= rhs,
            "tau = " + std::to_string(tau) + " <= " + num(rhs));

    ReplayCounts cyc = consistent_counts(spec, PathProcedure::CyclePlus, opt.omega_cap, opt.pair_budget);
    BigInt cyc_bound = boost::multiprecision::pow(BigInt(2),
                                                  static_cast<unsigned>(spec.shape.b() * spec.shape.H()));
    rep.add("cycle_replay_count_bound", BigInt(cyc.max_count) <= cyc_bound,
            "max consistent starts " + std::to_string(cyc.max_count) + " <= 2^(bH) = " + cyc_bound.str());

    ReplayCounts rec = consistent_counts(spec, PathProcedure::Recolour, opt.omega_cap, opt.pair_budget);
    BigInt rec_bound = colouring_count(spec.shape.b(), spec.q, spec.shape.H()) *
                       boost::multiprecision::pow(BigInt(9), static_cast<unsigned>(spec.shape.b() *
                                                                                   spec.shape.H()));
    rep.add("recolour_replay_count_bound", BigInt(rec.max_count) <= rec_bound,
            "max consistent pairs " + std::to_string(rec.max_count) + " <= C(H) 9^(bH) = " +
                rec_bound.str());

    bool oracle_ok = true;
    for (std::int64_t i = 0; i < N && oracle_ok; ++i) {
        const Colouring& x = matrix.states()[static_cast<std::size_t>(i)];
        oracle_ok = forced_set(spec.shape, spec.q, x).forced ==
                    forced_set_bruteforce(spec.shape, spec.q, x).forced;
    }
    rep.add("forced_set_oracle_equivalence", oracle_ok,
            "recursive vs brute-force forcing over " + std::to_string(N) + " states");

    double u_rec = unforced_probability(spec.shape.b(), spec.q, spec.shape.H());
    double u_enum = unforced_fraction_enumerated(spec.shape.b(), spec.q, spec.shape.H(), opt.omega_cap);
    rep.add("unforced_prob_matches_enumeration", std::abs(u_rec - u_enum) <= 1e-12,
            "recursion " + num(u_rec) + " vs enumeration " + num(u_enum));

    if (spec.shape.H() >= 1) {
        double psi_rec = loose_probability(spec.shape.b(), spec.q, spec.shape.H());
        double psi_enum = loose_fraction_enumerated(spec.shape.b(), spec.q, spec.shape.H(), opt.omega_cap);
        rep.add("loose_prob_matches_enumeration", std::abs(psi_rec - psi_enum) <= 1e-12,
                "recursion " + num(psi_rec) + " vs enumeration " + num(psi_enum));
    }

    ConductanceEstimate cond = conductance_exact(spec, opt.omega_cap);
    rep.add("conductance_exact_value", true, "phi_S = " + cond.phi_exact + " = " + num(cond.phi_s));
    if (spec.shape.H() >= 1) {
        double bound = 4.5 * std::pow(loose_probability_bound(spec.shape.b(), spec.q),
                                      spec.shape.H() - 1);
        bool ok = cond.phi_s <= bound;
        std::string detail = "phi_S = " + num(cond.phi_s) + " vs (9/2) eps^(H-1) = " + num(bound);
        if (assumption_holds(spec.shape.b(), spec.q))
            rep.add("conductance_le_loose_bound", ok, detail);
        else
            rep.warn("conductance_le_loose_bound", detail + " (outside regime, informational)");
    }

    if (spec.shape.H() >= 1) boundary_structure_checks(spec, matrix, rep);
    return cond.phi_s;
}

void mc_sections(const VerifyOptions& opt, const ChainSpec& spec, Reporter& rep,
                 const std::optional<double>& phi_exact) {
    RngStream master(opt.seed);

    RngStream u_rng = master.split(1001);
    double u_rec = unforced_probability(spec.shape.b(), spec.q, spec.shape.H());
    McEstimate u_est = unforced_probability_mc(spec.shape.b(), spec.q, spec.shape.H(), opt.trials, u_rng);
    double sigma = std::sqrt(std::max(u_rec * (1.0 - u_rec), 0.0) / static_cast<double>(opt.trials));
    rep.add("unforced_prob_mc_agrees", std::abs(u_est.mean - u_rec) <= 4.0 * sigma + 1e-15,
            "mc " + num(u_est.mean) + " vs exact " + num(u_rec) + ", 4 sigma = " + num(4.0 * sigma));

    RngStream c_rng = master.split(1002);
    ConductanceEstimate mc = conductance_mc(spec, opt.trials, c_rng, opt.threads);
    rep.add("conductance_mc_ran", true,
            "phi_S = " + num(mc.phi_s) + " +- " + num(mc.stderr_phi) + " over " +
                std::to_string(mc.trials) + " trials");
    if (phi_exact) {
        bool ok = std::abs(mc.phi_s - *phi_exact) <= 4.0 * mc.stderr_phi + 1e-12;
        rep.add("conductance_mc_agrees_exact", ok,
                "mc " + num(mc.phi_s) + " vs exact " + num(*phi_exact) + ", 4 sigma = " +
                    num(4.0 * mc.stderr_phi));
    }
    if (spec.shape.H() >= 1) {
        double bound = 4.5 * std::pow(loose_probability_bound(spec.shape.b(), spec.q),
                                      spec.shape.H() - 1);
        bool ok = mc.phi_s <= bound + 4.0 * mc.stderr_phi;
        std::string detail = "phi_S = " + num(mc.phi_s) + " vs (9/2) eps^(H-1) = " + num(bound) +
                             " (one-sided 4 sigma " + num(4.0 * mc.stderr_phi) + ")";
        if (assumption_holds(spec.shape.b(), spec.q))
            rep.add("conductance_mc_le_loose_bound", ok, detail);
        else
            rep.warn("conductance_mc_le_loose_bound", detail + " (outside regime, informational)");
    }
}

void bound_sections(const VerifyOptions& opt, const ChainSpec& spec, Reporter& rep) {
    const int b = opt.b, q = opt.q, H = opt.H;

    bool heights_ok = true;
    std::ostringstream hdetail;
    for (const BoundReport& r : height_bounds(b, spec.shape.n())) {
        heights_ok = heights_ok && r.holds;
        hdetail << r.name << " " << num(r.lhs) << " <= " << num(r.rhs) << "; ";
    }
    rep.add("height_bounds", heights_ok, hdetail.str());

    rep.add("colour_count_identity", colour_count_identity_holds(b, q, std::max(H, 1)),
            "q^(b-1) C(h) == (q-1)^b C(h-1)^b at h = " + std::to_string(std::max(H, 1)));

    RecurrenceValues rec = recurrences(b, q, H);
    rep.add("path_length_le_ceiling", rec.path_length_ok,
            "lambda(H) = " + rec.path_length.str() + " <= " + rec.path_length_ceiling.str());
    rep.add("pair_ratio_le_ceiling", rec.pair_ratio_ok, "chi(H) <= 9^(bH)");

    double eps = loose_probability_bound(b, q);
    bool regime = assumption_holds(b, q);
    if (regime) {
        bool u_ok = true;
        for (int h = 0; h <= std::max(H, 10); ++h)
            u_ok = u_ok && unforced_probability(b, q, h) <= 1.0 / b + 1e-15;
        rep.add("unforced_prob_le_1_over_b", u_ok, "h = 0.." + std::to_string(std::max(H, 10)));

        bool psi_ok = true;
        for (int h = 1; h <= std::max(H, 10); ++h)
            psi_ok = psi_ok && loose_probability(b, q, h) <= eps + 1e-15;
        rep.add("loose_prob_le_eps", psi_ok, "eps = " + num(eps));

        rep.add("branching_margin", branching_margin_holds(b, q),
                "b - 2 >= 2(q-1) ln(q-1)");
        if (H >= 1) {
            bool chain_ok = true;
            std::ostringstream cdetail;
            for (const BoundReport& r : lower_bound_chain(b, q, H)) {
                chain_ok = chain_ok && r.holds;
                cdetail << r.name << (r.note == "value" ? " = " : " holds: ") << num(r.lhs) << "; ";
            }
            rep.add("lower_bound_chain", chain_ok, cdetail.str());
        }
    } else {
        rep.skip("unforced_prob_le_1_over_b", "outside the 2q <= b/ln(b) regime");
        rep.skip("loose_prob_le_eps", "outside the 2q <= b/ln(b) regime");
        rep.skip("branching_margin", "outside the 2q <= b/ln(b) regime");
        rep.skip("lower_bound_chain", "outside the 2q <= b/ln(b) regime");
    }
}

}  // namespace

std::vector<CheckResult> verify_all(const VerifyOptions& opt) {
    ChainSpec spec(TreeShape(opt.b, opt.H), opt.q);
    Reporter rep;

    if (assumption_holds(opt.b, opt.q))
        rep.add("regime_2q_le_b_over_ln_b", true,
                "2q = " + num(2.0 * opt.q) + " <= b/ln(b) = " +
                    num(static_cast<double>(opt.b) / std::log(static_cast<double>(opt.b))));
    else
        rep.warn("regime_2q_le_b_over_ln_b",
                 "warning: 2q = " + num(2.0 * opt.q) + " > b/ln(b) = " +
                     num(static_cast<double>(opt.b) / std::log(static_cast<double>(opt.b))));

    std::optional<double> phi_exact;
    if (omega_size(spec.shape, spec.q, opt.omega_cap)) {
        phi_exact = exact_sections(opt, spec, rep);
    } else {
        rep.skip("exact_sections", "state space too large for cap " + std::to_string(opt.omega_cap));
    }

    mc_sections(opt, spec, rep, phi_exact);
    bound_sections(opt, spec, rep);
    return rep.checks;
}

bool all_pass(const std::vector<CheckResult>& checks) {
    for (const CheckResult& c : checks)
        if (c.status == "fail") return false;
    return true;
}

}  // namespace treecol
