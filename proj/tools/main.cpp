// treecol: Metropolis dynamics for proper colourings of complete b-ary
// trees, with exact mixing-time, canonical-path, forced-set, and
// conductance computations at enumerable sizes.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "treecol/bounds.hpp"
#include "treecol/chain.hpp"
#include "treecol/errors.hpp"
#include "treecol/forced.hpp"
#include "treecol/paths.hpp"
#include "treecol/rng.hpp"
#include "treecol/tree.hpp"
#include "treecol/verify.hpp"

using json = nlohmann::ordered_json;
using namespace treecol;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBoundViolated = 2;

std::int64_t env_cap(const char* name, std::int64_t fallback) {
    const char* v = std::getenv(name);
    if (!v) return fallback;
    try {
        return std::stoll(v);
    } catch (...) {
        return fallback;
    }
}

// Doubles that may be infinite (overflowed closed forms) serialize as
// strings so the JSON stays valid.
json real(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

struct Options {
    int b = 2;
    int H = 1;
    int q = 3;
    double delta = 1.0 / (2.0 * std::exp(1.0));
    std::int64_t steps = 1000;
    std::int64_t trials = 100'000;
    std::uint64_t seed = 0;
    int threads = 1;
    int h_max = 5;
    std::int64_t n = -1;
    std::int64_t max_omega = env_cap("TREECOL_MAX_OMEGA", kDefaultOmegaCap);
    std::int64_t path_budget = env_cap("TREECOL_PATH_BUDGET", kDefaultPairBudget);
    std::string mode = "exact";
    std::string x_json, y_json, start_json;
    bool incremental = false;
    std::string out_file;
};

json config_echo(const std::string& subcommand, const Options& o, std::initializer_list<const char*> keys) {
    json cfg;
    cfg["subcommand"] = subcommand;
    for (const char* k : keys) {
        std::string key = k;
        if (key == "b") cfg["b"] = o.b;
        else if (key == "H") cfg["H"] = o.H;
        else if (key == "q") cfg["q"] = o.q;
        else if (key == "delta") cfg["delta"] = o.delta;
        else if (key == "steps") cfg["steps"] = o.steps;
        else if (key == "trials") cfg["trials"] = o.trials;
        else if (key == "seed") cfg["seed"] = o.seed;
        else if (key == "threads") cfg["threads"] = o.threads;
        else if (key == "h_max") cfg["h_max"] = o.h_max;
        else if (key == "mode") cfg["mode"] = o.mode;
        else if (key == "incremental") cfg["incremental"] = o.incremental;
        else if (key == "max_omega") cfg["max_omega"] = o.max_omega;
        else if (key == "path_budget") cfg["path_budget"] = o.path_budget;
    }
    return cfg;
}

void write_output(const Options& o, const std::string& text) {
    if (o.out_file.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out_file);
    if (!f) throw std::runtime_error("cannot open output file " + o.out_file);
    f << text;
}

void write_json(const Options& o, const json& j) { write_output(o, j.dump(2) + "\n"); }

Colouring parse_colouring(const std::string& text, const TreeShape& shape, int q, const char* flag) {
    json j = json::parse(text, nullptr, true);
    if (!j.is_array()) throw std::invalid_argument(std::string(flag) + " must be a JSON array");
    Colouring c;
    for (const auto& e : j) {
        long long v = e.get<long long>();
        if (v < 0 || v >= q) throw std::invalid_argument(std::string(flag) + ": colour out of range");
        c.colours.push_back(static_cast<std::uint8_t>(v));
    }
    if (static_cast<std::int64_t>(c.size()) != shape.n())
        throw std::invalid_argument(std::string(flag) + ": expected " + std::to_string(shape.n()) +
                                    " entries");
    return c;
}

json colouring_json(const Colouring& c) {
    json arr = json::array();
    for (std::uint8_t v : c.colours) arr.push_back(static_cast<int>(v));
    return arr;
}

double cut_bound(int b, int q, int H) {
    return 4.5 * std::pow(loose_probability_bound(b, q), H - 1);
}

int cmd_mix_exact(const Options& o) {
    ChainSpec spec(TreeShape(o.b, o.H), o.q);
    TransitionMatrix matrix(spec, o.max_omega);
    std::int64_t tau = mixing_time_exact(matrix, o.delta);
    json out;
    out["config"] = config_echo("mix-exact", o, {"b", "H", "q", "delta", "max_omega"});
    out["tau"] = tau;
    out["omega_size"] = matrix.size();
    out["min_diag"] = matrix.min_diagonal();
    out["stationary_check"] = matrix.uniform_stationarity_gap();
    write_json(o, out);
    return kExitOk;
}

int cmd_simulate(const Options& o) {
    ChainSpec spec(TreeShape(o.b, o.H), o.q);
    RngStream master(o.seed);
    RngStream start_rng = master.split(0);
    RngStream walk_rng = master.split(1);
    Colouring x = o.start_json.empty() ? sample_uniform_colouring(spec.shape, spec.q, start_rng)
                                       : parse_colouring(o.start_json, spec.shape, spec.q, "--start");
    if (!is_proper(spec.shape, spec.q, x)) throw std::invalid_argument("--start is not proper");

    std::string csv = "# config: " +
                      config_echo("simulate", o, {"b", "H", "q", "steps", "seed"}).dump() + "\n";
    csv += "step,changed_vertex,new_colour\n";
    for (std::int64_t t = 1; t <= o.steps; ++t) {
        std::int64_t v = walk_rng.below(spec.shape.n());
        int c = static_cast<int>(walk_rng.below(spec.q));
        Colouring y = apply_proposal(spec, x, v, c);
        if (y != x) {
            csv += std::to_string(t) + "," + std::to_string(v) + "," + std::to_string(c) + "\n";
            x = std::move(y);
        } else {
            csv += std::to_string(t) + ",-1,-1\n";
        }
    }
    write_output(o, csv);
    return kExitOk;
}

int cmd_path(const Options& o) {
    TreeShape shape(o.b, o.H);
    Colouring x = parse_colouring(o.x_json, shape, o.q, "--x");
    Colouring y = parse_colouring(o.y_json, shape, o.q, "--y");
    TransitionPath path = canonical_path(shape, o.q, x, y);
    json out;
    out["config"] = config_echo("path", o, {"b", "H", "q"});
    out["start"] = colouring_json(x);
    out["target"] = colouring_json(y);
    json moves = json::array();
    for (const Move& m : path.moves) moves.push_back({m.vertex, static_cast<int>(m.to)});
    out["moves"] = moves;
    out["length"] = path.length();
    write_json(o, out);
    return kExitOk;
}

int cmd_congestion(const Options& o) {
    ChainSpec spec(TreeShape(o.b, o.H), o.q);
    CongestionReport rep = congestion(spec, o.max_omega, o.path_budget, o.threads);
    json out;
    out["config"] = config_echo("congestion", o, {"b", "H", "q", "threads", "max_omega", "path_budget"});
    out["A_f"] = rep.a_f;
    out["max_load"] = rep.max_load;
    out["bound"] = real(rep.bound);
    out["ok"] = rep.ok;
    out["omega_size"] = rep.omega_size;
    out["pairs"] = rep.pair_count;
    out["max_path_length"] = rep.max_path_length;
    out["length_bound"] = rep.length_bound;
    write_json(o, out);
    return rep.ok ? kExitOk : kExitBoundViolated;
}

int cmd_forced_stats(const Options& o) {
    if (o.b < 2 || o.q < 3) throw std::invalid_argument("need b >= 2 and q >= 3");
    if (!assumption_holds(o.b, o.q))
        std::cerr << "warning: 2q > b/ln(b); the 1/b ceiling on the unforced probability is not "
                     "claimed in this regime\n";
    RngStream master(o.seed);
    std::string csv = "# config: " +
                      config_echo("forced-stats", o, {"b", "q", "h_max", "trials", "seed"}).dump() + "\n";
    csv += "h,u_exact,u_mc,stderr,bound_1_over_b\n";
    char line[160];
    for (int h = 0; h <= o.h_max; ++h) {
        RngStream rng = master.split(static_cast<std::uint64_t>(h));
        double u = unforced_probability(o.b, o.q, h);
        McEstimate mc = unforced_probability_mc(o.b, o.q, h, o.trials, rng);
        std::snprintf(line, sizeof line, "%d,%.12g,%.12g,%.12g,%.12g\n", h, u, mc.mean, mc.std_error,
                      1.0 / o.b);
        csv += line;
    }
    write_output(o, csv);
    return kExitOk;
}

int cmd_conductance(const Options& o) {
    ChainSpec spec(TreeShape(o.b, o.H), o.q);
    const bool regime = assumption_holds(o.b, o.q);
    const bool has_bound = o.H >= 1;
    const double bound = has_bound ? cut_bound(o.b, o.q, o.H) : 0.0;

    json out;
    out["config"] =
        config_echo("conductance", o, {"b", "H", "q", "mode", "trials", "seed", "threads",
                                       "incremental", "max_omega"});
    bool ok = true;
    if (o.mode == "exact") {
        ConductanceEstimate est = conductance_exact(spec, o.max_omega);
        out["pi_S"] = est.pi_s;
        out["flow"] = est.flow;
        out["phi_S"] = est.phi_s;
        out["stderr"] = 0.0;
        out["phi_exact"] = est.phi_exact;
        out["omega_size"] = est.omega_size;
        out["cut_size"] = est.cut_size;
        out["crossing_pairs"] = est.crossing_pairs;
        if (has_bound && regime) ok = est.phi_s <= bound;
    } else if (o.mode == "mc") {
        RngStream rng = RngStream(o.seed).split(1002);
        ConductanceEstimate est = conductance_mc(spec, o.trials, rng, o.threads, o.incremental);
        out["pi_S"] = est.pi_s;
        out["flow"] = est.flow;
        out["phi_S"] = est.phi_s;
        out["stderr"] = est.stderr_phi;
        out["stderr_pi"] = est.stderr_pi;
        out["stderr_flow"] = est.stderr_flow;
        out["trials"] = est.trials;
        out["zero_crossings"] = est.zero_crossings;
        if (est.zero_crossings) out["flow_upper_bound"] = est.flow_upper_bound;
        if (has_bound && regime) ok = est.phi_s <= bound + 4.0 * est.stderr_phi;
    } else {
        throw std::invalid_argument("--mode must be exact or mc");
    }
    out["bound"] = has_bound ? real(bound) : json(nullptr);
    out["regime"] = regime;
    out["ok"] = ok;
    write_json(o, out);
    return ok ? kExitOk : kExitBoundViolated;
}

json bound_report_json(const BoundReport& r, const std::string& kind) {
    json j;
    j["name"] = r.name;
    j["lhs"] = real(r.lhs);
    j["rhs"] = real(r.rhs);
    j["holds"] = r.holds;
    j["kind"] = kind;
    if (!r.note.empty()) j["note"] = r.note;
    if (!r.params.empty()) {
        json p;
        for (const auto& [k, v] : r.params) p[k] = real(v);
        j["params"] = p;
    }
    return j;
}

int cmd_bounds(const Options& o) {
    int H = o.H;
    BigInt n_big;
    if (o.n >= 0) {
        auto derived = height_from_vertex_count(o.b, o.n);
        if (!derived)
            throw std::invalid_argument(std::to_string(o.n) + " is not the size of a complete " +
                                        std::to_string(o.b) + "-ary tree");
        H = *derived;
        n_big = o.n;
    } else {
        n_big = tree_size(o.b, H);
    }
    const bool n_fits = n_big <= BigInt(std::numeric_limits<std::int64_t>::max());
    const std::int64_t n = n_fits ? n_big.convert_to<std::int64_t>() : 0;
    if (!n_fits) throw std::invalid_argument("vertex count exceeds 64-bit range");

    json reports = json::array();
    for (const BoundReport& r : height_bounds(o.b, n)) reports.push_back(bound_report_json(r, "claim"));

    RecurrenceValues rec = recurrences(o.b, o.q, H);
    {
        json j;
        j["name"] = "path_length_le_ceiling";
        j["lhs"] = rec.path_length.str();
        j["rhs"] = rec.path_length_ceiling.str();
        j["holds"] = rec.path_length_ok;
        j["kind"] = "claim";
        j["note"] = "compared in exact integers";
        reports.push_back(j);
    }
    {
        json j;
        j["name"] = "pair_ratio_le_ceiling";
        j["lhs"] = real(rec.pair_ratio.convert_to<double>());
        j["rhs"] = real(rec.pair_ratio_bound.convert_to<double>());
        j["holds"] = rec.pair_ratio_ok;
        j["kind"] = "claim";
        j["note"] = "chi(H) vs 9^(bH), compared in exact rationals";
        reports.push_back(j);
    }
    {
        json j;
        j["name"] = "colouring_count";
        if (rec.colourings_available) {
            double c = rec.colourings.convert_to<double>();
            j["lhs"] = real(c);
            j["rhs"] = real(c);
            j["note"] = "C(H)" + std::string(std::isfinite(c) ? "" : " (exceeds double range)");
        } else {
            j["lhs"] = nullptr;
            j["rhs"] = nullptr;
            j["note"] = "C(H) has too many digits to materialize";
        }
        j["holds"] = true;
        j["kind"] = "value";
        reports.push_back(j);
    }
    if (H >= 1) {
        json j;
        j["name"] = "colour_count_identity";
        j["holds"] = colour_count_identity_holds(o.b, o.q, H);
        j["kind"] = "claim";
        j["note"] = "q^(b-1) C(H) == (q-1)^b C(H-1)^b in exact integers";
        reports.push_back(j);
    }
    for (const BoundReport& r : theorem_bounds(o.b, o.q, n))
        reports.push_back(bound_report_json(r, r.note == "value" ? "value" : "regime"));
    if (H >= 1 && assumption_holds(o.b, o.q))
        for (const BoundReport& r : lower_bound_chain(o.b, o.q, H))
            reports.push_back(bound_report_json(
                r, r.note == "value" ? "value" : (r.name.rfind("regime", 0) == 0 ? "regime" : "claim")));

    json out;
    out["config"] = config_echo("bounds", o, {"b", "H", "q"});
    if (o.n >= 0) out["config"]["n"] = o.n;
    out["reports"] = reports;
    write_json(o, out);

    for (const auto& r : reports)
        if (r["kind"] == "claim" && !r["holds"].get<bool>()) return kExitBoundViolated;
    return kExitOk;
}

int cmd_verify_all(const Options& o) {
    VerifyOptions vo;
    vo.b = o.b;
    vo.H = o.H;
    vo.q = o.q;
    vo.seed = o.seed;
    vo.trials = o.trials;
    vo.omega_cap = o.max_omega;
    vo.pair_budget = o.path_budget;
    vo.threads = o.threads;
    std::vector<CheckResult> checks = verify_all(vo);

    json out;
    out["config"] = config_echo("verify-all", o, {"b", "H", "q", "seed", "trials", "threads",
                                                  "max_omega", "path_budget"});
    json arr = json::array();
    for (const CheckResult& c : checks)
        arr.push_back({{"name", c.name}, {"status", c.status}, {"detail", c.detail}});
    out["checks"] = arr;
    out["all_pass"] = all_pass(checks);
    write_json(o, out);
    return all_pass(checks) ? kExitOk : kExitBoundViolated;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Metropolis dynamics on proper colourings of complete b-ary trees"};
    app.require_subcommand(1);
    Options o;

    auto add_tree_flags = [&](CLI::App* cmd, bool with_q = true) {
        cmd->add_option("--b", o.b, "branching factor (>= 2)");
        cmd->add_option("--H", o.H, "tree height in edges (>= 0)");
        if (with_q) cmd->add_option("--q", o.q, "number of colours");
    };

    CLI::App* mix = app.add_subcommand("mix-exact", "exact mixing time from the transition matrix");
    add_tree_flags(mix);
    mix->add_option("--delta", o.delta, "variation-distance threshold");
    mix->add_option("--max-omega", o.max_omega, "state-space cap");
    mix->add_option("--out", o.out_file, "write the report to a file");

    CLI::App* sim = app.add_subcommand("simulate", "seeded chain trace as CSV");
    add_tree_flags(sim);
    sim->add_option("--steps", o.steps, "number of chain steps");
    sim->add_option("--seed", o.seed, "random seed");
    sim->add_option("--start", o.start_json, "start colouring as a JSON array (default: sampled)");
    sim->add_option("--out", o.out_file, "write the trace to a file");

    CLI::App* path = app.add_subcommand("path", "canonical path between two colourings");
    add_tree_flags(path);
    path->add_option("--x", o.x_json, "start colouring as a JSON array")->required();
    path->add_option("--y", o.y_json, "target colouring as a JSON array")->required();
    path->add_option("--out", o.out_file, "write the report to a file");

    CLI::App* cong = app.add_subcommand("congestion", "all-pairs canonical-path congestion");
    add_tree_flags(cong);
    cong->add_option("--threads", o.threads, "worker threads");
    cong->add_option("--max-omega", o.max_omega, "state-space cap");
    cong->add_option("--path-budget", o.path_budget, "ordered-pair budget");
    cong->add_option("--out", o.out_file, "write the report to a file");

    CLI::App* fs = app.add_subcommand("forced-stats", "unforced-root probability sweep as CSV");
    fs->add_option("--b", o.b, "branching factor (>= 2)");
    fs->add_option("--q", o.q, "number of colours");
    fs->add_option("--h-max", o.h_max, "largest height in the sweep");
    fs->add_option("--trials", o.trials, "Monte Carlo trials per height");
    fs->add_option("--seed", o.seed, "random seed");
    fs->add_option("--out", o.out_file, "write the sweep to a file");

    CLI::App* cond = app.add_subcommand("conductance", "conductance of the forced-root cut");
    add_tree_flags(cond);
    cond->add_option("--mode", o.mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
    cond->add_option("--trials", o.trials, "Monte Carlo trials");
    cond->add_option("--seed", o.seed, "random seed");
    cond->add_option("--threads", o.threads, "worker threads");
    cond->add_flag("--incremental", o.incremental, "incremental forced-set updates");
    cond->add_option("--max-omega", o.max_omega, "state-space cap (exact mode)");
    cond->add_option("--out", o.out_file, "write the report to a file");

    CLI::App* bnd = app.add_subcommand("bounds", "closed-form bound reports");
    add_tree_flags(bnd);
    bnd->add_option("--n", o.n, "vertex count (alternative to --H)");
    bnd->add_option("--out", o.out_file, "write the reports to a file");

    CLI::App* ver = app.add_subcommand("verify-all", "run every supported check");
    add_tree_flags(ver);
    ver->add_option("--seed", o.seed, "random seed");
    ver->add_option("--trials", o.trials, "Monte Carlo trials");
    ver->add_option("--threads", o.threads, "worker threads");
    ver->add_option("--max-omega", o.max_omega, "state-space cap");
    ver->add_option("--path-budget", o.path_budget, "ordered-pair budget");
    ver->add_option("--out", o.out_file, "write the report to a file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (mix->parsed()) return cmd_mix_exact(o);
        if (sim->parsed()) return cmd_simulate(o);
        if (path->parsed()) return cmd_path(o);
        if (cong->parsed()) return cmd_congestion(o);
        if (fs->parsed()) return cmd_forced_stats(o);
        if (cond->parsed()) return cmd_conductance(o);
        if (bnd->parsed()) return cmd_bounds(o);
        if (ver->parsed()) return cmd_verify_all(o);
    } catch (const CapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
