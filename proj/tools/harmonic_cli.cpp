// harmonic: command-line driver for moments, absorption, stationary weights,
// simulation, identity verification and scaling sweeps.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "harmonic/dual_oracle.hpp"
#include "harmonic/exact.hpp"
#include "harmonic/measure.hpp"
#include "harmonic/model.hpp"
#include "harmonic/report.hpp"
#include "harmonic/simulate.hpp"
#include "harmonic/verify.hpp"

using namespace harmonic;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<int> parse_int_list(const std::string& text, const char* what)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            throw UsageError(std::string(what) + ": not an integer list: " + text);
        }
        if (used != item.size()) throw UsageError(std::string(what) + ": not an integer list: " + text);
        out.push_back(v);
    }
    return out;
}

// JSON config: top-level keys are long option names; values are scalars,
// lists (joined with commas) or booleans. Options given on the command line win.
std::string config_scalar(const json& v)
{
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_number()) return v.dump();
    if (v.is_array()) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + config_scalar(v[i]);
        return out;
    }
    throw UsageError("config: unsupported value " + v.dump());
}

void merge_config(CLI::App* app, const std::string& path)
{
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw UsageError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception&) {
        throw UsageError("config: not valid JSON: " + path);
    }
    if (!j.is_object()) throw UsageError("config: top level must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "config") throw UsageError("config: nested config is not allowed");
        CLI::Option* opt = app->get_option_no_throw("--" + it.key());
        if (opt == nullptr) throw UsageError("config: unknown key " + it.key());
        if (opt->count() > 0) continue;
        try {
            opt->add_result(config_scalar(it.value()));
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw UsageError("config: bad value for " + it.key() + ": " + e.what());
        }
    }
}

struct Common {
    ModelParams params{3, 0.5, 0.5, 0.2};
    std::string format;
    std::string out;
    std::uint64_t seed = 1;
    bool rational = false;
    std::vector<std::string> xi;
    std::vector<std::string> positions;
    std::string config;
};

void add_params(CLI::App* app, Common& c)
{
    app->add_option("--N", c.params.N, "Number of sites")->capture_default_str();
    app->add_option("--s", c.params.s, "Spin s > 0")->capture_default_str();
    app->add_option("--beta-l", c.params.beta_L, "Left reservoir parameter in (0,1)")->capture_default_str();
    app->add_option("--beta-r", c.params.beta_R, "Right reservoir parameter in (0,1)")->capture_default_str();
    app->add_option("--out", c.out, "Output file (default: stdout)");
    app->add_option("--config", c.config, "JSON file with option values; explicit flags take precedence");
}

void add_format(CLI::App* app, Common& c, const std::string& fallback)
{
    c.format = fallback;
    app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

void add_xi(CLI::App* app, Common& c)
{
    app->add_option("--xi", c.xi, "Occupation multi-index, e.g. 1,0,2 (repeatable; empty string = zero vector)")
        ->expected(1)
        ->take_all();
    app->add_option("--positions", c.positions, "Sorted 1-based positions, e.g. 1,3,3 (repeatable)")
        ->expected(1)
        ->take_all();
}

std::vector<FactorialIndex> collect_xi(const Common& c, bool required)
{
    std::vector<FactorialIndex> out;
    const int N = c.params.N;
    for (const auto& s : c.xi) {
        auto v = parse_int_list(s, "--xi");
        if (v.empty()) v.assign(N, 0);
        if (static_cast<int>(v.size()) != N) throw UsageError("--xi must have N entries");
        for (int e : v)
            if (e < 0) throw UsageError("--xi entries must be >= 0");
        out.emplace_back(v);
    }
    for (const auto& s : c.positions) {
        const auto v = parse_int_list(s, "--positions");
        for (int x : v)
            if (x < 1 || x > N) throw UsageError("--positions entries must lie in 1..N");
        out.push_back(FactorialIndex::from_positions(N, v));
    }
    if (required && out.empty()) throw UsageError("give --xi or --positions");
    return out;
}

void emit(const Common& c, const std::string& text)
{
    if (c.out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + c.out);
    f << text;
}

// ---------------------------------------------------------------------------

int cmd_moments(const Common& c)
{
    const auto list = collect_xi(c, true);
    const MomentReport r = build_moment_report(list, c.params, c.rational);
    emit(c, c.format == "json" ? dump_json(to_json(r)) : to_csv(r).str());
    return 0;
}

int cmd_absorb(const Common& c)
{
    const auto list = collect_xi(c, true);
    const bool exact = c.rational;
    if (exact && !c.params.has_rational_spin()) throw UsageError("--rational needs 2s to be an integer");
    CsvTable t{kAbsorbSchema, {"xi", "k", "p", "p_oracle", "p_exact"}, {}};
    json j = {{"schema", kAbsorbSchema}, {"params", c.params}, {"entries", json::array()}};
    for (const auto& xi : list) {
        const auto closed = absorption_probs(xi, c.params);
        const auto oracle = absorption_oracle(xi, c.params);
        std::vector<std::string> exact_str(closed.probs.size());
        if (exact) {
            const auto e = absorption_probs_exact(xi, c.params);
            for (std::size_t k = 0; k < e.size(); ++k) exact_str[k] = e[k].get_str();
        }
        json row = {{"xi", xi.xi}, {"p", closed.probs}, {"p_oracle", oracle.probs},
                    {"ill_conditioned", closed.ill_conditioned}};
        if (exact) row["p_exact"] = exact_str;
        j["entries"].push_back(row);
        for (std::size_t k = 0; k < closed.probs.size(); ++k)
            t.add_row({join_cell(xi.xi), std::to_string(k), format_double(closed.probs[k]),
                       format_double(oracle.probs[k]), exact_str[k]});
    }
    emit(c, c.format == "json" ? dump_json(j) : t.str());
    return 0;
}

int cmd_measure(const Common& c, int cutoff, int max_occupation)
{
    c.params.validate();
    if (max_occupation < 0 || cutoff < max_occupation) throw UsageError("need 0 <= --max-occupation <= --cutoff");
    const StationaryInversion inv(c.params, cutoff);
    const auto grid = inv.weights(max_occupation);
    const bool closed = c.params.s == 0.5 && c.params.beta_L != c.params.beta_R && c.params.N <= 2;
    const bool eq = c.params.beta_L == c.params.beta_R;
    CsvTable t{kMeasureSchema, {"m", "mu", "truncation_error", "warning", "reference"}, {}};
    json j = {{"schema", kMeasureSchema}, {"params", c.params}, {"cutoff", cutoff}, {"weights", json::array()}};
    for (std::size_t idx = 0; idx < grid.value.size(); ++idx) {
        std::vector<int> m(c.params.N);
        std::size_t r = idx;
        for (int i = 0; i < c.params.N; ++i) {
            m[i] = static_cast<int>(r % grid.extent);
            r /= grid.extent;
        }
        const double mu = grid.value[idx];
        const double err = grid.truncation_error[idx];
        const bool warn = err > 1e-8 * std::fabs(mu);
        std::optional<double> ref;
        if (eq) ref = equilibrium_weight(Occupation(m), c.params.beta_L, c.params.s);
        else if (closed && c.params.N == 1) ref = one_site_half_spin_weight(m[0], c.params.beta_L, c.params.beta_R);
        else if (closed) ref = two_site_half_spin_weight(m[0], m[1], c.params.beta_L, c.params.beta_R);
        t.add_row({join_cell(m), format_double(mu), format_double(err), warn ? "1" : "0",
                   ref ? format_double(*ref) : ""});
        json row = {{"m", m}, {"mu", mu}, {"truncation_error", err}, {"warning", warn}};
        if (ref) row["reference"] = *ref;
        j["weights"].push_back(row);
    }
    emit(c, c.format == "json" ? dump_json(j) : t.str());
    return 0;
}

struct SimOptions {
    double horizon = 1e4;
    std::optional<double> burn_in;
    int replicas = 4;
    double thin = 0.0;
    long long dual_reps = 0;
};

int cmd_simulate(const Common& c, const SimOptions& o)
{
    c.params.validate();
    auto list = collect_xi(c, false);
    if (list.empty())
        for (int x = 1; x <= c.params.N; ++x) list.push_back(FactorialIndex::from_positions(c.params.N, {x}));
    SimConfig cfg;
    cfg.seed = c.seed;
    cfg.horizon = o.horizon;
    cfg.burn_in = o.burn_in.value_or(default_burn_in(c.params));
    cfg.replicas = o.replicas;
    cfg.thinning = o.thin;
    cfg.validate();

    CsvTable t{kSimulateSchema,
               {"observable", "mean", "std_error", "n_samples", "effective_samples", "exact", "low_ess_warning"},
               {}};
    json j = {{"schema", kSimulateSchema}, {"params", c.params}, {"seed", c.seed}, {"rows", json::array()}};
    auto add = [&](const std::string& name, const EstimateWithCI& e, double exact) {
        t.add_row({name, format_double(e.mean), format_double(e.std_error), std::to_string(e.n_samples),
                   format_double(e.effective_samples), format_double(exact), e.low_ess_warning ? "1" : "0"});
        j["rows"].push_back({{"observable", name},
                             {"mean", e.mean},
                             {"std_error", e.std_error},
                             {"n_samples", e.n_samples},
                             {"effective_samples", e.effective_samples},
                             {"exact", exact},
                             {"low_ess_warning", e.low_ess_warning}});
    };
    const auto est = estimate_moments(list, c.params, cfg);
    for (std::size_t i = 0; i < list.size(); ++i)
        add("G(" + join_cell(list[i].xi) + ")", est[i], factorial_moment(list[i], c.params));
    if (o.dual_reps > 0) {
        const auto d = simulate_dual(list.front(), c.params, o.dual_reps, c.seed);
        const auto oracle = absorption_oracle(list.front(), c.params);
        for (std::size_t k = 0; k < d.probs.size(); ++k)
            add("p(" + join_cell(list.front().xi) + ";" + std::to_string(k) + ")", d.probs[k], oracle.probs[k]);
    }
    emit(c, c.format == "json" ? dump_json(j) : t.str());
    return 0;
}

int cmd_verify(const Common& c, const std::optional<std::string>& only, int cutoff)
{
    VerifyOptions opt;
    opt.params = c.params;
    opt.only = only;
    opt.rational = c.rational;
    opt.cutoff = cutoff;
    opt.seed = c.seed;
    std::vector<VerifyRecord> records;
    try {
        records = run_verification(opt);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const json j = to_json(records);
    emit(c, dump_json(j));
    for (const auto& r : records)
        if (!r.pass)
            std::fprintf(stderr, "FAIL %s/%s residual=%s tolerance=%s\n", r.family.c_str(), r.check_name.c_str(),
                         format_double(r.residual).c_str(), format_double(r.tolerance).c_str());
    return j["pass"].get<bool>() ? 0 : 1;
}

int cmd_scaling(const Common& c, const std::string& Ns_text, double u, const std::string& offsets_text)
{
    const auto Ns = parse_int_list(Ns_text, "--Ns");
    const auto offsets = parse_int_list(offsets_text, "--offsets");
    if (Ns.empty()) throw UsageError("--Ns must list at least one N");
    if (offsets.empty()) throw UsageError("--offsets must list at least one offset");
    if (!(u >= 0.0 && u < 1.0)) throw UsageError("--u must lie in [0,1)");
    CsvTable t{kScalingSchema,
               {"N", "n", "g", "g_limit", "g_error", "NJ", "N1J", "NJ_limit", "excess_per_site", "excess_limit",
                "excess_rel_error"},
               {}};
    json j = {{"schema", kScalingSchema}, {"u", u}, {"offsets", offsets}, {"rows", json::array()}};
    for (int N : Ns) {
        ModelParams p = c.params;
        p.N = N;
        p.validate();
        const auto xi = FactorialIndex::from_positions(N, translated_positions(offsets, u, N));
        const auto g = g_occupation_all<double>(xi, p.s);
        const double J = current(p);
        const double J_limit = -2.0 * p.s * (p.rho_R() - p.rho_L());
        const auto f = total_number_fluctuation(p);
        const double rel = std::fabs(f.excess_per_site - f.limit) / std::fabs(f.limit);
        for (int n = 0; n <= xi.total(); ++n) {
            const double lim = local_equilibrium_limit(xi.total(), u, n);
            t.add_row({std::to_string(N), std::to_string(n), format_double(g[n]), format_double(lim),
                       format_double(std::fabs(g[n] - lim)), format_double(N * J), format_double((N + 1) * J),
                       format_double(J_limit), format_double(f.excess_per_site), format_double(f.limit),
                       format_double(rel)});
            j["rows"].push_back({{"N", N},
                                 {"n", n},
                                 {"g", g[n]},
                                 {"g_limit", lim},
                                 {"g_error", std::fabs(g[n] - lim)},
                                 {"NJ", N * J},
                                 {"N1J", (N + 1) * J},
                                 {"NJ_limit", J_limit},
                                 {"excess_per_site", f.excess_per_site},
                                 {"excess_limit", f.limit},
                                 {"excess_rel_error", rel}});
        }
    }
    emit(c, c.format == "json" ? dump_json(j) : t.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Open symmetric harmonic process: exact moments, oracles, simulation and identity checks"};
    app.require_subcommand(1);

    Common cm, ca, cme, cs, cv, csc;
    cv.params.N = 2;

    CLI::App* moments = app.add_subcommand("moments", "Scaled factorial moments G, g(n), p(k) and cumulants");
    add_params(moments, cm);
    add_format(moments, cm, "json");
    add_xi(moments, cm);
    moments->add_flag("--rational", cm.rational, "Exact rational arithmetic (2s integral)");

    CLI::App* absorb = app.add_subcommand("absorb", "Absorption distribution: closed form and linear-system oracle");
    add_params(absorb, ca);
    add_format(absorb, ca, "csv");
    add_xi(absorb, ca);
    absorb->add_flag("--rational", ca.rational, "Also print exact rationals (2s integral)");

    int cutoff = 40, max_occ = 5;
    CLI::App* measure = app.add_subcommand("measure", "Stationary weights by moment inversion");
    add_params(measure, cme);
    add_format(measure, cme, "csv");
    measure->add_option("--cutoff", cutoff, "Largest xi_i in the inversion sum")->capture_default_str();
    measure->add_option("--max-occupation", max_occ, "Largest m_i reported")->capture_default_str();

    SimOptions so;
    CLI::App* simulate = app.add_subcommand("simulate", "Gillespie estimates of G with batch-means errors");
    add_params(simulate, cs);
    add_format(simulate, cs, "csv");
    add_xi(simulate, cs);
    simulate->add_option("--seed", cs.seed, "Master seed")->capture_default_str();
    simulate->add_option("--horizon", so.horizon, "End time of each replica")->capture_default_str();
    simulate->add_option("--burn-in", so.burn_in, "Discarded initial time (default 10N/(1-max beta))");
    simulate->add_option("--replicas", so.replicas, "Independent replicas")->capture_default_str();
    simulate->add_option("--thin", so.thin, "Sample on a time grid of this spacing (0: time-weighted)")
        ->capture_default_str();
    simulate->add_option("--dual-reps", so.dual_reps, "Also simulate the dual for the first xi")->capture_default_str();

    std::optional<std::string> only;
    int fock_cutoff = 8;
    CLI::App* verify = app.add_subcommand("verify", "Run the identity suite; exit 1 on any failure");
    add_params(verify, cv);
    verify->add_option("--only", only, "Run a single family")->check(CLI::IsMember(verify_families()));
    verify->add_option("--cutoff", fock_cutoff, "Per-site Fock cutoff M")->capture_default_str();
    verify->add_option("--seed", cv.seed, "Seed for random duality pairs")->capture_default_str();
    verify->add_flag("--rational", cv.rational, "Exact comparisons where 2s is integral");

    std::string Ns = "10,20,40,80", offsets = "0,1";
    double u = 0.5;
    CLI::App* scaling = app.add_subcommand("scaling", "Current, local equilibrium and fluctuations against N");
    add_params(scaling, csc);
    add_format(scaling, csc, "csv");
    scaling->add_option("--Ns", Ns, "Comma-separated chain lengths")->capture_default_str();
    scaling->add_option("--u", u, "Macroscopic position in [0,1)")->capture_default_str();
    scaling->add_option("--offsets", offsets, "Positions relative to floor(uN)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    }

    try {
        for (auto [sub, common] : {std::pair{moments, &cm}, std::pair{absorb, &ca}, std::pair{measure, &cme},
                                   std::pair{simulate, &cs}, std::pair{verify, &cv}, std::pair{scaling, &csc}})
            if (sub->parsed()) merge_config(sub, common->config);
        if (moments->parsed()) return cmd_moments(cm);
        if (absorb->parsed()) return cmd_absorb(ca);
        if (measure->parsed()) return cmd_measure(cme, cutoff, max_occ);
        if (simulate->parsed()) return cmd_simulate(cs, so);
        if (verify->parsed()) return cmd_verify(cv, only, fock_cutoff);
        if (scaling->parsed()) return cmd_scaling(csc, Ns, u, offsets);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::length_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}
