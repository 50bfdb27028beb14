#include "harmonic/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>

#include "harmonic/algebra.hpp"
#include "harmonic/dual_oracle.hpp"
#include "harmonic/exact.hpp"
#include "harmonic/measure.hpp"

namespace harmonic {

namespace {

using MatrixD = Eigen::MatrixXd;
using nlohmann::json;

class Recorder {
public:
    explicit Recorder(std::string family) : family_(std::move(family)) {}

    void add(const std::string& name, json parameters, double residual, double tolerance, bool exact = false)
    {
        records_.push_back({family_, name, std::move(parameters), residual, tolerance,
                            std::isfinite(residual) && residual <= tolerance, exact});
    }

    std::vector<VerifyRecord> take() { return std::move(records_); }

private:
    std::string family_;
    std::vector<VerifyRecord> records_;
};

json params_json(const ModelParams& p)
{
    json j = p;
    return j;
}

// All xi in {0..}^N with 0 <= |xi| <= max_total.
std::vector<FactorialIndex> all_indices(int N, int max_total)
{
    std::vector<FactorialIndex> out;
    std::vector<int> xi(N, 0);
    std::function<void(int, int)> rec = [&](int site, int left) {
        if (site == N) {
            out.emplace_back(xi);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            xi[site] = v;
            rec(site + 1, left - v);
        }
        xi[site] = 0;
    };
    rec(0, max_total);
    return out;
}

std::vector<std::size_t> below_cutoff_at(const FockBasis& basis, int site)
{
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < basis.dimension(); ++c)
        if (basis.occupation(c)[site - 1] < basis.cutoff()) out.push_back(c);
    return out;
}

double exact_residual(const Rational& a, const Rational& b)
{
    const Rational d = a - b;
    return std::fabs(d.get_d());
}

// ---------------------------------------------------------------------------

std::vector<VerifyRecord> family_spin(const VerifyOptions& opt)
{
    Recorder rec("spin");
    const ModelParams& p = opt.params;
    const FockBasis basis(p.N, opt.cutoff);
    for (int site = 1; site <= p.N; ++site) {
        const SpinOps S = build_spin_ops(basis, site, p.s);
        const auto rows = below_cutoff_at(basis, site);
        const MatrixD c1 = S.zero.matrix * S.plus.matrix - S.plus.matrix * S.zero.matrix - S.plus.matrix;
        const MatrixD c2 = S.plus.matrix * S.minus.matrix - S.minus.matrix * S.plus.matrix + 2.0 * S.zero.matrix;
        const json par = {{"N", p.N}, {"s", p.s}, {"M", opt.cutoff}, {"site", site}};
        rec.add("commutator_S0_Splus", par, max_abs_on(c1, rows), 1e-12);
        rec.add("commutator_Splus_Sminus", par, max_abs_on(c2, rows), 1e-10);
        rec.add("lowering_kills_vacuum", par, S.minus.matrix.col(0).cwiseAbs().maxCoeff(), 0.0);
        rec.add("grading", par, (S.plus.respects_grading() && S.minus.respects_grading()) ? 0.0 : 1.0, 0.0);
    }
    return rec.take();
}

std::vector<VerifyRecord> family_hamiltonian(const VerifyOptions& opt)
{
    Recorder rec("hamiltonian");
    const ModelParams& p = opt.params;
    const int M = opt.cutoff;
    const FockBasis basis(p.N, M);
    const json par = {{"params", params_json(p)}, {"M", M}};
    rec.add("generator_transpose", par, generator_transpose_residual(p, basis), 1e-12);
    rec.add("column_sum_tail", par, column_sum_residual(p, basis), 1e-12);
    for (int i = 1; i < p.N; ++i)
        rec.add("bulk_split", {{"params", params_json(p)}, {"M", M}, {"bond", i}},
                max_abs_on(build_bulk_density(p, basis, i).matrix - build_bulk_density_split(p, basis, i).matrix,
                           basis.interior(0)),
                1e-11);
    if (p.N >= 2) {
        const MatrixD Hb = build_bulk_density(p, basis, 1).matrix;
        const Eigen::VectorXd d = detailed_balance_weights(basis, p.s);
        rec.add("detailed_balance", par,
                max_abs_on(MatrixD(Hb.transpose() * d.asDiagonal()) - MatrixD(d.asDiagonal() * Hb), basis.interior(0)),
                1e-11);
        Eigen::VectorXd vac = Eigen::VectorXd::Zero(basis.dimension());
        vac(0) = 1.0;
        rec.add("bulk_kills_vacuum", par, (Hb * vac).cwiseAbs().maxCoeff(), 0.0);
    }

    const int Ms = 12;
    for (double s : {0.5, 1.0, p.s}) {
        const double beta = 0.4;
        const json sp = {{"s", s}, {"beta", beta}, {"M", Ms}, {"pad", 200}};
        rec.add("boundary_algebraic", sp,
                (single_site::boundary_algebraic(beta, s, Ms, 200) - single_site::boundary_direct(beta, s, Ms))
                    .cwiseAbs()
                    .maxCoeff(),
                1e-10);
        for (double alpha : {0.4, 0.7, -0.3}) {
            const json ap = {{"s", s}, {"alpha", alpha}, {"M", Ms}};
            rec.add("rotation_lowering", ap,
                    (single_site::rotation_lowering(alpha, s, Ms) - single_site::rotation_lowering_formula(alpha, s, Ms))
                        .cwiseAbs()
                        .maxCoeff(),
                    1e-10);
            rec.add("rotation_raising", ap,
                    (single_site::rotation_raising(alpha, s, Ms) - single_site::rotation_raising_formula(alpha, Ms, s))
                        .cwiseAbs()
                        .maxCoeff(),
                    1e-10);
        }
    }
    return rec.take();
}

std::vector<VerifyRecord> family_transformations(const VerifyOptions& opt)
{
    Recorder rec("transformations");
    const ModelParams& p = opt.params;
    const int M = opt.cutoff;
    const FockBasis basis(p.N, M);
    const auto idx = basis.interior(0);
    const json par = {{"params", params_json(p)}, {"M", M}};
    const TransformedHamiltonians T = build_transformed(p, basis);

    // H' = e^{S-tot} H e^{-S-tot}: the bulk commutes with S-tot, each boundary is lowered separately.
    const MatrixD bulk = build_bulk(p, basis).matrix;
    const MatrixD Sm = build_total_spin_ops(basis, p.s).minus.matrix;
    rec.add("bulk_commutes_with_total_lowering", par, max_abs_on(Sm * bulk - bulk * Sm, idx), 1e-11);
    for (double beta : {p.beta_L, p.beta_R}) {
        const double rho = beta / (1.0 - beta);
        rec.add("lowered_boundary", {{"s", p.s}, {"beta", beta}, {"M", M}, {"pad", 600}},
                (single_site::lowered_boundary(beta, p.s, M, 600) - single_site::rotation_raising_formula(rho, M, p.s))
                    .cwiseAbs()
                    .maxCoeff(),
                1e-9);
    }

    // H'' = e^{-rho_R S+tot} H' e^{rho_R S+tot}
    const MatrixD up = exp_total_raising(basis, p.s, p.rho_R());
    const MatrixD down = exp_total_raising(basis, p.s, -p.rho_R());
    rec.add("H_double_prime_from_H_prime", par, max_abs_on(down * T.H_prime.matrix * up - T.H_double_prime.matrix, idx),
            1e-9);

    Eigen::VectorXd vac = Eigen::VectorXd::Zero(basis.dimension());
    vac(0) = 1.0;
    rec.add("H_circle_vacuum", par, (T.H_circle.matrix * vac).cwiseAbs().maxCoeff(), 1e-14);

    // H'' minus the bulk and the left boundary leaves the right boundary, which must be diagonal.
    MatrixD offdiag = T.H_double_prime.matrix - bulk -
                      embed_site(basis, 1, single_site::rotation_raising_formula(p.delta(), M, p.s));
    offdiag.diagonal().setZero();
    rec.add("right_boundary_diagonal", par, max_abs_on(offdiag, idx), 1e-14);

    ModelParams eq = p;
    eq.beta_L = p.beta_R;
    const TransformedHamiltonians Teq = build_transformed(eq, basis);
    rec.add("equilibrium_H_double_prime_is_H_circle", {{"params", params_json(eq)}, {"M", M}},
            max_abs_on(Teq.H_double_prime.matrix - Teq.H_circle.matrix, idx), 1e-14);
    return rec.take();
}

std::vector<VerifyRecord> family_charges(const VerifyOptions& opt)
{
    Recorder rec("charges");
    const int M = opt.cutoff;
    const int halo = 4;
    const double rho_R = opt.params.rho_R();
    for (double s : {0.5, 1.3, opt.params.s})
        for (double delta : {opt.params.delta(), 0.3, -0.2}) {
            ModelParams p = opt.params;
            p.s = s;
            const double rho_L = rho_R + delta;
            if (rho_L <= 0.0) continue;
            p.beta_L = rho_L / (1.0 + rho_L);
            const FockBasis basis(p.N, M);
            const TransformedHamiltonians T = build_transformed(p, basis);
            const Charges Q = build_Q(p, basis);
            const MatrixD C = T.H_double_prime.matrix * Q.Q_double_prime.matrix -
                              Q.Q_double_prime.matrix * T.H_double_prime.matrix;
            const json par = {{"params", params_json(p)}, {"delta", p.delta()}, {"M", M}, {"halo", halo}};
            rec.add("commutator_H_double_prime_Q_double_prime", par, max_abs_on(C, basis.interior(halo)), 1e-9);
            rec.add("Q_plus_grading", par, Q.Q_plus.respects_grading() ? 0.0 : 1.0, 0.0);
        }
    const int Ms = 12;
    for (double s : {0.5, 1.3})
        for (int k = 1; k <= 6; ++k)
            rec.add("B_k_from_delta_expansion", {{"s", s}, {"k", k}, {"M", Ms}},
                    (single_site::boundary_delta_coefficient(k, s, Ms) - single_site::boundary_Bk(k, s, Ms))
                        .cwiseAbs()
                        .maxCoeff(),
                    1e-10);
    return rec.take();
}

std::vector<VerifyRecord> family_ground_state(const VerifyOptions& opt)
{
    Recorder rec("ground_state");
    const ModelParams& base = opt.params;
    for (int N = 1; N <= std::min(3, std::max(base.N, 3)); ++N)
        for (double s : {0.5, 1.0}) {
            ModelParams p = base;
            p.N = N;
            p.s = s;
            const int M = 6;
            const FockBasis basis(N, M);
            const MatrixD W = build_W(p, basis).matrix;
            const TransformedHamiltonians T = build_transformed(p, basis);
            const auto idx = basis.interior(0);
            const json par = {{"params", params_json(p)}, {"M", M}};
            rec.add("W_intertwines", par, max_abs_on(T.H_double_prime.matrix * W - W * T.H_circle.matrix, idx), 1e-10);
            const Eigen::VectorXd w = W.col(0);
            const Eigen::VectorXd wp = exp_total_raising(basis, s, p.rho_R()) * w;
            double e1 = 0.0, e2 = 0.0;
            for (std::size_t c : idx) {
                const auto m = basis.occupation(c);
                e1 = std::max(e1, std::fabs(w(c) - mu_double_prime(m, p)));
                e2 = std::max(e2, std::fabs(wp(c) - mu_prime(m, p)));
            }
            rec.add("mu_double_prime", par, e1, 1e-12);
            rec.add("mu_prime", par, e2, 1e-12);

            ModelParams eq = p;
            eq.beta_L = p.beta_R;
            rec.add("W_identity_at_equilibrium", {{"params", params_json(eq)}, {"M", M}},
                    (build_W(eq, basis).matrix - MatrixD::Identity(basis.dimension(), basis.dimension()))
                        .cwiseAbs()
                        .maxCoeff(),
                    0.0);
        }
    return rec.take();
}

std::vector<VerifyRecord> family_mapping(const VerifyOptions& opt)
{
    Recorder rec("mapping");
    const ModelParams& p = opt.params;
    const FockBasis basis(p.N, opt.cutoff);
    const MappingResult r = mapping_check(p, p.rho_R(), basis);
    const json par = {{"params", params_json(p)}, {"rho_eq", p.rho_R()}, {"M", opt.cutoff}};
    rec.add("mapping_operator", par, r.operator_residual, 1e-8);
    rec.add("mapping_vector", par, r.vector_residual, 1e-10);
    ModelParams eq = p;
    eq.beta_L = p.beta_R;
    const MappingResult r2 = mapping_check(eq, eq.rho_R(), basis);
    rec.add("mapping_identity_at_equilibrium", {{"params", params_json(eq)}, {"M", opt.cutoff}}, r2.identity_residual,
            1e-12);
    return rec.take();
}

std::vector<VerifyRecord> family_duality(const VerifyOptions& opt)
{
    Recorder rec("duality");
    Rng rng(opt.seed);
    std::uniform_int_distribution<int> entry(0, 5);
    for (double s : {0.5, 1.3}) {
        ModelParams p = opt.params;
        p.N = 3;
        p.s = s;
        double worst = 0.0;
        for (int t = 0; t < 500; ++t) {
            std::vector<int> m(3), xi(5);
            for (int& v : m) v = entry(rng);
            for (int& v : xi) v = entry(rng);
            worst = std::max(worst, duality_check(Occupation(m), DualConfig(xi), p));
        }
        const json par = {{"params", params_json(p)}, {"pairs", 500}, {"max_entry", 5}, {"seed", opt.seed}};
        rec.add("generator_duality", par, worst, 1e-10);
        rec.add("duality_constant", par,
                duality_check(Occupation({2, 1, 3}), DualConfig(std::vector<int>(5, 0)), p), 1e-14);

        const Occupation m({1, 2, 0});
        const double base = duality_function(m, DualConfig({0, 1, 0, 0, 0}), p);
        const double scaled = duality_function(m, DualConfig({2, 1, 0, 0, 0}), p);
        rec.add("left_absorber_scaling", par, std::fabs(scaled - base * p.rho_L() * p.rho_L()), 1e-14);
    }
    return rec.take();
}

std::vector<VerifyRecord> family_intertwiner(const VerifyOptions& opt)
{
    Recorder rec("intertwiner");
    const Rational rho(2, 5);
    const Rational s = opt.params.has_rational_spin() ? spin_rational(opt.params) : Rational(opt.params.s);
    const IntertwinerResult r = intertwiner_check(rho, s, 10);
    const json par = {{"rho", "2/5"}, {"s", s.get_str()}, {"M", 10}};
    rec.add("intertwiner_coefficients", par, r.coefficient_residual.get_d(), 0.0, true);
    rec.add("intertwiner_values", par, r.value_residual.get_d(), 0.0, true);
    return rec.take();
}

std::vector<VerifyRecord> family_moments(const VerifyOptions& opt)
{
    Recorder rec("moments");
    const ModelParams& base = opt.params;
    for (int N = 1; N <= 3; ++N) {
        ModelParams p = base;
        p.N = N;
        const bool exact = opt.rational && p.has_rational_spin();
        double worst = 0.0;
        for (const auto& xi : all_indices(N, 2)) {
            const double r = exact ? exact_residual(factorial_moment_exact(xi, p), factorial_moment_oracle_exact(xi, p))
                                   : std::fabs(factorial_moment(xi, p) - factorial_moment_oracle(xi, p));
            worst = std::max(worst, r);
        }
        rec.add("factorial_moment_vs_oracle", {{"params", params_json(p)}, {"max_total", 2}}, worst,
                exact ? 0.0 : 1e-10, exact);

        double g_worst = 0.0;
        for (const auto& xi : all_indices(N, 3)) {
            const auto a = g_occupation_all<double>(xi, p.s);
            for (int n = 0; n <= xi.total(); ++n)
                g_worst = std::max(g_worst, std::fabs(a[n] - g_coordinate<double>(xi.positions(), n, N, p.s)));
        }
        rec.add("g_occupation_vs_coordinate", {{"params", params_json(p)}, {"max_total", 3}}, g_worst, 1e-12);
    }
    return rec.take();
}

std::vector<VerifyRecord> family_absorption(const VerifyOptions& opt)
{
    Recorder rec("absorption");
    ModelParams p = opt.params;
    p.N = 3;
    const bool exact = p.has_rational_spin();
    const json par = {{"params", params_json(p)}};

    if (exact) {
        auto P = [&](std::vector<int> x) { return absorption_probs_exact(FactorialIndex::from_positions(3, x), p); };
        Rational worst2 = 0, worst3 = 0;
        for (int a = 1; a <= 3; ++a)
            for (int b = a; b <= 3; ++b) {
                const Rational d = P({a})[1] + P({b})[1] - 2 * P({a, b})[2] - P({a, b})[1];
                worst2 = std::max<Rational>(worst2, abs(d));
                for (int c = b; c <= 3; ++c) {
                    const auto t = P({a, b, c});
                    const Rational d2 = P({b, c})[2] + P({a, c})[2] + P({a, b})[2] - 3 * t[3] - t[2];
                    const Rational d1 = P({b, c})[1] + P({a, c})[1] + P({a, b})[1] - 2 * t[2] - 2 * t[1];
                    worst3 = std::max<Rational>(worst3, abs(d2));
                    worst3 = std::max<Rational>(worst3, abs(d1));
                }
            }
        rec.add("recursion_pairs", par, worst2.get_d(), 0.0, true);
        rec.add("recursion_triples", par, worst3.get_d(), 0.0, true);
    } else {
        auto P = [&](std::vector<int> x) { return absorption_probs(FactorialIndex::from_positions(3, x), p).probs; };
        double worst2 = 0.0, worst3 = 0.0;
        for (int a = 1; a <= 3; ++a)
            for (int b = a; b <= 3; ++b) {
                worst2 = std::max(worst2, std::fabs(P({a})[1] + P({b})[1] - 2 * P({a, b})[2] - P({a, b})[1]));
                for (int c = b; c <= 3; ++c) {
                    const auto t = P({a, b, c});
                    worst3 = std::max(worst3,
                                      std::fabs(P({b, c})[2] + P({a, c})[2] + P({a, b})[2] - 3 * t[3] - t[2]));
                    worst3 = std::max(worst3,
                                      std::fabs(P({b, c})[1] + P({a, c})[1] + P({a, b})[1] - 2 * t[2] - 2 * t[1]));
                }
            }
        rec.add("recursion_pairs", par, worst2, 1e-12);
        rec.add("recursion_triples", par, worst3, 1e-12);
    }

    double worst = 0.0;
    for (const auto& xi : all_indices(3, 3)) {
        if (exact && opt.rational) {
            const auto a = absorption_probs_exact(xi, p);
            const auto b = absorption_oracle_exact(xi, p);
            for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, exact_residual(a[k], b[k]));
        } else {
            const auto a = absorption_probs(xi, p).probs;
            const auto b = absorption_oracle(xi, p).probs;
            for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::fabs(a[k] - b[k]));
        }
    }
    const bool ex = exact && opt.rational;
    rec.add("absorption_vs_oracle", par, worst, ex ? 0.0 : 1e-10, ex);
    return rec.take();
}

std::vector<VerifyRecord> family_cumulants(const VerifyOptions& opt)
{
    Recorder rec("cumulants");
    ModelParams p = opt.params;
    p.N = std::max(p.N, 4);
    const int N = p.N;
    const json par = {{"params", params_json(p)}};
    double wm = 0.0, wc = 0.0, wv = 0.0, wk = 0.0, wj = 0.0;
    for (int x = 1; x <= N; ++x) {
        wm = std::max(wm, std::fabs(mean_profile(x, p) - mean_from_moments(x, p)));
        wv = std::max(wv, std::fabs(variance(x, p) - variance_from_moments(x, p)));
        for (int y = x + 1; y <= N; ++y) {
            wc = std::max(wc, std::fabs(covariance(x, y, p) - covariance_from_moments(x, y, p)));
            for (int z = y + 1; z <= N; ++z)
                wk = std::max(wk, std::fabs(third_cumulant(x, y, z, p) - third_cumulant_from_moments(x, y, z, p)));
        }
        if (x < N) wj = std::max(wj, std::fabs(current(p) - bond_current_from_moments(x, p)));
    }
    rec.add("mean_profile", par, wm, 1e-12);
    rec.add("covariance", par, wc, 1e-12);
    rec.add("variance", par, wv, 1e-12);
    rec.add("third_cumulant", par, wk, 1e-12);
    rec.add("bond_current", par, wj, 1e-12);
    return rec.take();
}

std::vector<VerifyRecord> family_measure(const VerifyOptions&)
{
    // The inversion series converges only for rho < 1, so this family uses its own small betas.
    Recorder rec("measure");
    const int cutoff = 40;
    {
        const ModelParams p{2, 0.5, 0.25, 0.1};
        const StationaryInversion inv(p, cutoff);
        const auto grid = inv.weights(14);
        double worst = 0.0;
        for (int a = 0; a <= 6; ++a)
            for (int b = 0; b <= 6; ++b) {
                const Occupation m({a, b});
                worst = std::max(worst, std::fabs(grid.at(m) - two_site_half_spin_weight(a, b, p.beta_L, p.beta_R)));
            }
        const json par = {{"params", params_json(p)}, {"cutoff", cutoff}};
        rec.add("two_site_closed_form", par, worst, 1e-8);
        rec.add("stationarity", {{"params", params_json(p)}, {"cutoff", cutoff}, {"max_check", 8}},
                stationarity_residual(grid, p, 8), 1e-7);
    }
    {
        const ModelParams p{1, 0.5, 0.3, 0.1};
        const auto grid = StationaryInversion(p, cutoff).weights(8);
        double worst = 0.0;
        for (int a = 0; a <= 8; ++a)
            worst = std::max(worst, std::fabs(grid.at(Occupation({a})) - one_site_half_spin_weight(a, p.beta_L, p.beta_R)));
        rec.add("one_site_closed_form", {{"params", params_json(p)}, {"cutoff", cutoff}}, worst, 1e-8);
    }
    for (double s : {0.5, 1.3}) {
        const ModelParams p{2, s, 0.25, 0.25};
        const auto grid = StationaryInversion(p, cutoff).weights(6);
        double worst = 0.0;
        for (int a = 0; a <= 6; ++a)
            for (int b = 0; b <= 6; ++b) {
                const Occupation m({a, b});
                worst = std::max(worst, std::fabs(grid.at(m) - equilibrium_weight(m, 0.25, s)));
            }
        rec.add("equilibrium_reduction", {{"params", params_json(p)}, {"cutoff", cutoff}}, worst, 1e-8);
    }
    return rec.take();
}

using Family = std::vector<VerifyRecord> (*)(const VerifyOptions&);

const std::vector<std::pair<std::string, Family>>& registry()
{
    static const std::vector<std::pair<std::string, Family>> r{
        {"moments", family_moments},
        {"absorption", family_absorption},
        {"cumulants", family_cumulants},
        {"measure", family_measure},
        {"duality", family_duality},
        {"spin", family_spin},
        {"hamiltonian", family_hamiltonian},
        {"intertwiner", family_intertwiner},
        {"transformations", family_transformations},
        {"charges", family_charges},
        {"ground_state", family_ground_state},
        {"mapping", family_mapping},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& verify_families()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, fn] : registry()) v.push_back(name);
        return v;
    }();
    return names;
}

std::vector<VerifyRecord> run_verification(const VerifyOptions& opt)
{
    opt.params.validate();
    if (opt.cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
    if (opt.only && std::find(verify_families().begin(), verify_families().end(), *opt.only) == verify_families().end())
        throw std::invalid_argument("unknown verification family: " + *opt.only);
    std::vector<VerifyRecord> out;
    for (const auto& [name, fn] : registry()) {
        if (opt.only && *opt.only != name) continue;
        auto part = fn(opt);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

json to_json(const std::vector<VerifyRecord>& records)
{
    json checks = json::array();
    bool all = true;
    for (const auto& r : records) {
        all = all && r.pass;
        checks.push_back({{"family", r.family},
                          {"check_name", r.check_name},
                          {"parameters", r.parameters},
                          {"residual", r.residual},
                          {"tolerance", r.tolerance},
                          {"pass", r.pass},
                          {"exact", r.exact}});
    }
    return {{"schema", "harmonic-verify v1"}, {"pass", all}, {"checks", checks}};
}

}  // namespace harmonic
