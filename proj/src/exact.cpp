#include "harmonic/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numeric>

namespace harmonic {

FactorialIndex::FactorialIndex(std::vector<int> counts) : xi(std::move(counts))
{
    if (xi.empty()) throw std::domain_error("factorial index needs at least one site");
    for (int v : xi)
        if (v < 0) throw std::domain_error("factorial index entries must be non-negative");
}

FactorialIndex FactorialIndex::from_positions(int N, std::vector<int> positions)
{
    if (N < 1) throw std::domain_error("N must be >= 1");
    std::vector<int> counts(N, 0);
    for (int x : positions) {
        if (x < 1 || x > N) throw std::domain_error("position out of range 1..N");
        ++counts[x - 1];
    }
    return FactorialIndex(std::move(counts));
}

int FactorialIndex::total() const { return std::accumulate(xi.begin(), xi.end(), 0); }

std::vector<int> FactorialIndex::positions() const
{
    std::vector<int> out;
    for (int i = 0; i < size(); ++i) out.insert(out.end(), xi[i], i + 1);
    return out;
}

// ---------------------------------------------------------------------------

Rational spin_rational(const ModelParams& p)
{
    if (p.has_rational_spin()) return Rational(p.twice_spin(), 2);
    return Rational(p.s);
}

double to_double(const Rational& q)
{
    const double d = q.get_d();
    if (!std::isfinite(d) || q == Rational(d)) return d;
    const double other = Rational(d) < q ? std::nextafter(d, HUGE_VAL) : std::nextafter(d, -HUGE_VAL);
    const Rational ed = abs(q - Rational(d)), eo = abs(q - Rational(other));
    if (eo < ed) return other;
    if (ed < eo) return d;
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    return bits % 2 == 0 ? d : other;
}

Rational rho_rational(double beta)
{
    Rational b(beta);
    Rational r = b / (Rational(1) - b);
    r.canonicalize();
    return r;
}

namespace {

void check_index(const FactorialIndex& xi, const ModelParams& p)
{
    p.validate();
    if (xi.size() != p.N) throw std::domain_error("factorial index length must equal N");
}

}  // namespace

double factorial_moment(const FactorialIndex& xi, const ModelParams& p)
{
    check_index(xi, p);
    return moment_from_g(g_occupation_all<double>(xi, p.s), p.rho_L(), p.rho_R());
}

Rational factorial_moment_exact(const FactorialIndex& xi, const ModelParams& p)
{
    check_index(xi, p);
    Rational g = moment_from_g(g_occupation_all<Rational>(xi, spin_rational(p)),
                               rho_rational(p.beta_L), rho_rational(p.beta_R));
    g.canonicalize();
    return g;
}

std::vector<Rational> absorption_probs_exact(const FactorialIndex& xi, const ModelParams& p)
{
    check_index(xi, p);
    auto probs = absorption_from_g(g_occupation_all<Rational>(xi, spin_rational(p)));
    for (auto& v : probs) v.canonicalize();
    return probs;
}

AbsorptionDistribution absorption_probs(const FactorialIndex& xi, const ModelParams& p)
{
    check_index(xi, p);
    AbsorptionDistribution out;
    if (p.has_rational_spin()) {
        for (const auto& v : absorption_probs_exact(xi, p)) out.probs.push_back(to_double(v));
        out.exact = true;
    } else {
        // Neumaier-compensated alternating sums in extended precision.
        const auto g = g_occupation_all<long double>(xi, static_cast<long double>(p.s));
        const int total = xi.total();
        out.probs.assign(total + 1, 0.0);
        for (int k = 0; k <= total; ++k) {
            long double sum = 0.0L, comp = 0.0L;
            for (int n = k; n <= total; ++n) {
                long double term = detail::binomial<long double>(n, k) * g[n];
                if ((n - k) % 2) term = -term;
                const long double t = sum + term;
                if (std::fabs(sum) >= std::fabs(term)) comp += (sum - t) + term;
                else comp += (term - t) + sum;
                sum = t;
            }
            out.probs[k] = static_cast<double>(sum + comp);
        }
    }
    for (double v : out.probs)
        if (v < -1e-10 || v > 1.0 + 1e-10) out.ill_conditioned = true;
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_site(int x, const ModelParams& p)
{
    if (x < 1 || x > p.N) throw std::domain_error("site out of range 1..N");
}

double G_at(const ModelParams& p, std::initializer_list<int> sites)
{
    return factorial_moment(FactorialIndex::from_positions(p.N, std::vector<int>(sites)), p);
}

}  // namespace

double mean_profile(int x, const ModelParams& p)
{
    p.validate();
    check_site(x, p);
    return 2.0 * p.s * (p.rho_L() + (p.rho_R() - p.rho_L()) * x / (p.N + 1.0));
}

double covariance(int x1, int x2, const ModelParams& p)
{
    p.validate();
    check_site(x1, p);
    check_site(x2, p);
    if (!(x1 < x2)) throw std::domain_error("covariance requires x1 < x2");
    const double L = p.N + 1.0, d = p.rho_R() - p.rho_L(), two_s = 2.0 * p.s;
    return two_s * two_s * x1 * (L - x2) / (L * L * (1.0 + two_s * L)) * d * d;
}

double variance(int x, const ModelParams& p)
{
    p.validate();
    check_site(x, p);
    const double s = p.s, N = p.N, L = N + 1.0;
    const double rl = p.rho_L(), rr = p.rho_R(), d = rl - rr;
    const double pref = 2.0 * s / (2.0 * s * L * L * L + L * L);
    return pref * (L * L * (1.0 + 2.0 * s * L) * rl * (1.0 + rl)
                   - L * d * (1.0 + rl + rr + 2.0 * s * (1.0 + N + rl + 2.0 * N * rl + rr)) * x
                   + 2.0 * s * N * d * d * x * x);
}

double third_cumulant(int x1, int x2, int x3, const ModelParams& p)
{
    p.validate();
    check_site(x1, p);
    check_site(x2, p);
    check_site(x3, p);
    if (!(x1 < x2 && x2 < x3)) throw std::domain_error("third cumulant requires x1 < x2 < x3");
    const double s = p.s, N = p.N, L = N + 1.0, two_s = 2.0 * s;
    const double d = p.rho_R() - p.rho_L();
    return two_s * two_s * two_s * x1 * (L - 2.0 * x2) * (L - x3)
           / (L * L * L * (1.0 + s + s * N) * (1.0 + two_s * L)) * d * d * d;
}

double mean_from_moments(int x, const ModelParams& p)
{
    check_site(x, p);
    return 2.0 * p.s * G_at(p, {x});
}

double covariance_from_moments(int x1, int x2, const ModelParams& p)
{
    check_site(x1, p);
    check_site(x2, p);
    if (!(x1 < x2)) throw std::domain_error("covariance requires x1 < x2");
    const double two_s = 2.0 * p.s;
    return two_s * two_s * (G_at(p, {x1, x2}) - G_at(p, {x1}) * G_at(p, {x2}));
}

double variance_from_moments(int x, const ModelParams& p)
{
    check_site(x, p);
    const double two_s = 2.0 * p.s;
    const double g1 = G_at(p, {x}), g2 = G_at(p, {x, x});
    return two_s * two_s * (g2 - g1 * g1) + two_s * (g2 + g1);
}

double third_cumulant_from_moments(int x1, int x2, int x3, const ModelParams& p)
{
    check_site(x1, p);
    check_site(x2, p);
    check_site(x3, p);
    if (!(x1 < x2 && x2 < x3)) throw std::domain_error("third cumulant requires x1 < x2 < x3");
    const double t = 2.0 * p.s;
    const double e1 = t * G_at(p, {x1}), e2 = t * G_at(p, {x2}), e3 = t * G_at(p, {x3});
    const double e12 = t * t * G_at(p, {x1, x2}), e13 = t * t * G_at(p, {x1, x3}),
                 e23 = t * t * G_at(p, {x2, x3});
    const double e123 = t * t * t * G_at(p, {x1, x2, x3});
    return e123 + 2.0 * e1 * e2 * e3 - e12 * e3 - e13 * e2 - e23 * e1;
}

double current(const ModelParams& p)
{
    p.validate();
    return -2.0 * p.s * (p.rho_R() - p.rho_L()) / (p.N + 1.0);
}

double bond_current_from_moments(int i, const ModelParams& p)
{
    if (i < 1 || i >= p.N) throw std::domain_error("bond index must satisfy 1 <= i < N");
    return 2.0 * p.s * (G_at(p, {i}) - G_at(p, {i + 1}));
}

TotalNumberFluctuation total_number_fluctuation(const ModelParams& p)
{
    p.validate();
    const int N = p.N;
    double var_total = 0.0, var_local = 0.0;
    for (int x = 1; x <= N; ++x) {
        var_total += variance(x, p);
        const double rho_x = mean_profile(x, p) / (2.0 * p.s);
        var_local += 2.0 * p.s * rho_x * (1.0 + rho_x);
    }
    for (int x1 = 1; x1 <= N; ++x1)
        for (int x2 = x1 + 1; x2 <= N; ++x2) var_total += 2.0 * covariance(x1, x2, p);
    const double d = p.rho_R() - p.rho_L();
    return {var_total, var_local, (var_total - var_local) / N, p.s * d * d / 6.0};
}

double local_equilibrium_limit(int total, double u, int n)
{
    if (u < 0.0 || u >= 1.0) throw std::domain_error("u must lie in [0,1)");
    if (n < 0 || n > total) throw std::domain_error("n out of range 0..|xi|");
    return detail::binomial<double>(total, n) * std::pow(1.0 - u, n);
}

std::vector<int> translated_positions(const std::vector<int>& offsets, double u, int N)
{
    const int base = static_cast<int>(std::floor(u * N));
    std::vector<int> out;
    for (int o : offsets) {
        const int x = base + o;
        if (x < 1 || x > N) throw std::domain_error("translated position leaves 1..N");
        out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace harmonic
