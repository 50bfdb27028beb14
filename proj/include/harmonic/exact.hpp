#pragma once

// Closed-form steady-state quantities: the n-resolved functions g_xi(n) in
// occupation and coordinate form, scaled factorial moments G(xi), dual
// absorption probabilities, low-order cumulants, the current and the
// local-equilibrium limit.

#include <string>
#include <vector>

#include "harmonic/model.hpp"

namespace harmonic {

/// Dual-particle multi-index (xi_1..xi_N), equivalently the ordered positions
/// 1 <= x_1 <= ... <= x_|xi| <= N.
struct FactorialIndex {
    std::vector<int> xi;

    FactorialIndex() = default;
    explicit FactorialIndex(std::vector<int> counts);
    /// Positions are 1-based sites; they need not be sorted on input.
    static FactorialIndex from_positions(int N, std::vector<int> positions);

    int size() const { return static_cast<int>(xi.size()); }
    int total() const;
    std::vector<int> positions() const;
    int operator[](int i) const { return xi[i]; }
    bool operator==(const FactorialIndex&) const = default;
};

namespace detail {

template <class T>
T binomial(int n, int k)
{
    if (k < 0 || k > n) return T(0);
    T c = T(1);
    for (int j = 1; j <= k; ++j) c = c * T(n - k + j) / T(j);
    return c;
}

template <class T>
T ipow(const T& base, int e)
{
    T r = T(1);
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

// Visits every eta <= xi (componentwise), site N first, accumulating the
// site weight of g_xi into bucket |eta|.
template <class T, class SiteWeight>
void accumulate_eta(const std::vector<int>& xi, int site, int suffix, const T& weight,
                    const SiteWeight& site_weight, std::vector<T>& buckets)
{
    if (site < 0) {
        buckets[suffix] += weight;
        return;
    }
    for (int e = 0; e <= xi[site]; ++e)
        accumulate_eta(xi, site - 1, suffix + e, T(weight * site_weight(site, e, suffix + e)),
                       site_weight, buckets);
}

}  // namespace detail

/// All g_xi(n), n = 0..|xi|, by enumeration of eta with eta_i <= xi_i.
template <class T>
std::vector<T> g_occupation_all(const FactorialIndex& index, const T& s)
{
    const int N = index.size();
    std::vector<T> buckets(index.total() + 1, T(0));
    auto site_weight = [&](int site, int e, int suffix) {
        const int i = site + 1;
        T w = detail::binomial<T>(index.xi[site], e);
        for (int j = 1; j <= e; ++j)
            w *= (2 * s * (N + 1 - i) + (suffix - j)) / (2 * s * (N + 1) + (suffix - j));
        return w;
    };
    detail::accumulate_eta(index.xi, N - 1, 0, T(1), site_weight, buckets);
    return buckets;
}

template <class T>
T g_occupation(const FactorialIndex& index, int n, const T& s)
{
    if (n < 0 || n > index.total()) throw std::domain_error("g_occupation: n out of range");
    return g_occupation_all<T>(index, s)[n];
}

/// Reduced occupation form valid when 2s is a positive integer.
template <class T>
std::vector<T> g_half_integer_all(const FactorialIndex& index, int twice_s)
{
    const int N = index.size();
    std::vector<T> buckets(index.total() + 1, T(0));
    auto site_weight = [&](int site, int e, int suffix) {
        const int i = site + 1;
        T w = detail::binomial<T>(index.xi[site], e);
        const int top = twice_s * (N + 2 - i);
        for (int j = 1; j <= twice_s; ++j) w *= T(top - j) / T(top - j + suffix);
        (void)e;
        return w;
    };
    detail::accumulate_eta(index.xi, N - 1, 0, T(1), site_weight, buckets);
    return buckets;
}

/// Coordinate form: sum over n-subsets of the ordered positions.
template <class T>
T g_coordinate(const std::vector<int>& positions, int n, int N, const T& s)
{
    const int total = static_cast<int>(positions.size());
    if (n < 0 || n > total) throw std::domain_error("g_coordinate: n out of range");
    for (std::size_t a = 0; a < positions.size(); ++a) {
        if (positions[a] < 1 || positions[a] > N) throw std::domain_error("g_coordinate: position out of range");
        if (a > 0 && positions[a] < positions[a - 1]) throw std::domain_error("g_coordinate: positions must be sorted");
    }
    T sum = T(0);
    std::vector<int> chosen(n);
    // Lexicographic walk over 0 <= i_1 < ... < i_n < total.
    for (int a = 0; a < n; ++a) chosen[a] = a;
    while (true) {
        T term = T(1);
        for (int alpha = 1; alpha <= n; ++alpha) {
            const int x = positions[chosen[alpha - 1]];
            term *= (T(n - alpha) + 2 * s * (N + 1 - x)) / (T(n - alpha) + 2 * s * (N + 1));
        }
        sum += term;
        int a = n - 1;
        while (a >= 0 && chosen[a] == total - n + a) --a;
        if (a < 0) break;
        ++chosen[a];
        for (int b = a + 1; b < n; ++b) chosen[b] = chosen[b - 1] + 1;
    }
    return sum;
}

/// G(xi) = sum_n rho_R^{|xi|-n} (rho_L - rho_R)^n g_xi(n).
template <class T>
T moment_from_g(const std::vector<T>& g, const T& rho_L, const T& rho_R)
{
    const int total = static_cast<int>(g.size()) - 1;
    const T delta = rho_L - rho_R;
    T sum = T(0);
    for (int n = 0; n <= total; ++n)
        sum += detail::ipow(rho_R, total - n) * detail::ipow(delta, n) * g[n];
    return sum;
}

/// p(k) = sum_{n>=k} (-1)^{n-k} C(n,k) g(n), in the arithmetic of T.
template <class T>
std::vector<T> absorption_from_g(const std::vector<T>& g)
{
    const int total = static_cast<int>(g.size()) - 1;
    std::vector<T> p(total + 1, T(0));
    for (int k = 0; k <= total; ++k)
        for (int n = k; n <= total; ++n) {
            T term = detail::binomial<T>(n, k) * g[n];
            if ((n - k) % 2) p[k] -= term;
            else p[k] += term;
        }
    return p;
}

/// Exact spin and densities for rational mode. The betas are converted
/// exactly from their binary double values.
Rational spin_rational(const ModelParams& p);
Rational rho_rational(double beta);
/// Nearest double (mpq_class::get_d truncates).
double to_double(const Rational& q);

double factorial_moment(const FactorialIndex& xi, const ModelParams& p);
Rational factorial_moment_exact(const FactorialIndex& xi, const ModelParams& p);

/// Probability vector over the number of dual particles absorbed at site 0.
struct AbsorptionDistribution {
    std::vector<double> probs;
    /// Set when an entry left [-1e-10, 1+1e-10] (conditioning warning).
    bool ill_conditioned = false;
    bool exact = false;
};

/// Uses rational arithmetic when 2s is integral, compensated summation otherwise.
AbsorptionDistribution absorption_probs(const FactorialIndex& xi, const ModelParams& p);
std::vector<Rational> absorption_probs_exact(const FactorialIndex& xi, const ModelParams& p);

// ---------------------------------------------------------------------------
// Cumulants (closed forms) and their reconstruction from G.

double mean_profile(int x, const ModelParams& p);
double covariance(int x1, int x2, const ModelParams& p);
double variance(int x, const ModelParams& p);
double third_cumulant(int x1, int x2, int x3, const ModelParams& p);

double mean_from_moments(int x, const ModelParams& p);
double covariance_from_moments(int x1, int x2, const ModelParams& p);
double variance_from_moments(int x, const ModelParams& p);
double third_cumulant_from_moments(int x1, int x2, int x3, const ModelParams& p);

/// Stationary current across any bond, -2s(rho_R - rho_L)/(N+1).
double current(const ModelParams& p);
/// 2s [G(delta_i) - G(delta_{i+1})] for bond (i, i+1), 1 <= i < N.
double bond_current_from_moments(int i, const ModelParams& p);

/// Fluctuations of |M| against the inhomogeneous product measure.
struct TotalNumberFluctuation {
    double var_total;   // Var(|M|) in the steady state
    double var_local;   // Var(|M|) under the local-equilibrium product measure
    double excess_per_site;  // (var_total - var_local) / N
    double limit;       // s (rho_R - rho_L)^2 / 6
};
TotalNumberFluctuation total_number_fluctuation(const ModelParams& p);

/// C(|xi|, n) (1-u)^n.
double local_equilibrium_limit(int total, double u, int n);
/// Positions [uN] + offsets (1-based offsets).
std::vector<int> translated_positions(const std::vector<int>& offsets, double u, int N);

}  // namespace harmonic
