#pragma once

// Shared vocabulary of the open symmetric harmonic process: parameters,
// configurations, the pile-move kernel phi_s, shifted harmonic numbers,
// holding times and boundary-injection sampling.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

namespace harmonic {

using Rational = mpq_class;
using Rng = std::mt19937_64;

/// Chain length, spin and reservoir parameters. Densities are derived.
struct ModelParams {
    int N = 1;
    double s = 0.5;
    double beta_L = 0.5;
    double beta_R = 0.5;

    double rho_L() const { return beta_L / (1.0 - beta_L); }
    double rho_R() const { return beta_R / (1.0 - beta_R); }
    double delta() const { return rho_L() - rho_R(); }

    /// Throws std::domain_error unless N >= 1, s > 0 and both betas lie in (0,1).
    void validate() const;

    /// True when 2s is a positive integer, i.e. every rate is rational.
    bool has_rational_spin() const;
    /// 2s as an integer; throws std::domain_error if 2s is not integral.
    int twice_spin() const;
};

bool operator==(const ModelParams& a, const ModelParams& b);

void to_json(nlohmann::json& j, const ModelParams& p);
void from_json(const nlohmann::json& j, ModelParams& p);

/// Per-site particle counts on sites 1..N (stored 0-based).
struct Occupation {
    std::vector<int> m;

    Occupation() = default;
    explicit Occupation(std::vector<int> counts);
    static Occupation zeros(int n) { return Occupation(std::vector<int>(n, 0)); }

    int size() const { return static_cast<int>(m.size()); }
    int total() const;
    int operator[](int i) const { return m[i]; }
    int& operator[](int i) { return m[i]; }
    bool operator==(const Occupation&) const = default;
    auto operator<=>(const Occupation&) const = default;
};

/// Dual configuration on sites 0..N+1; sites 0 and N+1 absorb.
struct DualConfig {
    std::vector<int> xi;

    DualConfig() = default;
    explicit DualConfig(std::vector<int> counts);
    /// (0, xi_1..xi_N, 0).
    static DualConfig embed(std::span<const int> bulk);

    int size() const { return static_cast<int>(xi.size()); }
    int chain_length() const { return size() - 2; }
    int total() const;
    int operator[](int i) const { return xi[i]; }
    int& operator[](int i) { return xi[i]; }
    bool operator==(const DualConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Rates

/// phi_s(k,n): rate at which a pile of k particles leaves a site holding n.
/// Zero unless 1 <= k <= n. Throws std::domain_error for s <= 0 or k < 1.
double phi(int k, int n, double s);

/// Same kernel as a finite product, exact in any field (used with Rational).
template <class T>
T phi_exact(int k, int n, const T& s)
{
    if (k < 1) throw std::domain_error("phi: k must be >= 1");
    if (k > n) return T(0);
    T value = T(1) / T(k);
    for (int j = 0; j < k; ++j) value *= T(n - j) / (T(n - j - 1) + 2 * s);
    return value;
}

/// h_s(n) = sum_{k=1}^n 1/(k + 2s - 1).
double shifted_harmonic(int n, double s);

template <class T>
T shifted_harmonic_exact(int n, const T& s)
{
    T sum = T(0);
    for (int k = 1; k <= n; ++k) sum += T(1) / (T(k - 1) + 2 * s);
    return sum;
}

/// psi(2s+n) - psi(2s) evaluated with the library digamma.
double digamma_difference(int n, double s);

/// Total outflow rate of the generator from m.
double holding_rate(const Occupation& m, const ModelParams& p);

/// One transition of the primary process out of a given state.
struct Jump {
    Occupation next;
    double rate;
};

/// Every jump out of m. Injections of size k are listed for k <= max_injection;
/// the neglected tail is sum_{k>max_injection} beta^k/k per boundary.
std::vector<Jump> enumerate_jumps(const Occupation& m, const ModelParams& p, int max_injection);

/// gamma_beta(n) = sum_{k>=n} beta^k/k via -log(1-beta) - sum_{k<n} beta^k/k.
double log_series_tail(double beta, int n);

// ---------------------------------------------------------------------------
// Random numbers

/// SplitMix64 finaliser; derives independent stream seeds from (seed, stream).
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

/// Logarithmic series distribution P(k) = beta^k / (k * -log(1-beta)), k >= 1,
/// sampled by sequential inversion of the cdf.
class LogSeriesSampler {
public:
    explicit LogSeriesSampler(double beta);

    double beta() const { return beta_; }
    double pmf(int k) const;

    template <class URBG>
    int operator()(URBG& rng) const
    {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        return invert(unif(rng));
    }

    /// Smallest k with cdf(k) >= u.
    int invert(double u) const;

private:
    double beta_;
    double norm_;  // -log(1-beta)
};

int sample_log_series(double beta, Rng& rng);

}  // namespace harmonic
