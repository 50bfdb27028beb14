#include "harmonic/model.hpp"

#include <algorithm>
#include <numeric>

#include <boost/math/special_functions/digamma.hpp>

namespace harmonic {

void ModelParams::validate() const
{
    if (N < 1) throw std::domain_error("N must be >= 1");
    if (!(s > 0.0) || !std::isfinite(s)) throw std::domain_error("s must be > 0");
    if (!(beta_L > 0.0 && beta_L < 1.0)) throw std::domain_error("beta_L must lie in (0,1)");
    if (!(beta_R > 0.0 && beta_R < 1.0)) throw std::domain_error("beta_R must lie in (0,1)");
}

bool ModelParams::has_rational_spin() const
{
    const double two_s = 2.0 * s;
    return two_s >= 1.0 && std::nearbyint(two_s) == two_s;
}

int ModelParams::twice_spin() const
{
    if (!has_rational_spin()) throw std::domain_error("2s is not a positive integer");
    return static_cast<int>(std::nearbyint(2.0 * s));
}

bool operator==(const ModelParams& a, const ModelParams& b)
{
    return a.N == b.N && a.s == b.s && a.beta_L == b.beta_L && a.beta_R == b.beta_R;
}

void to_json(nlohmann::json& j, const ModelParams& p)
{
    j = nlohmann::json{{"N", p.N}, {"s", p.s}, {"beta_L", p.beta_L}, {"beta_R", p.beta_R}};
}

void from_json(const nlohmann::json& j, ModelParams& p)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& key = it.key();
        if (key != "N" && key != "s" && key != "beta_L" && key != "beta_R")
            throw std::invalid_argument("unknown ModelParams key: " + key);
    }
    j.at("N").get_to(p.N);
    j.at("s").get_to(p.s);
    j.at("beta_L").get_to(p.beta_L);
    j.at("beta_R").get_to(p.beta_R);
    p.validate();
}

Occupation::Occupation(std::vector<int> counts) : m(std::move(counts))
{
    for (int v : m)
        if (v < 0) throw std::domain_error("occupation entries must be non-negative");
}

int Occupation::total() const { return std::accumulate(m.begin(), m.end(), 0); }

DualConfig::DualConfig(std::vector<int> counts) : xi(std::move(counts))
{
    if (xi.size() < 3) throw std::domain_error("dual configuration needs N+2 >= 3 sites");
    for (int v : xi)
        if (v < 0) throw std::domain_error("dual configuration entries must be non-negative");
}

DualConfig DualConfig::embed(std::span<const int> bulk)
{
    std::vector<int> v(bulk.size() + 2, 0);
    std::copy(bulk.begin(), bulk.end(), v.begin() + 1);
    return DualConfig(std::move(v));
}

int DualConfig::total() const { return std::accumulate(xi.begin(), xi.end(), 0); }

// ---------------------------------------------------------------------------

double phi(int k, int n, double s)
{
    if (!(s > 0.0)) throw std::domain_error("phi: s must be > 0");
    if (k < 1) throw std::domain_error("phi: k must be >= 1");
    if (k > n) return 0.0;
    // Short piles: the finite product is more accurate than lgamma differences.
    if (k <= 16) return phi_exact<double>(k, n, s);
    const double log_ratio = std::lgamma(n + 1.0) + std::lgamma(n - k + 2.0 * s)
                           - std::lgamma(n - k + 1.0) - std::lgamma(n + 2.0 * s);
    return std::exp(log_ratio) / k;
}

double shifted_harmonic(int n, double s)
{
    if (n < 0) throw std::domain_error("shifted_harmonic: n must be >= 0");
    if (!(s > 0.0)) throw std::domain_error("shifted_harmonic: s must be > 0");
    return shifted_harmonic_exact<double>(n, s);
}

double digamma_difference(int n, double s)
{
    return boost::math::digamma(2.0 * s + n) - boost::math::digamma(2.0 * s);
}

double holding_rate(const Occupation& m, const ModelParams& p)
{
    double rate = -std::log1p(-p.beta_L) - std::log1p(-p.beta_R);
    for (int v : m.m) rate += 2.0 * shifted_harmonic(v, p.s);
    return rate;
}

std::vector<Jump> enumerate_jumps(const Occupation& m, const ModelParams& p, int max_injection)
{
    const int N = p.N;
    std::vector<Jump> jumps;
    auto moved = [&](int from, int to, int k) {
        Occupation next = m;
        next[from] -= k;
        if (to >= 0 && to < N) next[to] += k;
        return next;
    };
    for (int i = 0; i < N; ++i) {
        for (int k = 1; k <= m[i]; ++k) {
            const double r = phi(k, m[i], p.s);
            // Left neighbour or left reservoir, right neighbour or right reservoir.
            jumps.push_back({moved(i, i - 1, k), r});
            jumps.push_back({moved(i, i + 1 < N ? i + 1 : -1, k), r});
        }
    }
    for (int side = 0; side < 2; ++side) {
        const int site = side == 0 ? 0 : N - 1;
        const double beta = side == 0 ? p.beta_L : p.beta_R;
        double bk = 1.0;
        for (int k = 1; k <= max_injection; ++k) {
            bk *= beta;
            Occupation next = m;
            next[site] += k;
            jumps.push_back({std::move(next), bk / k});
        }
    }
    return jumps;
}

double log_series_tail(double beta, int n)
{
    double value = -std::log1p(-beta);
    double bk = 1.0;
    for (int k = 1; k < n; ++k) {
        bk *= beta;
        value -= bk / k;
    }
    return value;
}

// ---------------------------------------------------------------------------

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

LogSeriesSampler::LogSeriesSampler(double beta) : beta_(beta), norm_(-std::log1p(-beta))
{
    if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("log-series beta must lie in (0,1)");
}

double LogSeriesSampler::pmf(int k) const
{
    if (k < 1) return 0.0;
    return std::pow(beta_, k) / (k * norm_);
}

int LogSeriesSampler::invert(double u) const
{
    int k = 1;
    double p = beta_ / norm_;
    double cdf = p;
    while (cdf < u) {
        p *= beta_ * k / (k + 1.0);
        ++k;
        if (p == 0.0) break;  // u sits in the last ulp of the cdf
        cdf += p;
    }
    return k;
}

int sample_log_series(double beta, Rng& rng) { return LogSeriesSampler(beta)(rng); }

}  // namespace harmonic
