#include "harmonic/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "harmonic/exact.hpp"

namespace harmonic {

double equilibrium_weight(const Occupation& m, double beta, double s)
{
    if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("beta must lie in (0,1)");
    if (!(s > 0.0)) throw std::domain_error("s must be > 0");
    double log_w = 0.0;
    for (int v : m.m)
        log_w += v * std::log(beta) + std::lgamma(v + 2.0 * s) - std::lgamma(2.0 * s)
               - std::lgamma(v + 1.0) + 2.0 * s * std::log1p(-beta);
    return std::exp(log_w);
}

// ---------------------------------------------------------------------------

namespace {

std::size_t box_size(int N, int extent)
{
    std::size_t n = 1;
    for (int i = 0; i < N; ++i) n *= static_cast<std::size_t>(extent);
    return n;
}

void decode(std::size_t idx, const std::vector<int>& ext, std::vector<int>& digits)
{
    for (std::size_t a = 0; a < ext.size(); ++a) {
        digits[a] = static_cast<int>(idx % ext[a]);
        idx /= ext[a];
    }
}

std::size_t encode(const std::vector<int>& digits, const std::vector<int>& ext)
{
    std::size_t idx = 0;
    for (std::size_t a = ext.size(); a-- > 0;) idx = idx * ext[a] + digits[a];
    return idx;
}

// (-1)^{xi-m} C(xi,m) Gamma(2s+xi) / (xi! Gamma(2s)) for xi >= m.
long double inversion_kernel(int xi, int m, long double s)
{
    const long double log_mag = std::lgamma(2.0L * s + xi) - std::lgamma(2.0L * s)
                              - std::lgamma(m + 1.0L) - std::lgamma(xi - m + 1.0L);
    const long double mag = std::exp(log_mag);
    return (xi - m) % 2 ? -mag : mag;
}

}  // namespace

StationaryInversion::StationaryInversion(const ModelParams& p, int cutoff) : p_(p), cutoff_(cutoff)
{
    p_.validate();
    if (cutoff < 0) throw std::domain_error("cutoff must be >= 0");
    const std::size_t count = box_size(p_.N, cutoff + 1);
    if (count > 200000) throw std::length_error("inversion grid exceeds 2e5 multi-indices");
    moments_.resize(count);
    const std::vector<int> ext(p_.N, cutoff + 1);
    std::vector<int> xi(p_.N);
    const long double s = p_.s;
    const long double rl = p_.rho_L(), rr = p_.rho_R();
    for (std::size_t idx = 0; idx < count; ++idx) {
        decode(idx, ext, xi);
        moments_[idx] = moment_from_g(g_occupation_all<long double>(FactorialIndex(xi), s), rl, rr);
    }
}

std::vector<long double> StationaryInversion::transform(int c, int K) const
{
    const int N = p_.N;
    std::vector<int> ext(N, c + 1);
    std::vector<long double> cur(box_size(N, c + 1));
    const std::vector<int> full(N, cutoff_ + 1);
    std::vector<int> digits(N);
    for (std::size_t idx = 0; idx < cur.size(); ++idx) {
        decode(idx, ext, digits);
        cur[idx] = moments_[encode(digits, full)];
    }

    std::vector<std::vector<long double>> kern(c + 1, std::vector<long double>(K + 1, 0.0L));
    for (int x = 0; x <= c; ++x)
        for (int m = 0; m <= std::min(x, K); ++m) kern[x][m] = inversion_kernel(x, m, p_.s);

    for (int a = 0; a < N; ++a) {
        std::vector<int> next_ext = ext;
        next_ext[a] = K + 1;
        std::size_t next_size = 1;
        for (int e : next_ext) next_size *= e;
        std::vector<long double> next(next_size, 0.0L);
        for (std::size_t idx = 0; idx < next_size; ++idx) {
            decode(idx, next_ext, digits);
            const int m = digits[a];
            long double sum = 0.0L;
            for (int x = m; x <= c; ++x) {
                digits[a] = x;
                sum += kern[x][m] * cur[encode(digits, ext)];
            }
            next[idx] = sum;
        }
        cur.swap(next);
        ext.swap(next_ext);
    }
    return cur;
}

std::size_t StationaryInversion::Grid::index(const Occupation& m) const
{
    if (!contains(m)) throw std::out_of_range("occupation outside the inversion grid");
    return encode(m.m, std::vector<int>(N, extent));
}

bool StationaryInversion::Grid::contains(const Occupation& m) const
{
    if (m.size() != N) return false;
    for (int v : m.m)
        if (v < 0 || v >= extent) return false;
    return true;
}

StationaryInversion::Grid StationaryInversion::weights(int max_occupation) const
{
    if (max_occupation < 0 || max_occupation > cutoff_)
        throw std::domain_error("max occupation must lie in 0..cutoff");
    Grid g;
    g.N = p_.N;
    g.extent = max_occupation + 1;
    const auto full = transform(cutoff_, max_occupation);
    g.value.assign(full.begin(), full.end());
    g.truncation_error.resize(full.size());
    if (cutoff_ == 0) {
        for (std::size_t i = 0; i < full.size(); ++i) g.truncation_error[i] = std::fabs(g.value[i]);
    } else {
        const auto inner = transform(cutoff_ - 1, max_occupation);
        for (std::size_t i = 0; i < full.size(); ++i)
            g.truncation_error[i] = static_cast<double>(std::fabs(full[i] - inner[i]));
    }
    return g;
}

WeightEstimate StationaryInversion::weight(const Occupation& m) const
{
    if (m.size() != p_.N) throw std::domain_error("occupation length must equal N");
    const int top = *std::max_element(m.m.begin(), m.m.end());
    const Grid g = weights(top);
    const std::size_t i = g.index(m);
    WeightEstimate w{g.value[i], g.truncation_error[i], false};
    w.warning = w.truncation_error > 1e-8 * std::fabs(w.value);
    return w;
}

WeightEstimate stationary_weight(const Occupation& m, const ModelParams& p, int cutoff)
{
    if (m.size() != p.N) throw std::domain_error("occupation length must equal N");
    for (int v : m.m)
        if (v > cutoff) throw std::domain_error("cutoff must be >= max_i m_i");
    return StationaryInversion(p, cutoff).weight(m);
}

// ---------------------------------------------------------------------------

double one_site_half_spin_weight(int m1, double beta_L, double beta_R)
{
    if (m1 < 0) throw std::domain_error("occupation must be >= 0");
    if (beta_L == beta_R) throw std::domain_error("closed form needs beta_L != beta_R");
    const double pref = (beta_L - 1.0) * (beta_R - 1.0) / (beta_L - beta_R);
    return pref * (log_series_tail(beta_L, m1 + 1) - log_series_tail(beta_R, m1 + 1));
}

namespace {

double phi_beta(double beta, int m1, int m2)
{
    const double g = log_series_tail(beta, 1 + m1);
    double value = 0.5 * g * g;
    for (int k = m1 + 1; k <= m2; ++k) value -= log_series_tail(beta, m1 + k + 1) / k;
    for (int k = m2 + 1; k <= m1; ++k) value += log_series_tail(beta, m1 + k + 1) / k;
    return value;
}

}  // namespace

double two_site_half_spin_weight(int m1, int m2, double beta_L, double beta_R)
{
    if (m1 < 0 || m2 < 0) throw std::domain_error("occupation must be >= 0");
    if (beta_L == beta_R) throw std::domain_error("closed form needs beta_L != beta_R");
    const double a = (beta_L - 1.0) * (beta_R - 1.0) / (beta_L - beta_R);
    const double kappa = log_series_tail(beta_L, 1 + m1) * log_series_tail(beta_R, 1 + m2);
    return 2.0 * a * a * (phi_beta(beta_L, m1, m2) - kappa + phi_beta(beta_R, m2, m1));
}

// ---------------------------------------------------------------------------

double stationarity_residual(const StationaryInversion::Grid& mu, const ModelParams& p, int max_check)
{
    if (max_check >= mu.extent) throw std::domain_error("check region must lie inside the grid");
    const std::size_t count = mu.value.size();
    std::vector<double> inflow(count, 0.0);
    std::vector<int> ext(mu.N, mu.extent), digits(mu.N);
    for (std::size_t idx = 0; idx < count; ++idx) {
        decode(idx, ext, digits);
        const Occupation from(digits);
        for (const auto& jump : enumerate_jumps(from, p, mu.extent)) {
            if (!mu.contains(jump.next)) continue;
            inflow[mu.index(jump.next)] += mu.value[idx] * jump.rate;
        }
    }
    double worst = 0.0;
    for (std::size_t idx = 0; idx < count; ++idx) {
        decode(idx, ext, digits);
        if (*std::max_element(digits.begin(), digits.end()) > max_check) continue;
        const Occupation m(digits);
        const double balance = inflow[idx] - mu.value[idx] * holding_rate(m, p);
        worst = std::max(worst, std::fabs(balance));
    }
    return worst;
}

}  // namespace harmonic
