#pragma once

// Stationary weights: the equilibrium product measure, the inversion of the
// factorial moments, and the one- and two-site closed forms at s = 1/2.

#include <vector>

#include "harmonic/model.hpp"

namespace harmonic {

/// Product Negative Binomial weight at common reservoir parameter beta.
double equilibrium_weight(const Occupation& m, double beta, double s);

struct WeightEstimate {
    double value = 0.0;
    /// Magnitude of the contribution of the outermost shell max_i xi_i = cutoff.
    double truncation_error = 0.0;
    /// Set when truncation_error exceeds 1e-8 of |value|.
    bool warning = false;
};

/// mu on the box [0, max_occupation]^N from factorial moments with xi_i <= cutoff.
/// Values are stored in mixed-radix order, site 1 fastest.
class StationaryInversion {
public:
    StationaryInversion(const ModelParams& p, int cutoff);

    int cutoff() const { return cutoff_; }
    const ModelParams& params() const { return p_; }

    /// Weights and last-shell errors for all m with entries <= max_occupation.
    struct Grid {
        int N = 0;
        int extent = 0;  // max_occupation + 1
        std::vector<double> value;
        std::vector<double> truncation_error;

        std::size_t index(const Occupation& m) const;
        double at(const Occupation& m) const { return value[index(m)]; }
        bool contains(const Occupation& m) const;
    };
    Grid weights(int max_occupation) const;

    WeightEstimate weight(const Occupation& m) const;

private:
    std::vector<long double> transform(int cutoff, int max_occupation) const;

    ModelParams p_;
    int cutoff_;
    std::vector<long double> moments_;  // G(xi) on [0,cutoff]^N, site 1 fastest
};

/// Convenience wrapper: a single weight with its last-shell estimate.
/// Requires cutoff >= max_i m_i.
WeightEstimate stationary_weight(const Occupation& m, const ModelParams& p, int cutoff);

/// N = 1, s = 1/2 closed form built from log_series_tail. Requires beta_L != beta_R.
double one_site_half_spin_weight(int m1, double beta_L, double beta_R);

/// N = 2, s = 1/2 closed form. Requires beta_L != beta_R.
double two_site_half_spin_weight(int m1, int m2, double beta_L, double beta_R);

/// sum_{m'} mu(m') L(m', m) for m with every entry <= max_check, using grid values of mu.
/// Incoming transitions whose source lies outside the grid are dropped.
/// Returns max |balance(m)| over the checked states.
double stationarity_residual(const StationaryInversion::Grid& mu, const ModelParams& p, int max_check);

}  // namespace harmonic
