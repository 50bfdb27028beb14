#pragma once

// Gillespie simulation of the primary process with batch-means estimators,
// and jump-chain simulation of the absorbing dual.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "harmonic/exact.hpp"
#include "harmonic/model.hpp"

namespace harmonic {

struct SimConfig {
    std::uint64_t seed = 1;
    double burn_in = 0.0;
    double horizon = 1000.0;   // end time of each replica; averages use [burn_in, horizon]
    int replicas = 1;
    double thinning = 0.0;     // > 0: sample on a time grid instead of time-weighting
    int batches = 32;          // batches per replica

    void validate() const;
};

/// 10 N / (1 - max beta).
double default_burn_in(const ModelParams& p);

/// mean +- z * std_error, where std_error comes from pooled batch means.
struct EstimateWithCI {
    double mean = 0.0;
    double std_error = 0.0;
    long long n_samples = 0;
    /// Var(f) / std_error^2, the number of independent draws with the same precision.
    double effective_samples = 0.0;
    bool low_ess_warning = false;

    double lower(double z) const { return mean - z * std_error; }
    double upper(double z) const { return mean + z * std_error; }
    bool covers(double value, double z) const { return value >= lower(z) && value <= upper(z); }
};

/// One Gillespie step: holding time at rate holding_rate(m,p), then a jump drawn
/// by site/direction (or boundary injection) and afterwards by pile size.
std::pair<Occupation, double> step_process(const Occupation& m, const ModelParams& p, Rng& rng);

/// Pi_i [m_i!/(m_i-xi_i)!] Gamma(2s)/Gamma(2s+xi_i).
double scaled_falling_factorial(const Occupation& m, const FactorialIndex& xi, double s);

using Observable = std::function<double(const Occupation&)>;

/// Batch means of each observable, pooled over replicas in replica order.
struct BatchRecord {
    int replicas = 0;
    int batches_per_replica = 0;
    std::vector<std::vector<double>> batch_means;     // [observable][batch]
    std::vector<double> time_mean;                    // pooled time average
    std::vector<double> time_variance;                // pooled time-weighted variance
    long long events = 0;
};

BatchRecord run_batches(const ModelParams& p, const SimConfig& cfg, const std::vector<Observable>& obs);

/// Estimate from pooled batch means.
EstimateWithCI estimate_from_batches(const BatchRecord& rec, std::size_t observable);

/// G(xi) estimates for each multi-index.
std::vector<EstimateWithCI> estimate_moments(const std::vector<FactorialIndex>& xi_list, const ModelParams& p,
                                             const SimConfig& cfg);

/// Cov(M_x1, M_x2) from per-batch covariances.
EstimateWithCI estimate_covariance(int x1, int x2, const ModelParams& p, const SimConfig& cfg);

/// Empirical absorption distribution with binomial standard errors.
struct DualEstimate {
    std::vector<EstimateWithCI> probs;   // index k = particles absorbed at site 0
    std::vector<long long> counts;
    long long replicas = 0;
};

inline constexpr long long kDualStepCeiling = 1000000000LL;

/// Runs the embedded jump chain from (0, xi, 0) until every particle sits on 0 or N+1.
/// Holding times do not affect which absorbing state is reached, so they are not drawn.
DualEstimate simulate_dual(const FactorialIndex& xi, const ModelParams& p, long long reps, std::uint64_t seed);

}  // namespace harmonic
