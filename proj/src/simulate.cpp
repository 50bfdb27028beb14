#include "harmonic/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace harmonic {

void SimConfig::validate() const
{
    if (!(burn_in >= 0.0)) throw std::domain_error("burn-in must be >= 0");
    if (!(horizon > burn_in)) throw std::domain_error("horizon must exceed burn-in");
    if (replicas < 1) throw std::domain_error("replicas must be >= 1");
    if (!(thinning >= 0.0)) throw std::domain_error("thinning must be >= 0");
    if (batches < 2) throw std::domain_error("at least two batches per replica are required");
}

double default_burn_in(const ModelParams& p)
{
    return 10.0 * p.N / (1.0 - std::max(p.beta_L, p.beta_R));
}

namespace {

class Stepper {
public:
    explicit Stepper(const ModelParams& p)
        : p_(p), inj_L_(-std::log1p(-p.beta_L)), inj_R_(-std::log1p(-p.beta_R)),
          left_(p.beta_L), right_(p.beta_R), h_{0.0}
    {
    }

    double h(int n)
    {
        while (static_cast<int>(h_.size()) <= n) {
            const int k = static_cast<int>(h_.size());
            h_.push_back(h_.back() + 1.0 / (k - 1.0 + 2.0 * p_.s));
        }
        return h_[n];
    }

    double total_rate(const std::vector<int>& m)
    {
        double r = inj_L_ + inj_R_;
        for (int v : m) r += 2.0 * h(v);
        return r;
    }

    // Pile size k in 1..n with probability phi_s(k,n)/h_s(n).
    int pile(int n, Rng& rng)
    {
        const double target = unif_(rng) * h(n);
        double acc = 0.0, prod = 1.0;
        for (int k = 1; k <= n; ++k) {
            prod *= (n - k + 1.0) / (n - k + 2.0 * p_.s);
            acc += prod / k;
            if (acc >= target) return k;
        }
        return n;
    }

    // Exponential holding time out of m; remembers the total rate for jump().
    double holding_time(const std::vector<int>& m, Rng& rng)
    {
        rate_ = total_rate(m);
        return -std::log1p(-unif_(rng)) / rate_;
    }

    // Applies one jump drawn with probability proportional to its rate.
    void jump(std::vector<int>& m, Rng& rng)
    {
        const int N = p_.N;
        double u = unif_(rng) * rate_;
        for (int i = 0; i < N; ++i) {
            const double w = h(m[i]);
            for (int dir : {-1, 1}) {
                if (w > 0.0 && u < w) {
                    const int k = pile(m[i], rng);
                    m[i] -= k;
                    const int to = i + dir;
                    if (to >= 0 && to < N) m[to] += k;
                    return;
                }
                u -= w;
            }
        }
        if (u < inj_L_) m[0] += left_(rng);
        else m[N - 1] += right_(rng);
    }

private:
    const ModelParams& p_;
    double inj_L_, inj_R_;
    LogSeriesSampler left_, right_;
    std::vector<double> h_;
    double rate_ = 0.0;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

struct ReplicaResult {
    std::vector<std::vector<double>> batch_means;  // [observable][batch]
    std::vector<double> integral;                  // window integral (or sample sum) of f
    std::vector<double> integral_sq;
    double weight = 0.0;                           // window length or sample count
    long long events = 0;
};

ReplicaResult run_replica(const ModelParams& p, const SimConfig& cfg, const std::vector<Observable>& obs,
                          int replica)
{
    Rng rng(split_seed(cfg.seed, static_cast<std::uint64_t>(replica)));
    Stepper stepper(p);
    const std::size_t n_obs = obs.size();
    const int B = cfg.batches;
    const double window = cfg.horizon - cfg.burn_in;
    const double batch_len = window / B;

    ReplicaResult out;
    out.batch_means.assign(n_obs, std::vector<double>(B, 0.0));
    out.integral.assign(n_obs, 0.0);
    out.integral_sq.assign(n_obs, 0.0);
    std::vector<double> batch_weight(B, 0.0);
    std::vector<double> f(n_obs);

    std::vector<int> m(p.N, 0);
    double t = 0.0;
    double next_sample = cfg.burn_in;
    auto evaluate = [&](const std::vector<int>& state) {
        const Occupation occ(state);
        for (std::size_t o = 0; o < n_obs; ++o) f[o] = obs[o](occ);
    };
    auto record = [&](int batch, double w) {
        for (std::size_t o = 0; o < n_obs; ++o) {
            out.batch_means[o][batch] += w * f[o];
            out.integral[o] += w * f[o];
            out.integral_sq[o] += w * f[o] * f[o];
        }
        batch_weight[batch] += w;
        out.weight += w;
    };

    while (t < cfg.horizon) {
        const double dt = stepper.holding_time(m, rng);
        const double t_end = std::min(t + dt, cfg.horizon);
        if (t_end > cfg.burn_in) {
            evaluate(m);
            ++out.events;
            if (cfg.thinning > 0.0) {
                while (next_sample < t_end) {
                    if (next_sample >= t) {
                        const int b = std::min(B - 1, static_cast<int>((next_sample - cfg.burn_in) / batch_len));
                        record(b, 1.0);
                    }
                    next_sample += cfg.thinning;
                }
            } else {
                double a = std::max(t, cfg.burn_in);
                while (a < t_end) {
                    const int b = std::min(B - 1, static_cast<int>((a - cfg.burn_in) / batch_len));
                    const double edge = b == B - 1 ? t_end : std::min(t_end, cfg.burn_in + (b + 1) * batch_len);
                    record(b, edge - a);
                    a = edge;
                }
            }
        }
        stepper.jump(m, rng);
        t += dt;
    }
    for (int b = 0; b < B; ++b)
        for (std::size_t o = 0; o < n_obs; ++o)
            out.batch_means[o][b] = batch_weight[b] > 0.0 ? out.batch_means[o][b] / batch_weight[b] : 0.0;
    return out;
}

template <class Result, class Work>
std::vector<Result> run_parallel(long long count, const Work& work)
{
    std::vector<Result> results(static_cast<std::size_t>(count));
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads = static_cast<unsigned>(std::min<long long>(hw, count));
    std::atomic<long long> next{0};
    std::mutex error_lock;
    std::exception_ptr error;
    auto worker = [&] {
        try {
            for (long long i = next++; i < count; i = next++) results[static_cast<std::size_t>(i)] = work(i);
        } catch (...) {
            std::lock_guard<std::mutex> guard(error_lock);
            if (!error) error = std::current_exception();
            next = count;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n_threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return results;
}

}  // namespace

std::pair<Occupation, double> step_process(const Occupation& m, const ModelParams& p, Rng& rng)
{
    if (m.size() != p.N) throw std::domain_error("occupation length must equal N");
    Stepper stepper(p);
    std::vector<int> next = m.m;
    const double dt = stepper.holding_time(next, rng);
    stepper.jump(next, rng);
    return {Occupation(std::move(next)), dt};
}

double scaled_falling_factorial(const Occupation& m, const FactorialIndex& xi, double s)
{
    double value = 1.0;
    for (int i = 0; i < xi.size(); ++i) {
        if (xi[i] > m[i]) return 0.0;
        for (int j = 0; j < xi[i]; ++j) value *= (m[i] - j) / (2.0 * s + j);
    }
    return value;
}

BatchRecord run_batches(const ModelParams& p, const SimConfig& cfg, const std::vector<Observable>& obs)
{
    p.validate();
    cfg.validate();
    auto results = run_parallel<ReplicaResult>(cfg.replicas, [&](long long r) {
        return run_replica(p, cfg, obs, static_cast<int>(r));
    });

    BatchRecord rec;
    rec.replicas = cfg.replicas;
    rec.batches_per_replica = cfg.batches;
    const std::size_t n_obs = obs.size();
    rec.batch_means.assign(n_obs, {});
    std::vector<double> sum(n_obs, 0.0), sum_sq(n_obs, 0.0);
    double weight = 0.0;
    for (const auto& r : results) {
        for (std::size_t o = 0; o < n_obs; ++o) {
            rec.batch_means[o].insert(rec.batch_means[o].end(), r.batch_means[o].begin(), r.batch_means[o].end());
            sum[o] += r.integral[o];
            sum_sq[o] += r.integral_sq[o];
        }
        weight += r.weight;
        rec.events += r.events;
    }
    for (std::size_t o = 0; o < n_obs; ++o) {
        const double mean = weight > 0.0 ? sum[o] / weight : 0.0;
        rec.time_mean.push_back(mean);
        rec.time_variance.push_back(weight > 0.0 ? std::max(0.0, sum_sq[o] / weight - mean * mean) : 0.0);
    }
    return rec;
}

namespace {

EstimateWithCI summarize(const std::vector<double>& values, double variance_of_f, long long n_samples)
{
    EstimateWithCI est;
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    est.mean = mean;
    est.std_error = n > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    est.n_samples = n_samples;
    est.effective_samples = est.std_error > 0.0 ? variance_of_f / (est.std_error * est.std_error) : n;
    est.low_ess_warning = est.effective_samples < 100.0;
    return est;
}

}  // namespace

EstimateWithCI estimate_from_batches(const BatchRecord& rec, std::size_t observable)
{
    return summarize(rec.batch_means.at(observable), rec.time_variance.at(observable), rec.events);
}

std::vector<EstimateWithCI> estimate_moments(const std::vector<FactorialIndex>& xi_list, const ModelParams& p,
                                             const SimConfig& cfg)
{
    std::vector<Observable> obs;
    for (const auto& xi : xi_list) {
        if (xi.size() != p.N) throw std::domain_error("factorial index length must equal N");
        obs.push_back([xi, s = p.s](const Occupation& m) { return scaled_falling_factorial(m, xi, s); });
    }
    const auto rec = run_batches(p, cfg, obs);
    std::vector<EstimateWithCI> out;
    for (std::size_t o = 0; o < obs.size(); ++o) out.push_back(estimate_from_batches(rec, o));
    return out;
}

EstimateWithCI estimate_covariance(int x1, int x2, const ModelParams& p, const SimConfig& cfg)
{
    if (x1 < 1 || x2 < 1 || x1 > p.N || x2 > p.N || x1 == x2)
        throw std::domain_error("covariance needs two distinct sites in 1..N");
    const int a = x1 - 1, b = x2 - 1;
    std::vector<Observable> obs{
        [a](const Occupation& m) { return static_cast<double>(m[a]); },
        [b](const Occupation& m) { return static_cast<double>(m[b]); },
        [a, b](const Occupation& m) { return static_cast<double>(m[a]) * m[b]; },
    };
    const auto rec = run_batches(p, cfg, obs);
    std::vector<double> per_batch(rec.batch_means[0].size());
    for (std::size_t k = 0; k < per_batch.size(); ++k)
        per_batch[k] = rec.batch_means[2][k] - rec.batch_means[0][k] * rec.batch_means[1][k];
    return summarize(per_batch, rec.time_variance[2], rec.events);
}

// ---------------------------------------------------------------------------

DualEstimate simulate_dual(const FactorialIndex& xi, const ModelParams& p, long long reps, std::uint64_t seed)
{
    p.validate();
    if (reps < 1) throw std::domain_error("reps must be >= 1");
    if (xi.size() != p.N) throw std::domain_error("factorial index length must equal N");
    const int N = p.N;
    const int P = xi.total();

    auto absorbed_left = [&](long long r) {
        Rng rng(split_seed(seed, static_cast<std::uint64_t>(r)));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        Stepper h(p);
        std::vector<int> c(N + 2, 0);
        for (int i = 0; i < N; ++i) c[i + 1] = xi[i];
        int in_bulk = P;
        long long steps = 0;
        while (in_bulk > 0) {
            if (++steps > kDualStepCeiling) throw std::runtime_error("dual chain exceeded the step ceiling");
            double total = 0.0;
            for (int i = 1; i <= N; ++i) total += 2.0 * h.h(c[i]);
            double u = unif(rng) * total;
            int site = N;
            for (int i = 1; i <= N; ++i) {
                const double w = 2.0 * h.h(c[i]);
                if (w > 0.0 && u < w) {
                    site = i;
                    break;
                }
                u -= w;
            }
            while (c[site] == 0) --site;  // rounding fallback
            const int dir = unif(rng) < 0.5 ? -1 : 1;
            const int k = h.pile(c[site], rng);
            c[site] -= k;
            c[site + dir] += k;
            if (site + dir == 0 || site + dir == N + 1) in_bulk -= k;
            assert(std::accumulate(c.begin(), c.end(), 0) == P);
        }
        return c[0];
    };
    const auto lefts = run_parallel<int>(reps, absorbed_left);

    DualEstimate out;
    out.replicas = reps;
    out.counts.assign(P + 1, 0);
    for (int k : lefts) ++out.counts[k];
    for (int k = 0; k <= P; ++k) {
        EstimateWithCI e;
        e.mean = static_cast<double>(out.counts[k]) / reps;
        e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / reps);
        e.n_samples = reps;
        e.effective_samples = static_cast<double>(reps);
        out.probs.push_back(e);
    }
    return out;
}

}  // namespace harmonic
