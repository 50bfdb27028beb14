#include <doctest.h>

#include <cmath>

#include "harmonic/simulate.hpp"

using namespace harmonic;

TEST_CASE("configuration validation")
{
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    c.horizon = -1.0;
    CHECK_THROWS(c.validate());
    c = SimConfig{};
    c.burn_in = 2000.0;
    CHECK_THROWS(c.validate());
    c = SimConfig{};
    c.replicas = 0;
    CHECK_THROWS(c.validate());
    CHECK(default_burn_in(ModelParams{3, 0.5, 0.5, 0.2}) == doctest::Approx(60.0));
}

TEST_CASE("scaled falling factorial")
{
    const Occupation m({3, 1});
    CHECK(scaled_falling_factorial(m, FactorialIndex({2, 0}), 0.5) == doctest::Approx(6.0 / 2.0));
    CHECK(scaled_falling_factorial(m, FactorialIndex({0, 2}), 0.5) == 0.0);
    CHECK(scaled_falling_factorial(m, FactorialIndex({1, 1}), 1.0) == doctest::Approx(3.0 / 2.0 * 1.0 / 2.0));
}

TEST_CASE("single steps are reproducible and stay non-negative")
{
    const ModelParams p{3, 1.3, 0.5, 0.2};
    Rng a(3), b(3);
    Occupation x = Occupation::zeros(3), y = x;
    for (int i = 0; i < 1000; ++i) {
        auto [nx, tx] = step_process(x, p, a);
        auto [ny, ty] = step_process(y, p, b);
        CHECK(nx == ny);
        CHECK(tx == ty);
        CHECK(tx > 0.0);
        for (int k = 0; k < 3; ++k) CHECK(nx[k] >= 0);
        x = nx;
        y = ny;
    }
}

TEST_CASE("holding times have the holding rate")
{
    const ModelParams p{2, 0.5, 0.4, 0.3};
    const Occupation m({2, 1});
    Rng rng(9);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += step_process(m, p, rng).second;
    const double mean = 1.0 / holding_rate(m, p);
    CHECK(std::fabs(sum / n - mean) < 5 * mean / std::sqrt(n));
}

TEST_CASE("time averages match exact moments")
{
    const ModelParams p{2, 0.5, 0.5, 0.2};
    SimConfig cfg;
    cfg.seed = 17;
    cfg.horizon = 20000.0;
    cfg.burn_in = default_burn_in(p);
    cfg.replicas = 2;
    const std::vector<FactorialIndex> xs{FactorialIndex({1, 0}), FactorialIndex({0, 1}), FactorialIndex({1, 1})};
    const auto est = estimate_moments(xs, p, cfg);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(est[i].covers(factorial_moment(xs[i], p), 4.5));
        CHECK(est[i].n_samples > 0);
        CHECK(est[i].effective_samples > 0.0);
    }
    const auto again = estimate_moments(xs, p, cfg);
    CHECK(again[0].mean == est[0].mean);
}

TEST_CASE("dual absorption frequencies")
{
    const ModelParams p{4, 1.3, 0.5, 0.2};
    const auto xi = FactorialIndex::from_positions(4, {1, 3});
    const auto d = simulate_dual(xi, p, 40000, 5);
    const auto exact = absorption_probs(xi, p).probs;
    long long total = 0;
    for (long long c : d.counts) total += c;
    CHECK(total == 40000);
    for (std::size_t k = 0; k < exact.size(); ++k) CHECK(d.probs[k].covers(exact[k], 4.5));
    CHECK(simulate_dual(xi, p, 1000, 5).counts == simulate_dual(xi, p, 1000, 5).counts);
}
