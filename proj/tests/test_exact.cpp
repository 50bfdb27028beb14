#include <doctest.h>

#include <cmath>
#include <functional>

#include "harmonic/dual_oracle.hpp"
#include "harmonic/exact.hpp"

using namespace harmonic;

namespace {

// Brute-force g_xi(n): every eta in the box prod [0, xi_i], filtered on |eta| = n.
double g_brute(const std::vector<int>& xi, int n, double s)
{
    const int N = static_cast<int>(xi.size());
    double total = 0.0;
    std::vector<int> eta(N, 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == N) {
            int sum = 0;
            for (int e : eta) sum += e;
            if (sum != n) return;
            double w = 1.0;
            for (int site = 1; site <= N; ++site) {
                const int e = eta[site - 1];
                int suffix = 0;
                for (int k = site; k <= N; ++k) suffix += eta[k - 1];
                w *= std::tgamma(xi[site - 1] + 1.0) / (std::tgamma(e + 1.0) * std::tgamma(xi[site - 1] - e + 1.0));
                for (int j = 1; j <= e; ++j)
                    w *= (2 * s * (N + 1 - site) - j + suffix) / (2 * s * (N + 1) - j + suffix);
            }
            total += w;
            return;
        }
        for (int e = 0; e <= xi[i]; ++e) {
            eta[i] = e;
            rec(i + 1);
        }
        eta[i] = 0;
    };
    rec(0);
    return total;
}

std::vector<FactorialIndex> indices(int N, int max_total)
{
    std::vector<FactorialIndex> out;
    std::vector<int> xi(N, 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == N) {
            out.emplace_back(xi);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            xi[i] = v;
            rec(i + 1, left - v);
        }
        xi[i] = 0;
    };
    rec(0, max_total);
    return out;
}

}  // namespace

TEST_CASE("factorial index and positions")
{
    const FactorialIndex xi({2, 0, 1});
    CHECK(xi.total() == 3);
    CHECK(xi.positions() == std::vector<int>{1, 1, 3});
    CHECK(FactorialIndex::from_positions(3, {3, 1, 1}) == xi);
    CHECK_THROWS(FactorialIndex::from_positions(3, {4}));
    CHECK_THROWS(FactorialIndex(std::vector<int>{}));
}

TEST_CASE("g in occupation form")
{
    CHECK(g_occupation<double>(FactorialIndex({3, 1}), 0, 0.5) == 1.0);
    CHECK(g_occupation<double>(FactorialIndex({1, 0}), 1, 0.5) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(g_occupation<double>(FactorialIndex({1, 1, 0}), 2, 1.0) ==
          doctest::Approx(g_brute({1, 1, 0}, 2, 1.0)).epsilon(1e-14));
    for (double s : {0.5, 1.0, 1.3})
        for (int N = 1; N <= 4; ++N)
            for (const auto& xi : indices(N, 4)) {
                const auto g = g_occupation_all<double>(xi, s);
                for (int n = 0; n <= xi.total(); ++n)
                    CHECK(g[n] == doctest::Approx(g_brute(xi.xi, n, s)).epsilon(1e-12));
            }
}

TEST_CASE("coordinate form and half-integer form agree with occupation form")
{
    for (double s : {0.5, 1.0, 1.3})
        for (int N = 1; N <= 4; ++N)
            for (const auto& xi : indices(N, 4)) {
                const auto g = g_occupation_all<double>(xi, s);
                for (int n = 0; n <= xi.total(); ++n)
                    CHECK(g_coordinate<double>(xi.positions(), n, N, s) == doctest::Approx(g[n]).epsilon(1e-12));
            }
    for (int twice_s : {1, 2, 3})
        for (int N = 1; N <= 4; ++N)
            for (const auto& xi : indices(N, 3)) {
                const auto a = g_half_integer_all<Rational>(xi, twice_s);
                const auto b = g_occupation_all<Rational>(xi, Rational(twice_s, 2));
                CHECK(a == b);
            }
    // single particle
    CHECK(g_coordinate<double>({2}, 1, 5, 1.3) == doctest::Approx(2 * 1.3 * 4 / (2 * 1.3 * 6)));
}

TEST_CASE("factorial moments")
{
    const ModelParams eq{3, 1.3, 0.4, 0.4};
    const double rho = eq.rho_L();
    for (const auto& xi : indices(3, 4))
        CHECK(factorial_moment(xi, eq) == doctest::Approx(std::pow(rho, xi.total())).epsilon(1e-13));

    for (double s : {0.5, 1.3}) {
        const ModelParams p{5, s, 0.6, 0.1};
        for (int x = 1; x <= 5; ++x)
            CHECK(factorial_moment(FactorialIndex::from_positions(5, {x}), p) ==
                  doctest::Approx(p.rho_L() + (p.rho_R() - p.rho_L()) * x / 6.0).epsilon(1e-14));
    }

    const ModelParams p{2, 0.5, 0.5, 0.2};
    CHECK(factorial_moment_exact(FactorialIndex({1, 1}), p) == factorial_moment_oracle_exact(FactorialIndex({1, 1}), p));
    CHECK(factorial_moment(FactorialIndex({0, 0}), p) == 1.0);

    // negative Delta still gives a non-negative mixture
    const ModelParams q{3, 1.0, 0.1, 0.7};
    for (const auto& xi : indices(3, 4)) CHECK(factorial_moment(xi, q) >= 0.0);
}

TEST_CASE("rational spin and densities are exact")
{
    CHECK(spin_rational(ModelParams{1, 1.5, 0.5, 0.5}) == Rational(3, 2));
    CHECK(rho_rational(0.5) == Rational(1));
    CHECK(rho_rational(0.25) == Rational(1, 3));
    CHECK(to_double(Rational(7, 9)) == 7.0 / 9);
    CHECK(to_double(Rational(2, 3)) == 2.0 / 3);
    CHECK(to_double(Rational(-1, 10)) == -0.1);
    CHECK(to_double(Rational(3, 4)) == 0.75);
}

TEST_CASE("absorption probabilities")
{
    for (double s : {0.5, 1.3})
        for (int x = 1; x <= 4; ++x) {
            const ModelParams p{4, s, 0.5, 0.5};
            const auto d = absorption_probs(FactorialIndex::from_positions(4, {x}), p);
            CHECK(d.probs[1] == doctest::Approx((5.0 - x) / 5.0).epsilon(1e-14));
            CHECK(d.probs[0] == doctest::Approx(x / 5.0).epsilon(1e-14));
        }
    const ModelParams p{3, 0.5, 0.5, 0.5};
    CHECK(absorption_probs(FactorialIndex({0, 0, 0}), p).probs == std::vector<double>{1.0});

    auto P = [&](std::vector<int> x) { return absorption_probs_exact(FactorialIndex::from_positions(3, x), p); };
    for (int a = 1; a <= 3; ++a)
        for (int b = a; b <= 3; ++b) CHECK(P({a})[1] + P({b})[1] == 2 * P({a, b})[2] + P({a, b})[1]);

    // large |xi| stays normalized and in range
    const ModelParams q{4, 1.3, 0.5, 0.5};
    const auto big = absorption_probs(FactorialIndex({3, 3, 2, 2}), q);
    double sum = 0.0;
    for (double v : big.probs) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(big.ill_conditioned);
}

TEST_CASE("cumulant closed forms")
{
    CHECK(mean_profile(2, ModelParams{3, 0.5, 0.5, 1e-300}) == doctest::Approx(0.5).epsilon(1e-12));

    for (double s : {0.5, 1.0, 1.3}) {
        const ModelParams r{5, s, 0.6, 0.2};
        for (int x = 1; x <= 5; ++x) {
            CHECK(mean_profile(x, r) == doctest::Approx(mean_from_moments(x, r)).epsilon(1e-12));
            CHECK(variance(x, r) == doctest::Approx(variance_from_moments(x, r)).epsilon(1e-12));
            for (int y = x + 1; y <= 5; ++y) {
                CHECK(covariance(x, y, r) > 0.0);
                CHECK(covariance(x, y, r) == doctest::Approx(covariance_from_moments(x, y, r)).epsilon(1e-11));
                for (int z = y + 1; z <= 5; ++z)
                    CHECK(std::fabs(third_cumulant(x, y, z, r) - third_cumulant_from_moments(x, y, z, r)) < 1e-12);
            }
        }
    }
    const ModelParams e{4, 1.3, 0.3, 0.3};
    CHECK(covariance(1, 3, e) == 0.0);
    CHECK(third_cumulant(1, 2, 4, e) == 0.0);
    CHECK_THROWS_AS(covariance(3, 1, e), std::domain_error);
    CHECK_THROWS_AS(third_cumulant(1, 1, 2, e), std::domain_error);
}

TEST_CASE("current and Fick scaling")
{
    const ModelParams eq{4, 0.5, 0.3, 0.3};
    CHECK(current(eq) == 0.0);
    for (int N = 2; N <= 6; ++N) {
        const ModelParams p{N, 1.3, 0.6, 0.2};
        for (int i = 1; i < N; ++i) CHECK(bond_current_from_moments(i, p) == doctest::Approx(current(p)).epsilon(1e-13));
    }
    for (int N : {10, 40, 160}) {
        const ModelParams p{N, 0.5, 0.6, 0.2};
        const double target = -2 * p.s * (p.rho_R() - p.rho_L());
        CHECK(std::fabs(N * current(p) - target) / std::fabs(target) < 2.0 / N);
        CHECK((N + 1) * current(p) == doctest::Approx(target).epsilon(1e-14));
    }
}

TEST_CASE("local equilibrium")
{
    CHECK(local_equilibrium_limit(3, 0.0, 2) == 3.0);
    CHECK(local_equilibrium_limit(2, 0.25, 1) == doctest::Approx(1.5));
    CHECK(translated_positions({0, 1}, 0.5, 10) == std::vector<int>{5, 6});
    double previous = 1e300;
    for (int N : {10, 20, 40}) {
        const auto xi = FactorialIndex::from_positions(N, translated_positions({0, 1, 1}, 0.3, N));
        const auto g = g_occupation_all<double>(xi, 0.5);
        double err = 0.0;
        for (int n = 0; n <= 3; ++n) err = std::max(err, std::fabs(g[n] - local_equilibrium_limit(3, 0.3, n)));
        CHECK(err < previous);
        previous = err;
    }
}

TEST_CASE("total number fluctuations")
{
    const ModelParams p{80, 0.5, 0.6, 0.2};
    const auto f = total_number_fluctuation(p);
    CHECK(f.limit == doctest::Approx(0.5 * std::pow(p.rho_R() - p.rho_L(), 2) / 6));
    CHECK(std::fabs(f.excess_per_site - f.limit) / f.limit < 5.0 / 80);
    CHECK(f.var_total > f.var_local);
}
