#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "harmonic/measure.hpp"

using namespace harmonic;

namespace {

// Stationary law of the one-site chain from the truncated generator on {0..K}.
std::vector<double> one_site_stationary(const ModelParams& p, int K)
{
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(K + 1, K + 1);
    for (int m = 0; m <= K; ++m)
        for (const Jump& j : enumerate_jumps(Occupation({m}), p, K)) {
            if (j.next[0] > K) continue;
            Q(m, j.next[0]) += j.rate;
            Q(m, m) -= j.rate;
        }
    Eigen::MatrixXd A = Q.transpose();
    A.row(K).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(K + 1);
    b(K) = 1.0;
    const Eigen::VectorXd pi = A.fullPivLu().solve(b);
    return {pi.data(), pi.data() + pi.size()};
}

}  // namespace

TEST_CASE("equilibrium weights are negative binomial")
{
    const double beta = 0.3, s = 1.3;
    double norm = 0.0;
    for (int m = 0; m < 200; ++m) norm += equilibrium_weight(Occupation({m}), beta, s);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(equilibrium_weight(Occupation({0, 0}), beta, s) == doctest::Approx(std::pow(1 - beta, 4 * s)));
    CHECK(equilibrium_weight(Occupation({1}), beta, 0.5) == doctest::Approx(beta * (1 - beta)));
}

TEST_CASE("inversion reproduces the equilibrium measure")
{
    const ModelParams p{2, 1.3, 0.25, 0.25};
    const StationaryInversion inv(p, 40);
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b) {
            const Occupation m({a, b});
            const auto w = inv.weight(m);
            CHECK(w.value == doctest::Approx(equilibrium_weight(m, 0.25, 1.3)).epsilon(1e-9));
            CHECK_FALSE(w.warning);
        }
}

TEST_CASE("one-site measure against the truncated generator")
{
    for (double s : {0.5, 1.3}) {
        const ModelParams p{1, s, 0.3, 0.1};
        const auto pi = one_site_stationary(p, 150);
        const StationaryInversion inv(p, 40);
        const auto grid = inv.weights(6);
        for (int m = 0; m <= 6; ++m) CHECK(grid.at(Occupation({m})) == doctest::Approx(pi[m]).epsilon(1e-8));
        if (s == 0.5)
            for (int m = 0; m <= 6; ++m)
                CHECK(one_site_half_spin_weight(m, 0.3, 0.1) == doctest::Approx(pi[m]).epsilon(1e-10));
    }
}

TEST_CASE("two-site closed form and stationarity")
{
    const ModelParams p{2, 0.5, 0.25, 0.1};
    const StationaryInversion inv(p, 40);
    const auto grid = inv.weights(10);
    double total = 0.0;
    for (int a = 0; a <= 5; ++a)
        for (int b = 0; b <= 5; ++b) {
            const double w = two_site_half_spin_weight(a, b, 0.25, 0.1);
            CHECK(grid.at(Occupation({a, b})) == doctest::Approx(w).epsilon(1e-8));
            total += w;
        }
    CHECK(total < 1.0);
    CHECK(stationarity_residual(grid, p, 6) < 1e-7);
    CHECK(grid.contains(Occupation({10, 0})));
    CHECK_FALSE(grid.contains(Occupation({11, 0})));
    CHECK_THROWS(one_site_half_spin_weight(1, 0.2, 0.2));
}

TEST_CASE("truncation estimate flags slow convergence")
{
    const ModelParams p{1, 0.5, 0.45, 0.1};
    const auto w = stationary_weight(Occupation({2}), p, 6);
    CHECK(w.truncation_error > 0.0);
    CHECK(w.warning);
}
