#include <doctest.h>

#include <cmath>
#include <random>

#include "harmonic/algebra.hpp"
#include "harmonic/exact.hpp"

using namespace harmonic;
using Eigen::MatrixXd;

namespace {

MatrixXd raising_oracle(int M, double s)
{
    MatrixXd A = MatrixXd::Zero(M + 1, M + 1);
    for (int m = 0; m < M; ++m) A(m + 1, m) = m + 2 * s;
    return A;
}

MatrixXd lowering_oracle(int M)
{
    MatrixXd A = MatrixXd::Zero(M + 1, M + 1);
    for (int m = 1; m <= M; ++m) A(m - 1, m) = m;
    return A;
}

double harmonic_oracle(int n, double s)
{
    double h = 0.0;
    for (int k = 1; k <= n; ++k) h += 1.0 / (k + 2 * s - 1);
    return h;
}

double phi_oracle(int k, int n, double s)
{
    if (k > n) return 0.0;
    return std::exp(std::lgamma(n + 1.0) + std::lgamma(n - k + 2 * s) - std::lgamma(n - k + 1.0) -
                    std::lgamma(n + 2 * s)) /
           k;
}

double block_max(const MatrixXd& A, int upto)
{
    return A.topLeftCorner(upto + 1, upto + 1).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("single-site generators")
{
    const int M = 10;
    for (double s : {0.5, 1.3}) {
        const MatrixXd Sp = single_site::raising(M, s), Sm = single_site::lowering(M), S0 = single_site::cartan(M, s);
        CHECK((Sp - raising_oracle(M, s)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((Sm - lowering_oracle(M)).cwiseAbs().maxCoeff() == 0.0);
        // [S-, S+] = 2 S0 and [S0, S+-] = +-S+-, away from the cutoff
        CHECK(block_max(Sm * Sp - Sp * Sm - 2 * S0, M - 1) < 1e-12);
        CHECK(block_max(S0 * Sp - Sp * S0 - Sp, M) < 1e-12);
        CHECK(block_max(S0 * Sm - Sm * S0 + Sm, M) < 1e-12);
        for (int m = 0; m <= M; ++m)
            CHECK(single_site::digamma_shift(M, s)(m, m) == doctest::Approx(harmonic_oracle(m, s)).epsilon(1e-13));
    }
}

TEST_CASE("exponential of the raising generator")
{
    const int M = 12;
    const double a = 0.7, s = 1.3;
    const MatrixXd E = exp_nilpotent(a * single_site::raising(M, s), M);
    for (int n = 0; n <= M; ++n)
        for (int m = 0; m <= M; ++m) {
            const double expected =
                n < m ? 0.0
                      : std::pow(a, n - m) / std::tgamma(n - m + 1.0) * std::exp(std::lgamma(n + 2 * s) - std::lgamma(m + 2 * s));
            CHECK(E(n, m) == doctest::Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("rotated digamma operator")
{
    const int M = 14;
    for (double s : {0.5, 1.3})
        for (double alpha : {0.25, 0.8, -0.4}) {
            const MatrixXd R = single_site::rotation_raising(alpha, s, M);
            const MatrixXd L = single_site::rotation_lowering(alpha, s, M);
            for (int n = 0; n <= M; ++n)
                for (int m = 0; m <= M; ++m) {
                    double up = 0.0, down = 0.0;
                    if (n == m) up = down = harmonic_oracle(n, s);
                    if (n > m) up = -std::pow(alpha, n - m) / (n - m);
                    if (m > n) down = -phi_oracle(m - n, m, s) * std::pow(alpha, m - n);
                    CHECK(R(n, m) == doctest::Approx(up).epsilon(1e-10).scale(1.0));
                    CHECK(L(n, m) == doctest::Approx(down).epsilon(1e-10).scale(1.0));
                }
            CHECK((R - single_site::rotation_raising_formula(alpha, M, s)).cwiseAbs().maxCoeff() < 1e-10);
            CHECK((L - single_site::rotation_lowering_formula(alpha, s, M)).cwiseAbs().maxCoeff() < 1e-10);
        }
}

TEST_CASE("boundary generator from rates and from exponentials")
{
    const int M = 10;
    for (double s : {0.5, 1.3})
        for (double beta : {0.2, 0.4}) {
            const MatrixXd B = single_site::boundary_direct(beta, s, M);
            for (int n = 0; n <= M; ++n) {
                CHECK(B(n, n) == doctest::Approx(harmonic_oracle(n, s) - std::log(1 - beta)).epsilon(1e-13));
                for (int k = 1; k <= n; ++k) CHECK(B(n - k, n) == doctest::Approx(-phi_oracle(k, n, s)).epsilon(1e-12));
                for (int k = 1; n + k <= M; ++k)
                    CHECK(B(n + k, n) == doctest::Approx(-std::pow(beta, k) / k).epsilon(1e-13));
            }
            CHECK((single_site::boundary_algebraic(beta, s, M, 200) - B).cwiseAbs().maxCoeff() < 1e-11);
        }
}

TEST_CASE("lowered boundary and the Delta expansion")
{
    const int M = 8;
    for (double beta : {0.2, 0.5}) {
        const double rho = beta / (1 - beta);
        CHECK((single_site::lowered_boundary(beta, 1.3, M, 600) - single_site::rotation_raising_formula(rho, M, 1.3))
                  .cwiseAbs()
                  .maxCoeff() < 1e-9);
    }
    for (int k = 1; k <= 4; ++k) {
        const MatrixXd Bk = single_site::boundary_Bk(k, 0.5, 10);
        for (int n = 0; n + k <= 10; ++n) CHECK(Bk(n + k, n) == doctest::Approx(-1.0 / k).epsilon(1e-13));
        CHECK((single_site::boundary_delta_coefficient(k, 0.5, 10) - Bk).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("Hamiltonian is minus the transposed generator")
{
    const ModelParams p{2, 1.3, 0.4, 0.2};
    const FockBasis basis(2, 6);
    const MatrixXd H = build_H(p, basis).matrix;
    for (std::size_t c : basis.interior(1)) {
        const Occupation m(basis.occupation(c));
        MatrixXd::ColXpr col = const_cast<MatrixXd&>(H).col(static_cast<Eigen::Index>(c));
        CHECK(col(static_cast<Eigen::Index>(c)) == doctest::Approx(holding_rate(m, p)).epsilon(1e-13));
        double off = 0.0;
        for (const Jump& j : enumerate_jumps(m, p, 6)) {
            if (!basis.contains(j.next.m)) continue;
            off += j.rate;
            CHECK(col(static_cast<Eigen::Index>(basis.index(j.next.m))) <= 0.0);
        }
        double colsum = 0.0;
        for (Eigen::Index r = 0; r < col.size(); ++r)
            if (r != static_cast<Eigen::Index>(c)) colsum -= col(r);
        CHECK(colsum == doctest::Approx(off).epsilon(1e-12));
    }
    CHECK(generator_transpose_residual(p, basis) < 1e-12);
    CHECK(column_sum_residual(p, basis) < 1e-12);
}

TEST_CASE("bulk has the sl(2) symmetry")
{
    const ModelParams p{3, 1.3, 0.4, 0.2};
    const FockBasis basis(3, 5);
    const MatrixXd bulk = build_bulk(p, basis).matrix;
    const SpinOps S = build_total_spin_ops(basis, p.s);
    const auto idx = basis.interior(1);
    CHECK(max_abs_on(S.minus.matrix * bulk - bulk * S.minus.matrix, idx) < 1e-11);
    CHECK(max_abs_on(S.zero.matrix * bulk - bulk * S.zero.matrix, idx) < 1e-11);
    CHECK(max_abs_on(S.plus.matrix * bulk - bulk * S.plus.matrix, idx) < 1e-11);
    CHECK(max_abs_on(build_bulk_density(p, basis, 2).matrix - build_bulk_density_split(p, basis, 2).matrix,
                     basis.interior(0)) < 1e-11);
}

TEST_CASE("bulk is reversible for the product weights")
{
    const ModelParams p{2, 1.3, 0.4, 0.2};
    const FockBasis basis(2, 6);
    const MatrixXd Hb = build_bulk_density(p, basis, 1).matrix;
    const Eigen::VectorXd d = detailed_balance_weights(basis, p.s);
    for (std::size_t c : basis.interior(0)) {
        const auto m = basis.occupation(c);
        const double w = std::exp(std::lgamma(m[0] + 1.0) + std::lgamma(m[1] + 1.0) + 2 * std::lgamma(2 * p.s) -
                                  std::lgamma(m[0] + 2 * p.s) - std::lgamma(m[1] + 2 * p.s));
        CHECK(d(static_cast<Eigen::Index>(c)) == doctest::Approx(w).epsilon(1e-12));
    }
    CHECK(max_abs_on(MatrixXd(Hb.transpose() * d.asDiagonal()) - MatrixXd(d.asDiagonal() * Hb), basis.interior(0)) <
          1e-11);
}

TEST_CASE("ground states of the transformed Hamiltonians")
{
    for (double s : {0.5, 1.0, 1.3}) {
        const ModelParams p{2, s, 0.45, 0.2};
        const FockBasis basis(2, 7);
        const auto T = build_transformed(p, basis);
        Eigen::VectorXd vac = Eigen::VectorXd::Zero(basis.dimension());
        vac(0) = 1.0;
        CHECK((T.H_circle.matrix * vac).cwiseAbs().maxCoeff() < 1e-14);

        Eigen::VectorXd mu2(basis.dimension()), mu1(basis.dimension());
        for (std::size_t c = 0; c < basis.dimension(); ++c) {
            mu2(static_cast<Eigen::Index>(c)) = mu_double_prime(basis.occupation(c), p);
            mu1(static_cast<Eigen::Index>(c)) = mu_prime(basis.occupation(c), p);
        }
        const Eigen::VectorXd r2 = T.H_double_prime.matrix * mu2;
        const Eigen::VectorXd r1 = T.H_prime.matrix * mu1;
        const Eigen::VectorXd lifted = exp_total_raising(basis, s, p.rho_R()) * mu2;
        double e2 = 0.0, e1 = 0.0, el = 0.0;
        for (std::size_t c : basis.interior(0)) {
            const auto i = static_cast<Eigen::Index>(c);
            e2 = std::max(e2, std::fabs(r2(i)));
            e1 = std::max(e1, std::fabs(r1(i)));
            el = std::max(el, std::fabs(lifted(i) - mu1(i)));
        }
        CHECK(e2 < 1e-11);
        CHECK(e1 < 1e-11);
        CHECK(el < 1e-12);
        CHECK(mu_double_prime({0, 0}, p) == 1.0);
        CHECK(mu_prime({0, 0}, p) == 1.0);
    }
}

TEST_CASE("W intertwines H'' and the diagonal-boundary Hamiltonian")
{
    const ModelParams p{2, 1.0, 0.4, 0.1};
    const FockBasis basis(2, 6);
    const MatrixXd W = build_W(p, basis).matrix;
    const auto T = build_transformed(p, basis);
    CHECK(max_abs_on(T.H_double_prime.matrix * W - W * T.H_circle.matrix, basis.interior(0)) < 1e-10);
    const Charges Q = build_Q(p, basis);
    CHECK(Q.Q_plus.respects_grading());
    CHECK(max_abs_on(T.H_double_prime.matrix * Q.Q_double_prime.matrix - Q.Q_double_prime.matrix * T.H_double_prime.matrix,
                     basis.interior(4)) < 1e-9);
}

TEST_CASE("duality function and the duality relation")
{
    const ModelParams p{3, 1.3, 0.45, 0.2};
    const Occupation m({3, 1, 2});
    const DualConfig xi({1, 2, 0, 1, 2});
    const double expected = std::pow(p.rho_L(), 1) * std::pow(p.rho_R(), 2) * (3.0 * 2.0) * std::tgamma(2 * p.s) /
                            std::tgamma(2 * p.s + 2) * 2.0 * std::tgamma(2 * p.s) / std::tgamma(2 * p.s + 1);
    CHECK(duality_function(m, xi, p) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(duality_function(m, DualConfig({0, 2, 2, 0, 0}), p) == 0.0);

    Rng rng(11);
    std::uniform_int_distribution<int> entry(0, 4);
    for (int t = 0; t < 100; ++t) {
        std::vector<int> a(3), b(5);
        for (int& v : a) v = entry(rng);
        for (int& v : b) v = entry(rng);
        CHECK(duality_check(Occupation(a), DualConfig(b), p) < 1e-10);
    }
}

TEST_CASE("intertwiner is exact")
{
    const auto r = intertwiner_check(Rational(1, 3), Rational(3, 2), 8);
    CHECK(r.coefficient_residual == 0);
    CHECK(r.value_residual == 0);
}

TEST_CASE("mapping to equilibrium")
{
    const ModelParams p{2, 0.5, 0.4, 0.2};
    const FockBasis basis(2, 7);
    const auto r = mapping_check(p, 0.3, basis);
    CHECK(r.operator_residual < 1e-8);
    CHECK(r.vector_residual < 1e-10);
    ModelParams eq = p;
    eq.beta_L = eq.beta_R;
    CHECK(mapping_check(eq, eq.rho_R(), basis).identity_residual < 1e-12);
}
