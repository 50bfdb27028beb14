#pragma once

// Operators of the non-compact spin chain on a truncated Fock space and the
// residuals of the identities relating them.
//
// Halo convention: every builder that can be cut by the per-site cutoff sets
// cutoff_halo; every residual below names the block it is evaluated on.
// Operators that never lower the particle number are exact on the block
// |m| <= M, so most residuals use halo 0.

#include <vector>

#include <Eigen/Dense>

#include "harmonic/fock.hpp"
#include "harmonic/model.hpp"

namespace harmonic {

using MatrixLD = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// ---------------------------------------------------------------------------
// Single-site matrices on {0..M}

namespace single_site {

/// B_i of the process: diagonal h_s(m) - log(1-beta), removals -phi_s(k,m),
/// injections -beta^k/k (those leaving {0..M} are dropped).
Eigen::MatrixXd boundary_direct(double beta, double s, int M);

/// The same boundary from generator exponentials on the padded space {0..pad},
/// with the inner S- rotation taken from its closed form,
/// restricted to {0..M}. Uses the ordering
/// e^{beta S+} e^{-S-/(1-beta)} (psi(S0+s)-psi(2s)) e^{S-/(1-beta)} e^{-beta S+},
/// equal to e^{-S-} e^{rho S+} (...) e^{-rho S+} e^{S-}; the padded sums
/// converge for rho < 1.
Eigen::MatrixXd boundary_algebraic(double beta, double s, int M, int pad);

/// e^{-alpha S-} (psi(S0+s)-psi(2s)) e^{alpha S-} from matrices, and its closed form.
Eigen::MatrixXd rotation_lowering(double alpha, double s, int M);
Eigen::MatrixXd rotation_lowering_formula(double alpha, double s, int M);

/// e^{alpha S+} (psi(S0+s)-psi(2s)) e^{-alpha S+} from matrices, and its closed form
/// h_s(m) delta - alpha^k/k.
Eigen::MatrixXd rotation_raising(double alpha, double s, int M);
Eigen::MatrixXd rotation_raising_formula(double alpha, int M, double s);

/// e^{S-} B e^{-S-} for the direct boundary, summed on the padded space.
Eigen::MatrixXd lowered_boundary(double beta, double s, int M, int pad);

/// Coefficient of Delta^k in e^{Delta S+} (psi(S0+s)-psi(2s)) e^{-Delta S+}.
Eigen::MatrixXd boundary_delta_coefficient(int k, double s, int M);
/// -(1/k) Gamma(S0+s-k)/Gamma(S0+s) S+^k.
Eigen::MatrixXd boundary_Bk(int k, double s, int M);

}  // namespace single_site

// ---------------------------------------------------------------------------
// Chain operators

/// H_{i,i+1} from its action on occupation states.
TruncatedOperator build_bulk_density(const ModelParams& p, const FockBasis& basis, int i);
/// H_{i,i+1} from exponentials of S+^{[j]}(S0^{[j]}+s)^{-1}S-^{[i]} (both jump directions).
TruncatedOperator build_bulk_density_split(const ModelParams& p, const FockBasis& basis, int i);
TruncatedOperator build_bulk(const ModelParams& p, const FockBasis& basis);

TruncatedOperator build_boundary(const ModelParams& p, const FockBasis& basis, int site);
TruncatedOperator build_boundary_algebraic(const ModelParams& p, const FockBasis& basis, int site,
                                           int pad = 200);

/// H = B_1 + sum H_{i,i+1} + B_N; injections beyond the cutoff are dropped.
TruncatedOperator build_H(const ModelParams& p, const FockBasis& basis);

struct TransformedHamiltonians {
    TruncatedOperator H_prime;         // boundaries e^{rho S+} psi e^{-rho S+}
    TruncatedOperator H_double_prime;  // left boundary with Delta, right boundary diagonal
    TruncatedOperator H_circle;        // both boundaries diagonal
};
TransformedHamiltonians build_transformed(const ModelParams& p, const FockBasis& basis);

struct Charges {
    TruncatedOperator Q_circle;
    TruncatedOperator Q_plus;
    TruncatedOperator Q_double_prime;
};
Charges build_Q(const ModelParams& p, const FockBasis& basis);

/// sum_k Delta^k Q+^k/k! Gamma(2(S0tot+s))/Gamma(k+2(S0tot+s)), k <= M.
TruncatedOperator build_W(const ModelParams& p, const FockBasis& basis);

/// exp(alpha S+tot) on the basis.
Eigen::MatrixXd exp_total_raising(const FockBasis& basis, double s, double alpha);

/// Ground-state components in closed form.
double mu_double_prime(const std::vector<int>& m, const ModelParams& p);
double mu_prime(const std::vector<int>& m, const ModelParams& p);

/// Diagonal d with entries prod_i m_i! Gamma(2s)/Gamma(m_i+2s).
Eigen::VectorXd detailed_balance_weights(const FockBasis& basis, double s);

// ---------------------------------------------------------------------------
// Residuals

/// max over interior columns m of |L(m,m') + H(m',m)| with L from enumerate_jumps.
double generator_transpose_residual(const ModelParams& p, const FockBasis& basis);
/// max over interior columns of |sum_r H(r,m) - dropped injection tail|.
double column_sum_residual(const ModelParams& p, const FockBasis& basis);

/// Scaled duality function; zero whenever xi_i > m_i for a bulk site.
double duality_function(const Occupation& m, const DualConfig& xi, const ModelParams& p);
/// |(L D(., xi))(m) - (L^dual D(m, .))(xi)|.
double duality_check(const Occupation& m, const DualConfig& xi, const ModelParams& p);

struct MappingResult {
    double operator_residual = 0.0;  // max interior |H'^eq - A^{-1} H' A|, A = e^{rho_R S+} W e^{-rho_eq S+}
    double vector_residual = 0.0;    // max interior |A e^{S-}mu^eq - e^{S-}mu| with e^{S-}mu from G
    double identity_residual = 0.0;  // max interior |A - 1| (zero in equilibrium)
};
/// P = e^{-S-tot} A e^{S-tot}. The residual of H^eq = P^{-1} H P is evaluated
/// after conjugation by e^{S-tot}, where H^eq and H become H'^eq and H'.
MappingResult mapping_check(const ModelParams& p, double rho_eq, const FockBasis& basis);

struct IntertwinerResult {
    Rational coefficient_residual;  // max over a, n of coefficient differences
    Rational value_residual;        // same, evaluated at rho
};
/// S_a I - I S_a on {0..M} for a in {0,+,-}, with I = sum rho^n <n| acting on
/// coefficient vectors of polynomials in rho.
IntertwinerResult intertwiner_check(const Rational& rho, const Rational& s, int M);

}  // namespace harmonic
