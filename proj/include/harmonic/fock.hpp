#pragma once

// Truncated Fock space: occupation vectors with m_i <= M, dense operators on
// them, and the non-compact sl(2) generators.

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace harmonic {

/// Mixed-radix basis of all m in {0..M}^N, site 1 fastest.
class FockBasis {
public:
    /// Throws std::length_error when (M+1)^N exceeds max_dimension.
    FockBasis(int N, int M, std::size_t max_dimension = 60000);

    int sites() const { return N_; }
    int cutoff() const { return M_; }
    std::size_t dimension() const { return dim_; }

    std::size_t index(const std::vector<int>& m) const;
    bool contains(const std::vector<int>& m) const;
    std::vector<int> occupation(std::size_t idx) const;
    int total(std::size_t idx) const { return totals_[idx]; }

    /// Indices of states with |m| <= M - halo. Operators that never lower the
    /// particle number are represented exactly on this block.
    std::vector<std::size_t> interior(int halo) const;

    bool operator==(const FockBasis& o) const { return N_ == o.N_ && M_ == o.M_; }

private:
    int N_, M_;
    std::size_t dim_;
    std::vector<int> totals_;
};

struct TruncatedOperator {
    FockBasis basis;
    Eigen::MatrixXd matrix;
    /// Change of the particle number, when the operator has a definite one.
    std::optional<int> raises_by;
    /// Rows/columns with |m| > M - cutoff_halo are not trusted.
    int cutoff_halo = 0;

    /// True when every nonzero entry connects sectors differing by raises_by.
    bool respects_grading() const;
};

struct SpinOps {
    TruncatedOperator plus, minus, zero;
};

/// S+|m> = (m+2s)|m+1> (dropped at the cutoff), S-|m> = m|m-1>, S0|m> = (m+s)|m>
/// at one site (1-based), identity elsewhere.
SpinOps build_spin_ops(const FockBasis& basis, int site, double s);

/// Sums over all sites.
SpinOps build_total_spin_ops(const FockBasis& basis, double s);

/// Lifts a single-site matrix of size (M+1) acting on `site` (1-based).
Eigen::MatrixXd embed_site(const FockBasis& basis, int site, const Eigen::MatrixXd& local);

/// Lifts a two-site matrix on sites (i, i+1), indexed by m_i + (M+1) m_{i+1}.
Eigen::MatrixXd embed_pair(const FockBasis& basis, int i, const Eigen::MatrixXd& local);

/// max |A(r,c)| over r, c in the given index sets.
double max_abs_on(const Eigen::MatrixXd& A, const std::vector<std::size_t>& rows,
                  const std::vector<std::size_t>& cols);
double max_abs_on(const Eigen::MatrixXd& A, const std::vector<std::size_t>& idx);

/// Sum of X^k/k! until the term vanishes (X nilpotent on the truncation) or
/// max_order is reached.
Eigen::MatrixXd exp_nilpotent(const Eigen::MatrixXd& X, int max_order);

namespace single_site {

/// Generators on {0..P}.
Eigen::MatrixXd raising(int P, double s);
Eigen::MatrixXd lowering(int P);
Eigen::MatrixXd cartan(int P, double s);
/// psi(S0+s) - psi(2s), i.e. h_s(n) on the diagonal, from the digamma recurrence.
Eigen::MatrixXd digamma_shift(int P, double s);

}  // namespace single_site

}  // namespace harmonic
