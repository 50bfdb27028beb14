#include "harmonic/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "harmonic/model.hpp"

namespace harmonic {

FockBasis::FockBasis(int N, int M, std::size_t max_dimension) : N_(N), M_(M), dim_(1)
{
    if (N < 1) throw std::domain_error("N must be >= 1");
    if (M < 0) throw std::domain_error("cutoff must be >= 0");
    for (int i = 0; i < N; ++i) {
        dim_ *= static_cast<std::size_t>(M + 1);
        if (dim_ > max_dimension) throw std::length_error("Fock basis dimension exceeds the dense limit");
    }
    totals_.resize(dim_);
    for (std::size_t idx = 0; idx < dim_; ++idx) {
        std::size_t r = idx;
        int t = 0;
        for (int i = 0; i < N; ++i) {
            t += static_cast<int>(r % (M + 1));
            r /= (M + 1);
        }
        totals_[idx] = t;
    }
}

std::size_t FockBasis::index(const std::vector<int>& m) const
{
    if (!contains(m)) throw std::out_of_range("occupation outside the truncated basis");
    std::size_t idx = 0;
    for (int i = N_; i-- > 0;) idx = idx * (M_ + 1) + m[i];
    return idx;
}

bool FockBasis::contains(const std::vector<int>& m) const
{
    if (static_cast<int>(m.size()) != N_) return false;
    for (int v : m)
        if (v < 0 || v > M_) return false;
    return true;
}

std::vector<int> FockBasis::occupation(std::size_t idx) const
{
    std::vector<int> m(N_);
    for (int i = 0; i < N_; ++i) {
        m[i] = static_cast<int>(idx % (M_ + 1));
        idx /= (M_ + 1);
    }
    return m;
}

std::vector<std::size_t> FockBasis::interior(int halo) const
{
    std::vector<std::size_t> out;
    for (std::size_t idx = 0; idx < dim_; ++idx)
        if (totals_[idx] <= M_ - halo) out.push_back(idx);
    return out;
}

bool TruncatedOperator::respects_grading() const
{
    if (!raises_by) return true;
    for (std::size_t c = 0; c < basis.dimension(); ++c)
        for (std::size_t r = 0; r < basis.dimension(); ++r)
            if (matrix(r, c) != 0.0 && basis.total(r) - basis.total(c) != *raises_by) return false;
    return true;
}

// ---------------------------------------------------------------------------

namespace single_site {

Eigen::MatrixXd raising(int P, double s)
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(P + 1, P + 1);
    for (int m = 0; m < P; ++m) A(m + 1, m) = m + 2.0 * s;
    return A;
}

Eigen::MatrixXd lowering(int P)
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(P + 1, P + 1);
    for (int m = 1; m <= P; ++m) A(m - 1, m) = m;
    return A;
}

Eigen::MatrixXd cartan(int P, double s)
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(P + 1, P + 1);
    for (int m = 0; m <= P; ++m) A(m, m) = m + s;
    return A;
}

Eigen::MatrixXd digamma_shift(int P, double s)
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(P + 1, P + 1);
    double h = 0.0;
    for (int m = 0; m <= P; ++m) {
        A(m, m) = h;
        h += 1.0 / (m + 2.0 * s);
    }
    return A;
}

}  // namespace single_site

Eigen::MatrixXd embed_site(const FockBasis& basis, int site, const Eigen::MatrixXd& local)
{
    const int M = basis.cutoff();
    if (site < 1 || site > basis.sites()) throw std::domain_error("site out of range");
    if (local.rows() != M + 1 || local.cols() != M + 1) throw std::domain_error("local matrix size mismatch");
    const std::size_t dim = basis.dimension();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t c = 0; c < dim; ++c) {
        auto m = basis.occupation(c);
        const int from = m[site - 1];
        for (int to = 0; to <= M; ++to) {
            const double v = local(to, from);
            if (v == 0.0) continue;
            m[site - 1] = to;
            A(basis.index(m), c) += v;
        }
    }
    return A;
}

Eigen::MatrixXd embed_pair(const FockBasis& basis, int i, const Eigen::MatrixXd& local)
{
    const int M = basis.cutoff();
    const int e = M + 1;
    if (i < 1 || i >= basis.sites()) throw std::domain_error("bond out of range");
    if (local.rows() != e * e || local.cols() != e * e) throw std::domain_error("local matrix size mismatch");
    const std::size_t dim = basis.dimension();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t c = 0; c < dim; ++c) {
        auto m = basis.occupation(c);
        const int from = m[i - 1] + e * m[i];
        for (int to = 0; to < e * e; ++to) {
            const double v = local(to, from);
            if (v == 0.0) continue;
            m[i - 1] = to % e;
            m[i] = to / e;
            A(basis.index(m), c) += v;
        }
    }
    return A;
}

SpinOps build_spin_ops(const FockBasis& basis, int site, double s)
{
    const int M = basis.cutoff();
    SpinOps ops{
        {basis, embed_site(basis, site, single_site::raising(M, s)), 1, 1},
        {basis, embed_site(basis, site, single_site::lowering(M)), -1, 1},
        {basis, embed_site(basis, site, single_site::cartan(M, s)), 0, 0},
    };
    return ops;
}

SpinOps build_total_spin_ops(const FockBasis& basis, double s)
{
    SpinOps tot = build_spin_ops(basis, 1, s);
    for (int i = 2; i <= basis.sites(); ++i) {
        const SpinOps one = build_spin_ops(basis, i, s);
        tot.plus.matrix += one.plus.matrix;
        tot.minus.matrix += one.minus.matrix;
        tot.zero.matrix += one.zero.matrix;
    }
    return tot;
}

double max_abs_on(const Eigen::MatrixXd& A, const std::vector<std::size_t>& rows,
                  const std::vector<std::size_t>& cols)
{
    double worst = 0.0;
    for (std::size_t c : cols)
        for (std::size_t r : rows) worst = std::max(worst, std::fabs(A(r, c)));
    return worst;
}

double max_abs_on(const Eigen::MatrixXd& A, const std::vector<std::size_t>& idx)
{
    return max_abs_on(A, idx, idx);
}

Eigen::MatrixXd exp_nilpotent(const Eigen::MatrixXd& X, int max_order)
{
    const Eigen::SparseMatrix<double> Xs = X.sparseView();
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(X.rows(), X.cols());
    Eigen::MatrixXd term = result;
    for (int k = 1; k <= max_order; ++k) {
        term = (term * Xs) / static_cast<double>(k);
        if (term.cwiseAbs().maxCoeff() == 0.0) break;
        result += term;
    }
    return result;
}

}  // namespace harmonic
