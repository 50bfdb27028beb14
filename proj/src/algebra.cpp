#include "harmonic/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "harmonic/exact.hpp"

namespace harmonic {

namespace {

using MatrixD = Eigen::MatrixXd;

// e^{a S+} on {0..P}: entry (n,m) = a^{n-m}/(n-m)! Gamma(n+2s)/Gamma(m+2s).
MatrixLD exp_raising_ld(int P, long double s, long double a)
{
    MatrixLD E = MatrixLD::Zero(P + 1, P + 1);
    for (int m = 0; m <= P; ++m) {
        E(m, m) = 1.0L;
        for (int n = m; n < P; ++n) E(n + 1, m) = E(n, m) * a * (n + 2 * s) / (n + 1 - m);
    }
    return E;
}

// e^{a S-} on {0..P}: entry (n,m) = a^{m-n} C(m,n).
MatrixLD exp_lowering_ld(int P, long double a)
{
    MatrixLD E = MatrixLD::Zero(P + 1, P + 1);
    for (int m = 0; m <= P; ++m) {
        E(m, m) = 1.0L;
        for (int n = m; n > 0; --n) E(n - 1, m) = E(n, m) * a * n / (m - n + 1);
    }
    return E;
}

MatrixLD digamma_shift_ld(int P, long double s)
{
    MatrixLD A = MatrixLD::Zero(P + 1, P + 1);
    long double h = 0.0L;
    for (int m = 0; m <= P; ++m) {
        A(m, m) = h;
        h += 1.0L / (m + 2 * s);
    }
    return A;
}

MatrixD head(const MatrixLD& A, int M) { return A.topLeftCorner(M + 1, M + 1).cast<double>(); }

MatrixLD boundary_direct_ld(double beta, double s, int M)
{
    MatrixLD B = MatrixLD::Zero(M + 1, M + 1);
    const long double log_term = -std::log1p(-static_cast<long double>(beta));
    for (int m = 0; m <= M; ++m) {
        B(m, m) = shifted_harmonic(m, s) + log_term;
        for (int k = 1; k <= m; ++k) B(m - k, m) -= phi(k, m, s);
        long double bk = 1.0L;
        for (int k = 1; m + k <= M; ++k) {
            bk *= beta;
            B(m + k, m) -= bk / k;
        }
    }
    return B;
}

// Two-site matrices indexed a + e*b, a on the left site.
MatrixD kron_pair(const MatrixD& left, const MatrixD& right)
{
    const int e = static_cast<int>(left.rows());
    MatrixD K = MatrixD::Zero(e * e, e * e);
    for (int b2 = 0; b2 < e; ++b2)
        for (int b1 = 0; b1 < e; ++b1) {
            const double r = right(b2, b1);
            if (r == 0.0) continue;
            for (int a2 = 0; a2 < e; ++a2)
                for (int a1 = 0; a1 < e; ++a1) K(a2 + e * b2, a1 + e * b1) += left(a2, a1) * r;
        }
    return K;
}

MatrixD inverse_shifted_cartan(int M, double s)
{
    MatrixD A = MatrixD::Zero(M + 1, M + 1);
    for (int m = 0; m <= M; ++m) A(m, m) = 1.0 / (m + 2.0 * s);
    return A;
}

TruncatedOperator embed_boundaries(const FockBasis& basis, const MatrixD& left, const MatrixD& right,
                                   std::optional<int> grading)
{
    MatrixD A = embed_site(basis, 1, left) + embed_site(basis, basis.sites(), right);
    return {basis, std::move(A), grading, 0};
}

ModelParams equilibrium_params(const ModelParams& p, double rho)
{
    ModelParams q = p;
    q.beta_L = q.beta_R = rho / (1.0 + rho);
    return q;
}

// Gamma(a+n)/Gamma(a) as a product.
double rising(double a, int n)
{
    double v = 1.0;
    for (int j = 0; j < n; ++j) v *= a + j;
    return v;
}

double factorial(int n) { return rising(1.0, n); }

}  // namespace

// ---------------------------------------------------------------------------

namespace single_site {

Eigen::MatrixXd boundary_direct(double beta, double s, int M) { return head(boundary_direct_ld(beta, s, M), M); }

Eigen::MatrixXd boundary_algebraic(double beta, double s, int M, int pad)
{
    if (pad < M) throw std::domain_error("padding below the cutoff");
    // The padded sums alternate with terms far above the result, so they run in 256-bit floats.
    constexpr mp_bitcnt_t bits = 256;
    const mpf_class one(1, bits), bt(beta, bits), two_s(2 * s, bits);
    const mpf_class c = one / (one - bt);

    // Inner factor e^{-c S-} psi e^{c S-}: h_s(n) on the diagonal, -phi_s(k,n) c^k at (n-k, n).
    auto inner = [&](int a, int b) {
        if (a == b) {
            mpf_class h(0, bits);
            for (int k = 1; k <= b; ++k) h += one / (two_s + (k - 1));
            return h;
        }
        const int k = b - a;
        mpf_class v = one / k;
        for (int j = 0; j < k; ++j) v *= c * (b - j) / (two_s + (b - j - 1));
        return mpf_class(-v);
    };
    // e^{x S+} entries (n, m) for n >= m.
    auto raise = [&](const mpf_class& x, int n, int m) {
        mpf_class v = one;
        for (int j = m; j < n; ++j) v *= x * (two_s + j) / (j + 1 - m);
        return v;
    };

    std::vector<std::vector<mpf_class>> Y(M + 1, std::vector<mpf_class>(M + 1, mpf_class(0, bits)));
    const mpf_class minus_bt = -bt;
    for (int a = 0; a <= M; ++a)
        for (int q = 0; q <= M; ++q) {
            mpf_class e = raise(minus_bt, std::max(a, q), q);
            for (int b = std::max(a, q); b <= pad; ++b) {
                Y[a][q] += inner(a, b) * e;
                e *= minus_bt * (two_s + b) / (b + 1 - q);
            }
        }
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(M + 1, M + 1);
    for (int n = 0; n <= M; ++n)
        for (int q = 0; q <= M; ++q) {
            mpf_class v(0, bits);
            for (int a = 0; a <= n; ++a) v += raise(bt, n, a) * Y[a][q];
            B(n, q) = v.get_d();
        }
    return B;
}

Eigen::MatrixXd rotation_lowering(double alpha, double s, int M)
{
    return head(exp_lowering_ld(M, -alpha) * digamma_shift_ld(M, s) * exp_lowering_ld(M, alpha), M);
}

Eigen::MatrixXd rotation_lowering_formula(double alpha, double s, int M)
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M + 1, M + 1);
    for (int n = 0; n <= M; ++n) {
        A(n, n) = shifted_harmonic(n, s);
        for (int k = 1; k <= n; ++k) A(n - k, n) = -phi(k, n, s) * std::pow(alpha, k);
    }
    return A;
}

Eigen::MatrixXd rotation_raising(double alpha, double s, int M)
{
    return head(exp_raising_ld(M, s, alpha) * digamma_shift_ld(M, s) * exp_raising_ld(M, s, -alpha), M);
}

Eigen::MatrixXd rotation_raising_formula(double alpha, int M, double s)
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M + 1, M + 1);
    for (int n = 0; n <= M; ++n) {
        A(n, n) = shifted_harmonic(n, s);
        for (int k = 1; n + k <= M; ++k) A(n + k, n) = -std::pow(alpha, k) / k;
    }
    return A;
}

Eigen::MatrixXd lowered_boundary(double beta, double s, int M, int pad)
{
    if (pad < M) throw std::domain_error("padding below the cutoff");
    const MatrixLD B = exp_lowering_ld(pad, 1.0L) * boundary_direct_ld(beta, s, pad) * exp_lowering_ld(pad, -1.0L);
    return head(B, M);
}

Eigen::MatrixXd boundary_delta_coefficient(int k, double s, int M)
{
    // sum_j (-1)^{k-j}/(j!(k-j)!) S+^j Psi S+^{k-j}
    MatrixLD raise = MatrixLD::Zero(M + 1, M + 1);
    for (int m = 0; m < M; ++m) raise(m + 1, m) = m + 2.0L * s;
    const MatrixLD psi = digamma_shift_ld(M, s);
    std::vector<MatrixLD> powers{MatrixLD::Identity(M + 1, M + 1)};
    for (int j = 1; j <= k; ++j) powers.push_back(raise * powers.back());
    MatrixLD C = MatrixLD::Zero(M + 1, M + 1);
    for (int j = 0; j <= k; ++j) {
        const long double w = (((k - j) % 2) ? -1.0L : 1.0L) / (factorial(j) * factorial(k - j));
        C += w * powers[j] * psi * powers[k - j];
    }
    return head(C, M);
}

Eigen::MatrixXd boundary_Bk(int k, double s, int M)
{
    if (k < 1) throw std::domain_error("B_k needs k >= 1");
    Eigen::MatrixXd ratio = Eigen::MatrixXd::Zero(M + 1, M + 1);  // Gamma(S0+s-k)/Gamma(S0+s), used on n >= k
    for (int n = k; n <= M; ++n) ratio(n, n) = 1.0 / rising(n + 2.0 * s - k, k);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(M + 1, M + 1);
    for (int j = 0; j < k; ++j) power = single_site::raising(M, s) * power;
    return -(ratio * power) / k;
}

}  // namespace single_site

// ---------------------------------------------------------------------------

TruncatedOperator build_bulk_density(const ModelParams& p, const FockBasis& basis, int i)
{
    const int M = basis.cutoff();
    const int e = M + 1;
    const double s = p.s;
    MatrixD local = MatrixD::Zero(e * e, e * e);
    for (int b = 0; b <= M; ++b)
        for (int a = 0; a <= M; ++a) {
            const int col = a + e * b;
            local(col, col) = shifted_harmonic(a, s) + shifted_harmonic(b, s);
            for (int k = 1; k <= a && b + k <= M; ++k) local((a - k) + e * (b + k), col) -= phi(k, a, s);
            for (int k = 1; k <= b && a + k <= M; ++k) local((a + k) + e * (b - k), col) -= phi(k, b, s);
        }
    return {basis, embed_pair(basis, i, local), 0, 0};
}

TruncatedOperator build_bulk_density_split(const ModelParams& p, const FockBasis& basis, int i)
{
    const int M = basis.cutoff();
    const double s = p.s;
    const MatrixD I = MatrixD::Identity(M + 1, M + 1);
    const MatrixD psi = single_site::digamma_shift(M, s);
    const MatrixD hop = single_site::raising(M, s) * inverse_shifted_cartan(M, s);
    const MatrixD low = single_site::lowering(M);

    const MatrixD X_right = kron_pair(low, hop);  // S+^{[i+1]}(S0^{[i+1]}+s)^{-1} S-^{[i]}
    const MatrixD X_left = kron_pair(hop, low);
    const int order = 2 * M + 1;
    const MatrixD right = exp_nilpotent(-X_right, order) * kron_pair(psi, I) * exp_nilpotent(X_right, order);
    const MatrixD left = exp_nilpotent(-X_left, order) * kron_pair(I, psi) * exp_nilpotent(X_left, order);
    return {basis, embed_pair(basis, i, right + left), 0, 0};
}

TruncatedOperator build_bulk(const ModelParams& p, const FockBasis& basis)
{
    const std::size_t dim = basis.dimension();
    TruncatedOperator H{basis, MatrixD::Zero(dim, dim), 0, 0};
    for (int i = 1; i < basis.sites(); ++i) H.matrix += build_bulk_density(p, basis, i).matrix;
    return H;
}

TruncatedOperator build_boundary(const ModelParams& p, const FockBasis& basis, int site)
{
    if (site != 1 && site != basis.sites()) throw std::domain_error("boundary site must be 1 or N");
    const double beta = site == 1 ? p.beta_L : p.beta_R;
    return {basis, embed_site(basis, site, single_site::boundary_direct(beta, p.s, basis.cutoff())), std::nullopt, 0};
}

TruncatedOperator build_boundary_algebraic(const ModelParams& p, const FockBasis& basis, int site, int pad)
{
    if (site != 1 && site != basis.sites()) throw std::domain_error("boundary site must be 1 or N");
    const double beta = site == 1 ? p.beta_L : p.beta_R;
    if (beta >= 0.5) throw std::domain_error("algebraic boundary needs rho < 1");
    const MatrixD local = single_site::boundary_algebraic(beta, p.s, basis.cutoff(), pad);
    return {basis, embed_site(basis, site, local), std::nullopt, 0};
}

TruncatedOperator build_H(const ModelParams& p, const FockBasis& basis)
{
    p.validate();
    TruncatedOperator H = build_bulk(p, basis);
    H.matrix += build_boundary(p, basis, 1).matrix + build_boundary(p, basis, basis.sites()).matrix;
    H.raises_by.reset();
    return H;
}

TransformedHamiltonians build_transformed(const ModelParams& p, const FockBasis& basis)
{
    p.validate();
    const int M = basis.cutoff();
    const double s = p.s;
    const MatrixD bulk = build_bulk(p, basis).matrix;
    const MatrixD psi = single_site::digamma_shift(M, s);

    TransformedHamiltonians out{
        embed_boundaries(basis, single_site::rotation_raising_formula(p.rho_L(), M, s),
                         single_site::rotation_raising_formula(p.rho_R(), M, s), std::nullopt),
        embed_boundaries(basis, single_site::rotation_raising_formula(p.delta(), M, s), psi, std::nullopt),
        embed_boundaries(basis, psi, psi, 0),
    };
    out.H_prime.matrix += bulk;
    out.H_double_prime.matrix += bulk;
    out.H_circle.matrix += bulk;
    return out;
}

Charges build_Q(const ModelParams& p, const FockBasis& basis)
{
    const double s = p.s;
    const int N = basis.sites();
    const std::size_t dim = basis.dimension();

    MatrixD Qc = MatrixD::Zero(dim, dim);
    for (std::size_t c = 0; c < dim; ++c) {
        const double S = basis.total(c) + N * s;
        Qc(c, c) = S * (S + 2 * s - 1);
    }

    std::vector<SpinOps> ops;
    for (int i = 1; i <= N; ++i) ops.push_back(build_spin_ops(basis, i, s));
    MatrixD Qp = MatrixD::Zero(dim, dim);
    for (int i = 0; i < N; ++i) {
        MatrixD weight = ops[i].zero.matrix;
        for (int j = i + 1; j < N; ++j) weight += 2.0 * ops[j].zero.matrix;
        Qp += s * ops[i].plus.matrix + ops[i].plus.matrix * weight;
    }

    Charges q{{basis, Qc, 0, 0}, {basis, Qp, 1, 1}, {basis, Qc - p.delta() * Qp, std::nullopt, 1}};
    return q;
}

TruncatedOperator build_W(const ModelParams& p, const FockBasis& basis)
{
    const double s = p.s;
    const int N = basis.sites();
    const int M = basis.cutoff();
    const std::size_t dim = basis.dimension();
    const double delta = p.delta();

    const Eigen::SparseMatrix<double> Qp = build_Q(p, basis).Q_plus.matrix.sparseView();
    MatrixD W = MatrixD::Identity(dim, dim);
    MatrixD power = MatrixD::Identity(dim, dim);  // Delta^k Q+^k / k!
    for (int k = 1; k <= M; ++k) {
        power = (Qp * power) * (delta / k);
        if (power.cwiseAbs().maxCoeff() == 0.0) break;
        MatrixD term = power;
        for (std::size_t c = 0; c < dim; ++c) {
            const double x = 2.0 * basis.total(c) + 2.0 * s * (N + 1);
            term.col(c) /= rising(x, k);
        }
        W += term;
    }
    return {basis, std::move(W), 0, 0};
}

Eigen::MatrixXd exp_total_raising(const FockBasis& basis, double s, double alpha)
{
    const MatrixD Sp = build_total_spin_ops(basis, s).plus.matrix;
    return exp_nilpotent(alpha * Sp, basis.sites() * basis.cutoff() + 1);
}

double mu_double_prime(const std::vector<int>& m, const ModelParams& p)
{
    const int N = static_cast<int>(m.size());
    const double s = p.s;
    int total = 0;
    for (int v : m) total += v;
    double value = std::pow(p.delta(), total) / rising(2 * s * (N + 1), total);
    int suffix = total;
    for (int i = 1; i <= N; ++i) {
        const int mi = m[i - 1];
        suffix -= mi;  // sum_{k>i} m_k
        value *= rising(2 * s, mi) / factorial(mi);
        value *= rising(2 * s * (N + 1 - i) + suffix, mi);
    }
    return value;
}

double mu_prime(const std::vector<int>& m, const ModelParams& p)
{
    const int N = static_cast<int>(m.size());
    const double s = p.s;
    const double rho_R = p.rho_R();
    double sum = 0.0;
    std::vector<int> eta(N, 0);
    while (true) {
        int total_eta = 0, total_m = 0;
        for (int i = 0; i < N; ++i) {
            total_eta += eta[i];
            total_m += m[i];
        }
        double term = std::pow(rho_R, total_m - total_eta) * std::pow(p.delta(), total_eta) /
                      rising(2 * s * (N + 1), total_eta);
        int suffix = total_eta;
        for (int i = 1; i <= N; ++i) {
            const int e = eta[i - 1];
            suffix -= e;
            term *= rising(2 * s, m[i - 1]) / (factorial(e) * factorial(m[i - 1] - e));
            term *= rising(2 * s * (N + 1 - i) + suffix, e);
        }
        sum += term;
        int i = 0;
        while (i < N && eta[i] == m[i]) eta[i++] = 0;
        if (i == N) break;
        ++eta[i];
    }
    return sum;
}

Eigen::VectorXd detailed_balance_weights(const FockBasis& basis, double s)
{
    Eigen::VectorXd d(basis.dimension());
    for (std::size_t c = 0; c < basis.dimension(); ++c) {
        double v = 1.0;
        for (int mi : basis.occupation(c)) v *= factorial(mi) / rising(2 * s, mi);
        d(c) = v;
    }
    return d;
}

// ---------------------------------------------------------------------------

double generator_transpose_residual(const ModelParams& p, const FockBasis& basis)
{
    const MatrixD H = build_H(p, basis).matrix;
    const int M = basis.cutoff();
    double worst = 0.0;
    for (std::size_t c : basis.interior(0)) {
        const Occupation m(basis.occupation(c));
        Eigen::VectorXd L = Eigen::VectorXd::Zero(basis.dimension());
        L(c) = -holding_rate(m, p);
        for (const Jump& j : enumerate_jumps(m, p, M)) {
            if (!basis.contains(j.next.m)) continue;
            L(basis.index(j.next.m)) += j.rate;
        }
        worst = std::max(worst, (L + H.col(c)).cwiseAbs().maxCoeff());
    }
    return worst;
}

double column_sum_residual(const ModelParams& p, const FockBasis& basis)
{
    const MatrixD H = build_H(p, basis).matrix;
    const int M = basis.cutoff();
    const int N = basis.sites();
    double worst = 0.0;
    for (std::size_t c : basis.interior(0)) {
        const auto m = basis.occupation(c);
        const double tail = log_series_tail(p.beta_L, M - m[0] + 1) + log_series_tail(p.beta_R, M - m[N - 1] + 1);
        worst = std::max(worst, std::fabs(H.col(c).sum() - tail));
    }
    return worst;
}

double duality_function(const Occupation& m, const DualConfig& xi, const ModelParams& p)
{
    const int N = m.size();
    if (xi.size() != N + 2) throw std::domain_error("dual configuration length mismatch");
    double value = std::pow(p.rho_L(), xi[0]) * std::pow(p.rho_R(), xi[N + 1]);
    for (int i = 1; i <= N; ++i) {
        const int x = xi[i];
        const int mi = m[i - 1];
        if (x > mi) return 0.0;
        value *= rising(mi - x + 1.0, x) / rising(2 * p.s, x);
    }
    return value;
}

double duality_check(const Occupation& m, const DualConfig& xi, const ModelParams& p)
{
    const int N = m.size();
    const double s = p.s;
    const double D0 = duality_function(m, xi, p);

    // Generator of the process on D(., xi).
    double lhs = 0.0;
    for (const Jump& j : enumerate_jumps(m, p, 0)) lhs += j.rate * (duality_function(j.next, xi, p) - D0);
    for (int side = 0; side < 2; ++side) {
        const int site = side == 0 ? 0 : N - 1;
        const double beta = side == 0 ? p.beta_L : p.beta_R;
        // D(m + k e_site) is a polynomial in k of degree xi_site, so the terms decay like beta^k k^deg.
        const int degree = xi[site + 1];
        Occupation next = m;
        double bk = 1.0;
        for (int k = 1; k < 100000; ++k) {
            bk *= beta;
            next[site] = m[site] + k;
            const double diff = duality_function(next, xi, p) - D0;
            const double term = bk / k * diff;
            lhs += term;
            const double bound = bk / k * (std::fabs(diff) + std::fabs(D0)) / (1.0 - beta);
            if (k > degree / (1.0 - beta) + 1 && bound < 1e-14 * (1.0 + std::fabs(lhs))) break;
        }
    }

    // Dual generator on D(m, .).
    double rhs = 0.0;
    DualConfig next = xi;
    for (int i = 1; i <= N; ++i) {
        const int n = xi[i];
        for (int k = 1; k <= n; ++k) {
            const double rate = phi(k, n, s);
            for (int dir : {-1, 1}) {
                next[i] = n - k;
                next[i + dir] = xi[i + dir] + k;
                rhs += rate * (duality_function(m, next, p) - D0);
                next[i + dir] = xi[i + dir];
            }
            next[i] = n;
        }
    }
    return std::fabs(lhs - rhs);
}

MappingResult mapping_check(const ModelParams& p, double rho_eq, const FockBasis& basis)
{
    p.validate();
    if (!(rho_eq > 0.0)) throw std::domain_error("rho_eq must be positive");
    const double s = p.s;
    const std::vector<std::size_t> idx = basis.interior(0);
    const Eigen::Index n = static_cast<Eigen::Index>(idx.size());

    const MatrixD A = exp_total_raising(basis, s, p.rho_R()) * build_W(p, basis).matrix *
                      exp_total_raising(basis, s, -rho_eq);
    const MatrixD Hp = build_transformed(p, basis).H_prime.matrix;
    const MatrixD Heq = build_transformed(equilibrium_params(p, rho_eq), basis).H_prime.matrix;

    auto block = [&](const MatrixD& X) {
        MatrixD B(n, n);
        for (Eigen::Index c = 0; c < n; ++c)
            for (Eigen::Index r = 0; r < n; ++r) B(r, c) = X(idx[r], idx[c]);
        return B;
    };
    const MatrixD Ab = block(A);
    for (Eigen::Index c = 0; c < n; ++c)
        if (std::fabs(Ab(c, c) - 1.0) > 1e-12) throw std::runtime_error("mapping operator is not unitriangular");
    const Eigen::PartialPivLU<MatrixD> lu(Ab);

    MappingResult out;
    out.operator_residual = (block(Heq) - lu.solve(block(Hp) * Ab)).cwiseAbs().maxCoeff();
    out.identity_residual = (Ab - MatrixD::Identity(n, n)).cwiseAbs().maxCoeff();

    Eigen::VectorXd v_eq(n), v(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto m = basis.occupation(idx[r]);
        double w = 1.0;
        for (int mi : m) w *= rising(2 * s, mi) / factorial(mi);
        v_eq(r) = w * std::pow(rho_eq, basis.total(idx[r]));
        v(r) = w * factorial_moment(FactorialIndex(m), p);
    }
    out.vector_residual = (Ab * v_eq - v).cwiseAbs().maxCoeff();
    return out;
}

IntertwinerResult intertwiner_check(const Rational& rho, const Rational& s, int M)
{
    using Poly = std::vector<Rational>;  // coefficients of rho^0..rho^{M+1}
    const int D = M + 2;
    auto monomial = [&](int n, const Rational& c) {
        Poly q(D, Rational(0));
        if (n >= 0 && n < D) q[n] = c;
        return q;
    };
    auto derivative = [&](const Poly& q) {
        Poly r(D, Rational(0));
        for (int j = 1; j < D; ++j) r[j - 1] = j * q[j];
        return r;
    };
    auto times_rho = [&](const Poly& q) {
        Poly r(D, Rational(0));
        for (int j = 0; j + 1 < D; ++j) r[j + 1] = q[j];
        return r;
    };
    auto axpy = [&](Poly a, const Poly& b, const Rational& c) {
        for (int j = 0; j < D; ++j) a[j] += c * b[j];
        return a;
    };
    auto evaluate = [&](const Poly& q) {
        Rational v = 0, x = 1;
        for (int j = 0; j < D; ++j, x *= rho) v += q[j] * x;
        return v;
    };

    IntertwinerResult out{Rational(0), Rational(0)};
    for (int n = 0; n <= M; ++n) {
        const Poly I_n = monomial(n, 1);
        // script S0 = rho d + s, script S- = d, script S+ = rho (rho d + 2s)
        const Poly s0 = axpy(times_rho(derivative(I_n)), I_n, s);
        const Poly sm = derivative(I_n);
        const Poly sp = times_rho(axpy(times_rho(derivative(I_n)), I_n, 2 * s));
        // I applied to S_a |n>
        const Poly r0 = monomial(n, n + s);
        const Poly rm = monomial(n - 1, Rational(n));
        const Poly rp = monomial(n + 1, n + 2 * s);
        for (const auto& [a, b] : {std::pair{&s0, &r0}, std::pair{&sm, &rm}, std::pair{&sp, &rp}}) {
            const Poly diff = axpy(*a, *b, -1);
            for (const Rational& c : diff) out.coefficient_residual = std::max<Rational>(out.coefficient_residual, abs(c));
            out.value_residual = std::max<Rational>(out.value_residual, abs(evaluate(diff)));
        }
    }
    return out;
}

}  // namespace harmonic
