#include "harmonic/dual_oracle.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace harmonic {

std::size_t DualStateSpace::index_of(const std::vector<int>& positions) const
{
    auto it = index.find(positions);
    if (it == index.end()) throw std::out_of_range("positions not in dual state space");
    return it->second;
}

std::size_t DualStateSpace::absorbed_index(int k) const
{
    if (k < 0 || k > P) throw std::out_of_range("absorbed count out of range");
    std::vector<int> key(P, N + 1);
    for (int a = 0; a < k; ++a) key[a] = 0;
    return index_of(key);
}

DualConfig DualStateSpace::config(std::size_t i) const
{
    std::vector<int> counts(N + 2, 0);
    for (int x : states[i]) ++counts[x];
    return DualConfig(std::move(counts));
}

DualStateSpace enumerate_dual_states(int P, int N, std::size_t ceiling)
{
    if (P < 0) throw std::domain_error("particle number must be >= 0");
    if (N < 1) throw std::domain_error("N must be >= 1");
    // C(P+N+1, N+1) in floating point, only to guard the ceiling.
    double count = 1.0;
    for (int j = 1; j <= N + 1; ++j) count = count * (P + j) / j;
    if (count > static_cast<double>(ceiling))
        throw std::length_error("dual state space exceeds the configured ceiling");

    DualStateSpace space;
    space.N = N;
    space.P = P;
    std::vector<int> tuple(P, 0);
    while (true) {
        bool done = true;
        for (int x : tuple)
            if (x != 0 && x != N + 1) done = false;
        space.index.emplace(tuple, space.states.size());
        space.states.push_back(tuple);
        space.absorbed.push_back(done);
        // Next nondecreasing tuple in lexicographic order.
        int a = P - 1;
        while (a >= 0 && tuple[a] == N + 1) --a;
        if (a < 0) break;
        ++tuple[a];
        for (int b = a + 1; b < P; ++b) tuple[b] = tuple[a];
    }
    return space;
}

namespace {

template <class T, class Phi>
DualGenerator<T> build_generator(const DualStateSpace& space, const Phi& phi_at)
{
    const std::size_t n = space.size();
    DualGenerator<T> gen{space, std::vector<T>(n * n, T(0))};
    for (std::size_t i = 0; i < n; ++i) {
        if (space.absorbed[i]) continue;
        const DualConfig c = space.config(i);
        T exit = T(0);
        for (int site = 1; site <= space.N; ++site) {
            for (int k = 1; k <= c[site]; ++k) {
                const T r = phi_at(k, c[site]);
                for (int dir : {-1, 1}) {
                    DualConfig next = c;
                    next[site] -= k;
                    next[site + dir] += k;
                    assert(next.total() == c.total());
                    std::vector<int> key;
                    for (int x = 0; x < next.size(); ++x) key.insert(key.end(), next[x], x);
                    gen.rates[i * n + space.index_of(key)] += r;
                    exit += r;
                }
            }
        }
        gen.rates[i * n + i] -= exit;
    }
    return gen;
}

template <class T>
bool is_zero(const T& v)
{
    return v == 0;
}

template <class T>
double magnitude(const T& v)
{
    if constexpr (std::is_floating_point_v<T>) return std::fabs(static_cast<double>(v));
    else return std::fabs(v.get_d());
}

}  // namespace

DualGenerator<double> build_dual_generator(const DualStateSpace& space, double s)
{
    return build_generator<double>(space, [s](int k, int n) { return phi(k, n, s); });
}

DualGenerator<Rational> build_dual_generator_exact(const DualStateSpace& space, const Rational& s)
{
    return build_generator<Rational>(space, [&s](int k, int n) { return phi_exact<Rational>(k, n, s); });
}

template <class T>
void gauss_solve(std::vector<T>& A, std::vector<T>& B, std::size_t n, std::size_t r)
{
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = n;
        if constexpr (std::is_floating_point_v<T>) {
            double best = 0.0;
            for (std::size_t row = col; row < n; ++row)
                if (magnitude(A[row * n + col]) > best) {
                    best = magnitude(A[row * n + col]);
                    pivot = row;
                }
        } else {
            for (std::size_t row = col; row < n && pivot == n; ++row)
                if (!is_zero(A[row * n + col])) pivot = row;
        }
        if (pivot == n || is_zero(A[pivot * n + col])) throw std::runtime_error("singular first-step system");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A[col * n + j], A[pivot * n + j]);
            for (std::size_t j = 0; j < r; ++j) std::swap(B[col * r + j], B[pivot * r + j]);
        }
        const T inv = T(1) / A[col * n + col];
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || is_zero(A[row * n + col])) continue;
            const T f = A[row * n + col] * inv;
            for (std::size_t j = col; j < n; ++j) A[row * n + j] -= f * A[col * n + j];
            for (std::size_t j = 0; j < r; ++j) B[row * r + j] -= f * B[col * r + j];
        }
    }
    for (std::size_t row = 0; row < n; ++row) {
        const T inv = T(1) / A[row * n + row];
        for (std::size_t j = 0; j < r; ++j) B[row * r + j] *= inv;
    }
}

template void gauss_solve<double>(std::vector<double>&, std::vector<double>&, std::size_t, std::size_t);
template void gauss_solve<Rational>(std::vector<Rational>&, std::vector<Rational>&, std::size_t, std::size_t);

namespace {

// Absorption probabilities into each absorbed state, read off at the start state.
template <class T>
std::vector<T> solve_absorption(const DualGenerator<T>& gen, const std::vector<int>& start)
{
    const auto& space = gen.space;
    const std::size_t n = space.size();
    std::vector<std::size_t> transient;
    std::vector<std::size_t> slot(n, n);
    for (std::size_t i = 0; i < n; ++i)
        if (!space.absorbed[i]) {
            slot[i] = transient.size();
            transient.push_back(i);
        }
    const int P = space.P;
    std::vector<T> probs(P + 1, T(0));
    const std::size_t start_idx = space.index_of(start);
    if (space.absorbed[start_idx]) {
        for (int k = 0; k <= P; ++k)
            if (space.absorbed_index(k) == start_idx) probs[k] = T(1);
        return probs;
    }
    const std::size_t t = transient.size();
    const std::size_t r = static_cast<std::size_t>(P + 1);
    std::vector<T> A(t * t, T(0)), B(t * r, T(0));
    for (std::size_t a = 0; a < t; ++a) {
        const std::size_t i = transient[a];
        for (std::size_t b = 0; b < t; ++b) A[a * t + b] = gen(i, transient[b]);
        for (int k = 0; k <= P; ++k) B[a * r + k] = -gen(i, space.absorbed_index(k));
    }
    gauss_solve(A, B, t, r);
    for (int k = 0; k <= P; ++k) probs[k] = B[slot[start_idx] * r + k];
    return probs;
}

void check_oracle_input(const FactorialIndex& xi, const ModelParams& p)
{
    p.validate();
    if (xi.size() != p.N) throw std::domain_error("factorial index length must equal N");
}

}  // namespace

std::vector<Rational> absorption_oracle_exact(const FactorialIndex& xi, const ModelParams& p)
{
    check_oracle_input(xi, p);
    if (xi.total() == 0) return {Rational(1)};
    const auto space = enumerate_dual_states(xi.total(), p.N);
    const auto gen = build_dual_generator_exact(space, spin_rational(p));
    auto probs = solve_absorption(gen, xi.positions());
    for (auto& v : probs) v.canonicalize();
    return probs;
}

AbsorptionDistribution absorption_oracle(const FactorialIndex& xi, const ModelParams& p)
{
    check_oracle_input(xi, p);
    AbsorptionDistribution out;
    if (xi.total() == 0) {
        out.probs = {1.0};
        out.exact = true;
        return out;
    }
    if (p.has_rational_spin()) {
        for (const auto& v : absorption_oracle_exact(xi, p)) out.probs.push_back(to_double(v));
        out.exact = true;
    } else {
        const auto space = enumerate_dual_states(xi.total(), p.N);
        out.probs = solve_absorption(build_dual_generator(space, p.s), xi.positions());
    }
    for (double v : out.probs)
        if (v < -1e-10 || v > 1.0 + 1e-10) out.ill_conditioned = true;
    return out;
}

double factorial_moment_oracle(const FactorialIndex& xi, const ModelParams& p)
{
    const auto dist = absorption_oracle(xi, p);
    const int total = xi.total();
    double sum = 0.0;
    for (int k = 0; k <= total; ++k)
        sum += std::pow(p.rho_L(), k) * std::pow(p.rho_R(), total - k) * dist.probs[k];
    return sum;
}

Rational factorial_moment_oracle_exact(const FactorialIndex& xi, const ModelParams& p)
{
    const auto probs = absorption_oracle_exact(xi, p);
    const Rational rl = rho_rational(p.beta_L), rr = rho_rational(p.beta_R);
    const int total = xi.total();
    Rational sum = 0;
    for (int k = 0; k <= total; ++k)
        sum += detail::ipow(rl, k) * detail::ipow(rr, total - k) * probs[k];
    sum.canonicalize();
    return sum;
}

}  // namespace harmonic
