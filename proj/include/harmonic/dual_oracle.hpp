#pragma once

// First-step analysis of the absorbing dual chain on sites 0..N+1 at fixed
// particle number. Independent of the closed forms in exact.hpp.

#include <cstddef>
#include <map>
#include <vector>

#include "harmonic/exact.hpp"
#include "harmonic/model.hpp"

namespace harmonic {

/// All multisets of P positions in {0..N+1}, as nondecreasing tuples in
/// lexicographic order.
struct DualStateSpace {
    int N = 0;
    int P = 0;
    std::vector<std::vector<int>> states;
    std::vector<bool> absorbed;   // every particle on site 0 or N+1
    std::map<std::vector<int>, std::size_t> index;

    std::size_t size() const { return states.size(); }
    std::size_t index_of(const std::vector<int>& positions) const;
    /// Index of the absorbed state with k particles on site 0.
    std::size_t absorbed_index(int k) const;
    /// Occupation vector (xi_0..xi_{N+1}) of state i.
    DualConfig config(std::size_t i) const;
};

inline constexpr std::size_t kDualStateCeiling = 2000000;

/// Throws std::length_error when C(P+N+1, N+1) exceeds the ceiling.
DualStateSpace enumerate_dual_states(int P, int N, std::size_t ceiling = kDualStateCeiling);

/// Dense generator of the dual chain on a fixed-P sector, row-major.
template <class T>
struct DualGenerator {
    DualStateSpace space;
    std::vector<T> rates;  // rates[i*n + j], diagonal holds minus the exit rate

    const T& operator()(std::size_t i, std::size_t j) const { return rates[i * space.size() + j]; }
};

DualGenerator<double> build_dual_generator(const DualStateSpace& space, double s);
DualGenerator<Rational> build_dual_generator_exact(const DualStateSpace& space, const Rational& s);

/// Solves A X = B in place by Gaussian elimination (partial pivoting for
/// floating types, first nonzero pivot otherwise). A is n x n, B is n x r,
/// both row-major. Throws std::runtime_error on a singular system.
template <class T>
void gauss_solve(std::vector<T>& A, std::vector<T>& B, std::size_t n, std::size_t r);

/// p(k) for k = 0..|xi| from the linear first-step system.
AbsorptionDistribution absorption_oracle(const FactorialIndex& xi, const ModelParams& p);
std::vector<Rational> absorption_oracle_exact(const FactorialIndex& xi, const ModelParams& p);

/// sum_k rho_L^k rho_R^{|xi|-k} p_oracle(k).
double factorial_moment_oracle(const FactorialIndex& xi, const ModelParams& p);
Rational factorial_moment_oracle_exact(const FactorialIndex& xi, const ModelParams& p);

}  // namespace harmonic
