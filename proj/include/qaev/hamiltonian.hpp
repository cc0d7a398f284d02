#pragma once

#include <cstdint>
#include <vector>

#include "qaev/common.hpp"
#include "qaev/instances.hpp"
#include "qaev/rng.hpp"

namespace qaev {

// Diagonal of the problem term: energies[z] = h(z), the number of violated
// clauses (possibly evaluated through a scrambling permutation of the 2^n
// assignment labels).
struct DiagonalProblem {
    int n = 0;
    IntVector energies;
    bool scrambled = false;
    std::uint64_t scramble_seed = 0;

    Index dim() const { return dimension(n); }
};

// Per-bit clause-membership multiplicities d_i. The clause-sum form of the
// transverse term collapses to sum_i d_i * (1 - sigma_x^(i)) / 2.
struct BitDegrees {
    IntVector degrees;  // d_i at index i-1
    std::int64_t total = 0;

    int n() const { return static_cast<int>(degrees.size()); }
};

DiagonalProblem build_problem(const Instance& instance, int cap_bits = kDefaultCapacityBits);
BitDegrees build_degrees(const Instance& instance);

// Zero-energy assignments of the diagonal actually evolved. Equals the
// instance's satisfying set for an unscrambled diagonal; for a scrambled one
// these are the permuted labels, the ground states the run is measured on.
std::vector<Assignment> ground_assignments(const DiagonalProblem& diag);

// Uniform superposition over all 2^n assignments, the ground state (at
// eigenvalue 0) of the beginning Hamiltonian.
StateVector initial_state(int n_bits, int cap_bits = kDefaultCapacityBits);

// Permutes the diagonal through a uniform random permutation of all 2^n
// labels (Fisher-Yates on the stream seeded below): out[z] = in[perm[z]].
// The entry multiset, and in particular a unique zero, is preserved.
DiagonalProblem scramble(const DiagonalProblem& diag, std::uint64_t seed);

// Test hook: apply an explicit permutation instead of drawing one.
DiagonalProblem scramble_with_permutation(const DiagonalProblem& diag,
                                          const std::vector<Index>& perm);

// phi = H(s) psi without materializing the 2^n x 2^n matrix, where
//   H(s) = (1-s) * sum_i d_i (1 - sigma_x^(i)) / 2  +  s * diag(energies).
// Each (1 - sigma_x^(i))/2 acts as (psi[z] - psi[z ^ 2^(i-1)]) / 2, so the
// whole application is n+1 sweeps over the state. Works on any dense complex
// column vector type; phi must be sized to match psi.
template <typename DerivedIn, typename DerivedOut>
void apply_hamiltonian(double s, const DiagonalProblem& diag, const BitDegrees& deg,
                       const Eigen::MatrixBase<DerivedIn>& psi,
                       Eigen::MatrixBase<DerivedOut> const& phi_out) {
    using Complex = typename DerivedIn::Scalar;
    using Real = typename Complex::value_type;

    const Index dim = diag.dim();
    if (psi.size() != dim || deg.n() != diag.n)
        throw ConfigError("apply_hamiltonian: dimension mismatch");
    auto& phi = const_cast<Eigen::MatrixBase<DerivedOut>&>(phi_out);
    if (phi.size() != dim) throw ConfigError("apply_hamiltonian: output dimension mismatch");

    const Real sr = static_cast<Real>(s);
    const Real off = (Real(1) - sr) * Real(0.5) * static_cast<Real>(deg.total);
    phi.array() = (sr * diag.energies.template cast<Real>().array() + off) * psi.array();

    for (int bit = 1; bit <= diag.n; ++bit) {
        const Real coef = (Real(1) - sr) * Real(0.5) * static_cast<Real>(deg.degrees[bit - 1]);
        if (coef == Real(0)) continue;
        const Index stride = Index(1) << (bit - 1);
        for (Index base = 0; base < dim; base += 2 * stride) {
            phi.segment(base, stride) -= coef * psi.segment(base + stride, stride);
            phi.segment(base + stride, stride) -= coef * psi.segment(base, stride);
        }
    }
}

inline StateVector apply_hamiltonian(double s, const DiagonalProblem& diag, const BitDegrees& deg,
                                     const StateVector& psi) {
    StateVector phi(psi.size());
    apply_hamiltonian(s, diag, deg, psi, phi);
    return phi;
}

}  // namespace qaev
