#include "qaev/hamiltonian.hpp"

namespace qaev {

DiagonalProblem build_problem(const Instance& instance, int cap_bits) {
    require_capacity(instance.n, cap_bits);
    DiagonalProblem diag;
    diag.n = instance.n;
    diag.energies.resize(instance.dim());
    for (Index z = 0; z < instance.dim(); ++z)
        diag.energies[z] =
            static_cast<std::int32_t>(total_energy(instance, static_cast<Assignment>(z)));
    return diag;
}

BitDegrees build_degrees(const Instance& instance) {
    BitDegrees deg;
    deg.degrees = IntVector::Zero(instance.n);
    for (const Clause& c : instance.clauses) {
        c.validate(instance.n);
        for (int b : c.bits) ++deg.degrees[b - 1];
    }
    deg.total = deg.degrees.cast<std::int64_t>().sum();
    return deg;
}

std::vector<Assignment> ground_assignments(const DiagonalProblem& diag) {
    std::vector<Assignment> zeros;
    for (Index z = 0; z < diag.dim(); ++z)
        if (diag.energies[z] == 0) zeros.push_back(static_cast<Assignment>(z));
    return zeros;
}

StateVector initial_state(int n_bits, int cap_bits) {
    require_capacity(n_bits, cap_bits);
    const Index dim = dimension(n_bits);
    const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
    return StateVector::Constant(dim, std::complex<double>(amp, 0.0));
}

DiagonalProblem scramble_with_permutation(const DiagonalProblem& diag,
                                          const std::vector<Index>& perm) {
    if (diag.scrambled) throw ConfigError("diagonal is already scrambled");
    if (static_cast<Index>(perm.size()) != diag.dim())
        throw ConfigError("permutation size does not match diagonal");
    DiagonalProblem out;
    out.n = diag.n;
    out.scrambled = true;
    out.energies.resize(diag.dim());
    for (Index z = 0; z < diag.dim(); ++z) out.energies[z] = diag.energies[perm[z]];
    return out;
}

DiagonalProblem scramble(const DiagonalProblem& diag, std::uint64_t seed) {
    if (diag.scrambled) throw ConfigError("diagonal is already scrambled");
    Rng rng(seed);
    DiagonalProblem out = scramble_with_permutation(diag, random_permutation(diag.dim(), rng));
    out.scramble_seed = seed;
    return out;
}

}  // namespace qaev
