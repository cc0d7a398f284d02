#pragma once

#include <cstdint>
#include <vector>

#include "qaev/common.hpp"
#include "qaev/hamiltonian.hpp"
#include "qaev/instances.hpp"

namespace qaev {

struct EvolutionConfig {
    double T = 0.0;                     // total run time, inverse clause-energy units
    double local_error_tol = 1e-6;      // per-step local error relative to the state norm
    double norm_drift_limit = 1e-3;     // end-to-end |norm^2 - 1| acceptance bound
    std::int64_t max_steps = 10'000'000;
};

struct EvolutionResult {
    StateVector final_state;
    double success_probability = 0.0;   // not renormalized
    std::int64_t steps_taken = 0;       // accepted steps
    double final_norm_drift = 0.0;      // |norm^2 - 1| at t = T
};

// Sum of |psi[w]|^2 over the satisfying assignments, taken as-is (the
// residual norm drift is part of the measurement, not divided out).
double success_probability(const StateVector& psi, const std::vector<Assignment>& satisfying);

// Integrates d psi / dt = -i [(1 - t/T) H_B + (t/T) H_P] psi from the uniform
// superposition to t = T with an embedded Dormand-Prince 5(4) pair, PI step
// control, and no renormalization. Throws AccuracyError if the final norm
// drift exceeds the configured limit and BudgetError past max_steps.
EvolutionResult evolve(const DiagonalProblem& diag, const BitDegrees& deg,
                       const std::vector<Assignment>& satisfying, const EvolutionConfig& config);

// Validation oracle: builds the dense 2^n x 2^n interpolated Hamiltonian
// directly from the clause list and integrates with fixed-step classical RK4
// (stage times t, t+h/2, t+h). substeps <= 0 picks max(2000, 2000*T).
// Deliberately shares nothing with the adaptive matrix-free path.
StateVector dense_oracle_evolve(const Instance& instance, double T, std::int64_t substeps = 0);

}  // namespace qaev
