#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "qaev/evolution.hpp"

using namespace qaev;
using Complex = std::complex<double>;

namespace {

Instance seeded_instance(ProblemKind kind, int n, std::uint64_t seed) {
    Rng rng(seed);
    return generate(kind, n, rng);
}

EvolutionResult run(const Instance& inst, double t_total, double tol = 1e-6) {
    EvolutionConfig cfg;
    cfg.T = t_total;
    cfg.local_error_tol = tol;
    return evolve(build_problem(inst), build_degrees(inst), inst.satisfying, cfg);
}

}  // namespace

TEST_CASE("success_probability sums squared amplitudes over satisfying assignments") {
    StateVector psi = StateVector::Zero(8);
    psi[5] = Complex(1, 0);
    CHECK(success_probability(psi, {5}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(success_probability(psi, {1, 2}) == doctest::Approx(0.0));

    const StateVector uniform = initial_state(3);
    CHECK(success_probability(uniform, {0, 3, 6}) == doctest::Approx(3.0 / 8).epsilon(1e-14));

    Rng rng(8);
    StateVector random(16);
    for (auto& amp : random) amp = Complex(uniform_unit(rng) - 0.5, uniform_unit(rng) - 0.5);
    random.normalize();
    std::vector<Assignment> all(16);
    for (Assignment z = 0; z < 16; ++z) all[z] = z;
    CHECK(success_probability(random, all) == doctest::Approx(1.0).epsilon(1e-13));

    CHECK_THROWS_AS(success_probability(uniform, {8}), ConfigError);
}

TEST_CASE("T=0 returns the initial state and the counting probability") {
    const Instance inst = seeded_instance(ProblemKind::ec3, 6, 100);
    const EvolutionResult r = run(inst, 0.0);
    CHECK(r.steps_taken == 0);
    CHECK(r.final_norm_drift == 0.0);
    CHECK((r.final_state - initial_state(6)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.success_probability ==
          doctest::Approx(double(inst.satisfying.size()) / 64.0).epsilon(1e-14));
}

TEST_CASE("adiabatic limit: slow evolution finds the unique assignment") {
    const Instance inst = seeded_instance(ProblemKind::ec3, 4, 7);
    REQUIRE(inst.satisfying.size() == 1);
    const EvolutionResult r = run(inst, 1000.0);
    CHECK(r.success_probability > 0.99);
    CHECK(r.final_norm_drift <= 1e-6);
}

TEST_CASE("adaptive integrator matches the dense fixed-step oracle") {
    Rng rng(300);
    for (int trial = 0; trial < 3; ++trial) {
        const Instance inst =
            seeded_instance(trial == 1 ? ProblemKind::ec2 : ProblemKind::ec3, 4, 300 + trial);
        for (const double t_total : {1.0, 5.0, 20.0}) {
            const EvolutionResult adaptive = run(inst, t_total);
            const StateVector oracle = dense_oracle_evolve(inst, t_total);
            CHECK((adaptive.final_state - oracle).cwiseAbs().maxCoeff() < 1e-4);
            CHECK(adaptive.final_norm_drift <= 1e-6);
        }
    }
}

TEST_CASE("dense oracle self-consistency") {
    const Instance inst = seeded_instance(ProblemKind::ec3, 4, 11);
    CHECK((dense_oracle_evolve(inst, 0.0) - initial_state(4)).cwiseAbs().maxCoeff() == 0.0);

    const StateVector coarse = dense_oracle_evolve(inst, 5.0, 8000);
    const StateVector fine = dense_oracle_evolve(inst, 5.0, 16000);
    CHECK((coarse - fine).cwiseAbs().maxCoeff() < 1e-5);

    CHECK_THROWS_AS(dense_oracle_evolve(seeded_instance(ProblemKind::ec3, 8, 1), 1.0),
                    ConfigError);
}

TEST_CASE("pure transverse evolution keeps the initial state up to a global phase") {
    // Zero diagonal: the uniform state is an eigenstate (eigenvalue 0), so
    // nothing moves and the measured pattern is the T=0 pattern.
    const Instance inst = seeded_instance(ProblemKind::ec3, 5, 21);
    DiagonalProblem diag = build_problem(inst);
    diag.energies.setZero();
    EvolutionConfig cfg;
    cfg.T = 30.0;
    const EvolutionResult r = evolve(diag, build_degrees(inst), inst.satisfying, cfg);

    const StateVector init = initial_state(5);
    const Complex phase = r.final_state[0] / init[0];
    CHECK(std::abs(std::abs(phase) - 1.0) < 1e-6);
    CHECK((r.final_state - phase * init).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(r.success_probability ==
          doctest::Approx(double(inst.satisfying.size()) / 32.0).epsilon(1e-6));
}

TEST_CASE("success probability climbs into the adiabatic limit") {
    // Not pointwise monotone, but past thresholds at increasing T.
    const Instance inst = seeded_instance(ProblemKind::ec3, 4, 7);
    CHECK(run(inst, 50.0).success_probability > 0.3);
    CHECK(run(inst, 200.0).success_probability > 0.5);
    CHECK(run(inst, 1000.0).success_probability > 0.99);
}

TEST_CASE("evolution is deterministic bit-for-bit") {
    const Instance inst = seeded_instance(ProblemKind::ec3, 5, 909);
    const EvolutionResult a = run(inst, 7.5);
    const EvolutionResult b = run(inst, 7.5);
    REQUIRE(a.final_state.size() == b.final_state.size());
    CHECK(std::memcmp(a.final_state.data(), b.final_state.data(),
                      sizeof(Complex) * static_cast<std::size_t>(a.final_state.size())) == 0);
    CHECK(a.steps_taken == b.steps_taken);
    CHECK(a.success_probability == b.success_probability);
}

TEST_CASE("norm drift stays far below the criterion at default tolerance") {
    const Instance inst = seeded_instance(ProblemKind::ec3, 6, 31);
    const EvolutionResult r = run(inst, 50.0);
    CHECK(r.final_norm_drift <= 1e-6);
    CHECK(std::abs(r.final_state.squaredNorm() - 1.0) == r.final_norm_drift);
}

TEST_CASE("evolution error paths") {
    const Instance inst = seeded_instance(ProblemKind::ec3, 5, 77);
    const DiagonalProblem diag = build_problem(inst);
    const BitDegrees deg = build_degrees(inst);

    EvolutionConfig bad_t;
    bad_t.T = -1.0;
    CHECK_THROWS_AS(evolve(diag, deg, inst.satisfying, bad_t), ConfigError);

    EvolutionConfig tiny_budget;
    tiny_budget.T = 10.0;
    tiny_budget.max_steps = 3;
    CHECK_THROWS_AS(evolve(diag, deg, inst.satisfying, tiny_budget), BudgetError);

    // A loose local tolerance cannot hold the norm to 1e-12 over a long run.
    EvolutionConfig drifty;
    drifty.T = 50.0;
    drifty.local_error_tol = 1e-3;
    drifty.norm_drift_limit = 1e-12;
    CHECK_THROWS_AS(evolve(diag, deg, inst.satisfying, drifty), AccuracyError);
}
