#include "qaev/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace qaev {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// 5th-order weights minus the embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Step controller constants (PI stabilized). Acceptance is error-per-unit-
// step: a step of size h gets the budget tol * h / T, so the accumulated
// local error over the whole run stays at the tolerance and the norm drift
// lands well below it for any T.
constexpr double kSafety = 0.9;
constexpr double kMinShrink = 0.2;   // h never shrinks below h/5 per step
constexpr double kMaxGrow = 10.0;    // nor grows beyond 10h
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.25 - kBeta * 0.75;  // the budget scales with h: effective order 4

constexpr std::complex<double> kMinusI{0.0, -1.0};

}  // namespace

double success_probability(const StateVector& psi, const std::vector<Assignment>& satisfying) {
    double p = 0.0;
    for (Assignment w : satisfying) {
        if (static_cast<Index>(w) >= psi.size())
            throw ConfigError("satisfying assignment outside state dimension");
        p += std::norm(psi[static_cast<Index>(w)]);
    }
    return p;
}

EvolutionResult evolve(const DiagonalProblem& diag, const BitDegrees& deg,
                       const std::vector<Assignment>& satisfying, const EvolutionConfig& config) {
    if (config.T < 0) throw ConfigError("evolution time must be nonnegative");
    if (config.local_error_tol <= 0 || config.norm_drift_limit <= 0)
        throw ConfigError("tolerances must be positive");
    if (deg.n() != diag.n) throw ConfigError("evolve: degree/diagonal dimension mismatch");

    const double T = config.T;
    StateVector psi = initial_state(diag.n);

    EvolutionResult result;
    if (T == 0.0) {
        result.success_probability = success_probability(psi, satisfying);
        result.final_state = std::move(psi);
        return result;
    }

    const Index dim = psi.size();
    StateVector k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
    StateVector stage(dim), ynew(dim), yerr(dim);

    const auto deriv = [&](double t, const StateVector& y, StateVector& out) {
        apply_hamiltonian(t / T, diag, deg, y, out);
        out *= kMinusI;
    };

    double t = 0.0;
    double h = std::min(T, std::max(1e-6, T / 1000.0));
    double facold = 1e-4;
    double psi_norm = 1.0;
    bool last = false;
    std::int64_t accepted = 0;

    deriv(0.0, psi, k1);

    for (std::int64_t attempts = 0;; ++attempts) {
        if (attempts >= config.max_steps)
            throw BudgetError("evolve: step budget " + std::to_string(config.max_steps) +
                              " exhausted at t = " + std::to_string(t));
        if (h < 1e-14 * T)
            throw AccuracyError("evolve: step size underflow at t = " + std::to_string(t));
        if (t + 1.01 * h >= T) {
            h = T - t;
            last = true;
        }

        stage = psi + (h * a21) * k1;
        deriv(t + c2 * h, stage, k2);
        stage = psi + (h * a31) * k1 + (h * a32) * k2;
        deriv(t + c3 * h, stage, k3);
        stage = psi + (h * a41) * k1 + (h * a42) * k2 + (h * a43) * k3;
        deriv(t + c4 * h, stage, k4);
        stage = psi + (h * a51) * k1 + (h * a52) * k2 + (h * a53) * k3 + (h * a54) * k4;
        deriv(t + c5 * h, stage, k5);
        stage = psi + (h * a61) * k1 + (h * a62) * k2 + (h * a63) * k3 + (h * a64) * k4 +
                (h * a65) * k5;
        deriv(t + h, stage, k6);
        ynew = psi + (h * b1) * k1 + (h * b3) * k3 + (h * b4) * k4 + (h * b5) * k5 + (h * b6) * k6;
        deriv(t + h, ynew, k7);  // FSAL: becomes k1 of the next step
        yerr = (h * e1) * k1 + (h * e3) * k3 + (h * e4) * k4 + (h * e5) * k5 + (h * e6) * k6 +
               (h * e7) * k7;

        const double ynew_norm = ynew.norm();
        const double scale =
            config.local_error_tol * (h / T) * std::max(psi_norm, ynew_norm);
        double err = yerr.norm() / scale;
        if (!std::isfinite(err)) err = 2.0;  // force rejection and shrink

        const double fac11 = std::pow(err, kExpo);
        if (err <= 1.0) {
            facold = std::max(err, 1e-4);
            t += h;
            psi.swap(ynew);
            psi_norm = ynew_norm;
            k1.swap(k7);
            ++accepted;
            if (last) break;
            double fac = fac11 * std::pow(facold, -kBeta);
            fac = std::max(1.0 / kMaxGrow, std::min(1.0 / kMinShrink, fac / kSafety));
            h = h / fac;
        } else {
            h = h / std::min(1.0 / kMinShrink, fac11 / kSafety);
            last = false;
        }
    }

    const double drift = std::abs(psi.squaredNorm() - 1.0);
    if (drift > config.norm_drift_limit)
        throw AccuracyError("evolve: norm drift " + std::to_string(drift) + " exceeds limit " +
                            std::to_string(config.norm_drift_limit) +
                            "; retry with a tighter local tolerance");

    result.success_probability = success_probability(psi, satisfying);
    result.final_state = std::move(psi);
    result.steps_taken = accepted;
    result.final_norm_drift = drift;
    return result;
}

StateVector dense_oracle_evolve(const Instance& instance, double T, std::int64_t substeps) {
    if (instance.n > 6) throw ConfigError("dense oracle is limited to n <= 6");
    if (T < 0) throw ConfigError("evolution time must be nonnegative");

    using Matrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;
    const Index dim = instance.dim();

    // Dense transverse term assembled clause by clause, and the diagonal
    // evaluated per assignment; nothing shared with the matrix-free kernel.
    Matrix hb = Matrix::Zero(dim, dim);
    for (const Clause& c : instance.clauses)
        for (int bit : c.bits) {
            const Index mask = Index(1) << (bit - 1);
            for (Index z = 0; z < dim; ++z) {
                hb(z, z) += 0.5;
                hb(z, z ^ mask) -= 0.5;
            }
        }
    RealVector hp(dim);
    for (Index z = 0; z < dim; ++z)
        hp[z] = static_cast<double>(total_energy(instance, static_cast<Assignment>(z)));

    StateVector psi =
        StateVector::Constant(dim, std::complex<double>(1.0 / std::sqrt(double(dim)), 0.0));
    if (T == 0.0) return psi;

    const std::int64_t n_steps =
        substeps > 0 ? substeps : std::max<std::int64_t>(2000, std::llround(2000.0 * T));
    const double h = T / static_cast<double>(n_steps);

    const auto deriv = [&](double t, const StateVector& y) -> StateVector {
        const double s = t / T;
        return kMinusI * ((1.0 - s) * (hb * y) + s * (hp.array() * y.array()).matrix());
    };

    StateVector k1(dim), k2(dim), k3(dim), k4(dim);
    for (std::int64_t step = 0; step < n_steps; ++step) {
        const double t = static_cast<double>(step) * h;
        k1 = deriv(t, psi);
        k2 = deriv(t + 0.5 * h, psi + (0.5 * h) * k1);
        k3 = deriv(t + 0.5 * h, psi + (0.5 * h) * k2);
        k4 = deriv(t + h, psi + h * k3);
        psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return psi;
}

}  // namespace qaev
