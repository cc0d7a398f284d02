// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Heavy campaigns (hunts and sweeps at n up to 12) run once and are
// shared across criteria; pass --only 1,2,... to run a subset and --workers N
// to size the pool.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qaev/evolution.hpp"
#include "qaev/experiments.hpp"
#include "qaev/fits.hpp"
#include "qaev/hamiltonian.hpp"
#include "qaev/instances.hpp"
#include "qaev/rng.hpp"

using namespace qaev;
using Clock = std::chrono::steady_clock;

namespace {

std::uint64_t kMasterSeed = 20260808;

struct Checker {
    bool ok = true;
    std::string details;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            if (!details.empty()) details += "; ";
            details += "FAILED: " + what;
        } else {
            if (!details.empty()) details += "; ";
            details += what;
        }
    }
};

struct Suite {
    std::set<int> only;
    int workers = 0;
    int failures = 0;
    double max_default_tol_drift = 0.0;  // criterion 2 accumulator

    // Shared campaign caches.
    std::optional<MedianTimeTable> ec3_hunts;
    std::optional<FitResult> ec3_quadratic;
    std::optional<SweepResult> ec3_sweep;

    bool wants(int criterion) const { return only.empty() || only.count(criterion) > 0; }

    void track_drift(double drift) {
        max_default_tol_drift = std::max(max_default_tol_drift, drift);
    }

    void report(int criterion, const std::string& title, const Checker& c) {
        std::printf("[%s] criterion %d: %s%s%s\n", c.ok ? "PASS" : "FAIL", criterion,
                    title.c_str(), c.details.empty() ? "" : " -- ", c.details.c_str());
        std::fflush(stdout);
        if (!c.ok) ++failures;
    }

    const MedianTimeTable& hunt_table() {
        if (!ec3_hunts) {
            std::fprintf(stderr, "... running EC3 hunt campaign (n=7..12, 50 instances per n)\n");
            ec3_hunts = median_time_experiment({ProblemKind::ec3, false}, 7, 12, 50, kMasterSeed,
                                               {}, workers);
            track_drift(ec3_hunts->max_norm_drift);
        }
        return *ec3_hunts;
    }

    const FitResult& quadratic_fit() {
        if (!ec3_quadratic) ec3_quadratic = fit(FitModel::quadratic, hunt_table().median_points());
        return *ec3_quadratic;
    }

    const SweepResult& plain_sweep() {
        if (!ec3_sweep) {
            std::fprintf(stderr, "... running EC3 sweep at fitted T(n) (n=7..12, 100 per n)\n");
            SweepOptions opts;
            opts.workers = workers;
            ec3_sweep = probability_sweep({ProblemKind::ec3, false}, 7, 12, quadratic_fit(), 100,
                                          kMasterSeed, opts);
            track_drift(ec3_sweep->max_norm_drift);
        }
        return *ec3_sweep;
    }
};

std::string fmt(double x) { return format_real(x); }

// 20 small instances across the generators for criteria 1 and 4.
std::vector<Instance> small_instance_set() {
    std::vector<Instance> out;
    int i = 0;
    auto add = [&](ProblemKind kind, int n, int count) {
        for (int k = 0; k < count; ++k) {
            Rng rng(derive_seed(kMasterSeed, "acceptance/small", n, static_cast<std::uint64_t>(i++)));
            out.push_back(generate(kind, n, rng));
        }
    };
    add(ProblemKind::ec3, 4, 8);
    add(ProblemKind::ec2, 3, 4);
    add(ProblemKind::ec2, 4, 4);
    add(ProblemKind::ec3multi, 4, 4);
    return out;
}

double log_median_slope(const std::vector<SweepSummary>& summaries) {
    std::vector<std::pair<double, double>> pts;
    for (const SweepSummary& s : summaries) pts.emplace_back(double(s.n), std::log(s.median));
    return fit(FitModel::linear, pts).coefficients[1];
}

const SweepSummary* summary_at(const SweepResult& sweep, int n) {
    for (const SweepSummary& s : sweep.summaries)
        if (s.n == n) return &s;
    return nullptr;
}

// Residual sum of squares of an arbitrary prediction against data, in linear
// or log space.
double rss_against(const FitResult& model, const std::vector<std::pair<double, double>>& pts,
                   bool log_space) {
    double rss = 0;
    for (const auto& [n, y] : pts) {
        const double predicted = model(n);
        const double d = log_space ? std::log(y) - std::log(predicted) : y - predicted;
        rss += d * d;
    }
    return rss;
}

void criterion_1_oracle(Suite& suite) {
    Checker c;
    double worst = 0;
    const auto instances = small_instance_set();
    for (const Instance& inst : instances) {
        const DiagonalProblem diag = build_problem(inst);
        const BitDegrees deg = build_degrees(inst);
        for (const double t_total : {1.0, 5.0, 20.0}) {
            EvolutionConfig cfg;
            cfg.T = t_total;
            const EvolutionResult r = evolve(diag, deg, inst.satisfying, cfg);
            suite.track_drift(r.final_norm_drift);
            const StateVector oracle = dense_oracle_evolve(inst, t_total);
            worst = std::max(worst, (r.final_state - oracle).cwiseAbs().maxCoeff());
        }
    }
    c.require(worst < 1e-4, "max |adaptive - oracle| = " + fmt(worst) + " over " +
                                std::to_string(instances.size() * 3) + " runs (tol 1e-4)");
    suite.report(1, "adaptive integrator matches the dense oracle at n <= 4", c);
}

void criterion_3_adiabatic(Suite& suite) {
    Checker c;
    Rng rng(derive_seed(kMasterSeed, "acceptance/adiabatic", 4, 0));
    const Instance inst = generate_ec3_unique(4, rng);
    EvolutionConfig cfg;
    cfg.T = 1000.0;
    const EvolutionResult r = evolve(build_problem(inst), build_degrees(inst), inst.satisfying, cfg);
    suite.track_drift(r.final_norm_drift);
    c.require(r.success_probability > 0.99,
              "P(T=1000) = " + fmt(r.success_probability) + " (> 0.99 required)");
    suite.report(3, "adiabatic limit reached on a unique-assignment instance", c);
}

void criterion_4_baseline(Suite& suite) {
    Checker c;
    double worst = 0;
    int runs = 0;
    auto check_instance = [&](const Instance& inst) {
        EvolutionConfig cfg;  // T = 0
        const EvolutionResult r =
            evolve(build_problem(inst), build_degrees(inst), inst.satisfying, cfg);
        const double expect =
            static_cast<double>(inst.satisfying.size()) / static_cast<double>(inst.dim());
        worst = std::max(worst, std::abs(r.success_probability - expect));
        ++runs;
    };
    for (const Instance& inst : small_instance_set()) check_instance(inst);
    for (int n = 5; n <= 10; ++n) {
        Rng rng(derive_seed(kMasterSeed, "acceptance/baseline", n, 0));
        check_instance(generate(n % 2 ? ProblemKind::ec3 : ProblemKind::ec2, n, rng));
        Rng rng2(derive_seed(kMasterSeed, "acceptance/baseline-multi", n, 1));
        if (n >= 8) check_instance(generate(ProblemKind::ec3multi, n, rng2));
    }
    c.require(worst <= 1e-12, "max |P(0) - k/2^n| = " + fmt(worst) + " over " +
                                  std::to_string(runs) + " instances (tol 1e-12)");
    suite.report(4, "T=0 probability equals the counting baseline", c);
}

void criterion_5_anchors(Suite& suite) {
    Checker c;
    const MedianTimeTable& table = suite.hunt_table();
    double median7 = 0, median11 = 0;
    int excluded = 0;
    for (const MedianTimeRow& row : table.rows) {
        excluded += row.excluded;
        if (row.n == 7) median7 = row.median_t;
        if (row.n == 11) median11 = row.median_t;
    }
    c.require(median7 >= 3.8 && median7 <= 7.9,
              "median T(7) = " + fmt(median7) + " in [3.8, 7.9]");
    c.require(median11 >= 8.7 && median11 <= 20.4,
              "median T(11) = " + fmt(median11) + " in [8.7, 20.4]");
    c.require(excluded == 0, std::to_string(excluded) + " hunts excluded");
    suite.report(5, "EC3 hunt medians sit on the published anchors", c);
}

void criterion_6_scaling_shape(Suite& suite) {
    Checker c;
    const auto points = suite.hunt_table().median_points();
    const FitResult expo = fit(FitModel::exponential, points);
    const FitResult& quad = suite.quadratic_fit();
    c.require(expo.coefficients[1] >= 1.10 && expo.coefficients[1] <= 1.35,
              "exponential base b = " + fmt(expo.coefficients[1]) + " in [1.10, 1.35]");
    const double rss_quad = rss_against(quad, points, false);
    const double rss_expo = rss_against(expo, points, false);
    c.require(rss_quad <= 2.0 * rss_expo,
              "quadratic rss " + fmt(rss_quad) + " <= 2 x exponential rss " + fmt(rss_expo));
    suite.report(6, "EC3 median growth is as well described by the quadratic", c);
}

void criterion_7_scrambled_control(Suite& suite) {
    Checker c;
    std::fprintf(stderr, "... running scrambled EC2 hunt campaign (n=7..11, 30 per n)\n");
    const MedianTimeTable table = median_time_experiment({ProblemKind::ec2, true}, 7, 11, 30,
                                                         kMasterSeed, {}, suite.workers);
    suite.track_drift(table.max_norm_drift);
    const auto points = table.median_points();
    c.require(points.size() == 5, "all 5 n values produced medians");

    const FitResult expo = fit(FitModel::exponential, points);
    const FitResult quad = fit(FitModel::quadratic, points);
    c.require(expo.coefficients[1] >= 1.5 && expo.coefficients[1] <= 2.0,
              "exponential base b = " + fmt(expo.coefficients[1]) + " in [1.5, 2.0]");
    const double rss_quad_log = rss_against(quad, points, true);
    const double rss_expo_log = rss_against(expo, points, true);
    c.require(rss_quad_log > 3.0 * rss_expo_log,
              "log-space rss ratio quad/exp = " + fmt(rss_quad_log / rss_expo_log) + " > 3");
    suite.report(7, "scrambled EC2 medians demand the exponential fit", c);
}

void criterion_8_sweep(Suite& suite) {
    Checker c;
    const SweepResult& sweep = suite.plain_sweep();
    c.require(sweep.summaries.size() == 6, "all 6 n values summarized");
    for (const SweepSummary& s : sweep.summaries)
        c.require(s.median >= 0.10 && s.median <= 0.16,
                  "median(n=" + std::to_string(s.n) + ") = " + fmt(s.median) + " in [0.10, 0.16]");
    const SweepSummary* s7 = summary_at(sweep, 7);
    const SweepSummary* s12 = summary_at(sweep, 12);
    c.require(s7 && s12, "order statistics available at n=7 and n=12");
    if (s7 && s12)
        c.require(s12->lowest >= 0.5 * s7->lowest,
                  "lowest(n=12) = " + fmt(s12->lowest) + " >= half of lowest(n=7) = " +
                      fmt(s7->lowest));
    suite.report(8, "success probability at fitted T(n) stays near 1/8 with no eroding floor", c);
}

void criterion_9_fixed_time(Suite& suite) {
    Checker c;
    std::fprintf(stderr, "... running fixed-T EC3 sweep (T=5.82, n=7..12, 100 per n)\n");
    SweepOptions opts;
    opts.workers = suite.workers;
    const SweepResult sweep =
        fixed_time_sweep({ProblemKind::ec3, false}, 7, 12, 5.82, 100, kMasterSeed, opts);
    suite.track_drift(sweep.max_norm_drift);

    const double slope = log_median_slope(sweep.summaries);
    c.require(slope < -0.1, "log-median slope = " + fmt(slope) + " < -0.1");
    const SweepSummary* s7 = summary_at(sweep, 7);
    const SweepSummary* s12 = summary_at(sweep, 12);
    c.require(s7 && s12, "medians available at n=7 and n=12");
    if (s7 && s12)
        c.require(s12->median < 0.5 * s7->median, "median(12) = " + fmt(s12->median) +
                                                      " < half of median(7) = " + fmt(s7->median));
    suite.report(9, "a constant run time decays exponentially with n", c);
}

void criterion_10_scrambled_sweep(Suite& suite) {
    Checker c;
    const SweepResult& plain = suite.plain_sweep();
    std::fprintf(stderr, "... running scrambled EC3 sweep at fitted T(n) (n=7..12, 100 per n)\n");
    SweepOptions opts;
    opts.workers = suite.workers;
    const SweepResult scram = scrambled_sweep({ProblemKind::ec3, false}, 7, 12,
                                              suite.quadratic_fit(), 100, kMasterSeed, opts);
    suite.track_drift(scram.max_norm_drift);

    const double slope = log_median_slope(scram.summaries);
    c.require(slope < 0.0, "log-median slope = " + fmt(slope) + " < 0");
    for (int n = 9; n <= 12; ++n) {
        const SweepSummary* s = summary_at(scram, n);
        const SweepSummary* p = summary_at(plain, n);
        if (!s || !p) {
            c.require(false, "missing summary at n=" + std::to_string(n));
            continue;
        }
        c.require(s->median < p->median, "scrambled median(" + std::to_string(n) + ") = " +
                                             fmt(s->median) + " < plain " + fmt(p->median));
    }
    suite.report(10, "scrambling the diagonal destroys the fitted-time performance", c);
}

void criterion_11_multi(Suite& suite) {
    Checker c;
    std::fprintf(stderr, "... running EC3 multi-assignment sweep (n=10..12, 100 per n)\n");
    SweepOptions opts;
    opts.workers = suite.workers;
    const SweepResult sweep = probability_sweep({ProblemKind::ec3multi, false}, 10, 12,
                                                suite.quadratic_fit(), 100, kMasterSeed, opts);
    suite.track_drift(sweep.max_norm_drift);
    c.require(sweep.summaries.size() == 3, "all 3 n values summarized");
    for (const SweepSummary& s : sweep.summaries) {
        c.require(s.median >= 0.2 && s.median <= 0.5,
                  "median(n=" + std::to_string(s.n) + ") = " + fmt(s.median) + " in [0.2, 0.5]");
        c.require(s.lowest >= 0.08,
                  "lowest(n=" + std::to_string(s.n) + ") = " + fmt(s.lowest) + " >= 0.08");
    }
    suite.report(11, "multiple satisfying assignments make instances easier", c);
}

void criterion_12_invariants(Suite& suite) {
    Checker c;
    Rng rng(derive_seed(kMasterSeed, "acceptance/invariants", 0, 0));

    // Hermiticity and linearity of the matrix-free application.
    double herm_err = 0, lin_err = 0;
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 4 + static_cast<int>(uniform_below(rng, 3));  // 4..6
        Instance inst;
        inst.n = n;
        for (int i = 0; i < n; ++i) inst.clauses.push_back(random_clause(n, 3, rng));
        const DiagonalProblem diag = build_problem(inst);
        const BitDegrees deg = build_degrees(inst);
        const double s = uniform_unit(rng);
        StateVector psi(inst.dim()), phi(inst.dim());
        for (Index z = 0; z < inst.dim(); ++z) {
            psi[z] = {uniform_unit(rng) - 0.5, uniform_unit(rng) - 0.5};
            phi[z] = {uniform_unit(rng) - 0.5, uniform_unit(rng) - 0.5};
        }
        psi.normalize();
        phi.normalize();
        const StateVector h_psi = apply_hamiltonian(s, diag, deg, psi);
        const StateVector h_phi = apply_hamiltonian(s, diag, deg, phi);
        herm_err = std::max(herm_err, std::abs(phi.dot(h_psi) - std::conj(psi.dot(h_phi))));
        const std::complex<double> a(0.8, -0.3), b(-0.1, 0.6);
        const StateVector combo = apply_hamiltonian(s, diag, deg, StateVector(a * psi + b * phi));
        lin_err = std::max(lin_err, (combo - (a * h_psi + b * h_phi)).cwiseAbs().maxCoeff());
    }
    c.require(herm_err < 1e-12, "hermiticity defect " + fmt(herm_err) + " < 1e-12");
    c.require(lin_err < 1e-12, "linearity defect " + fmt(lin_err) + " < 1e-12");

    // Scramble preserves the integer spectrum of the diagonal exactly.
    bool spectrum_ok = true, unique_ok = true;
    for (int trial = 0; trial < 5; ++trial) {
        Rng gen_rng(derive_seed(kMasterSeed, "acceptance/scram", 8, static_cast<std::uint64_t>(trial)));
        const Instance inst = generate_ec3_unique(8, gen_rng);
        const DiagonalProblem diag = build_problem(inst);
        const DiagonalProblem scram = scramble(diag, 1000 + static_cast<std::uint64_t>(trial));
        std::vector<std::int32_t> a(diag.energies.begin(), diag.energies.end());
        std::vector<std::int32_t> b(scram.energies.begin(), scram.energies.end());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        spectrum_ok = spectrum_ok && a == b;
        unique_ok =
            unique_ok && std::count(scram.energies.begin(), scram.energies.end(), 0) == 1;
    }
    c.require(spectrum_ok, "scramble preserves the diagonal multiset exactly");
    c.require(unique_ok, "scramble preserves the unique ground level");

    // EC2 complement symmetry.
    bool symmetry_ok = true;
    for (int trial = 0; trial < 5; ++trial) {
        Rng gen_rng(derive_seed(kMasterSeed, "acceptance/ec2", 9, static_cast<std::uint64_t>(trial)));
        const Instance inst = generate_ec2_pair(9, gen_rng);
        const Assignment mask = (Assignment(1) << inst.n) - 1;
        for (Assignment z = 0; z <= mask; ++z) {
            const bool sat_z = total_energy(inst, z) == 0;
            const bool sat_c = total_energy(inst, ~z & mask) == 0;
            symmetry_ok = symmetry_ok && sat_z == sat_c;
        }
    }
    c.require(symmetry_ok, "EC2 negation symmetry holds assignment by assignment");

    // Generation determinism, byte for byte.
    bool determinism_ok = true;
    for (const ProblemKind kind : {ProblemKind::ec3, ProblemKind::ec2, ProblemKind::ec3multi}) {
        Rng r1(123), r2(123);
        determinism_ok =
            determinism_ok && to_json(generate(kind, 8, r1)) == to_json(generate(kind, 8, r2));
    }
    c.require(determinism_ok, "identical seeds reproduce identical serialized instances");

    suite.report(12, "module invariants hold", c);
}

void criterion_2_norm(Suite& suite) {
    Checker c;
    c.require(suite.max_default_tol_drift <= 1e-3,
              "max drift " + fmt(suite.max_default_tol_drift) + " <= 1e-3 (every run)");
    c.require(suite.max_default_tol_drift <= 1e-6,
              "max drift " + fmt(suite.max_default_tol_drift) + " <= 1e-6 at default tolerance");
    suite.report(2, "norm criterion across every evolution in this suite", c);
}

// A criterion that throws is a failed criterion, not a dead suite.
template <typename Fn>
void guarded(Suite& suite, int criterion, const std::string& title, Fn&& fn) {
    try {
        fn(suite);
    } catch (const std::exception& e) {
        Checker c;
        c.require(false, std::string("uncaught error: ") + e.what());
        suite.report(criterion, title, c);
    }
}

}  // namespace

int main(int argc, char** argv) {
    Suite suite;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ',')) suite.only.insert(std::stoi(tok));
        } else if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) {
            suite.workers = std::stoi(argv[++i]);
        } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
            kMasterSeed = std::stoull(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--only 1,2,...] [--workers N] [--seed S]\n", argv[0]);
            return 64;
        }
    }

    const auto t0 = Clock::now();
    if (suite.wants(1)) guarded(suite, 1, "oracle equivalence", criterion_1_oracle);
    if (suite.wants(3)) guarded(suite, 3, "adiabatic limit", criterion_3_adiabatic);
    if (suite.wants(4)) guarded(suite, 4, "T=0 baseline", criterion_4_baseline);
    if (suite.wants(5)) guarded(suite, 5, "hunt anchors", criterion_5_anchors);
    if (suite.wants(6)) guarded(suite, 6, "scaling shape", criterion_6_scaling_shape);
    if (suite.wants(7)) guarded(suite, 7, "scrambled control", criterion_7_scrambled_control);
    if (suite.wants(8)) guarded(suite, 8, "fitted-time sweep", criterion_8_sweep);
    if (suite.wants(9)) guarded(suite, 9, "fixed-time decay", criterion_9_fixed_time);
    if (suite.wants(10)) guarded(suite, 10, "scrambled sweep", criterion_10_scrambled_sweep);
    if (suite.wants(11)) guarded(suite, 11, "multi-assignment sweep", criterion_11_multi);
    if (suite.wants(12)) guarded(suite, 12, "module invariants", criterion_12_invariants);
    if (suite.wants(2)) guarded(suite, 2, "norm criterion", criterion_2_norm);

    const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("%d criterion(s) failed; %.1f s elapsed\n", suite.failures, elapsed);
    return suite.failures;
}
