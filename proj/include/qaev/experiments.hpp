#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qaev/evolution.hpp"
#include "qaev/fits.hpp"
#include "qaev/hamiltonian.hpp"
#include "qaev/instances.hpp"

namespace qaev {

// ---------------------------------------------------------------------------
// Problems at the experiment level: generation kind plus optional scrambling.

struct ExperimentProblem {
    ProblemKind kind = ProblemKind::ec3;
    bool scrambled = false;

    std::string label() const;  // EC3 | EC2 | EC3multi | EC3scram | EC2scram
};

ExperimentProblem experiment_problem_from_string(const std::string& name);

// ---------------------------------------------------------------------------
// Order statistics.

// Mean of the two central values for an even count.
double median(std::vector<double> values);
// 1-based k-th smallest; k is clamped to the sample size.
double kth_lowest(std::vector<double> values, int k);

// ---------------------------------------------------------------------------
// Time hunt: find T with success probability inside [0.12, 0.13].

enum class HuntFlag { in_window, bracket_jump };
std::string to_string(HuntFlag flag);

struct HuntConfig {
    double window_lo = 0.12;
    double window_hi = 0.13;
    double t_start = 1.0;
    double t_cap = 16384.0;           // doubling stops here (2^14)
    double bracket_rel_width = 1e-3;  // bisection stops when hi-lo < this * hi
    double local_error_tol = 1e-6;
    double norm_drift_limit = 1e-3;
    std::int64_t max_steps = 10'000'000;
};

struct TimeHuntResult {
    int n = 0;
    int instance_index = 0;
    std::uint64_t seed = 0;
    double t_found = 0.0;
    double probability = 0.0;  // P(t_found), inside the window iff flag == in_window
    HuntFlag flag = HuntFlag::in_window;
    std::vector<std::pair<double, double>> probe_log;  // (T, probability) in probe order
    double max_norm_drift = 0.0;
};

// Core hunt over an abstract probability curve: probe at t_start, double until
// P >= window_lo (not-found past t_cap), then bisect the bracket on that
// predicate. Returns the smallest probed T inside the window; if the bracket
// collapses without landing inside, returns the smallest probed T with
// P >= window_lo flagged bracket_jump.
TimeHuntResult hunt_time_fn(const std::function<double(double)>& probability_at,
                            const HuntConfig& config = {});

// Hunt on a concrete Hamiltonian; each probe is a full evolution.
TimeHuntResult hunt_time(const DiagonalProblem& diag, const BitDegrees& deg,
                         const std::vector<Assignment>& satisfying,
                         const HuntConfig& config = {});

// ---------------------------------------------------------------------------
// Experiment drivers. Per-instance seeds derive from (master seed, label,
// usage salt, n, index), so any instance is reproducible in isolation and
// worker scheduling never changes results. Per-instance failures (generation,
// hunt cap, accuracy) are logged and excluded, never fatal to the run.

struct MedianTimeRow {
    int n = 0;
    std::vector<TimeHuntResult> hunts;  // successes only, ordered by instance index
    double median_t = 0.0;
    int excluded = 0;
};

struct MedianTimeTable {
    ExperimentProblem problem;
    std::vector<MedianTimeRow> rows;
    double max_norm_drift = 0.0;
    std::vector<std::string> exclusion_log;

    std::vector<std::pair<double, double>> median_points() const;  // (n, median T)
};

MedianTimeTable median_time_experiment(ExperimentProblem problem, int n_lo, int n_hi,
                                       int instances_per_n, std::uint64_t master_seed,
                                       const HuntConfig& config = {}, int workers = 0);

struct SweepRecord {
    std::string problem;
    int n = 0;
    int instance_index = 0;
    std::uint64_t seed = 0;
    double t_used = 0.0;
    double probability = 0.0;
};

struct SweepSummary {
    int n = 0;
    int count = 0;
    double median = 0.0;
    double tenth_lowest = 0.0;  // 10th smallest probability (clamped for small counts)
    double lowest = 0.0;
};

struct SweepResult {
    ExperimentProblem problem;
    std::vector<SweepRecord> records;
    std::vector<SweepSummary> summaries;
    double max_norm_drift = 0.0;
    std::vector<std::string> exclusion_log;
};

struct SweepOptions {
    double local_error_tol = 1e-6;
    double norm_drift_limit = 1e-3;
    std::int64_t max_steps = 10'000'000;
    int workers = 0;  // 0 -> hardware concurrency
};

// One evolution per fresh instance at T = t_of_n(n); aggregates per-n order
// statistics. Scrambled problems reuse the unscrambled generation seeds (the
// control runs the same instances through a scrambled diagonal).
SweepResult probability_sweep(ExperimentProblem problem, int n_lo, int n_hi,
                              const FitResult& t_of_n, int instances_per_n,
                              std::uint64_t master_seed, const SweepOptions& options = {});

SweepResult fixed_time_sweep(ExperimentProblem problem, int n_lo, int n_hi, double t_fixed,
                             int instances_per_n, std::uint64_t master_seed,
                             const SweepOptions& options = {});

SweepResult scrambled_sweep(ExperimentProblem problem, int n_lo, int n_hi,
                            const FitResult& t_of_n, int instances_per_n,
                            std::uint64_t master_seed, const SweepOptions& options = {});

// ---------------------------------------------------------------------------
// CSV interfaces. All reals are printed with 10 significant digits.
//   hunts:     problem,n,instance_index,seed,T_found,probability,flag,probes
//   sweeps:    problem,n,instance_index,seed,T_used,probability
//   summaries: problem,n,count,median,p10th_lowest,lowest
//   fits:      problem,model,c0,c1,c2,rss   (exponential: c0=a, c1=b, c2 empty)

std::string format_real(double value);

void write_hunts_csv(const std::string& path, const MedianTimeTable& table);
void write_hunt_summary_csv(const std::string& path, const MedianTimeTable& table);
void write_sweeps_csv(const std::string& path, const SweepResult& result);
void write_sweep_summary_csv(const std::string& path, const SweepResult& result);
void write_fits_csv(const std::string& path,
                    const std::vector<std::pair<std::string, FitResult>>& fits);

// (n, median) points from a summary CSV.
std::vector<std::pair<double, double>> read_summary_points(const std::string& path);
// First row matching the model from a fits CSV.
FitResult read_fit_csv(const std::string& path, FitModel model);

// ---------------------------------------------------------------------------
// Instance-level worker pool; tasks write to disjoint slots so scheduling
// cannot reorder anything observable.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task);

}  // namespace qaev
