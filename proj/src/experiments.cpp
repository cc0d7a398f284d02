#include "qaev/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "qaev/rng.hpp"

namespace qaev {

// ---------------------------------------------------------------------------
// Problems

std::string ExperimentProblem::label() const {
    if (!scrambled) return to_string(kind);
    switch (kind) {
        case ProblemKind::ec3: return "EC3scram";
        case ProblemKind::ec2: return "EC2scram";
        case ProblemKind::ec3multi: break;
    }
    throw ConfigError("scrambled variant only defined for EC3 and EC2");
}

ExperimentProblem experiment_problem_from_string(const std::string& name) {
    if (name == "EC3scram" || name == "ec3scram") return {ProblemKind::ec3, true};
    if (name == "EC2scram" || name == "ec2scram") return {ProblemKind::ec2, true};
    return {problem_kind_from_string(name), false};
}

// ---------------------------------------------------------------------------
// Order statistics

double median(std::vector<double> values) {
    if (values.empty()) throw ConfigError("median of empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

double kth_lowest(std::vector<double> values, int k) {
    if (values.empty()) throw ConfigError("order statistic of empty sample");
    std::sort(values.begin(), values.end());
    const auto idx = static_cast<std::size_t>(
        std::clamp<int>(k, 1, static_cast<int>(values.size())) - 1);
    return values[idx];
}

// ---------------------------------------------------------------------------
// Hunt

std::string to_string(HuntFlag flag) {
    return flag == HuntFlag::in_window ? "in-window" : "bracket-jump";
}

namespace {

void validate_window(const HuntConfig& config) {
    if (!(0.0 < config.window_lo && config.window_lo < config.window_hi &&
          config.window_hi < 1.0))
        throw ConfigError("hunt window must satisfy 0 < lo < hi < 1");
    if (config.t_start <= 0 || config.t_cap < config.t_start)
        throw ConfigError("hunt needs 0 < t_start <= t_cap");
}

}  // namespace

TimeHuntResult hunt_time_fn(const std::function<double(double)>& probability_at,
                            const HuntConfig& config) {
    validate_window(config);

    TimeHuntResult result;
    auto probe = [&](double t) {
        const double p = probability_at(t);
        result.probe_log.emplace_back(t, p);
        return p;
    };
    const auto in_window = [&](double p) {
        return p >= config.window_lo && p <= config.window_hi;
    };
    // Smallest probed T inside the window, else smallest with P >= window_lo.
    const auto finish = [&]() -> TimeHuntResult& {
        std::optional<std::pair<double, double>> best;
        for (const auto& [t, p] : result.probe_log)
            if (in_window(p) && (!best || t < best->first)) best = {t, p};
        if (best) {
            result.flag = HuntFlag::in_window;
        } else {
            for (const auto& [t, p] : result.probe_log)
                if (p >= config.window_lo && (!best || t < best->first)) best = {t, p};
            result.flag = HuntFlag::bracket_jump;
        }
        result.t_found = best->first;
        result.probability = best->second;
        return result;
    };

    double hunt_lo;
    double hunt_hi;
    double t = config.t_start;
    double p = probe(t);
    if (p >= config.window_lo) {
        if (in_window(p)) return finish();
        // Already past the window at t_start: bracket down from zero.
        const double p0 = probe(0.0);
        if (p0 >= config.window_lo) return finish();
        hunt_lo = 0.0;
        hunt_hi = t;
    } else {
        for (;;) {
            if (t >= config.t_cap)
                throw HuntError("hunt: probability still below " +
                                std::to_string(config.window_lo) + " at doubling cap T = " +
                                format_real(config.t_cap));
            const double next = 2.0 * t;
            p = probe(next);
            if (p >= config.window_lo) {
                if (in_window(p)) return finish();
                hunt_lo = t;
                hunt_hi = next;
                break;
            }
            t = next;
        }
    }

    // Invariant: P(hunt_lo) < window_lo <= P(hunt_hi).
    while (hunt_hi - hunt_lo >= config.bracket_rel_width * hunt_hi) {
        const double mid = 0.5 * (hunt_lo + hunt_hi);
        p = probe(mid);
        if (in_window(p)) return finish();
        if (p >= config.window_lo)
            hunt_hi = mid;
        else
            hunt_lo = mid;
    }
    return finish();  // window jumped inside the minimal bracket
}

TimeHuntResult hunt_time(const DiagonalProblem& diag, const BitDegrees& deg,
                         const std::vector<Assignment>& satisfying, const HuntConfig& config) {
    double max_drift = 0.0;
    auto probability_at = [&](double t) {
        EvolutionConfig evo;
        evo.T = t;
        evo.local_error_tol = config.local_error_tol;
        evo.norm_drift_limit = config.norm_drift_limit;
        evo.max_steps = config.max_steps;
        EvolutionResult r;
        try {
            r = evolve(diag, deg, satisfying, evo);
        } catch (const AccuracyError&) {
            // One retry with a much tighter local tolerance, as the accuracy
            // contract invites.
            evo.local_error_tol = config.local_error_tol * 1e-2;
            r = evolve(diag, deg, satisfying, evo);
        }
        max_drift = std::max(max_drift, r.final_norm_drift);
        return r.success_probability;
    };
    TimeHuntResult result = hunt_time_fn(probability_at, config);
    result.n = diag.n;
    result.max_norm_drift = max_drift;
    return result;
}

// ---------------------------------------------------------------------------
// Worker pool

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
    if (count == 0) return;
    unsigned nworkers = workers > 0 ? static_cast<unsigned>(workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
    nworkers = std::min<unsigned>(nworkers, static_cast<unsigned>(count));

    if (nworkers <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                task(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(nworkers);
    for (unsigned w = 0; w < nworkers; ++w) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Drivers

namespace {

struct InstanceTask {
    int n = 0;
    int index = 0;
};

std::vector<InstanceTask> make_tasks(int n_lo, int n_hi, int instances_per_n) {
    if (n_lo > n_hi) throw ConfigError("empty n range");
    if (instances_per_n < 1) throw ConfigError("instances per n must be >= 1");
    std::vector<InstanceTask> tasks;
    for (int n = n_lo; n <= n_hi; ++n)
        for (int i = 0; i < instances_per_n; ++i) tasks.push_back({n, i});
    return tasks;
}

// Generation seeds come from the plain problem kind for sweeps so that a
// scrambled sweep runs the very same instances as its unscrambled twin; hunts
// use the full label so scrambled hunt campaigns draw fresh instances.
struct SeededInstance {
    Instance instance;
    DiagonalProblem diag;
    BitDegrees degrees;
    std::vector<Assignment> targets;  // ground assignments of diag (post-scramble)
    std::uint64_t seed = 0;
};

SeededInstance prepare_instance(const ExperimentProblem& problem, std::uint64_t master_seed,
                                const std::string& seed_label, const std::string& salt, int n,
                                int index) {
    SeededInstance out;
    out.seed = derive_seed(master_seed, seed_label + "/" + salt, n, static_cast<std::uint64_t>(index));
    Rng rng(out.seed);
    out.instance = generate(problem.kind, n, rng);
    out.instance.seed = out.seed;
    out.diag = build_problem(out.instance);
    if (problem.scrambled) {
        const std::uint64_t scramble_seed = derive_seed(
            master_seed, problem.label() + "/scramble", n, static_cast<std::uint64_t>(index));
        out.diag = scramble(out.diag, scramble_seed);
    }
    out.degrees = build_degrees(out.instance);
    out.targets = ground_assignments(out.diag);
    return out;
}

SweepResult run_sweep(const ExperimentProblem& problem, int n_lo, int n_hi,
                      const std::function<double(int)>& t_of_n, int instances_per_n,
                      std::uint64_t master_seed, const SweepOptions& options) {
    const auto tasks = make_tasks(n_lo, n_hi, instances_per_n);
    std::vector<std::optional<SweepRecord>> slots(tasks.size());
    std::vector<std::string> errors(tasks.size());
    std::vector<double> drifts(tasks.size(), 0.0);

    parallel_for(tasks.size(), options.workers, [&](std::size_t i) {
        const auto [n, index] = tasks[i];
        try {
            const SeededInstance prep =
                prepare_instance(problem, master_seed, to_string(problem.kind), "sweep", n, index);
            EvolutionConfig evo;
            evo.T = t_of_n(n);
            evo.local_error_tol = options.local_error_tol;
            evo.norm_drift_limit = options.norm_drift_limit;
            evo.max_steps = options.max_steps;
            const EvolutionResult r = evolve(prep.diag, prep.degrees, prep.targets, evo);
            drifts[i] = r.final_norm_drift;
            slots[i] = SweepRecord{problem.label(), n,    index,
                                   prep.seed,       evo.T, r.success_probability};
        } catch (const Error& e) {
            errors[i] = std::string(e.what());
        }
    });

    SweepResult result;
    result.problem = problem;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (slots[i]) {
            result.records.push_back(*slots[i]);
        } else {
            result.exclusion_log.push_back(problem.label() + " n=" + std::to_string(tasks[i].n) +
                                           " instance=" + std::to_string(tasks[i].index) + ": " +
                                           errors[i]);
        }
        result.max_norm_drift = std::max(result.max_norm_drift, drifts[i]);
    }
    for (int n = n_lo; n <= n_hi; ++n) {
        std::vector<double> probs;
        for (const SweepRecord& rec : result.records)
            if (rec.n == n) probs.push_back(rec.probability);
        if (probs.empty()) continue;
        SweepSummary s;
        s.n = n;
        s.count = static_cast<int>(probs.size());
        s.median = median(probs);
        s.tenth_lowest = kth_lowest(probs, 10);
        s.lowest = kth_lowest(probs, 1);
        result.summaries.push_back(s);
    }
    return result;
}

}  // namespace

std::vector<std::pair<double, double>> MedianTimeTable::median_points() const {
    std::vector<std::pair<double, double>> pts;
    for (const MedianTimeRow& row : rows)
        if (!row.hunts.empty()) pts.emplace_back(double(row.n), row.median_t);
    return pts;
}

MedianTimeTable median_time_experiment(ExperimentProblem problem, int n_lo, int n_hi,
                                       int instances_per_n, std::uint64_t master_seed,
                                       const HuntConfig& config, int workers) {
    const auto tasks = make_tasks(n_lo, n_hi, instances_per_n);
    std::vector<std::optional<TimeHuntResult>> slots(tasks.size());
    std::vector<std::string> errors(tasks.size());

    parallel_for(tasks.size(), workers, [&](std::size_t i) {
        const auto [n, index] = tasks[i];
        try {
            const SeededInstance prep =
                prepare_instance(problem, master_seed, problem.label(), "hunt", n, index);
            TimeHuntResult hunt = hunt_time(prep.diag, prep.degrees, prep.targets, config);
            hunt.instance_index = index;
            hunt.seed = prep.seed;
            slots[i] = std::move(hunt);
        } catch (const Error& e) {
            errors[i] = std::string(e.what());
        }
    });

    MedianTimeTable table;
    table.problem = problem;
    for (int n = n_lo; n <= n_hi; ++n) {
        MedianTimeRow row;
        row.n = n;
        std::vector<double> times;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            if (tasks[i].n != n) continue;
            if (slots[i]) {
                times.push_back(slots[i]->t_found);
                table.max_norm_drift = std::max(table.max_norm_drift, slots[i]->max_norm_drift);
                row.hunts.push_back(std::move(*slots[i]));
            } else {
                ++row.excluded;
                table.exclusion_log.push_back(problem.label() + " n=" + std::to_string(n) +
                                              " instance=" + std::to_string(tasks[i].index) +
                                              ": " + errors[i]);
            }
        }
        if (!times.empty()) row.median_t = median(times);
        table.rows.push_back(std::move(row));
    }
    return table;
}

SweepResult probability_sweep(ExperimentProblem problem, int n_lo, int n_hi,
                              const FitResult& t_of_n, int instances_per_n,
                              std::uint64_t master_seed, const SweepOptions& options) {
    return run_sweep(problem, n_lo, n_hi, [&](int n) { return t_of_n(double(n)); },
                     instances_per_n, master_seed, options);
}

SweepResult fixed_time_sweep(ExperimentProblem problem, int n_lo, int n_hi, double t_fixed,
                             int instances_per_n, std::uint64_t master_seed,
                             const SweepOptions& options) {
    if (t_fixed <= 0) throw ConfigError("fixed sweep time must be positive");
    return run_sweep(problem, n_lo, n_hi, [&](int) { return t_fixed; }, instances_per_n,
                     master_seed, options);
}

SweepResult scrambled_sweep(ExperimentProblem problem, int n_lo, int n_hi,
                            const FitResult& t_of_n, int instances_per_n,
                            std::uint64_t master_seed, const SweepOptions& options) {
    problem.scrambled = true;
    return probability_sweep(problem, n_lo, n_hi, t_of_n, instances_per_n, master_seed, options);
}

// ---------------------------------------------------------------------------
// CSV

std::string format_real(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

void write_hunts_csv(const std::string& path, const MedianTimeTable& table) {
    auto out = open_out(path);
    out << "problem,n,instance_index,seed,T_found,probability,flag,probes\n";
    for (const MedianTimeRow& row : table.rows)
        for (const TimeHuntResult& h : row.hunts)
            out << table.problem.label() << ',' << row.n << ',' << h.instance_index << ','
                << h.seed << ',' << format_real(h.t_found) << ',' << format_real(h.probability)
                << ',' << to_string(h.flag) << ',' << h.probe_log.size() << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void write_hunt_summary_csv(const std::string& path, const MedianTimeTable& table) {
    auto out = open_out(path);
    out << "problem,n,count,median,p10th_lowest,lowest\n";
    for (const MedianTimeRow& row : table.rows) {
        if (row.hunts.empty()) continue;
        std::vector<double> times;
        for (const TimeHuntResult& h : row.hunts) times.push_back(h.t_found);
        out << table.problem.label() << ',' << row.n << ',' << times.size() << ','
            << format_real(median(times)) << ',' << format_real(kth_lowest(times, 10)) << ','
            << format_real(kth_lowest(times, 1)) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_sweeps_csv(const std::string& path, const SweepResult& result) {
    auto out = open_out(path);
    out << "problem,n,instance_index,seed,T_used,probability\n";
    for (const SweepRecord& r : result.records)
        out << r.problem << ',' << r.n << ',' << r.instance_index << ',' << r.seed << ','
            << format_real(r.t_used) << ',' << format_real(r.probability) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void write_sweep_summary_csv(const std::string& path, const SweepResult& result) {
    auto out = open_out(path);
    out << "problem,n,count,median,p10th_lowest,lowest\n";
    for (const SweepSummary& s : result.summaries)
        out << result.problem.label() << ',' << s.n << ',' << s.count << ','
            << format_real(s.median) << ',' << format_real(s.tenth_lowest) << ','
            << format_real(s.lowest) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void write_fits_csv(const std::string& path,
                    const std::vector<std::pair<std::string, FitResult>>& fits) {
    auto out = open_out(path);
    out << "problem,model,c0,c1,c2,rss\n";
    for (const auto& [problem, f] : fits) {
        out << problem << ',' << to_string(f.model) << ',' << format_real(f.coefficients[0])
            << ',' << format_real(f.coefficients[1]) << ',';
        if (f.model == FitModel::quadratic) out << format_real(f.coefficients[2]);
        out << ',' << format_real(f.rss) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<std::pair<double, double>> read_summary_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::pair<double, double>> points;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() < 4) throw IoError("malformed summary row: " + line);
        points.emplace_back(std::stod(fields[1]), std::stod(fields[3]));
    }
    if (points.empty()) throw IoError("no data rows in " + path);
    return points;
}

FitResult read_fit_csv(const std::string& path, FitModel model) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() < 6) throw IoError("malformed fit row: " + line);
        if (fields[1] != to_string(model)) continue;
        FitResult f;
        f.model = model;
        const bool quad = model == FitModel::quadratic;
        f.coefficients = RealVector(quad ? 3 : 2);
        f.coefficients[0] = std::stod(fields[2]);
        f.coefficients[1] = std::stod(fields[3]);
        if (quad) f.coefficients[2] = std::stod(fields[4]);
        f.rss = std::stod(fields[5]);
        return f;
    }
    throw IoError("no " + to_string(model) + " fit row in " + path);
}

}  // namespace qaev
