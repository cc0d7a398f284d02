// qaev: quantum adiabatic evolution simulator for Exact Cover.
// Subcommands: gen, evolve, hunt, experiment, fit. Every experiment-style
// command takes an explicit seed; outputs are byte-reproducible per platform.

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qaev/evolution.hpp"
#include "qaev/experiments.hpp"
#include "qaev/fits.hpp"
#include "qaev/hamiltonian.hpp"
#include "qaev/instances.hpp"
#include "qaev/rng.hpp"

namespace fs = std::filesystem;
using namespace qaev;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitGeneration = 3;
constexpr int kExitAccuracy = 4;
constexpr int kExitIo = 5;

struct CommonOpts {
    std::string out_dir = ".";
    int workers = 0;
    int cap_bits = 20;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--out", opts.out_dir, "output directory")->envname("QAEV_OUT");
    cmd->add_option("--workers", opts.workers, "worker threads (0 = all cores)")
        ->envname("QAEV_WORKERS");
    cmd->add_option("--cap", opts.cap_bits, "largest allowed bit count")
        ->check(CLI::Range(2, kDefaultCapacityBits));
}

fs::path ensure_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
    return p;
}

void check_n_range(int n_lo, int n_hi, int cap_bits) {
    if (n_lo < 2 || n_hi > cap_bits || n_lo > n_hi)
        throw ConfigError("n range [" + std::to_string(n_lo) + ", " + std::to_string(n_hi) +
                          "] outside [2, " + std::to_string(cap_bits) + "]");
}

void dump_state(const StateVector& psi, const std::string& path) {
    static_assert(std::endian::native == std::endian::little,
                  "state dump format is little-endian");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    // Interleaved re/im 64-bit components, index order z = 0 .. 2^n - 1.
    out.write(reinterpret_cast<const char*>(psi.data()),
              static_cast<std::streamsize>(sizeof(std::complex<double>) * psi.size()));
    if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// gen

int cmd_gen(const std::string& problem_name, int n, int count, std::uint64_t seed,
            const CommonOpts& opts) {
    const ProblemKind kind = problem_kind_from_string(problem_name);
    check_n_range(n, n, opts.cap_bits);
    const fs::path dir = ensure_dir(opts.out_dir);

    GenerationLimits limits;
    limits.cap_bits = opts.cap_bits;
    double clause_sum = 0;
    for (int i = 0; i < count; ++i) {
        const std::uint64_t inst_seed =
            derive_seed(seed, to_string(kind) + "/gen", n, static_cast<std::uint64_t>(i));
        Rng rng(inst_seed);
        Instance inst = generate(kind, n, rng, limits);
        inst.seed = inst_seed;
        const fs::path file =
            dir / (to_string(kind) + "_n" + std::to_string(n) + "_i" + std::to_string(i) + ".json");
        save_instance(inst, file.string());
        clause_sum += static_cast<double>(inst.clauses.size());
        std::cout << file.string() << ": clauses=" << inst.clauses.size()
                  << " satisfying=" << inst.satisfying.size() << "\n";
    }
    std::cout << "generated " << count << " " << to_string(kind) << " instances at n=" << n
              << ", mean clause count " << format_real(clause_sum / count) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// evolve

int cmd_evolve(const std::string& instance_path, double t_total,
               std::optional<std::uint64_t> scramble_seed, const EvolutionConfig& evo_template,
               const std::string& dump_path, const CommonOpts& opts) {
    const Instance inst = load_instance(instance_path);
    check_n_range(inst.n, inst.n, opts.cap_bits);

    DiagonalProblem diag = build_problem(inst, opts.cap_bits);
    if (scramble_seed) diag = scramble(diag, *scramble_seed);
    const BitDegrees deg = build_degrees(inst);
    // Success is measured on the ground states of the diagonal actually
    // evolved; scrambling moves them to the permuted labels.
    const std::vector<Assignment> targets = ground_assignments(diag);

    EvolutionConfig evo = evo_template;
    evo.T = t_total;
    const EvolutionResult result = evolve(diag, deg, targets, evo);

    nlohmann::json j;
    j["T"] = t_total;
    j["probability"] = result.success_probability;
    j["steps"] = result.steps_taken;
    j["norm_drift"] = result.final_norm_drift;
    std::cout << j.dump() << "\n";

    if (!dump_path.empty()) dump_state(result.final_state, dump_path);
    return 0;
}

// ---------------------------------------------------------------------------
// hunt

int cmd_hunt(const std::string& problem_name, int n_lo, int n_hi, int instances,
             std::uint64_t seed, const HuntConfig& config, const std::string& tag,
             const CommonOpts& opts) {
    const ExperimentProblem problem = experiment_problem_from_string(problem_name);
    check_n_range(n_lo, n_hi, opts.cap_bits);
    const fs::path dir = ensure_dir(opts.out_dir);

    const MedianTimeTable table =
        median_time_experiment(problem, n_lo, n_hi, instances, seed, config, opts.workers);

    const std::string stem = tag.empty() ? "hunt_" + problem.label() : tag;
    write_hunts_csv((dir / (stem + "_hunts.csv")).string(), table);
    write_hunt_summary_csv((dir / (stem + "_summary.csv")).string(), table);

    std::size_t total = 0;
    for (const MedianTimeRow& row : table.rows) {
        total += row.hunts.size();
        if (!row.hunts.empty())
            std::cout << problem.label() << " n=" << row.n << " median T=" << format_real(row.median_t)
                      << " (" << row.hunts.size() << " instances, " << row.excluded
                      << " excluded)\n";
    }
    for (const std::string& line : table.exclusion_log) std::cerr << "excluded: " << line << "\n";
    std::cout << "max norm drift " << format_real(table.max_norm_drift) << "\n";
    if (total == 0) throw AccuracyError("all hunts failed");
    return 0;
}

// ---------------------------------------------------------------------------
// experiment presets

struct Preset {
    std::string name;
    std::string problem;
    enum class Kind { hunt, sweep, fixed_sweep } kind = Kind::hunt;
    int desk_lo = 7, desk_hi = 12;
    int full_lo = 7, full_hi = 15;
    int instances = 50;
    std::vector<FitModel> fit_models;      // emitted for hunt presets
    FitModel t_source_model = FitModel::quadratic;  // consumed by sweep presets
    std::string t_source_preset;           // hunt preset supplying T(n)
    double fixed_t = 0.0;
};

const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = {
        {"fig1", "EC3", Preset::Kind::hunt, 7, 12, 7, 15, 50,
         {FitModel::quadratic, FitModel::exponential}},
        {"fig2", "EC2", Preset::Kind::hunt, 7, 12, 7, 15, 50,
         {FitModel::linear, FitModel::exponential}},
        {"fig3", "EC2scram", Preset::Kind::hunt, 7, 11, 7, 12, 100,
         {FitModel::exponential, FitModel::quadratic}},
        {"fig4", "EC3", Preset::Kind::sweep, 7, 12, 7, 16, 100, {}, FitModel::quadratic, "fig1"},
        {"fig5", "EC2", Preset::Kind::sweep, 7, 12, 7, 15, 100, {}, FitModel::linear, "fig2"},
        {"fig6", "EC3", Preset::Kind::fixed_sweep, 7, 12, 7, 14, 100, {}, FitModel::quadratic, "",
         5.82},
        {"fig7", "EC3scram", Preset::Kind::sweep, 7, 12, 7, 14, 100, {}, FitModel::quadratic,
         "fig1"},
        {"fig8", "EC3multi", Preset::Kind::sweep, 10, 12, 10, 13, 100, {}, FitModel::quadratic,
         "fig1"},
    };
    return table;
}

const Preset& find_preset(const std::string& name) {
    for (const Preset& p : presets())
        if (p.name == name) return p;
    throw ConfigError("unknown preset " + name + " (expected fig1..fig8)");
}

MedianTimeTable run_hunt_preset(const Preset& preset, int n_lo, int n_hi, int instances,
                                std::uint64_t seed, const HuntConfig& config,
                                const CommonOpts& opts) {
    const ExperimentProblem problem = experiment_problem_from_string(preset.problem);
    return median_time_experiment(problem, n_lo, n_hi, instances, seed, config, opts.workers);
}

int cmd_experiment(const std::string& preset_name, std::uint64_t seed, bool full,
                   std::optional<int> n_lo_opt, std::optional<int> n_hi_opt,
                   std::optional<int> instances_opt, const std::string& fit_file,
                   std::optional<double> fixed_t_opt, const HuntConfig& hunt_config,
                   const CommonOpts& opts) {
    const Preset& preset = find_preset(preset_name);
    const int n_lo = n_lo_opt.value_or(full ? preset.full_lo : preset.desk_lo);
    const int n_hi = n_hi_opt.value_or(full ? preset.full_hi : preset.desk_hi);
    const int instances = instances_opt.value_or(preset.instances);
    check_n_range(n_lo, n_hi, opts.cap_bits);
    const fs::path dir = ensure_dir(opts.out_dir);

    if (preset.kind == Preset::Kind::hunt) {
        const MedianTimeTable table =
            run_hunt_preset(preset, n_lo, n_hi, instances, seed, hunt_config, opts);
        write_hunts_csv((dir / (preset.name + "_hunts.csv")).string(), table);
        write_hunt_summary_csv((dir / (preset.name + "_summary.csv")).string(), table);
        std::vector<std::pair<std::string, FitResult>> fits;
        const auto points = table.median_points();
        for (FitModel model : preset.fit_models) {
            try {
                fits.emplace_back(table.problem.label(), fit(model, points));
            } catch (const FitError& e) {
                std::cerr << "fit " << to_string(model) << " skipped: " << e.what() << "\n";
            }
        }
        write_fits_csv((dir / (preset.name + "_fits.csv")).string(), fits);
        for (const auto& [label, f] : fits) {
            std::cout << preset.name << " " << label << " " << to_string(f.model) << " fit:";
            for (Eigen::Index i = 0; i < f.coefficients.size(); ++i)
                std::cout << ' ' << format_real(f.coefficients[i]);
            std::cout << " (rss " << format_real(f.rss) << ")\n";
        }
        for (const std::string& line : table.exclusion_log)
            std::cerr << "excluded: " << line << "\n";
        std::size_t total = 0;
        for (const MedianTimeRow& row : table.rows) total += row.hunts.size();
        if (total == 0) throw AccuracyError("all hunts failed");
        return 0;
    }

    SweepOptions sweep_opts;
    sweep_opts.local_error_tol = hunt_config.local_error_tol;
    sweep_opts.norm_drift_limit = hunt_config.norm_drift_limit;
    sweep_opts.max_steps = hunt_config.max_steps;
    sweep_opts.workers = opts.workers;
    const ExperimentProblem problem = experiment_problem_from_string(preset.problem);

    SweepResult result;
    if (preset.kind == Preset::Kind::fixed_sweep) {
        const double t_fixed = fixed_t_opt.value_or(preset.fixed_t);
        result = fixed_time_sweep(problem, n_lo, n_hi, t_fixed, instances, seed, sweep_opts);
    } else {
        FitResult t_of_n;
        if (!fit_file.empty()) {
            t_of_n = read_fit_csv(fit_file, preset.t_source_model);
        } else {
            // No fit supplied: run the T-source hunt preset under the same
            // seed and fit its medians. Explicit n overrides scale the source
            // hunt down with the sweep; otherwise it uses its own range.
            const Preset& source = find_preset(preset.t_source_preset);
            const int src_lo = n_lo_opt.value_or(full ? source.full_lo : source.desk_lo);
            const int src_hi = n_hi_opt.value_or(full ? source.full_hi : source.desk_hi);
            std::cerr << preset.name << ": no --fit given, running the " << source.name
                      << " hunt first over n=" << src_lo << ".." << src_hi
                      << " (pass --fit to reuse an existing one)\n";
            const MedianTimeTable table = run_hunt_preset(source, src_lo, src_hi,
                                                          source.instances, seed, hunt_config, opts);
            t_of_n = fit(preset.t_source_model, table.median_points());
            write_fits_csv((dir / (preset.name + "_tsource.csv")).string(),
                           {{table.problem.label(), t_of_n}});
        }
        result = probability_sweep(problem, n_lo, n_hi, t_of_n, instances, seed, sweep_opts);
    }

    write_sweeps_csv((dir / (preset.name + "_sweeps.csv")).string(), result);
    write_sweep_summary_csv((dir / (preset.name + "_summary.csv")).string(), result);
    for (const SweepSummary& s : result.summaries)
        std::cout << result.problem.label() << " n=" << s.n << " count=" << s.count
                  << " median=" << format_real(s.median)
                  << " p10=" << format_real(s.tenth_lowest)
                  << " lowest=" << format_real(s.lowest) << "\n";
    for (const std::string& line : result.exclusion_log) std::cerr << "excluded: " << line << "\n";
    std::cout << "max norm drift " << format_real(result.max_norm_drift) << "\n";
    if (result.records.empty()) throw AccuracyError("all sweep instances failed");
    return 0;
}

// ---------------------------------------------------------------------------
// fit

int cmd_fit(const std::string& model_name, const std::string& in_path,
            const std::string& problem_label, const std::string& out_file) {
    const FitModel model = fit_model_from_string(model_name);
    const auto points = read_summary_points(in_path);
    const FitResult result = fit(model, points);

    std::cout << to_string(model) << " fit over " << points.size() << " points:";
    for (Eigen::Index i = 0; i < result.coefficients.size(); ++i)
        std::cout << ' ' << format_real(result.coefficients[i]);
    std::cout << " (rss " << format_real(result.rss) << ")\n";
    if (model == FitModel::exponential)
        std::cout << "a=" << format_real(result.coefficients[0])
                  << " b=" << format_real(result.coefficients[1]) << "\n";

    if (!out_file.empty()) {
        const fs::path parent = fs::path(out_file).parent_path();
        if (!parent.empty()) ensure_dir(parent.string());
        write_fits_csv(out_file, {{problem_label, result}});
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum adiabatic evolution simulator for Exact Cover"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate random instances");
    std::string gen_problem = "ec3";
    int gen_n = 8, gen_count = 1;
    std::uint64_t gen_seed = 0;
    CommonOpts gen_opts;
    gen->add_option("--problem", gen_problem, "ec3 | ec2 | ec3multi")->required();
    gen->add_option("--n", gen_n, "bit count")->required();
    gen->add_option("--count", gen_count, "number of instances")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "master seed")->required();
    add_common(gen, gen_opts);

    // evolve
    auto* evolve_cmd = app.add_subcommand("evolve", "integrate one instance to time T");
    std::string evolve_instance, evolve_dump;
    double evolve_t = 0.0;
    std::optional<std::uint64_t> evolve_scramble;
    EvolutionConfig evolve_cfg;
    CommonOpts evolve_opts;
    evolve_cmd->add_option("--instance", evolve_instance, "instance JSON file")->required();
    evolve_cmd->add_option("--T", evolve_t, "total evolution time")->required();
    evolve_cmd->add_option("--scramble-seed", evolve_scramble,
                           "permute the problem diagonal with this seed");
    evolve_cmd->add_option("--local-tol", evolve_cfg.local_error_tol, "per-step local error tol");
    evolve_cmd->add_option("--norm-limit", evolve_cfg.norm_drift_limit, "norm drift limit");
    evolve_cmd->add_option("--max-steps", evolve_cfg.max_steps, "step budget");
    evolve_cmd->add_option("--dump-state", evolve_dump,
                           "write final amplitudes (interleaved re/im doubles, little-endian)");
    add_common(evolve_cmd, evolve_opts);

    // hunt
    auto* hunt = app.add_subcommand("hunt", "median-time hunt to the probability window");
    std::string hunt_problem = "ec3";
    int hunt_n_lo = 7, hunt_n_hi = 12, hunt_instances = 50;
    std::uint64_t hunt_seed = 0;
    std::string hunt_tag;
    HuntConfig hunt_cfg;
    CommonOpts hunt_opts;
    hunt->add_option("--problem", hunt_problem, "ec3 | ec2 | ec3multi | ec3scram | ec2scram")
        ->required();
    hunt->add_option("--n-min", hunt_n_lo, "smallest bit count")->required();
    hunt->add_option("--n-max", hunt_n_hi, "largest bit count")->required();
    hunt->add_option("--instances", hunt_instances, "instances per n")->check(CLI::PositiveNumber);
    hunt->add_option("--seed", hunt_seed, "master seed")->required();
    hunt->add_option("--window-lo", hunt_cfg.window_lo, "probability window lower edge");
    hunt->add_option("--window-hi", hunt_cfg.window_hi, "probability window upper edge");
    hunt->add_option("--local-tol", hunt_cfg.local_error_tol, "per-step local error tol");
    hunt->add_option("--tag", hunt_tag, "output file stem");
    add_common(hunt, hunt_opts);

    // experiment
    auto* experiment = app.add_subcommand("experiment", "run a figure-equivalent dataset");
    std::string exp_preset, exp_fit_file;
    std::uint64_t exp_seed = 0;
    bool exp_full = false;
    std::optional<int> exp_n_lo, exp_n_hi, exp_instances;
    std::optional<double> exp_fixed_t;
    HuntConfig exp_hunt_cfg;
    CommonOpts exp_opts;
    experiment->add_option("--preset", exp_preset, "fig1 .. fig8")->required();
    experiment->add_option("--seed", exp_seed, "master seed")->required();
    experiment->add_flag("--full", exp_full, "long n range instead of desk scale");
    experiment->add_option("--n-min", exp_n_lo, "override smallest n");
    experiment->add_option("--n-max", exp_n_hi, "override largest n");
    experiment->add_option("--instances", exp_instances, "override instances per n");
    experiment->add_option("--fit", exp_fit_file, "fits CSV supplying T(n) for sweep presets");
    experiment->add_option("--T", exp_fixed_t, "override the fixed sweep time (fig6)");
    experiment->add_option("--local-tol", exp_hunt_cfg.local_error_tol,
                           "per-step local error tol");
    add_common(experiment, exp_opts);

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "least-squares fit over a summary CSV");
    std::string fit_model_name, fit_in, fit_problem = "data", fit_out;
    fit_cmd->add_option("--model", fit_model_name, "linear | quadratic | exponential")->required();
    fit_cmd->add_option("--in", fit_in, "summary CSV (fits n vs median)")->required();
    fit_cmd->add_option("--problem", fit_problem, "problem label for the output row");
    fit_cmd->add_option("--out", fit_out, "write a fits CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_problem, gen_n, gen_count, gen_seed, gen_opts);
        if (evolve_cmd->parsed())
            return cmd_evolve(evolve_instance, evolve_t, evolve_scramble, evolve_cfg, evolve_dump,
                              evolve_opts);
        if (hunt->parsed())
            return cmd_hunt(hunt_problem, hunt_n_lo, hunt_n_hi, hunt_instances, hunt_seed,
                            hunt_cfg, hunt_tag, hunt_opts);
        if (experiment->parsed())
            return cmd_experiment(exp_preset, exp_seed, exp_full, exp_n_lo, exp_n_hi,
                                  exp_instances, exp_fit_file, exp_fixed_t, exp_hunt_cfg,
                                  exp_opts);
        if (fit_cmd->parsed())
            return cmd_fit(fit_model_name, fit_in, fit_problem, fit_out);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const FitError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const GenerationError& e) {
        std::cerr << "generation error: " << e.what() << "\n";
        return kExitGeneration;
    } catch (const AccuracyError& e) {
        std::cerr << "accuracy error: " << e.what() << "\n";
        return kExitAccuracy;
    } catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return kExitAccuracy;
    } catch (const HuntError& e) {
        std::cerr << "hunt error: " << e.what() << "\n";
        return kExitAccuracy;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
