#include "selguide/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "selguide/config.hpp"
#include "selguide/errors.hpp"
#include "selguide/experiments.hpp"

namespace selguide {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

/// Shortest round-trip decimal form; keeps output files byte-stable.
std::string fmt_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<std::size_t> seeds;
    std::optional<double> skip_last_frac;
    std::optional<double> scale;
    std::optional<std::string> sampler;
    std::optional<std::size_t> steps;
};

void add_common_flags(CLI::App& cmd, CommonFlags& flags, const std::string& default_out) {
    flags.out_dir = default_out;
    cmd.add_option("--config", flags.config_path, "JSON config file");
    cmd.add_option("--out", flags.out_dir, "output directory");
    cmd.add_option("--seeds", flags.seeds, "number of seeds / runs");
    cmd.add_option("--skip-last", flags.skip_last_frac,
                   "skip the unconditional evaluation in the last FRAC of the iterations");
    cmd.add_option("--scale", flags.scale, "guidance scale");
    cmd.add_option("--sampler", flags.sampler, "sampler kind (ddpm|ddim)");
    cmd.add_option("--steps", flags.steps, "denoising iterations");
}

EngineConfig resolve_config(const CommonFlags& flags) {
    EngineConfig cfg = flags.config_path.empty() ? EngineConfig{} : load_config(flags.config_path);
    if (flags.skip_last_frac) {
        if (!(*flags.skip_last_frac >= 0.0 && *flags.skip_last_frac <= 1.0)) {
            throw ConfigError("--skip-last must lie in [0,1]");
        }
        cfg.guidance.skip_start_frac = 1.0 - *flags.skip_last_frac;
        cfg.guidance.skip_end_frac = 1.0;
    }
    if (flags.scale) cfg.guidance.scale = *flags.scale;
    if (flags.sampler) {
        try {
            cfg.run.sampler = sampler_kind_from_string(*flags.sampler);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (flags.steps) cfg.schedule.num_steps = *flags.steps;
    try {
        cfg.guidance.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

std::filesystem::path prepare_out_dir(const CommonFlags& flags, const EngineConfig& cfg) {
    const std::filesystem::path dir(flags.out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "config.echo", config_to_json(cfg).dump(2) + "\n");
    return dir;
}

std::string endpoints_csv(const std::vector<Trajectory>& runs, std::size_t dim) {
    std::ostringstream csv;
    csv << "seed";
    for (std::size_t j = 0; j < dim; ++j) csv << ",x" << j;
    csv << ",nfe,simulated_time\n";
    for (const auto& t : runs) {
        csv << t.seed;
        for (double x : t.endpoint) csv << ',' << fmt_double(x);
        csv << ',' << t.nfe_total << ',' << fmt_double(t.simulated_time) << '\n';
    }
    return csv.str();
}

std::string trajectory_csv(const Trajectory& traj, std::size_t dim) {
    // row per recorded state x_N..x_0; the flag belongs to the iteration that
    // produced the state, so the x_N row has none
    std::ostringstream csv;
    csv << "t,skipped";
    for (std::size_t j = 0; j < dim; ++j) csv << ",x" << j;
    csv << '\n';
    const std::size_t n = traj.skip_flags.size();
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        csv << (n - s) << ',';
        if (s > 0) csv << (traj.skip_flags[s - 1] ? 1 : 0);
        for (double x : traj.states[s]) csv << ',' << fmt_double(x);
        csv << '\n';
    }
    return csv.str();
}

int run_sample(const CommonFlags& flags, std::optional<std::uint64_t> seed_flag,
               bool record_flag) {
    EngineConfig cfg = resolve_config(flags);
    if (seed_flag) cfg.run.seed = *seed_flag;
    if (record_flag) cfg.run.record_trajectory = true;
    const std::size_t n_runs = flags.seeds.value_or(1);
    if (n_runs == 0) throw ConfigError("--seeds must be >= 1");

    std::vector<Trajectory> runs;
    runs.reserve(n_runs);
    for (std::size_t r = 0; r < n_runs; ++r) {
        RunConfig run_cfg = make_run_config(cfg, run_seed(cfg.run.seed, r));
        runs.push_back(run_sampling(run_cfg));
    }
    const auto dir = prepare_out_dir(flags, cfg);
    write_file(dir / "endpoints.csv", endpoints_csv(runs, cfg.mixture.dim()));
    if (cfg.run.record_trajectory) {
        write_file(dir / "trajectory.csv", trajectory_csv(runs.front(), cfg.mixture.dim()));
    }

    json summary = {{"schema_version", kSchemaVersion},
                    {"command", "sample"},
                    {"n_runs", n_runs},
                    {"nfe_per_run", runs.front().nfe_total},
                    {"simulated_time_per_run", runs.front().simulated_time}};
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << "sample: " << n_runs << " run(s), nfe " << runs.front().nfe_total
              << ", simulated " << fmt_double(runs.front().simulated_time) << " s -> "
              << dir.string() << "\n";
    return 0;
}

int run_sweep(const CommonFlags& flags) {
    EngineConfig cfg = resolve_config(flags);
    const std::size_t n_seeds = flags.seeds.value_or(cfg.sweep.n_seeds);
    const RunConfig base = make_run_config(cfg, cfg.master_seed);
    const SweepResult result =
        window_sweep(base, cfg.sweep.width_frac, cfg.sweep.n_positions, n_seeds);
    const auto dir = prepare_out_dir(flags, cfg);

    std::ostringstream csv;
    csv << "position,start_frac,end_frac,mean_endpoint_mse,sliced_w2,nfe\n";
    json positions = json::array();
    for (std::size_t k = 0; k < result.positions.size(); ++k) {
        const auto& p = result.positions[k];
        csv << k << ',' << fmt_double(p.start_frac) << ',' << fmt_double(p.end_frac) << ','
            << fmt_double(p.mean_endpoint_mse) << ',' << fmt_double(p.sliced_w2) << ','
            << p.nfe << '\n';
        positions.push_back({{"position", k},
                             {"start_frac", p.start_frac},
                             {"end_frac", p.end_frac},
                             {"mean_endpoint_mse", p.mean_endpoint_mse},
                             {"sliced_w2", p.sliced_w2},
                             {"nfe", p.nfe}});
    }
    write_file(dir / "sweep.csv", csv.str());
    json summary = {{"schema_version", kSchemaVersion},
                    {"command", "sweep"},
                    {"n_seeds", result.n_seeds},
                    {"positions", positions}};
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << "sweep: " << result.positions.size() << " windows x " << result.n_seeds
              << " seeds, first-window mse " << fmt_double(result.positions.front().mean_endpoint_mse)
              << ", last " << fmt_double(result.positions.back().mean_endpoint_mse) << " -> "
              << dir.string() << "\n";
    return 0;
}

int run_bench(const CommonFlags& flags, const std::vector<double>& fractions_flag) {
    EngineConfig cfg = resolve_config(flags);
    if (!fractions_flag.empty()) cfg.bench.fractions = fractions_flag;
    const std::size_t n_seeds = flags.seeds.value_or(cfg.bench.n_seeds);
    const RunConfig base = make_run_config(cfg, cfg.master_seed);
    const BenchResult result = [&] {
        try {
            return bench(base, cfg.bench.fractions, n_seeds);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("bench: ") + e.what());
        }
    }();
    const auto dir = prepare_out_dir(flags, cfg);

    std::ostringstream csv;
    csv << "fraction,nfe,mean_simulated_time,saving,mean_endpoint_mse,sliced_w2\n";
    json rows = json::array();
    for (const auto& row : result.rows) {
        csv << fmt_double(row.fraction) << ',' << row.nfe << ','
            << fmt_double(row.mean_simulated_time) << ',' << fmt_double(row.saving) << ','
            << fmt_double(row.mean_endpoint_mse) << ',' << fmt_double(row.sliced_w2) << '\n';
        rows.push_back({{"fraction", row.fraction},
                        {"nfe", row.nfe},
                        {"mean_simulated_time", row.mean_simulated_time},
                        {"saving", row.saving},
                        {"mean_endpoint_mse", row.mean_endpoint_mse},
                        {"sliced_w2", row.sliced_w2}});
    }
    write_file(dir / "bench.csv", csv.str());
    json summary = {{"schema_version", kSchemaVersion},
                    {"command", "bench"},
                    {"n_seeds", n_seeds},
                    {"baseline_time", result.baseline_time},
                    {"rows", rows}};
    if (result.fit) {
        summary["fitted_unet_fraction"] = result.fit->u;
        summary["fit_clamped"] = result.fit->clamped;
    }
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << "bench: baseline " << fmt_double(result.baseline_time) << " s";
    if (result.fit) std::cout << ", fitted u " << fmt_double(result.fit->u);
    std::cout << ", " << result.rows.size() << " rows -> " << dir.string() << "\n";
    return 0;
}

int run_tune(const CommonFlags& flags) {
    EngineConfig cfg = resolve_config(flags);
    // --skip-last names the fraction under tuning
    const double fraction = flags.skip_last_frac.value_or(cfg.tune.fraction);
    const std::size_t n_seeds = flags.seeds.value_or(cfg.tune.n_seeds);
    EngineConfig base_cfg = cfg;
    base_cfg.guidance.skip_start_frac = 0.0;
    base_cfg.guidance.skip_end_frac = 0.0;
    const RunConfig base = make_run_config(base_cfg, cfg.master_seed);
    const TuneResult result = [&] {
        try {
            return gs_tune(base, fraction, cfg.tune.scales, n_seeds);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("tune: ") + e.what());
        }
    }();
    const auto dir = prepare_out_dir(flags, cfg);

    std::ostringstream csv;
    csv << "scale,mean_endpoint_mse\n";
    json curve = json::array();
    for (const auto& point : result.curve) {
        csv << fmt_double(point.scale) << ',' << fmt_double(point.mean_endpoint_mse) << '\n';
        curve.push_back({{"scale", point.scale}, {"mean_endpoint_mse", point.mean_endpoint_mse}});
    }
    write_file(dir / "tune.csv", csv.str());
    json summary = {{"schema_version", kSchemaVersion},
                    {"command", "tune"},
                    {"n_seeds", n_seeds},
                    {"fraction", fraction},
                    {"best_scale", result.best_scale},
                    {"curve", curve}};
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << "tune: best scale " << fmt_double(result.best_scale) << " over "
              << result.curve.size() << " candidates at skip-last "
              << fmt_double(fraction) << " -> " << dir.string() << "\n";
    return 0;
}

int run_validate(const CommonFlags& flags) {
    if (flags.config_path.empty()) throw ConfigError("validate-config requires --config");
    EngineConfig cfg = resolve_config(flags);
    // a config must also assemble into a valid run
    (void)make_run_config(cfg, cfg.master_seed);
    const auto dir = prepare_out_dir(flags, cfg);
    json summary = {{"schema_version", kSchemaVersion}, {"command", "validate-config"},
                    {"valid", true}};
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << "config ok: " << flags.config_path << " -> " << dir.string() << "\n";
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"guided-diffusion sampling engine with selective guidance"};
    app.require_subcommand(1);

    CommonFlags sample_flags, sweep_flags, bench_flags, tune_flags, validate_flags;
    std::optional<std::uint64_t> seed_flag;
    bool record_flag = false;
    std::vector<double> fractions_flag;

    auto* sample_cmd = app.add_subcommand("sample", "run samplings and export endpoints");
    add_common_flags(*sample_cmd, sample_flags, "out-sample");
    sample_cmd->add_option("--seed", seed_flag, "base seed for the runs");
    sample_cmd->add_flag("--record-trajectory", record_flag, "export the first run's states");

    auto* sweep_cmd = app.add_subcommand("sweep", "window-placement sensitivity sweep");
    add_common_flags(*sweep_cmd, sweep_flags, "out-sweep");

    auto* bench_cmd = app.add_subcommand("bench", "skip-fraction savings benchmark");
    add_common_flags(*bench_cmd, bench_flags, "out-bench");
    bench_cmd->add_option("--fractions", fractions_flag, "skip fractions (must include 0)");

    auto* tune_cmd = app.add_subcommand("tune", "guidance-scale retuning under skipping");
    add_common_flags(*tune_cmd, tune_flags, "out-tune");

    auto* validate_cmd = app.add_subcommand("validate-config", "check a config file");
    add_common_flags(*validate_cmd, validate_flags, "out-validate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sample_cmd->parsed()) return run_sample(sample_flags, seed_flag, record_flag);
        if (sweep_cmd->parsed()) return run_sweep(sweep_flags);
        if (bench_cmd->parsed()) return run_bench(bench_flags, fractions_flag);
        if (tune_cmd->parsed()) return run_tune(tune_flags);
        if (validate_cmd->parsed()) return run_validate(validate_flags);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        // library precondition violations are config-class errors
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace selguide
