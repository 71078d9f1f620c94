#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "selguide/cost.hpp"
#include "selguide/guidance.hpp"
#include "selguide/mixture.hpp"
#include "selguide/sampler.hpp"
#include "selguide/schedule.hpp"

namespace selguide {

struct ScheduleConfig {
    ScheduleKind kind = ScheduleKind::linear;
    std::size_t num_steps = 50;
    double beta_min = 1e-4;
    double beta_max = 0.02;
};

struct RunSection {
    SamplerKind sampler = SamplerKind::ddpm;
    std::uint64_t seed = 0;
    std::optional<int> condition = 0;
    bool record_trajectory = false;
};

struct SweepSection {
    double width_frac = 0.25;
    std::size_t n_positions = 4;
    std::size_t n_seeds = 200;
};

struct BenchSection {
    std::vector<double> fractions = {0.0, 0.2, 0.3, 0.4, 0.5};
    std::size_t n_seeds = 50;
};

struct TuneSection {
    double fraction = 0.4;
    std::vector<double> scales = {7.5, 8.0, 8.5, 9.0, 9.5, 10.0, 10.5, 11.0, 11.5, 12.0};
    std::size_t n_seeds = 200;
};

/// Fully resolved engine configuration: library defaults overlaid with a
/// config file and then with CLI flags.
struct EngineConfig {
    std::uint64_t master_seed = 0;
    ScheduleConfig schedule;
    GuidanceSpec guidance;
    CostModel cost;
    RunSection run;
    MixtureModel mixture = default_mixture();
    SweepSection sweep;
    BenchSection bench;
    TuneSection tune;
};

/// Loads and validates a JSON config file over the defaults. The file must
/// provide schedule.num_steps; everything else falls back to defaults.
/// Unknown keys, type errors, and out-of-range values raise ConfigError
/// naming the offending key; parse failures carry the parser's position.
/// The "mixture" entry may be an inline object ({"components": [...]}) or a
/// path to a JSON file of the same shape.
EngineConfig load_config(const std::string& path);

/// Parses config JSON that is already in memory (base_dir resolves relative
/// mixture paths).
EngineConfig parse_config(const nlohmann::json& j, const std::string& base_dir);

/// The fully resolved config as JSON — what gets echoed next to results.
nlohmann::json config_to_json(const EngineConfig& cfg);

/// Assembles the per-run config. Experiments pass cfg.master_seed; `sample`
/// passes cfg.run.seed. Validates that the condition exists in the mixture.
RunConfig make_run_config(const EngineConfig& cfg, std::uint64_t seed);

}  // namespace selguide
