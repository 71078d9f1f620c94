#include "selguide/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "selguide/errors.hpp"

namespace selguide {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& section,
                  const std::set<std::string>& known) {
    for (const auto& [key, value] : obj.items()) {
        if (!known.count(key)) {
            const std::string dotted = section.empty() ? key : section + "." + key;
            throw ConfigError("unknown config key: " + dotted);
        }
    }
}

template <typename T>
T get_as(const json& obj, const std::string& dotted_key) {
    try {
        return obj.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key has wrong type: " + dotted_key);
    }
}

double get_number(const json& obj, const std::string& dotted_key) {
    if (!obj.is_number()) throw ConfigError("config key has wrong type: " + dotted_key);
    return obj.get<double>();
}

std::size_t get_count(const json& obj, const std::string& dotted_key) {
    if (!obj.is_number_integer() || obj.get<std::int64_t>() < 0) {
        throw ConfigError("config key must be a non-negative integer: " + dotted_key);
    }
    return obj.get<std::size_t>();
}

ScheduleConfig parse_schedule(const json& j) {
    require_keys(j, "schedule", {"kind", "num_steps", "beta_min", "beta_max"});
    if (!j.contains("num_steps")) {
        throw ConfigError("missing required key: schedule.num_steps");
    }
    ScheduleConfig out;
    out.num_steps = get_count(j.at("num_steps"), "schedule.num_steps");
    if (j.contains("kind")) {
        try {
            out.kind = schedule_kind_from_string(get_as<std::string>(j.at("kind"), "schedule.kind"));
        } catch (const InvalidScheduleConfig& e) {
            throw ConfigError(std::string("schedule.kind: ") + e.what());
        }
    }
    if (j.contains("beta_min")) out.beta_min = get_number(j.at("beta_min"), "schedule.beta_min");
    if (j.contains("beta_max")) out.beta_max = get_number(j.at("beta_max"), "schedule.beta_max");
    return out;
}

GuidanceSpec parse_guidance(const json& j, GuidanceSpec out) {
    require_keys(j, "guidance", {"scale", "skip_start_frac", "skip_end_frac"});
    if (j.contains("scale")) out.scale = get_number(j.at("scale"), "guidance.scale");
    if (j.contains("skip_start_frac")) {
        out.skip_start_frac = get_number(j.at("skip_start_frac"), "guidance.skip_start_frac");
    }
    if (j.contains("skip_end_frac")) {
        out.skip_end_frac = get_number(j.at("skip_end_frac"), "guidance.skip_end_frac");
    }
    try {
        out.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("guidance: ") + e.what());
    }
    return out;
}

CostModel parse_cost(const json& j, CostModel out) {
    require_keys(j, "cost", {"eval_cost", "iter_overhead"});
    if (j.contains("eval_cost")) out.eval_cost = get_number(j.at("eval_cost"), "cost.eval_cost");
    if (j.contains("iter_overhead")) {
        out.iter_overhead = get_number(j.at("iter_overhead"), "cost.iter_overhead");
    }
    try {
        out.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("cost: ") + e.what());
    }
    return out;
}

RunSection parse_run(const json& j, RunSection out) {
    require_keys(j, "run", {"sampler", "seed", "condition", "record_trajectory"});
    if (j.contains("sampler")) {
        try {
            out.sampler = sampler_kind_from_string(get_as<std::string>(j.at("sampler"), "run.sampler"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("run.sampler: ") + e.what());
        }
    }
    if (j.contains("seed")) out.seed = get_as<std::uint64_t>(j.at("seed"), "run.seed");
    if (j.contains("condition")) {
        const auto& c = j.at("condition");
        if (c.is_null()) {
            out.condition = std::nullopt;
        } else if (c.is_number_integer()) {
            out.condition = c.get<int>();
        } else {
            throw ConfigError("run.condition must be an integer label or null");
        }
    }
    if (j.contains("record_trajectory")) {
        out.record_trajectory = get_as<bool>(j.at("record_trajectory"), "run.record_trajectory");
    }
    return out;
}

MixtureModel parse_mixture_object(const json& j) {
    require_keys(j, "mixture", {"components"});
    if (!j.contains("components")) throw ConfigError("missing required key: mixture.components");
    const auto& comps_json = j.at("components");
    if (!comps_json.is_array() || comps_json.empty()) {
        throw ConfigError("mixture.components must be a non-empty array");
    }
    std::vector<MixtureComponent> comps;
    std::size_t dim = 0;
    for (std::size_t k = 0; k < comps_json.size(); ++k) {
        const auto& cj = comps_json[k];
        const std::string where = "mixture.components[" + std::to_string(k) + "]";
        require_keys(cj, where, {"weight", "mean", "var", "label"});
        for (const char* field : {"weight", "mean", "var", "label"}) {
            if (!cj.contains(field)) {
                throw ConfigError("missing required key: " + where + "." + field);
            }
        }
        MixtureComponent c;
        c.weight = get_number(cj.at("weight"), where + ".weight");
        c.mean = get_as<Vec>(cj.at("mean"), where + ".mean");
        c.var = get_as<Vec>(cj.at("var"), where + ".var");
        c.label = get_as<int>(cj.at("label"), where + ".label");
        if (k == 0) dim = c.mean.size();
        comps.push_back(std::move(c));
    }
    try {
        return MixtureModel(dim, std::move(comps));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("mixture: ") + e.what());
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
}

SweepSection parse_sweep(const json& j, SweepSection out) {
    require_keys(j, "sweep", {"width_frac", "n_positions", "n_seeds"});
    if (j.contains("width_frac")) out.width_frac = get_number(j.at("width_frac"), "sweep.width_frac");
    if (j.contains("n_positions")) out.n_positions = get_count(j.at("n_positions"), "sweep.n_positions");
    if (j.contains("n_seeds")) out.n_seeds = get_count(j.at("n_seeds"), "sweep.n_seeds");
    return out;
}

BenchSection parse_bench(const json& j, BenchSection out) {
    require_keys(j, "bench", {"fractions", "n_seeds"});
    if (j.contains("fractions")) {
        out.fractions = get_as<std::vector<double>>(j.at("fractions"), "bench.fractions");
    }
    if (j.contains("n_seeds")) out.n_seeds = get_count(j.at("n_seeds"), "bench.n_seeds");
    return out;
}

TuneSection parse_tune(const json& j, TuneSection out) {
    require_keys(j, "tune", {"fraction", "scales", "n_seeds"});
    if (j.contains("fraction")) out.fraction = get_number(j.at("fraction"), "tune.fraction");
    if (j.contains("scales")) {
        out.scales = get_as<std::vector<double>>(j.at("scales"), "tune.scales");
    }
    if (j.contains("n_seeds")) out.n_seeds = get_count(j.at("n_seeds"), "tune.n_seeds");
    return out;
}

}  // namespace

EngineConfig parse_config(const json& j, const std::string& base_dir) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    require_keys(j, "", {"master_seed", "schedule", "guidance", "cost", "run", "mixture",
                         "sweep", "bench", "tune"});
    EngineConfig cfg;
    if (j.contains("master_seed")) {
        cfg.master_seed = get_as<std::uint64_t>(j.at("master_seed"), "master_seed");
    }
    if (!j.contains("schedule")) {
        throw ConfigError("missing required key: schedule.num_steps");
    }
    cfg.schedule = parse_schedule(j.at("schedule"));
    if (j.contains("guidance")) cfg.guidance = parse_guidance(j.at("guidance"), cfg.guidance);
    if (j.contains("cost")) cfg.cost = parse_cost(j.at("cost"), cfg.cost);
    if (j.contains("run")) cfg.run = parse_run(j.at("run"), cfg.run);
    if (j.contains("mixture")) {
        const auto& m = j.at("mixture");
        if (m.is_string()) {
            const auto path = std::filesystem::path(base_dir) / m.get<std::string>();
            cfg.mixture = parse_mixture_object(load_json_file(path.string()));
        } else if (m.is_object()) {
            cfg.mixture = parse_mixture_object(m);
        } else {
            throw ConfigError("mixture must be an object or a file path string");
        }
    }
    if (j.contains("sweep")) cfg.sweep = parse_sweep(j.at("sweep"), cfg.sweep);
    if (j.contains("bench")) cfg.bench = parse_bench(j.at("bench"), cfg.bench);
    if (j.contains("tune")) cfg.tune = parse_tune(j.at("tune"), cfg.tune);
    return cfg;
}

EngineConfig load_config(const std::string& path) {
    const json j = load_json_file(path);
    return parse_config(j, std::filesystem::path(path).parent_path().string());
}

json config_to_json(const EngineConfig& cfg) {
    json mixture_components = json::array();
    for (const auto& c : cfg.mixture.components()) {
        mixture_components.push_back(
            {{"weight", c.weight}, {"mean", c.mean}, {"var", c.var}, {"label", c.label}});
    }
    json run = {{"sampler", to_string(cfg.run.sampler)},
                {"seed", cfg.run.seed},
                {"record_trajectory", cfg.run.record_trajectory}};
    if (cfg.run.condition) {
        run["condition"] = *cfg.run.condition;
    } else {
        run["condition"] = nullptr;
    }
    return {
        {"master_seed", cfg.master_seed},
        {"schedule",
         {{"kind", to_string(cfg.schedule.kind)},
          {"num_steps", cfg.schedule.num_steps},
          {"beta_min", cfg.schedule.beta_min},
          {"beta_max", cfg.schedule.beta_max}}},
        {"guidance",
         {{"scale", cfg.guidance.scale},
          {"skip_start_frac", cfg.guidance.skip_start_frac},
          {"skip_end_frac", cfg.guidance.skip_end_frac}}},
        {"cost", {{"eval_cost", cfg.cost.eval_cost}, {"iter_overhead", cfg.cost.iter_overhead}}},
        {"run", run},
        {"mixture", {{"components", mixture_components}}},
        {"sweep",
         {{"width_frac", cfg.sweep.width_frac},
          {"n_positions", cfg.sweep.n_positions},
          {"n_seeds", cfg.sweep.n_seeds}}},
        {"bench", {{"fractions", cfg.bench.fractions}, {"n_seeds", cfg.bench.n_seeds}}},
        {"tune",
         {{"fraction", cfg.tune.fraction},
          {"scales", cfg.tune.scales},
          {"n_seeds", cfg.tune.n_seeds}}},
    };
}

RunConfig make_run_config(const EngineConfig& cfg, std::uint64_t seed) {
    ScheduleParams schedule = [&] {
        try {
            return build_schedule(cfg.schedule.kind, cfg.schedule.num_steps,
                                  cfg.schedule.beta_min, cfg.schedule.beta_max);
        } catch (const InvalidScheduleConfig& e) {
            throw ConfigError(std::string("schedule: ") + e.what());
        }
    }();
    RunConfig run{
        .schedule = std::move(schedule),
        .guidance = cfg.guidance,
        .mixture = cfg.mixture,
        .condition = cfg.run.condition,
        .sampler_kind = cfg.run.sampler,
        .seed = seed,
        .cost = cfg.cost,
        .record_trajectory = cfg.run.record_trajectory,
    };
    try {
        run.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return run;
}

}  // namespace selguide
