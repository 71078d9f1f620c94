#include "selguide/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "selguide/errors.hpp"

namespace selguide {

namespace {

constexpr std::size_t kReferencePoints = 2000;
constexpr std::size_t kProjections = 128;

std::vector<Trajectory> run_batch(const RunConfig& base, std::size_t n_seeds) {
    std::vector<Trajectory> out;
    out.reserve(n_seeds);
    RunConfig cfg = base;
    cfg.record_trajectory = false;
    for (std::size_t r = 0; r < n_seeds; ++r) {
        cfg.seed = run_seed(base.seed, r);
        out.push_back(run_sampling(cfg));
    }
    return out;
}

std::vector<SeededEndpoint> endpoints_of(const std::vector<Trajectory>& batch) {
    std::vector<SeededEndpoint> out;
    out.reserve(batch.size());
    for (const auto& t : batch) out.emplace_back(t.seed, t.endpoint);
    return out;
}

double mean_simulated_time(const std::vector<Trajectory>& batch) {
    double total = 0.0;
    for (const auto& t : batch) total += t.simulated_time;
    return total / static_cast<double>(batch.size());
}

}  // namespace

SweepResult window_sweep(const RunConfig& base, double width_frac,
                         std::size_t n_positions, std::size_t n_seeds) {
    if (n_positions == 0) throw InvalidSweep("n_positions must be >= 1");
    if (n_seeds == 0) throw std::invalid_argument("n_seeds must be >= 1");
    if (!(width_frac >= 0.0 && width_frac <= 1.0)) {
        throw InvalidSweep("width_frac must lie in [0,1]");
    }
    if (width_frac * static_cast<double>(n_positions) > 1.0 + 1e-12) {
        throw InvalidSweep("sweep positions exceed [0,1]");
    }

    RunConfig baseline_cfg = base;
    baseline_cfg.guidance.skip_start_frac = 0.0;
    baseline_cfg.guidance.skip_end_frac = 0.0;
    const auto baseline = run_batch(baseline_cfg, n_seeds);
    const auto baseline_pairs = endpoints_of(baseline);

    const auto reference =
        sample_mixture(base.mixture, base.condition, kReferencePoints, base.seed);

    SweepResult result;
    result.n_seeds = n_seeds;
    for (std::size_t k = 0; k < n_positions; ++k) {
        RunConfig cfg = base;
        cfg.guidance.skip_start_frac = static_cast<double>(k) * width_frac;
        cfg.guidance.skip_end_frac = static_cast<double>(k + 1) * width_frac;
        const auto batch = run_batch(cfg, n_seeds);
        const auto report = divergence_report(baseline_pairs, endpoints_of(batch), reference,
                                              kProjections, base.seed);

        SweepPosition pos;
        pos.start_frac = cfg.guidance.skip_start_frac;
        pos.end_frac = cfg.guidance.skip_end_frac;
        pos.mean_endpoint_mse = report.endpoint_mse;
        pos.sliced_w2 = report.sliced_w2;
        pos.nfe = batch.front().nfe_total;
        result.positions.push_back(pos);
    }
    return result;
}

BenchResult bench(const RunConfig& base, std::vector<double> fractions,
                  std::size_t n_seeds) {
    if (fractions.empty()) throw std::invalid_argument("bench needs at least one fraction");
    if (n_seeds == 0) throw std::invalid_argument("n_seeds must be >= 1");
    for (double f : fractions) {
        if (!(f >= 0.0 && f <= 1.0)) {
            throw std::invalid_argument("bench fraction outside [0,1]: " + std::to_string(f));
        }
    }
    if (std::none_of(fractions.begin(), fractions.end(), [](double f) { return f == 0.0; })) {
        throw std::invalid_argument("bench fractions must include 0 for the baseline row");
    }
    std::sort(fractions.begin(), fractions.end());

    RunConfig baseline_cfg = base;
    baseline_cfg.guidance = skip_last(0.0, base.guidance.scale);
    const auto baseline = run_batch(baseline_cfg, n_seeds);
    const auto baseline_pairs = endpoints_of(baseline);
    const auto reference =
        sample_mixture(base.mixture, base.condition, kReferencePoints, base.seed);

    BenchResult result;
    for (double f : fractions) {
        RunConfig cfg = base;
        cfg.guidance = skip_last(f, base.guidance.scale);
        const auto batch = f == 0.0 ? baseline : run_batch(cfg, n_seeds);
        const auto report = divergence_report(baseline_pairs, endpoints_of(batch), reference,
                                              kProjections, base.seed);

        BenchRow row;
        row.fraction = f;
        row.mean_simulated_time = mean_simulated_time(batch);
        row.nfe = batch.front().nfe_total;
        row.mean_endpoint_mse = report.endpoint_mse;
        row.sliced_w2 = report.sliced_w2;
        result.rows.push_back(row);
    }
    result.baseline_time = result.rows.front().mean_simulated_time;
    std::vector<std::pair<double, double>> fit_rows;
    for (auto& row : result.rows) {
        row.saving = (result.baseline_time - row.mean_simulated_time) / result.baseline_time;
        if (row.fraction > 0.0) fit_rows.emplace_back(row.fraction, row.saving);
    }
    if (!fit_rows.empty()) result.fit = fit_unet_fraction(fit_rows);
    return result;
}

TuneResult gs_tune(const RunConfig& base, double skip_last_frac,
                   const std::vector<double>& scale_grid, std::size_t n_seeds) {
    if (scale_grid.empty()) throw std::invalid_argument("gs_tune needs a non-empty scale grid");
    if (!(skip_last_frac > 0.0 && skip_last_frac <= 1.0)) {
        throw std::invalid_argument("gs_tune fraction must lie in (0,1]");
    }
    if (n_seeds == 0) throw std::invalid_argument("n_seeds must be >= 1");

    RunConfig baseline_cfg = base;
    baseline_cfg.guidance.skip_start_frac = 0.0;
    baseline_cfg.guidance.skip_end_frac = 0.0;
    const auto baseline_pairs = endpoints_of(run_batch(baseline_cfg, n_seeds));

    TuneResult result;
    bool have_best = false;
    double best_mse = 0.0;
    for (double scale : scale_grid) {
        RunConfig cfg = base;
        cfg.guidance = skip_last(skip_last_frac, scale);
        const double mse = endpoint_mse(baseline_pairs, endpoints_of(run_batch(cfg, n_seeds)));
        result.curve.push_back({scale, mse});
        if (!have_best || mse < best_mse || (mse == best_mse && scale < result.best_scale)) {
            have_best = true;
            best_mse = mse;
            result.best_scale = scale;
        }
    }
    return result;
}

}  // namespace selguide
