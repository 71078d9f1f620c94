#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "selguide/metrics.hpp"
#include "selguide/sampler.hpp"

namespace selguide {

/// Seeds for the r-th run of an experiment batch: base seed + run index.
inline std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index) {
    return master_seed + run_index;
}

struct SweepPosition {
    double start_frac = 0.0;
    double end_frac = 0.0;
    double mean_endpoint_mse = 0.0;  // vs the matched-seed no-skip baseline
    double sliced_w2 = 0.0;          // vs direct draws from the target mixture
    std::int64_t nfe = 0;            // per run; identical across positions
};

struct SweepResult {
    std::size_t n_seeds = 0;
    std::vector<SweepPosition> positions;
};

/// Window-placement sensitivity: slides a skip window of width `width_frac`
/// across `n_positions` non-overlapping offsets (k*width for k = 0..P-1) and
/// reports, per position, divergence from the matched-seed baseline and
/// distance to the target (condition-restricted) mixture. Every position
/// skips the same number of iterations, so the compute budget is uniform.
/// Throws InvalidSweep when the windows would leave [0,1].
SweepResult window_sweep(const RunConfig& base, double width_frac,
                         std::size_t n_positions, std::size_t n_seeds);

struct BenchRow {
    double fraction = 0.0;
    double mean_simulated_time = 0.0;
    double saving = 0.0;  // vs the f = 0 row
    std::int64_t nfe = 0;
    double mean_endpoint_mse = 0.0;  // vs the matched-seed f = 0 baseline
    double sliced_w2 = 0.0;          // vs direct draws from the target mixture
};

struct BenchResult {
    double baseline_time = 0.0;
    std::optional<UnetFractionFit> fit;  // absent when every fraction is 0
    std::vector<BenchRow> rows;          // sorted by fraction
};

/// Savings benchmark: for each fraction f runs n_seeds samplings with the
/// last f of the iterations skipped and reports mean simulated time and the
/// saving against the f = 0 baseline, plus the least-squares UNet fraction
/// fitted from the measured savings. The fractions must include 0.
BenchResult bench(const RunConfig& base, std::vector<double> fractions,
                  std::size_t n_seeds);

struct TunePoint {
    double scale = 0.0;
    double mean_endpoint_mse = 0.0;
};

struct TuneResult {
    double best_scale = 0.0;
    std::vector<TunePoint> curve;  // grid order as given
};

/// Guidance-scale retuning: with the last `skip_last_frac` of the iterations
/// skipped, evaluates each candidate scale against the no-skip baseline at
/// the base scale (matched seeds) and returns the divergence-minimizing scale
/// (ties broken toward the smaller scale) together with the full curve.
TuneResult gs_tune(const RunConfig& base, double skip_last_frac,
                   const std::vector<double>& scale_grid, std::size_t n_seeds);

}  // namespace selguide
