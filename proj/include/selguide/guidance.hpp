#pragma once

#include <cstddef>

#include "selguide/cost.hpp"
#include "selguide/vec.hpp"

namespace selguide {

/// Guidance scale plus the skip window: the fractional interval of
/// denoising-loop iterations (0 = noisiest) in which the unconditional
/// evaluation is eliminated.
struct GuidanceSpec {
    double scale = 7.5;
    double skip_start_frac = 0.0;
    double skip_end_frac = 0.0;

    void validate() const;
};

/// "skip the last `frac` of the iterations" == window (1 - frac, 1).
GuidanceSpec skip_last(double frac, double scale = 7.5);

/// Classifier-free guidance combination
///   eps_uncond + scale * (eps_cond - eps_uncond),
/// component-wise. scale == 1 returns the conditional prediction exactly
/// (bit for bit), matching the skipped-iteration semantics.
Vec cfg_combine(const Vec& eps_uncond, const Vec& eps_cond, double scale);

/// First iteration index inside the window (start fraction rounds up) and
/// one past the last (end fraction rounds down). Products within 1e-9 of an
/// integer snap to it, so decimal fractions hit exact counts. With this
/// rounding a window (1-f, 1) skips exactly floor(f*N) iterations and
/// equal-width windows at aligned offsets skip equal counts.
std::size_t skip_window_begin(double start_frac, std::size_t total_iters);
std::size_t skip_window_end(double end_frac, std::size_t total_iters);

bool in_skip_window(std::size_t iter_index, std::size_t total_iters,
                    const GuidanceSpec& spec);

/// Number of iterations the window covers out of total_iters.
std::size_t skip_count(std::size_t total_iters, const GuidanceSpec& spec);

/// One guidance-level noise prediction. Inside the skip window only the
/// conditional evaluator runs (nfe 1) and its prediction is used directly;
/// outside, both evaluators run (nfe 2) and their epsilons are combined at
/// spec.scale. Costs and nfe aggregate from the evaluators.
NoisePrediction selective_eps(const NoiseEvaluator& cond_eval,
                              const NoiseEvaluator& uncond_eval, const Vec& x,
                              std::size_t t, std::size_t iter_index,
                              std::size_t total_iters, const GuidanceSpec& spec);

}  // namespace selguide
