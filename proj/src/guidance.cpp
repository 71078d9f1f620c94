#include "selguide/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "selguide/errors.hpp"

namespace selguide {

void GuidanceSpec::validate() const {
    if (!std::isfinite(scale) || scale < 0.0) {
        throw std::invalid_argument("guidance scale must be finite and >= 0");
    }
    if (!(skip_start_frac >= 0.0 && skip_start_frac <= 1.0) ||
        !(skip_end_frac >= 0.0 && skip_end_frac <= 1.0) ||
        skip_start_frac > skip_end_frac) {
        throw std::invalid_argument("skip window fractions must satisfy 0 <= start <= end <= 1");
    }
}

GuidanceSpec skip_last(double frac, double scale) {
    GuidanceSpec spec{scale, 1.0 - frac, 1.0};
    spec.validate();
    return spec;
}

Vec cfg_combine(const Vec& eps_uncond, const Vec& eps_cond, double scale) {
    if (eps_uncond.size() != eps_cond.size()) {
        throw DimensionMismatch("cfg_combine: vector lengths differ (" +
                                std::to_string(eps_uncond.size()) + " vs " +
                                std::to_string(eps_cond.size()) + ")");
    }
    // scale 1 must collapse to the conditional term bitwise
    if (scale == 1.0) return eps_cond;
    Vec out(eps_uncond.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = eps_uncond[j] + scale * (eps_cond[j] - eps_uncond[j]);
    }
    return out;
}

namespace {

// snaps fraction*n to the nearest integer when within kFracEps, so that e.g.
// 0.7 of 90 counts as 63 even though 0.7*90 rounds below it
constexpr double kFracEps = 1e-9;

std::size_t clamp_index(double idx, std::size_t n) {
    if (idx <= 0.0) return 0;
    if (idx >= static_cast<double>(n)) return n;
    return static_cast<std::size_t>(idx);
}

}  // namespace

std::size_t skip_window_begin(double start_frac, std::size_t total_iters) {
    return clamp_index(std::ceil(start_frac * static_cast<double>(total_iters) - kFracEps),
                       total_iters);
}

std::size_t skip_window_end(double end_frac, std::size_t total_iters) {
    return clamp_index(std::floor(end_frac * static_cast<double>(total_iters) + kFracEps),
                       total_iters);
}

bool in_skip_window(std::size_t iter_index, std::size_t total_iters,
                    const GuidanceSpec& spec) {
    if (iter_index >= total_iters) {
        throw std::out_of_range("in_skip_window: iter_index out of 0..N-1");
    }
    return skip_window_begin(spec.skip_start_frac, total_iters) <= iter_index &&
           iter_index < skip_window_end(spec.skip_end_frac, total_iters);
}

std::size_t skip_count(std::size_t total_iters, const GuidanceSpec& spec) {
    const std::size_t b = skip_window_begin(spec.skip_start_frac, total_iters);
    const std::size_t e = skip_window_end(spec.skip_end_frac, total_iters);
    return e > b ? e - b : 0;
}

NoisePrediction selective_eps(const NoiseEvaluator& cond_eval,
                              const NoiseEvaluator& uncond_eval, const Vec& x,
                              std::size_t t, std::size_t iter_index,
                              std::size_t total_iters, const GuidanceSpec& spec) {
    if (in_skip_window(iter_index, total_iters, spec)) {
        return cond_eval(x, t);
    }
    NoisePrediction uncond = uncond_eval(x, t);
    NoisePrediction cond = cond_eval(x, t);
    NoisePrediction out;
    out.epsilon = cfg_combine(uncond.epsilon, cond.epsilon, spec.scale);
    out.nfe = uncond.nfe + cond.nfe;
    out.simulated_cost = uncond.simulated_cost + cond.simulated_cost;
    return out;
}

}  // namespace selguide
