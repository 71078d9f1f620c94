#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>

#include "selguide/vec.hpp"

namespace selguide {

/// Simulated compute cost of one denoising iteration: `eval_cost` seconds per
/// noise-model evaluation plus `iter_overhead` seconds of per-iteration
/// non-model work (scheduler step, bookkeeping). Defaults are the calibrated
/// values that make a 50-step, two-evaluation run take 9.94 simulated seconds.
struct CostModel {
    double eval_cost = 0.0811;
    double iter_overhead = 0.0366;

    /// Share of per-iteration time spent in the two noise evaluations,
    /// u = 2e / (2e + o); 0 when both costs are zero.
    double unet_fraction() const {
        const double denom = 2.0 * eval_cost + iter_overhead;
        return denom > 0.0 ? 2.0 * eval_cost / denom : 0.0;
    }

    void validate() const {
        if (!(eval_cost >= 0.0) || !(iter_overhead >= 0.0)) {
            throw std::invalid_argument("cost model entries must be non-negative");
        }
    }
};

/// Deterministic accumulator of simulated seconds. All benchmark assertions
/// run on this clock; real wall time is reported alongside but never gated
/// on. One clock per run; runs never share one.
class VirtualClock {
public:
    void advance(double seconds) { elapsed_ += seconds; }
    double elapsed() const { return elapsed_; }

private:
    double elapsed_ = 0.0;
};

struct NoisePrediction {
    Vec epsilon;
    int nfe = 0;
    double simulated_cost = 0.0;
};

using EpsilonFn = std::function<Vec(const Vec& x, std::size_t t)>;
using NoiseEvaluator = std::function<NoisePrediction(const Vec& x, std::size_t t)>;

/// Wraps a raw epsilon function so that every call charges `cost.eval_cost`
/// on the clock and reports nfe = 1. The epsilon values pass through
/// untouched (bitwise).
inline NoiseEvaluator simulated_eval(EpsilonFn inner, const CostModel& cost,
                                     VirtualClock& clock) {
    return [inner = std::move(inner), eval_cost = cost.eval_cost,
            &clock](const Vec& x, std::size_t t) -> NoisePrediction {
        clock.advance(eval_cost);
        return NoisePrediction{inner(x, t), 1, eval_cost};
    };
}

}  // namespace selguide
