#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selguide/cost.hpp"
#include "selguide/guidance.hpp"
#include "selguide/mixture.hpp"
#include "selguide/schedule.hpp"
#include "selguide/vec.hpp"

namespace selguide {

enum class SamplerKind { ddpm, ddim };

std::string to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(const std::string& name);

/// Everything one sampling run needs. Immutable while the run executes; the
/// experiment layer may copy it freely and run copies concurrently (each run
/// owns its own virtual clock and draws no shared RNG state).
struct RunConfig {
    ScheduleParams schedule;
    GuidanceSpec guidance;
    MixtureModel mixture;
    std::optional<int> condition;  // nullopt = unconditional run
    SamplerKind sampler_kind = SamplerKind::ddpm;
    std::uint64_t seed = 0;
    CostModel cost;
    bool record_trajectory = false;

    void validate() const;
};

struct Trajectory {
    std::uint64_t seed = 0;
    /// x_N .. x_0 (N+1 entries) when record_trajectory was set, else empty.
    std::vector<Vec> states;
    Vec endpoint;  // x_0
    std::vector<bool> skip_flags;  // one per iteration
    std::int64_t nfe_total = 0;
    double simulated_time = 0.0;
    /// Real elapsed seconds; informational only and never serialized.
    double wall_time = 0.0;
};

/// DDPM ancestral update
///   x_{t-1} = (x_t - (beta_t/sqrt(1-alpha_bar_t)) * eps_hat)/sqrt(alpha_t)
///             + sigma_t * noise,
/// sigma_t = sqrt(beta_t) for t > 1 and sigma_1 = 0 (the final step adds no
/// noise). The noise vector is supplied by the caller.
Vec reverse_step_ddpm(const Vec& x_t, const Vec& eps_hat, std::size_t t,
                      const ScheduleParams& schedule, const Vec& noise);

/// Deterministic DDIM update (eta = 0): predict
///   x0 = (x_t - sqrt(1-alpha_bar_t) * eps_hat)/sqrt(alpha_bar_t),
/// then x_{t-1} = sqrt(alpha_bar_{t-1}) * x0 + sqrt(1-alpha_bar_{t-1}) * eps_hat,
/// with alpha_bar_0 = 1.
Vec reverse_step_ddim(const Vec& x_t, const Vec& eps_hat, std::size_t t,
                      const ScheduleParams& schedule);

/// Runs the reverse denoising loop: draw x_N ~ N(0, I), then for
/// i = 0..N-1 visit t = N-i, evaluate selective guidance and apply the
/// reverse step. Charges cost.eval_cost per oracle call and
/// cost.iter_overhead per iteration on a per-run virtual clock.
///
/// All stochastic draws are keyed by (seed, iteration index, slot) — the init
/// draw uses stream N — so the noise sequence does not depend on which
/// iterations were skipped; trajectories of a baseline and a skip-window run
/// with the same seed agree exactly up to the first skipped iteration.
Trajectory run_sampling(const RunConfig& config);

}  // namespace selguide
