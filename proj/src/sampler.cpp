#include "selguide/sampler.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "selguide/errors.hpp"
#include "selguide/rng.hpp"

namespace selguide {

std::string to_string(SamplerKind kind) {
    return kind == SamplerKind::ddpm ? "ddpm" : "ddim";
}

SamplerKind sampler_kind_from_string(const std::string& name) {
    if (name == "ddpm") return SamplerKind::ddpm;
    if (name == "ddim") return SamplerKind::ddim;
    throw std::invalid_argument("unknown sampler kind: " + name);
}

void RunConfig::validate() const {
    guidance.validate();
    cost.validate();
    if (condition && !mixture.has_label(*condition)) {
        throw UnknownLabel("condition " + std::to_string(*condition) +
                           " matches no mixture component");
    }
}

Vec reverse_step_ddpm(const Vec& x_t, const Vec& eps_hat, std::size_t t,
                      const ScheduleParams& schedule, const Vec& noise) {
    if (x_t.size() != eps_hat.size() || x_t.size() != noise.size()) {
        throw DimensionMismatch("reverse_step_ddpm: vector lengths differ");
    }
    const double beta = schedule.beta(t);
    const double alpha = schedule.alpha(t);
    const double ab = schedule.alpha_bar(t);
    const double eps_coef = beta / std::sqrt(1.0 - ab);
    const double inv_sqrt_alpha = 1.0 / std::sqrt(alpha);
    const double sigma = t > 1 ? std::sqrt(beta) : 0.0;
    Vec out(x_t.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = (x_t[j] - eps_coef * eps_hat[j]) * inv_sqrt_alpha + sigma * noise[j];
    }
    return out;
}

Vec reverse_step_ddim(const Vec& x_t, const Vec& eps_hat, std::size_t t,
                      const ScheduleParams& schedule) {
    if (x_t.size() != eps_hat.size()) {
        throw DimensionMismatch("reverse_step_ddim: vector lengths differ");
    }
    const double ab = schedule.alpha_bar(t);
    const double ab_prev = schedule.alpha_bar(t - 1);
    const double sqrt_ab = std::sqrt(ab);
    const double sqrt_one_minus_ab = std::sqrt(1.0 - ab);
    const double sqrt_ab_prev = std::sqrt(ab_prev);
    const double sqrt_one_minus_ab_prev = std::sqrt(1.0 - ab_prev);
    Vec out(x_t.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double x0 = (x_t[j] - sqrt_one_minus_ab * eps_hat[j]) / sqrt_ab;
        out[j] = sqrt_ab_prev * x0 + sqrt_one_minus_ab_prev * eps_hat[j];
    }
    return out;
}

Trajectory run_sampling(const RunConfig& config) {
    config.validate();
    const auto t_start = std::chrono::steady_clock::now();

    const std::size_t n = config.schedule.num_steps();
    const std::size_t d = config.mixture.dim();

    VirtualClock clock;
    const NoiseEvaluator cond_eval = simulated_eval(
        [&config](const Vec& x, std::size_t t) {
            return gm_epsilon(config.mixture, x, t, config.schedule, config.condition);
        },
        config.cost, clock);
    const NoiseEvaluator uncond_eval = simulated_eval(
        [&config](const Vec& x, std::size_t t) {
            return gm_epsilon(config.mixture, x, t, config.schedule, std::nullopt);
        },
        config.cost, clock);

    Trajectory traj;
    traj.seed = config.seed;
    traj.skip_flags.resize(n);

    Vec x = rng::normal_vec(config.seed, n, rng::kSlotStepNoise, d);
    if (config.record_trajectory) {
        traj.states.reserve(n + 1);
        traj.states.push_back(x);
    }

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = n - i;
        const NoisePrediction pred =
            selective_eps(cond_eval, uncond_eval, x, t, i, n, config.guidance);
        traj.nfe_total += pred.nfe;
        traj.skip_flags[i] = in_skip_window(i, n, config.guidance);

        if (config.sampler_kind == SamplerKind::ddpm) {
            const Vec noise = t > 1 ? rng::normal_vec(config.seed, i, rng::kSlotStepNoise, d)
                                    : Vec(d, 0.0);
            x = reverse_step_ddpm(x, pred.epsilon, t, config.schedule, noise);
        } else {
            x = reverse_step_ddim(x, pred.epsilon, t, config.schedule);
        }
        clock.advance(config.cost.iter_overhead);
        if (config.record_trajectory) traj.states.push_back(x);
    }

    traj.endpoint = std::move(x);
    traj.simulated_time = clock.elapsed();
    traj.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return traj;
}

}  // namespace selguide
