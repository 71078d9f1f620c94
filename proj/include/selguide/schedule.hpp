#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace selguide {

enum class ScheduleKind { linear, cosine };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& name);

/// Discretized variance schedule of the forward diffusion. Steps are indexed
/// t = 1..N with t = N the noisiest state; the denoising loop visits
/// t = N - i for i = 0..N-1. Immutable after construction and safe to share
/// read-only across concurrent runs.
class ScheduleParams {
public:
    /// Builds the derived alpha / alpha-bar tables and validates:
    /// every beta in (0,1), alpha-bars strictly decreasing and inside (0,1).
    static ScheduleParams from_betas(std::vector<double> betas);

    std::size_t num_steps() const { return betas_.size(); }

    /// t in 1..N
    double beta(std::size_t t) const;
    double alpha(std::size_t t) const;
    /// t in 0..N; alpha_bar(0) == 1 (the identity of the running product)
    double alpha_bar(std::size_t t) const;

    const std::vector<double>& betas() const { return betas_; }
    const std::vector<double>& alphas() const { return alphas_; }
    const std::vector<double>& alpha_bars() const { return alpha_bars_; }

private:
    ScheduleParams() = default;

    std::vector<double> betas_;
    std::vector<double> alphas_;
    std::vector<double> alpha_bars_;
};

/// Constructs a schedule of `num_steps` betas.
///  - linear: betas evenly spaced from beta_min to beta_max inclusive
///    (a single step uses beta_min); requires 0 < beta_min <= beta_max < 1.
///  - cosine: squared-cosine alpha-bar profile with offset 0.008, betas
///    derived as 1 - alpha_bar_t/alpha_bar_{t-1} and clipped to (0, 0.999];
///    beta_min/beta_max are ignored.
/// Throws InvalidScheduleConfig on violated bounds or num_steps == 0.
ScheduleParams build_schedule(ScheduleKind kind, std::size_t num_steps,
                              double beta_min, double beta_max);

}  // namespace selguide
