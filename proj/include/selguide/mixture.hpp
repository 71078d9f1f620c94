#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "selguide/schedule.hpp"
#include "selguide/vec.hpp"

namespace selguide {

struct MixtureComponent {
    double weight = 0.0;
    Vec mean;
    Vec var;  // diagonal covariance
    int label = 0;
};

/// Labeled Gaussian mixture acting as the data distribution. The exact
/// noise-prediction oracle for both the conditional and unconditional branch
/// is derived from it in closed form. Immutable and shareable.
class MixtureModel {
public:
    /// Validates: at least one component; weights positive and summing to 1
    /// within 1e-9; variances strictly positive; mean/var lengths == dim;
    /// labels non-negative.
    MixtureModel(std::size_t dim, std::vector<MixtureComponent> components);

    std::size_t dim() const { return dim_; }
    const std::vector<MixtureComponent>& components() const { return components_; }
    bool has_label(int label) const;
    /// Sorted unique labels.
    std::vector<int> labels() const;

private:
    std::size_t dim_;
    std::vector<MixtureComponent> components_;
};

/// The desk-scale default: d = 2, four unit-variance components with means on
/// a circle of radius 4, two labels with two components each.
MixtureModel default_mixture();

/// Exact minimum-MSE noise prediction for the mixture under the VP forward
/// process. The time-t marginal of component k is Gaussian with mean
/// sqrt(alpha_bar_t)*mean_k and variance alpha_bar_t*var_k + (1-alpha_bar_t);
/// the mixture score is the responsibility-weighted sum of component scores
/// (responsibilities stabilized in log space), and
/// epsilon = -sqrt(1-alpha_bar_t) * score.
///
/// A condition restricts the mixture to components carrying that label (the
/// unconditional branch is the full mixture). Responsibilities normalize out
/// any common weight factor, so restricted weights need no renormalization.
/// Throws UnknownLabel when the condition matches no component and
/// DimensionMismatch when x has the wrong length.
Vec gm_epsilon(const MixtureModel& model, const Vec& x, std::size_t t,
               const ScheduleParams& schedule, std::optional<int> condition);

/// Draws n points directly from the (optionally label-restricted) mixture.
/// Deterministic in the seed; uses rng slots 1 and 2.
std::vector<Vec> sample_mixture(const MixtureModel& model, std::optional<int> condition,
                                std::size_t n, std::uint64_t seed);

}  // namespace selguide
