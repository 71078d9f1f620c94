#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "selguide/vec.hpp"

namespace selguide {

/// Default UNet-time share used when no fit is available; the calibration
/// constant behind the stock bench config.
inline constexpr double kCalibratedUnetFraction = 0.814;

struct DivergenceReport {
    double endpoint_mse = 0.0;
    double sliced_w2 = 0.0;
    std::size_t n_pairs = 0;
    std::size_t n_points = 0;
};

using SeededEndpoint = std::pair<std::uint64_t, Vec>;

/// Mean over seeds of the squared Euclidean distance between same-seed
/// endpoint pairs. Throws SeedMismatch when the two sets do not cover the
/// same seeds, DimensionMismatch on unequal endpoint lengths.
double endpoint_mse(const std::vector<SeededEndpoint>& baseline,
                    const std::vector<SeededEndpoint>& variant);

/// Monte-Carlo sliced Wasserstein-2 distance: average over random unit
/// directions of the squared 1-D Wasserstein-2 between the projections
/// (exact quantile coupling of the empirical distributions), then the square
/// root. Deterministic in the projection seed; symmetric when the sets have
/// equal sizes. Throws EmptySet / DimensionMismatch.
double sliced_w2(const std::vector<Vec>& a, const std::vector<Vec>& b,
                 std::size_t n_projections, std::uint64_t seed);

/// Both divergence statistics of a variant endpoint set at once: paired
/// same-seed MSE against the baseline and sliced-W2 against a reference set.
DivergenceReport divergence_report(const std::vector<SeededEndpoint>& baseline,
                                   const std::vector<SeededEndpoint>& variant,
                                   const std::vector<Vec>& reference,
                                   std::size_t n_projections, std::uint64_t seed);

struct UnetFractionFit {
    double u = 0.0;
    bool clamped = false;  // set when the raw fit fell outside [0,1]
};

/// Least-squares fit of saving = f*u/2 over (f, measured_saving) rows:
/// u = 2*sum(f*s)/sum(f^2), clamped to [0,1]. Throws DegenerateFit when no
/// row has f > 0.
UnetFractionFit fit_unet_fraction(const std::vector<std::pair<double, double>>& rows);

/// Ideal-case saving from optimizing fraction f of the iterations when the
/// two noise evaluations take share u of an iteration: f*u/2.
double predicted_saving(double f, double u);

struct SavingsModel {
    double unet_fraction = kCalibratedUnetFraction;
    double predicted(double f) const { return predicted_saving(f, unet_fraction); }
};

}  // namespace selguide
