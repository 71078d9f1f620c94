#include "selguide/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>

#include "selguide/errors.hpp"
#include "selguide/rng.hpp"

namespace selguide {

double endpoint_mse(const std::vector<SeededEndpoint>& baseline,
                    const std::vector<SeededEndpoint>& variant) {
    if (baseline.size() != variant.size()) {
        throw SeedMismatch("endpoint sets have different sizes");
    }
    if (baseline.empty()) throw EmptySet("endpoint sets are empty");
    std::unordered_map<std::uint64_t, const Vec*> by_seed;
    by_seed.reserve(variant.size());
    for (const auto& [seed, endpoint] : variant) by_seed[seed] = &endpoint;

    double total = 0.0;
    for (const auto& [seed, endpoint] : baseline) {
        const auto it = by_seed.find(seed);
        if (it == by_seed.end()) {
            throw SeedMismatch("seed " + std::to_string(seed) + " missing from variant set");
        }
        const Vec& other = *it->second;
        if (other.size() != endpoint.size()) {
            throw DimensionMismatch("endpoint_mse: endpoint lengths differ");
        }
        double sq = 0.0;
        for (std::size_t j = 0; j < endpoint.size(); ++j) {
            const double diff = endpoint[j] - other[j];
            sq += diff * diff;
        }
        total += sq;
    }
    return total / static_cast<double>(baseline.size());
}

namespace {

/// Exact squared W2 between two sorted 1-D empirical distributions: the
/// integral over u in (0,1) of (Fa^{-1}(u) - Fb^{-1}(u))^2, evaluated on the
/// merged quantile breakpoints. Breakpoints are compared as exact rationals
/// (units of 1/(n*m)), so equal sizes reduce to the paired sorted-sample mean.
double w2sq_sorted(const std::vector<double>& a, const std::vector<double>& b) {
    const std::int64_t n = static_cast<std::int64_t>(a.size());
    const std::int64_t m = static_cast<std::int64_t>(b.size());
    std::int64_t i = 0, j = 0, u = 0;
    double acc = 0.0;
    while (i < n && j < m) {
        const std::int64_t ua = (i + 1) * m;
        const std::int64_t ub = (j + 1) * n;
        const std::int64_t nu = std::min(ua, ub);
        const double diff = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(j)];
        acc += diff * diff * static_cast<double>(nu - u);
        if (ua == nu) ++i;
        if (ub == nu) ++j;
        u = nu;
    }
    return acc / (static_cast<double>(n) * static_cast<double>(m));
}

}  // namespace

double sliced_w2(const std::vector<Vec>& a, const std::vector<Vec>& b,
                 std::size_t n_projections, std::uint64_t seed) {
    if (a.empty() || b.empty()) throw EmptySet("sliced_w2: point set is empty");
    if (n_projections == 0) throw std::invalid_argument("sliced_w2: n_projections must be >= 1");
    const std::size_t d = a.front().size();
    for (const auto& p : a) {
        if (p.size() != d) throw DimensionMismatch("sliced_w2: ragged point set");
    }
    for (const auto& p : b) {
        if (p.size() != d) throw DimensionMismatch("sliced_w2: point sets have different dims");
    }

    std::vector<double> proj_a(a.size());
    std::vector<double> proj_b(b.size());
    double total = 0.0;
    for (std::size_t p = 0; p < n_projections; ++p) {
        Vec dir = rng::normal_vec(seed, p, rng::kSlotProjection, d);
        double norm = 0.0;
        for (double c : dir) norm += c * c;
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            dir.assign(d, 0.0);
            dir[0] = 1.0;
            norm = 1.0;
        }
        for (std::size_t k = 0; k < a.size(); ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += a[k][j] * dir[j];
            proj_a[k] = s / norm;
        }
        for (std::size_t k = 0; k < b.size(); ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += b[k][j] * dir[j];
            proj_b[k] = s / norm;
        }
        std::sort(proj_a.begin(), proj_a.end());
        std::sort(proj_b.begin(), proj_b.end());
        total += w2sq_sorted(proj_a, proj_b);
    }
    return std::sqrt(total / static_cast<double>(n_projections));
}

DivergenceReport divergence_report(const std::vector<SeededEndpoint>& baseline,
                                   const std::vector<SeededEndpoint>& variant,
                                   const std::vector<Vec>& reference,
                                   std::size_t n_projections, std::uint64_t seed) {
    DivergenceReport report;
    report.endpoint_mse = endpoint_mse(baseline, variant);
    std::vector<Vec> points;
    points.reserve(variant.size());
    for (const auto& [run, endpoint] : variant) points.push_back(endpoint);
    report.sliced_w2 = sliced_w2(points, reference, n_projections, seed);
    report.n_pairs = baseline.size();
    report.n_points = reference.size();
    return report;
}

UnetFractionFit fit_unet_fraction(const std::vector<std::pair<double, double>>& rows) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& [f, saving] : rows) {
        num += f * saving;
        den += f * f;
    }
    if (!(den > 0.0)) {
        throw DegenerateFit("fit_unet_fraction needs at least one row with f > 0");
    }
    const double raw = 2.0 * num / den;
    UnetFractionFit fit;
    fit.u = std::clamp(raw, 0.0, 1.0);
    fit.clamped = raw != fit.u;
    return fit;
}

double predicted_saving(double f, double u) { return f * u / 2.0; }

}  // namespace selguide
