#include "selguide/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "selguide/errors.hpp"
#include "selguide/rng.hpp"

namespace selguide {

MixtureModel::MixtureModel(std::size_t dim, std::vector<MixtureComponent> components)
    : dim_(dim), components_(std::move(components)) {
    if (dim_ == 0) throw DimensionMismatch("mixture dim must be >= 1");
    if (components_.empty()) throw std::invalid_argument("mixture needs at least one component");
    double weight_sum = 0.0;
    for (std::size_t k = 0; k < components_.size(); ++k) {
        const auto& c = components_[k];
        const std::string where = "component " + std::to_string(k);
        if (c.mean.size() != dim_ || c.var.size() != dim_) {
            throw DimensionMismatch(where + ": mean/var length != dim");
        }
        if (!(c.weight > 0.0)) throw std::invalid_argument(where + ": weight must be positive");
        if (c.label < 0) throw std::invalid_argument(where + ": label must be non-negative");
        for (double v : c.var) {
            if (!(v > 0.0)) throw std::invalid_argument(where + ": variances must be positive");
        }
        weight_sum += c.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) {
        throw std::invalid_argument("component weights must sum to 1 (got " +
                                    std::to_string(weight_sum) + ")");
    }
}

bool MixtureModel::has_label(int label) const {
    return std::any_of(components_.begin(), components_.end(),
                       [label](const MixtureComponent& c) { return c.label == label; });
}

std::vector<int> MixtureModel::labels() const {
    std::vector<int> out;
    for (const auto& c : components_) out.push_back(c.label);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

MixtureModel default_mixture() {
    const double r = 4.0;
    std::vector<MixtureComponent> comps = {
        {0.25, {r, 0.0}, {1.0, 1.0}, 0},
        {0.25, {0.0, r}, {1.0, 1.0}, 0},
        {0.25, {-r, 0.0}, {1.0, 1.0}, 1},
        {0.25, {0.0, -r}, {1.0, 1.0}, 1},
    };
    return MixtureModel(2, std::move(comps));
}

namespace {

std::vector<std::size_t> selected_components(const MixtureModel& model,
                                             std::optional<int> condition) {
    std::vector<std::size_t> idx;
    const auto& comps = model.components();
    for (std::size_t k = 0; k < comps.size(); ++k) {
        if (!condition || comps[k].label == *condition) idx.push_back(k);
    }
    if (idx.empty()) {
        throw UnknownLabel("no mixture component with label " + std::to_string(*condition));
    }
    return idx;
}

}  // namespace

Vec gm_epsilon(const MixtureModel& model, const Vec& x, std::size_t t,
               const ScheduleParams& schedule, std::optional<int> condition) {
    const std::size_t d = model.dim();
    if (x.size() != d) {
        throw DimensionMismatch("gm_epsilon: x has length " + std::to_string(x.size()) +
                                ", expected " + std::to_string(d));
    }
    if (t < 1 || t > schedule.num_steps()) {
        throw std::out_of_range("gm_epsilon: t out of 1..N");
    }
    const auto idx = selected_components(model, condition);
    const double ab = schedule.alpha_bar(t);
    const double sqrt_ab = std::sqrt(ab);
    const double one_minus_ab = 1.0 - ab;

    const auto& comps = model.components();
    std::vector<double> log_w(idx.size());
    double log_max = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < idx.size(); ++n) {
        const auto& c = comps[idx[n]];
        double ll = std::log(c.weight);
        for (std::size_t j = 0; j < d; ++j) {
            const double v = ab * c.var[j] + one_minus_ab;
            const double diff = x[j] - sqrt_ab * c.mean[j];
            ll -= 0.5 * (diff * diff / v + std::log(2.0 * std::numbers::pi * v));
        }
        log_w[n] = ll;
        log_max = std::max(log_max, ll);
    }

    double resp_sum = 0.0;
    std::vector<double> resp(idx.size());
    for (std::size_t n = 0; n < idx.size(); ++n) {
        resp[n] = std::exp(log_w[n] - log_max);
        resp_sum += resp[n];
    }

    Vec eps(d, 0.0);
    const double scale = -std::sqrt(one_minus_ab);
    for (std::size_t n = 0; n < idx.size(); ++n) {
        const auto& c = comps[idx[n]];
        const double r = resp[n] / resp_sum;
        for (std::size_t j = 0; j < d; ++j) {
            const double v = ab * c.var[j] + one_minus_ab;
            eps[j] += r * (sqrt_ab * c.mean[j] - x[j]) / v;
        }
    }
    for (std::size_t j = 0; j < d; ++j) eps[j] *= scale;
    return eps;
}

std::vector<Vec> sample_mixture(const MixtureModel& model, std::optional<int> condition,
                                std::size_t n, std::uint64_t seed) {
    const auto idx = selected_components(model, condition);
    const auto& comps = model.components();
    double total = 0.0;
    for (std::size_t k : idx) total += comps[k].weight;

    std::vector<Vec> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng::uniform01(seed, i, rng::kSlotComponent, 0) * total;
        std::size_t pick = idx.back();
        double cum = 0.0;
        for (std::size_t k : idx) {
            cum += comps[k].weight;
            if (u <= cum) {
                pick = k;
                break;
            }
        }
        const auto& c = comps[pick];
        Vec x(model.dim());
        for (std::size_t j = 0; j < model.dim(); ++j) {
            x[j] = c.mean[j] + std::sqrt(c.var[j]) * rng::normal(seed, i, rng::kSlotGaussian, j);
        }
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace selguide
