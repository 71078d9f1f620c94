#include "selguide/schedule.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "selguide/errors.hpp"

namespace selguide {

std::string to_string(ScheduleKind kind) {
    return kind == ScheduleKind::linear ? "linear" : "cosine";
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
    if (name == "linear") return ScheduleKind::linear;
    if (name == "cosine") return ScheduleKind::cosine;
    throw InvalidScheduleConfig("unknown schedule kind: " + name);
}

ScheduleParams ScheduleParams::from_betas(std::vector<double> betas) {
    if (betas.empty()) {
        throw InvalidScheduleConfig("schedule needs at least one step");
    }
    ScheduleParams p;
    p.betas_ = std::move(betas);
    p.alphas_.resize(p.betas_.size());
    p.alpha_bars_.resize(p.betas_.size());
    double running = 1.0;
    for (std::size_t i = 0; i < p.betas_.size(); ++i) {
        const double beta = p.betas_[i];
        if (!(beta > 0.0 && beta < 1.0)) {
            throw InvalidScheduleConfig("beta_" + std::to_string(i + 1) +
                                        " outside (0,1): " + std::to_string(beta));
        }
        p.alphas_[i] = 1.0 - beta;
        running *= p.alphas_[i];
        p.alpha_bars_[i] = running;
        if (i > 0 && !(p.alpha_bars_[i] < p.alpha_bars_[i - 1])) {
            throw InvalidScheduleConfig("alpha_bar not strictly decreasing at t=" +
                                        std::to_string(i + 1));
        }
    }
    if (!(p.alpha_bars_.back() > 0.0 && p.alpha_bars_.front() < 1.0)) {
        throw InvalidScheduleConfig("alpha_bar out of (0,1)");
    }
    return p;
}

double ScheduleParams::beta(std::size_t t) const {
    if (t < 1 || t > num_steps()) throw std::out_of_range("beta: t out of 1..N");
    return betas_[t - 1];
}

double ScheduleParams::alpha(std::size_t t) const {
    if (t < 1 || t > num_steps()) throw std::out_of_range("alpha: t out of 1..N");
    return alphas_[t - 1];
}

double ScheduleParams::alpha_bar(std::size_t t) const {
    if (t > num_steps()) throw std::out_of_range("alpha_bar: t out of 0..N");
    return t == 0 ? 1.0 : alpha_bars_[t - 1];
}

namespace {

std::vector<double> linear_betas(std::size_t n, double beta_min, double beta_max) {
    if (!(beta_min > 0.0) || !(beta_max < 1.0) || beta_min > beta_max) {
        throw InvalidScheduleConfig("linear schedule requires 0 < beta_min <= beta_max < 1");
    }
    std::vector<double> betas(n);
    betas.front() = beta_min;
    if (n > 1) {
        // endpoints pinned exactly; interior evenly spaced
        betas.back() = beta_max;
        const double step = (beta_max - beta_min) / static_cast<double>(n - 1);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            betas[i] = beta_min + step * static_cast<double>(i);
        }
    }
    return betas;
}

std::vector<double> cosine_betas(std::size_t n) {
    constexpr double offset = 0.008;
    constexpr double max_beta = 0.999;
    const auto profile = [&](double s) {
        const double c = std::cos((s + offset) / (1.0 + offset) * std::numbers::pi / 2.0);
        return c * c;
    };
    std::vector<double> betas(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t0 = static_cast<double>(i) / static_cast<double>(n);
        const double t1 = static_cast<double>(i + 1) / static_cast<double>(n);
        betas[i] = std::min(1.0 - profile(t1) / profile(t0), max_beta);
    }
    return betas;
}

}  // namespace

ScheduleParams build_schedule(ScheduleKind kind, std::size_t num_steps,
                              double beta_min, double beta_max) {
    if (num_steps == 0) {
        throw InvalidScheduleConfig("num_steps must be >= 1");
    }
    switch (kind) {
        case ScheduleKind::linear:
            return ScheduleParams::from_betas(linear_betas(num_steps, beta_min, beta_max));
        case ScheduleKind::cosine:
            return ScheduleParams::from_betas(cosine_betas(num_steps));
    }
    throw InvalidScheduleConfig("unknown schedule kind");
}

}  // namespace selguide
