#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "selguide/cost.hpp"
#include "selguide/errors.hpp"
#include "selguide/mixture.hpp"
#include "selguide/rng.hpp"
#include "selguide/schedule.hpp"

using namespace selguide;

namespace {

// independent density path for the finite-difference check
double log_marginal_density(const MixtureModel& model, const Vec& x, double alpha_bar,
                            std::optional<int> condition) {
    double total_w = 0.0;
    std::vector<double> terms;
    for (const auto& c : model.components()) {
        if (condition && c.label != *condition) continue;
        total_w += c.weight;
        double ll = std::log(c.weight);
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double v = alpha_bar * c.var[j] + (1.0 - alpha_bar);
            const double diff = x[j] - std::sqrt(alpha_bar) * c.mean[j];
            ll -= 0.5 * (diff * diff / v + std::log(2.0 * std::numbers::pi * v));
        }
        terms.push_back(ll);
    }
    const double m = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - m);
    return m + std::log(acc) - std::log(total_w);
}

MixtureModel one_component_1d() {
    return MixtureModel(1, {{1.0, {0.0}, {1.0}, 0}});
}

}  // namespace

TEST_CASE("single standard-normal component: epsilon is the scaled score") {
    // beta_1 = 0.25 -> alpha_bar_1 = 0.75; marginal is N(0,1), score(-x)
    const auto schedule = ScheduleParams::from_betas({0.25});
    const auto model = one_component_1d();
    const Vec eps = gm_epsilon(model, {2.0}, 1, schedule, std::nullopt);
    REQUIRE(eps.size() == 1);
    CHECK(eps[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("alpha_bar near 1 shrinks the prediction magnitude") {
    const auto schedule = ScheduleParams::from_betas({1e-8});
    const auto model = default_mixture();
    const Vec x = {5.0, -3.0};
    const Vec eps = gm_epsilon(model, x, 1, schedule, std::nullopt);
    const double bound = std::sqrt(1.0 - schedule.alpha_bar(1)) * 20.0;  // O(|x| + |means|)
    for (double e : eps) CHECK(std::abs(e) <= bound);
}

TEST_CASE("symmetric two-component mixture vanishes at the midpoint") {
    const MixtureModel model(2, {{0.5, {3.0, 1.0}, {2.0, 2.0}, 0},
                                 {0.5, {-3.0, -1.0}, {2.0, 2.0}, 1}});
    const auto schedule = ScheduleParams::from_betas({0.1});
    const Vec eps = gm_epsilon(model, {0.0, 0.0}, 1, schedule, std::nullopt);
    CHECK(eps[0] == 0.0);
    CHECK(eps[1] == 0.0);
}

TEST_CASE("conditioning on the only label is the identity") {
    const MixtureModel model(2, {{0.3, {1.0, 0.0}, {1.0, 2.0}, 4},
                                 {0.7, {-2.0, 1.0}, {0.5, 1.0}, 4}});
    const auto schedule = build_schedule(ScheduleKind::linear, 10, 1e-3, 0.05);
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    for (int rep = 0; rep < 20; ++rep) {
        const Vec x = {coord(gen), coord(gen)};
        const std::size_t t = 1 + gen() % 10;
        const Vec cond = gm_epsilon(model, x, t, schedule, 4);
        const Vec uncond = gm_epsilon(model, x, t, schedule, std::nullopt);
        CHECK(cond == uncond);  // restriction keeps the same components, bitwise
    }
}

TEST_CASE("epsilon matches a finite-difference gradient of the log marginal") {
    const auto model = default_mixture();
    const auto schedule = build_schedule(ScheduleKind::linear, 50, 1e-4, 0.02);
    std::mt19937 gen(123);
    std::uniform_real_distribution<double> coord(-6.0, 6.0);
    std::uniform_int_distribution<std::size_t> t_dist(1, 50);
    const double h = 1e-5;
    for (int rep = 0; rep < 20; ++rep) {
        const Vec x = {coord(gen), coord(gen)};
        const std::size_t t = t_dist(gen);
        const double ab = schedule.alpha_bar(t);
        const std::optional<int> condition = rep % 2 == 0 ? std::optional<int>(0) : std::nullopt;
        const Vec eps = gm_epsilon(model, x, t, schedule, condition);
        for (std::size_t j = 0; j < 2; ++j) {
            Vec xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const double grad = (log_marginal_density(model, xp, ab, condition) -
                                 log_marginal_density(model, xm, ab, condition)) /
                                (2.0 * h);
            CHECK(std::abs(eps[j] - (-std::sqrt(1.0 - ab) * grad)) <= 1e-5);
        }
    }
}

TEST_CASE("epsilon matches the Monte-Carlo posterior mean of the forward noise") {
    const auto model = default_mixture();
    const auto schedule = build_schedule(ScheduleKind::linear, 50, 1e-4, 0.02);
    constexpr std::size_t kSamples = 100000;
    constexpr std::size_t kBatches = 50;
    const auto draws = sample_mixture(model, std::nullopt, kSamples, 99);

    std::mt19937 gen(321);
    std::uniform_int_distribution<std::size_t> t_dist(5, 50);
    for (int rep = 0; rep < 5; ++rep) {
        const std::size_t t = t_dist(gen);
        const double ab = schedule.alpha_bar(t);
        const double sab = std::sqrt(ab);
        const double omab = 1.0 - ab;
        // probe at a forward sample so importance weights stay healthy
        const auto x0_probe = sample_mixture(model, std::nullopt, 1, 1000 + rep).front();
        Vec x(2);
        std::normal_distribution<double> std_normal;
        for (auto& c : x) c = 0.0;
        x[0] = sab * x0_probe[0] + std::sqrt(omab) * std_normal(gen);
        x[1] = sab * x0_probe[1] + std::sqrt(omab) * std_normal(gen);

        // self-normalized importance estimate of E[x0 | x_t = x], batched for SE
        const std::size_t per_batch = kSamples / kBatches;
        std::vector<Vec> batch_eps;
        for (std::size_t b = 0; b < kBatches; ++b) {
            double wsum = 0.0;
            Vec mean0(2, 0.0);
            for (std::size_t s = b * per_batch; s < (b + 1) * per_batch; ++s) {
                const auto& x0 = draws[s];
                double expo = 0.0;
                for (std::size_t j = 0; j < 2; ++j) {
                    const double diff = x[j] - sab * x0[j];
                    expo -= diff * diff / (2.0 * omab);
                }
                const double w = std::exp(expo);
                wsum += w;
                mean0[0] += w * x0[0];
                mean0[1] += w * x0[1];
            }
            REQUIRE(wsum > 0.0);
            Vec eps_hat(2);
            for (std::size_t j = 0; j < 2; ++j) {
                eps_hat[j] = (x[j] - sab * (mean0[j] / wsum)) / std::sqrt(omab);
            }
            batch_eps.push_back(eps_hat);
        }
        Vec mc(2, 0.0), se(2, 0.0);
        for (const auto& e : batch_eps) {
            mc[0] += e[0];
            mc[1] += e[1];
        }
        mc[0] /= kBatches;
        mc[1] /= kBatches;
        for (const auto& e : batch_eps) {
            se[0] += (e[0] - mc[0]) * (e[0] - mc[0]);
            se[1] += (e[1] - mc[1]) * (e[1] - mc[1]);
        }
        for (std::size_t j = 0; j < 2; ++j) {
            se[j] = std::sqrt(se[j] / (kBatches - 1)) / std::sqrt(double(kBatches));
        }

        const Vec eps = gm_epsilon(model, x, t, schedule, std::nullopt);
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(std::abs(eps[j] - mc[j]) <= 3.0 * se[j] + 1e-12);
        }
    }
}

TEST_CASE("oracle error paths") {
    const auto model = default_mixture();
    const auto schedule = build_schedule(ScheduleKind::linear, 10, 1e-4, 0.02);
    CHECK_THROWS_AS(gm_epsilon(model, {0.0, 0.0}, 1, schedule, 9), UnknownLabel);
    CHECK_THROWS_AS(gm_epsilon(model, {0.0}, 1, schedule, std::nullopt), DimensionMismatch);
    CHECK_THROWS_AS(gm_epsilon(model, {0.0, 0.0}, 0, schedule, std::nullopt), std::out_of_range);
    CHECK_THROWS_AS(gm_epsilon(model, {0.0, 0.0}, 11, schedule, std::nullopt), std::out_of_range);
}

TEST_CASE("mixture validation") {
    CHECK_THROWS(MixtureModel(2, {}));
    CHECK_THROWS(MixtureModel(2, {{0.5, {0.0, 0.0}, {1.0, 1.0}, 0}}));        // weights != 1
    CHECK_THROWS(MixtureModel(2, {{1.0, {0.0}, {1.0, 1.0}, 0}}));             // bad mean length
    CHECK_THROWS(MixtureModel(2, {{1.0, {0.0, 0.0}, {1.0, 0.0}, 0}}));        // zero variance
    CHECK_THROWS(MixtureModel(2, {{1.0, {0.0, 0.0}, {1.0, 1.0}, -1}}));       // negative label
    const auto m = default_mixture();
    CHECK(m.dim() == 2);
    CHECK(m.labels() == std::vector<int>{0, 1});
    CHECK(m.has_label(1));
    CHECK(!m.has_label(2));
}

TEST_CASE("simulated evaluations charge the clock without touching epsilon") {
    const CostModel cost{0.08, 0.01};
    VirtualClock clock;
    const Vec fixed = {0.25, -1.5};
    int calls = 0;
    const auto eval = simulated_eval(
        [&](const Vec&, std::size_t) {
            ++calls;
            return fixed;
        },
        cost, clock);

    const auto one = eval({0.0, 0.0}, 1);
    CHECK(one.epsilon == fixed);
    CHECK(one.nfe == 1);
    CHECK(one.simulated_cost == 0.08);
    CHECK(clock.elapsed() == 0.08);

    const auto two = eval({0.0, 0.0}, 1);  // a cond+uncond pair is two calls
    CHECK(one.simulated_cost + two.simulated_cost == doctest::Approx(0.16).epsilon(1e-15));
    CHECK(clock.elapsed() == doctest::Approx(0.16).epsilon(1e-15));
    CHECK(calls == 2);
}

TEST_CASE("50 iterations of two evaluations plus overhead total 9.94 simulated seconds") {
    const CostModel cost{0.0811, 0.0366};
    VirtualClock clock;
    const auto eval = simulated_eval([](const Vec&, std::size_t) { return Vec{0.0}; }, cost, clock);
    for (int i = 0; i < 50; ++i) {
        eval({0.0}, 1);
        eval({0.0}, 1);
        clock.advance(cost.iter_overhead);
    }
    CHECK(clock.elapsed() == doctest::Approx(9.94).epsilon(1e-12));
    CHECK(cost.unet_fraction() == doctest::Approx(0.8158953722334005).epsilon(1e-12));
}

TEST_CASE("direct mixture draws are deterministic and respect the condition") {
    const auto model = default_mixture();
    const auto a = sample_mixture(model, 1, 500, 42);
    const auto b = sample_mixture(model, 1, 500, 42);
    CHECK(a == b);
    // label-1 means are (-4,0) and (0,-4); all draws should stay near them
    for (const auto& p : a) {
        const double d_neg_x = std::hypot(p[0] + 4.0, p[1]);
        const double d_neg_y = std::hypot(p[0], p[1] + 4.0);
        CHECK(std::min(d_neg_x, d_neg_y) < 6.0);
    }
    CHECK_THROWS_AS(sample_mixture(model, 7, 10, 0), UnknownLabel);
}
