#include <cmath>
#include <random>

#include <doctest.h>

#include "selguide/errors.hpp"
#include "selguide/guidance.hpp"

using namespace selguide;

namespace {

NoiseEvaluator fixed_evaluator(Vec value) {
    return [value = std::move(value)](const Vec&, std::size_t) {
        return NoisePrediction{value, 1, 0.0};
    };
}

Vec random_vec(std::mt19937& gen, std::size_t d) {
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    Vec v(d);
    for (auto& c : v) c = dist(gen);
    return v;
}

}  // namespace

TEST_CASE("cfg_combine substitutions") {
    CHECK(cfg_combine({0.0}, {1.0}, 7.5) == Vec{7.5});
    const Vec v = {0.1, -2.3, 5.0};
    CHECK(cfg_combine(v, v, 3.7) == v);    // perturbation term vanishes, bitwise
    const Vec u = {0.4, 1.1, -0.2};
    CHECK(cfg_combine(u, v, 1.0) == v);    // scale 1 collapses to the conditional, bitwise
    CHECK(cfg_combine(u, v, 0.0) == u);
    CHECK_THROWS_AS(cfg_combine({0.0}, {1.0, 2.0}, 1.0), DimensionMismatch);
}

TEST_CASE("cfg_combine is affine in the scale") {
    std::mt19937 gen(99);
    std::uniform_real_distribution<double> sdist(-3.0, 12.0);
    std::uniform_real_distribution<double> adist(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const Vec u = random_vec(gen, 3), c = random_vec(gen, 3);
        const double s1 = sdist(gen), s2 = sdist(gen), a = adist(gen);
        const Vec at_s1 = cfg_combine(u, c, s1);
        const Vec at_s2 = cfg_combine(u, c, s2);
        const Vec mixed = cfg_combine(u, c, a * s1 + (1.0 - a) * s2);
        for (std::size_t j = 0; j < 3; ++j) {
            const double interp = a * at_s1[j] + (1.0 - a) * at_s2[j];
            CHECK(std::abs(mixed[j] - interp) <= 1e-12 * (1.0 + std::abs(interp)));
        }
    }
}

TEST_CASE("skip window membership") {
    const GuidanceSpec last20{7.5, 0.8, 1.0};
    CHECK(!in_skip_window(39, 50, last20));
    CHECK(in_skip_window(40, 50, last20));
    CHECK(in_skip_window(49, 50, last20));
    CHECK(skip_count(50, last20) == 10);

    const GuidanceSpec empty{7.5, 0.0, 0.0};
    for (std::size_t i = 0; i < 50; ++i) CHECK(!in_skip_window(i, 50, empty));

    const GuidanceSpec first25{7.5, 0.0, 0.25};
    for (std::size_t i = 0; i < 12; ++i) CHECK(in_skip_window(i, 50, first25));
    CHECK(!in_skip_window(12, 50, first25));

    CHECK_THROWS_AS(in_skip_window(50, 50, empty), std::out_of_range);
}

TEST_CASE("skip-last window skips exactly floor(f*N) iterations") {
    // expectation computed in exact integer arithmetic
    for (std::size_t n = 1; n <= 200; ++n) {
        for (int k = 0; k <= 10; ++k) {
            const double f = static_cast<double>(k) / 10.0;
            const auto spec = skip_last(f);
            const std::size_t expected = k * n / 10;
            CAPTURE(n);
            CAPTURE(f);
            CHECK(skip_count(n, spec) == expected);
            std::size_t counted = 0;
            for (std::size_t i = 0; i < n; ++i) counted += in_skip_window(i, n, spec) ? 1 : 0;
            CHECK(counted == expected);
        }
    }
}

TEST_CASE("nfe identity 2N - floor(f*N) on random N") {
    std::mt19937 gen(5);
    std::uniform_int_distribution<std::size_t> n_dist(1, 500);
    std::uniform_int_distribution<int> k_dist(0, 100);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = n_dist(gen);
        const int k = k_dist(gen);
        const auto spec = skip_last(static_cast<double>(k) / 100.0);
        const std::size_t skips = k * n / 100;
        CHECK(2 * n - skip_count(n, spec) == 2 * n - skips);
    }
}

TEST_CASE("selective prediction passes the conditional through when skipped") {
    const auto cond = fixed_evaluator({0.3, -0.2});
    const auto uncond = fixed_evaluator({9.9, 9.9});
    const GuidanceSpec spec{7.5, 0.8, 1.0};
    const auto pred = selective_eps(cond, uncond, {0.0, 0.0}, 10, 45, 50, spec);
    CHECK(pred.epsilon == Vec{0.3, -0.2});
    CHECK(pred.nfe == 1);
}

TEST_CASE("selective prediction combines both branches when not skipped") {
    const auto cond = fixed_evaluator({1.0, 0.0});
    const auto uncond = fixed_evaluator({0.0, 0.0});
    const GuidanceSpec spec{7.5, 0.8, 1.0};
    const auto pred = selective_eps(cond, uncond, {0.0, 0.0}, 50, 0, 50, spec);
    CHECK(pred.epsilon == Vec{7.5, 0.0});
    CHECK(pred.nfe == 2);
}

TEST_CASE("a full pass over 50 iterations with the last fifth skipped costs 90 evaluations") {
    const auto cond = fixed_evaluator({0.0});
    const auto uncond = fixed_evaluator({0.0});
    const GuidanceSpec spec{7.5, 0.8, 1.0};
    int total_nfe = 0;
    for (std::size_t i = 0; i < 50; ++i) {
        total_nfe += selective_eps(cond, uncond, {0.0}, 50 - i, i, 50, spec).nfe;
    }
    CHECK(total_nfe == 90);
}

TEST_CASE("empty window reduces selective prediction to plain guidance") {
    std::mt19937 gen(17);
    std::uniform_real_distribution<double> sdist(0.0, 12.0);
    for (int rep = 0; rep < 100; ++rep) {
        const Vec cv = random_vec(gen, 4), uv = random_vec(gen, 4);
        const GuidanceSpec spec{sdist(gen), 0.0, 0.0};
        const auto pred = selective_eps(fixed_evaluator(cv), fixed_evaluator(uv),
                                        {0.0}, 1, gen() % 50, 50, spec);
        CHECK(pred.epsilon == cfg_combine(uv, cv, spec.scale));
        CHECK(pred.nfe == 2);
    }
}

TEST_CASE("skipped iterations ignore the scale entirely") {
    std::mt19937 gen(23);
    const Vec cv = random_vec(gen, 3), uv = random_vec(gen, 3);
    const GuidanceSpec a{2.0, 0.5, 1.0};
    const GuidanceSpec b{11.0, 0.5, 1.0};
    const auto pa = selective_eps(fixed_evaluator(cv), fixed_evaluator(uv), {0.0}, 10, 40, 50, a);
    const auto pb = selective_eps(fixed_evaluator(cv), fixed_evaluator(uv), {0.0}, 10, 40, 50, b);
    CHECK(pa.epsilon == pb.epsilon);
    CHECK(pa.epsilon == cv);
}

TEST_CASE("equal-width windows at aligned offsets skip equal counts") {
    for (std::size_t n : {7UL, 10UL, 50UL, 199UL, 200UL}) {
        const std::size_t expect = skip_count(n, GuidanceSpec{7.5, 0.0, 0.25});
        for (int k = 1; k < 4; ++k) {
            const GuidanceSpec w{7.5, k * 0.25, (k + 1) * 0.25};
            CHECK(skip_count(n, w) == expect);
        }
    }
}

TEST_CASE("guidance spec validation") {
    CHECK_THROWS_AS((GuidanceSpec{-1.0, 0.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GuidanceSpec{7.5, 0.6, 0.5}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GuidanceSpec{7.5, -0.1, 0.5}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GuidanceSpec{7.5, 0.0, 1.5}.validate()), std::invalid_argument);
    CHECK_NOTHROW(skip_last(0.0).validate());
    CHECK_NOTHROW(skip_last(1.0).validate());
    CHECK_THROWS_AS(skip_last(1.5), std::invalid_argument);
}
