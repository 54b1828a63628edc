#include "doctest.h"

#include "rmdp/ambiguity.hpp"
#include "rmdp/errors.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace rmdp;

TEST_CASE("chi-squared quantiles agree with quadrature") {
    CHECK(chi2_quantile(3, 0.95) == doctest::Approx(7.8147279033).epsilon(1e-9));
    CHECK(chi2_quantile(2, 0.95) == doctest::Approx(-2.0 * std::log(0.05)).epsilon(1e-9));
    CHECK(chi2_quantile(1, 0.5) == doctest::Approx(0.4549364231).epsilon(1e-8));
    CHECK(chi2_quantile(3, 0.0) == 0.0);
    CHECK_THROWS_AS(chi2_quantile(3, 1.0), InvalidArgument);
    CHECK_THROWS_AS(chi2_quantile(0, 0.5), InvalidArgument);
    for (unsigned df : {1u, 2u, 3u, 5u, 10u})
        for (double w : {0.05, 0.25, 0.5, 0.9, 0.99}) {
            CAPTURE(df);
            CAPTURE(w);
            CHECK(chi2_quantile(df, w) == doctest::Approx(oracle::chi2_quantile(df, w)).epsilon(1e-6));
        }
}

TEST_CASE("radius calibration") {
    CHECK(calibrate_radius(55, 4, 0.95) == doctest::Approx(0.0710429809).epsilon(1e-8));
    CHECK(calibrate_radius(110, 4, 0.95) == doctest::Approx(0.0355214905).epsilon(1e-8));
    CHECK(calibrate_radius(55, 4, 0.0) == 0.0);
    CHECK(std::isinf(calibrate_radius(55, 4, 1.0)));
    CHECK_THROWS_AS(calibrate_radius(55, 1, 0.5), DegenerateSet);
    double prev = -1.0;
    for (double w = 0.0; w < 0.999; w += 0.05) {
        const double r = calibrate_radius(55, 3, w);
        CHECK(r > prev);
        prev = r;
    }
    CHECK(calibrate_radius(110, 3, 0.5) < calibrate_radius(55, 3, 0.5));
}

TEST_CASE("ambiguity set invariants") {
    CHECK_THROWS_AS(AmbiguitySet::with_radius(Distribution({0.0, 1.0}), 0.1), InvalidArgument);
    CHECK_THROWS_AS(AmbiguitySet::with_radius(Distribution::uniform(2), -0.1), InvalidArgument);
    const auto s = AmbiguitySet::calibrated(Distribution::uniform(3), 55, 0.5);
    CHECK(s.radius > 0.0);
    CHECK(AmbiguitySet::calibrated(Distribution::uniform(1), 55, 0.5).radius == 0.0);
    const auto r = restrict_support(Distribution({0.2, 0.0, 0.8}));
    CHECK(r.atoms == std::vector<std::size_t>{0, 2});
    CHECK(r.center[1] == doctest::Approx(0.8));
}

TEST_CASE("worst case of the binary example") {
    const auto set = AmbiguitySet::with_radius(Distribution::uniform(2), 0.1);
    const std::vector<double> v{0.0, 1.0};
    const auto wc = worst_case_expectation(set, v);
    CHECK(wc.regime == WorstCaseRegime::interior);
    CHECK(wc.value == doctest::Approx(0.2802053738).epsilon(1e-8));
    CHECK(wc.minimizer[0] == doctest::Approx(0.7197946262).epsilon(1e-8));
    CHECK(kl_divergence(wc.minimizer, set.center) == doctest::Approx(0.1).epsilon(1e-9));

    CHECK(breakpoint_radius(set.center, v) == doctest::Approx(std::log(2.0)));
    const auto edge = worst_case_expectation(AmbiguitySet::with_radius(set.center, std::log(2.0)), v);
    CHECK(edge.regime == WorstCaseRegime::boundary);
    CHECK(edge.value == 0.0);
    const auto whole = worst_case_expectation(
        AmbiguitySet::with_radius(set.center, std::numeric_limits<double>::infinity()), v);
    CHECK(whole.value == 0.0);
}

TEST_CASE("worst case special regimes") {
    const auto center = Distribution({0.2, 0.3, 0.5});
    const std::vector<double> v{1.0, 2.0, 3.0};
    const auto at_zero = worst_case_expectation(AmbiguitySet::with_radius(center, 0.0), v);
    CHECK(at_zero.regime == WorstCaseRegime::center);
    CHECK(at_zero.value == doctest::Approx(center.dot(v)));
    const std::vector<double> flat{4.0, 4.0, 4.0};
    CHECK(worst_case_expectation(AmbiguitySet::with_radius(center, 0.3), flat).value ==
          doctest::Approx(4.0));
    const std::vector<double> tie{1.0, 1.0, 3.0};
    const auto b = worst_case_expectation(AmbiguitySet::with_radius(center, 1.0), tie);
    CHECK(b.regime == WorstCaseRegime::boundary);
    CHECK(b.minimizer[0] == doctest::Approx(0.4));
    CHECK(b.minimizer[2] == 0.0);
    const std::vector<double> bad{1.0, std::nan(""), 2.0};
    CHECK_THROWS_AS(worst_case_expectation(AmbiguitySet::with_radius(center, 0.1), bad),
                    InvalidArgument);
    CHECK_THROWS_AS(worst_case_expectation(AmbiguitySet::with_radius(center, 0.1), std::vector<double>{1.0, 2.0}),
                    InvalidArgument);
}

TEST_CASE("worst case matches grid search and keeps the constraint active") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + trial % 2;
        const auto p = testing_support::random_distribution(gen, n, 0.05);
        std::vector<double> v(n);
        for (auto& x : v) x = unif(gen);
        const double rho = 0.5 * unif(gen);
        const auto wc = worst_case_expectation(AmbiguitySet::with_radius(p, rho), v);
        const std::vector<double> pv(p.probs().begin(), p.probs().end());
        CAPTURE(trial);
        CHECK(std::abs(wc.value - oracle::grid_worst_case(pv, v, rho)) <= 2e-3);
        CHECK(kl_divergence(wc.minimizer, p) <= rho + 1e-9);
        if (rho < breakpoint_radius(p, v))
            CHECK(kl_divergence(wc.minimizer, p) == doctest::Approx(rho).epsilon(1e-6));
    }
}

TEST_CASE("worst case value falls with the radius") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = testing_support::random_distribution(gen, 4);
        std::vector<double> v(4);
        for (auto& x : v) x = unif(gen);
        double prev = p.dot(v) + 1e-12;
        for (double rho = 0.0; rho < 3.0; rho += 0.1) {
            const double val = worst_case_expectation(AmbiguitySet::with_radius(p, rho), v).value;
            CHECK(val <= prev + 1e-10);
            CHECK(val >= *std::min_element(v.begin(), v.end()) - 1e-12);
            prev = val;
        }
    }
}

TEST_CASE("worst case survives extreme value scales") {
    const auto p = Distribution({0.3, 0.4, 0.3});
    const std::vector<double> big{-1e6, 0.0, 1e6};
    const auto r = worst_case_expectation(AmbiguitySet::with_radius(p, 0.05), big);
    CHECK(std::isfinite(r.value));
    CHECK(r.value < p.dot(big));
    const std::vector<double> tiny{0.0, 1e-12, 2e-12};
    const auto t = worst_case_expectation(AmbiguitySet::with_radius(p, 0.05), tiny);
    CHECK(std::isfinite(t.value));
    CHECK(t.value <= p.dot(tiny) + 1e-24);
}
