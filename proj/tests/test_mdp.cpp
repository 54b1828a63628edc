#include "doctest.h"

#include "rmdp/errors.hpp"
#include "rmdp/mdp.hpp"
#include "rmdp/mdp_json.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace rmdp;

namespace {

// State 0: action 0 pays 1 and moves to {0, 1}; action 1 pays 0.5 and stays.
// State 1 pays -1 and moves to {0, 1}.
MdpSpec toy(double radius) {
    MdpSpec m;
    m.n_states = 2;
    m.n_actions = 2;
    m.discount = 0.9;
    m.utility = {1.0, 0.5, -1.0, -1.0};
    const auto half = Distribution::uniform(2);
    m.transitions = {{{0, 1}, AmbiguitySet::with_radius(half, radius)},
                     {{0}, AmbiguitySet::with_radius(Distribution::uniform(1), 0.0)},
                     {{0, 1}, AmbiguitySet::with_radius(half, radius)},
                     {{0, 1}, AmbiguitySet::with_radius(half, radius)}};
    return m;
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_CASE("toy problem by hand") {
    const auto risk = robust_value_iteration(toy(0.0), {1e-10});
    CHECK(risk.converged);
    CHECK(risk.values[0] == doctest::Approx(5.0).epsilon(1e-8));
    CHECK(risk.values[1] == doctest::Approx(25.0 / 11.0).epsilon(1e-8));
    CHECK(risk.policy[0] == 1);

    const auto minimax = robust_value_iteration(toy(std::numeric_limits<double>::infinity()), {1e-10});
    CHECK(minimax.values[0] == doctest::Approx(5.0).epsilon(1e-8));
    CHECK(minimax.values[1] == doctest::Approx(-10.0).epsilon(1e-8));
    CHECK(minimax.worst_case[2][1] == doctest::Approx(1.0));
}

TEST_CASE("zero radius reproduces classic value iteration") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto m = testing_support::random_mdp(seed, 10, 3, 0.9, 0.0);
        const double kappa = 1e-8;
        const auto robust = robust_value_iteration(m, {kappa});
        // Both iterates sit within d/(1-d) kappa of the fixed point.
        const auto classic = oracle::classic_value_iteration(m, kappa);
        CHECK(sup_distance(robust.values, classic) <= 2 * 9 * kappa);
        const auto accel = robust_value_iteration(m, {kappa, 1'000'000, Acceleration::span_extrapolation});
        CHECK(sup_distance(accel.values, classic) <= 2 * 9 * kappa);
        CHECK(accel.iterations <= robust.iterations);
    }
}

TEST_CASE("robust bellman operator is a monotone contraction") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> unif(-20.0, 20.0);
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto m = testing_support::random_mdp(seed, 8, 2, 0.95, 0.5);
        std::vector<double> w(8), w2(8), up(8);
        for (std::size_t i = 0; i < 8; ++i) {
            w[i] = unif(gen);
            w2[i] = unif(gen);
            up[i] = w[i] + std::abs(unif(gen));
        }
        const auto a = robust_bellman_apply(m, w).values;
        const auto b = robust_bellman_apply(m, w2).values;
        CHECK(sup_distance(a, b) <= m.discount * sup_distance(w, w2) + 1e-10);
        const auto c = robust_bellman_apply(m, up).values;
        for (std::size_t i = 0; i < 8; ++i) CHECK(c[i] >= a[i] - 1e-10);
        std::vector<double> shifted(w);
        for (auto& x : shifted) x += 3.0;
        const auto s = robust_bellman_apply(m, shifted).values;
        for (std::size_t i = 0; i < 8; ++i) CHECK(s[i] == doctest::Approx(a[i] + 3.0 * m.discount));
    }
}

TEST_CASE("larger sets never raise robust values") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto m = testing_support::random_mdp(seed, 6, 2, 0.9, 0.0);
        std::vector<double> prev;
        for (double rho : {0.0, 0.01, 0.1, 0.5, 2.0}) {
            for (auto& t : m.transitions) t.set.radius = rho;
            const auto sol = robust_value_iteration(m, {1e-10});
            if (!prev.empty())
                for (std::size_t s = 0; s < 6; ++s) CHECK(sol.values[s] <= prev[s] + 1e-8);
            prev = sol.values;
        }
    }
}

TEST_CASE("exhausted iteration budget is reported") {
    const auto m = testing_support::random_mdp(3, 5, 2, 0.99, 0.1);
    const auto sol = robust_value_iteration(m, {1e-12, 5});
    CHECK_FALSE(sol.converged);
    CHECK(sol.iterations == 5);
    CHECK(sol.residual > 1e-12);
    CHECK_THROWS_AS(robust_value_iteration(m, {0.0}), InvalidArgument);
}

TEST_CASE("policy evaluation agrees with monte carlo") {
    const auto m = testing_support::random_mdp(17, 3, 2, 0.9, 0.0);
    const std::vector<std::size_t> policy{0, 1, 1};
    const auto exact = evaluate_policy_under_truth(m, policy);
    for (std::size_t s = 0; s < 3; ++s) {
        const auto mc = oracle::mc_policy_value(m, policy, s, 100000, 300, 42 + s);
        CAPTURE(s);
        CHECK(std::abs(exact[s] - mc.mean) <= 3.0 * mc.std_error);
    }
    const auto path = expected_cumulative_utility(m, StochasticPolicy::deterministic(policy, 2), 0, 400);
    CHECK(path.back() == doctest::Approx(exact[0]).epsilon(1e-12));
}

TEST_CASE("optimal policy value matches its own evaluation") {
    const auto m = testing_support::random_mdp(8, 10, 3, 0.9, 0.0);
    const auto sol = robust_value_iteration(m, {1e-10});
    const auto eval = evaluate_policy_under_truth(m, sol.policy);
    CHECK(sup_distance(sol.values, eval) <= 1e-8);
}

TEST_CASE("mdp validation") {
    auto m = toy(0.1);
    m.discount = 1.0;
    CHECK_THROWS_AS(m.validate(), InvalidArgument);
    m = toy(0.1);
    m.transitions[0].targets = {0, 7};
    CHECK_THROWS_AS(m.validate(), InvalidArgument);
    m = toy(0.1);
    m.utility.pop_back();
    CHECK_THROWS_AS(m.validate(), InvalidArgument);
    const std::vector<double> short_w{1.0};
    CHECK_THROWS_AS(robust_bellman_apply(toy(0.1), short_w), InvalidArgument);
}

TEST_CASE("mdp json round trip") {
    const auto m = toy(0.1);
    const auto back = mdp_from_json(mdp_to_json(m));
    CHECK(back.n_states == 2);
    CHECK(back.utility == m.utility);
    CHECK(back.transitions[3].set.radius == 0.1);
    CHECK(back.transitions[1].targets == std::vector<std::size_t>{0});

    auto inf = mdp_to_json(toy(std::numeric_limits<double>::infinity()));
    CHECK(std::isinf(mdp_from_json(inf).transitions[0].set.radius));

    auto doc = mdp_to_json(m);
    doc["transitions"][0].erase("radius");
    doc["transitions"][0]["n_obs"] = 55;
    doc["transitions"][0]["confidence"] = 0.95;
    CHECK(mdp_from_json(doc).transitions[0].set.radius ==
          doctest::Approx(calibrate_radius(55, 2, 0.95)));

    auto missing = mdp_to_json(m);
    missing["transitions"].erase(missing["transitions"].begin());
    CHECK_THROWS_AS(mdp_from_json(missing), DataError);
    CHECK_THROWS_AS(mdp_from_json(nlohmann::json::parse(R"({"n_states": "x"})")), DataError);
}
