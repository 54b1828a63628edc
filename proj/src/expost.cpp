#include "rmdp/experiments.hpp"

#include "rmdp/errors.hpp"
#include "rmdp/parallel.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace rmdp::experiments {

double exact_performance(const zurcher::ZurcherConfig& config,
                         const zurcher::ChoiceProbabilities& rule,
                         const Distribution& true_jump_law, std::size_t horizon) {
    zurcher::ZurcherConfig truth = config;
    truth.confidence = 0.0;
    return evaluate_policy_over_horizon(zurcher::to_mdp(truth, true_jump_law),
                                        zurcher::logit_policy(rule), horizon)[0];
}

double first_positive_crossing(std::span<const double> grid, std::span<const double> series) {
    if (grid.size() != series.size()) throw InvalidArgument("grid and series differ in length");
    for (std::size_t k = 0; k < series.size(); ++k) {
        if (series[k] <= 0.0) continue;
        if (k == 0) return grid[0];
        const double t = -series[k - 1] / (series[k] - series[k - 1]);
        return grid[k - 1] + t * (grid[k] - grid[k - 1]);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

MisspecificationCurve misspecification_curve(const zurcher::ZurcherConfig& config,
                                              const zurcher::TransitionEstimate& estimate,
                                              const MisspecificationConfig& mc) {
    if (mc.rule_confidences.empty() || mc.truth_confidences.empty())
        throw InvalidArgument("misspecification curve needs rules and truth confidences");

    MisspecificationCurve curve;
    curve.rule_confidences = mc.rule_confidences;
    curve.truth_confidences = mc.truth_confidences;
    const std::size_t n_rules = mc.rule_confidences.size();
    const std::size_t n_truths = mc.truth_confidences.size();

    std::vector<zurcher::ChoiceProbabilities> rules(n_rules);
    parallel_for(n_rules, mc.jobs, [&](std::size_t r) {
        zurcher::ZurcherConfig cfg = config;
        cfg.confidence = mc.rule_confidences[r];
        const auto sol = zurcher::solve_ev(cfg, estimate, mc.solver);
        if (!sol.converged)
            throw NonConvergence("decision rule solve did not converge", sol.residual,
                                 sol.iterations);
        rules[r] = zurcher::choice_probabilities(cfg, sol);
    });

    std::vector<std::optional<Distribution>> laws(n_truths);
    parallel_for(n_truths, mc.jobs, [&](std::size_t k) {
        const double omega = mc.truth_confidences[k];
        const std::size_t n_obs = config.pooled_n_obs;
        laws[k] = zurcher::worst_case_jump_table(config, estimate, std::span(&omega, 1),
                                                 std::span(&n_obs, 1), mc.representative_state,
                                                 mc.solver)
                      .front()
                      .jump_probs;
    });
    for (auto& law : laws) curve.truth_laws.push_back(std::move(*law));

    curve.performance.assign(n_rules, std::vector<double>(n_truths, 0.0));
    curve.difference.assign(n_rules, std::vector<double>(n_truths, 0.0));
    curve.std_error.assign(n_rules, std::vector<double>(n_truths, 0.0));

    if (mc.mode == EvaluationMode::exact) {
        parallel_for(n_rules * n_truths, mc.jobs, [&](std::size_t cell) {
            const std::size_t r = cell / n_truths;
            const std::size_t k = cell % n_truths;
            curve.performance[r][k] =
                exact_performance(config, rules[r], curve.truth_laws[k], mc.fleet.n_months);
        });
    } else {
        FleetSimConfig fleet = mc.fleet;
        fleet.recorded_buses = 0;
        fleet.jobs = mc.jobs;
        for (std::size_t k = 0; k < n_truths; ++k) {
            const auto sim = simulate_fleet(config, rules, curve.truth_laws[k], fleet);
            const double n = static_cast<double>(fleet.n_buses);
            for (std::size_t r = 0; r < n_rules; ++r) {
                curve.performance[r][k] = sim.mean_total[r];
                // paired standard error of the difference to the as-if rule
                std::vector<double> diff(fleet.n_buses);
                double mean = 0.0;
                for (std::size_t b = 0; b < fleet.n_buses; ++b) {
                    diff[b] = sim.per_bus_total[r][b] - sim.per_bus_total[0][b];
                    mean += diff[b];
                }
                mean /= n;
                double ss = 0.0;
                for (double d : diff) ss += (d - mean) * (d - mean);
                curve.std_error[r][k] = fleet.n_buses > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
            }
        }
    }

    for (std::size_t r = 0; r < n_rules; ++r) {
        for (std::size_t k = 0; k < n_truths; ++k)
            curve.difference[r][k] = curve.performance[r][k] - curve.performance[0][k];
        curve.crossing.push_back(first_positive_crossing(curve.truth_confidences, curve.difference[r]));
    }
    return curve;
}

} // namespace rmdp::experiments
