#pragma once

#include "rmdp/criteria.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace rmdp::urn {

/// Guess the share of black balls after `n_draws` draws with replacement,
/// shrinking the sample share toward 1/2 with weight `lambda` on the sample.
struct UrnSetup {
    std::size_t n_draws = 50;
    double lambda = 1.0;
};

/// lambda * r / n + (1 - lambda) / 2.
double urn_decision(std::size_t black_draws, const UrnSetup& setup);

/// Binomial probability of `r` black balls, via log-binomial coefficients.
double binomial_pmf(std::size_t n, std::size_t r, double theta);

/// E[1 - (guess - theta)^2] by exact summation over the sampling distribution.
double expected_payoff(const UrnSetup& setup, double theta);

/// 1 - lambda^2 theta (1 - theta) / n - (1 - lambda)^2 (theta - 1/2)^2.
double expected_payoff_closed_form(const UrnSetup& setup, double theta);

/// {0, step, 2 step, ..., 1}; step must divide 1.
std::vector<double> unit_grid(double step);

/// Expected payoff of every lambda at every theta; best attainable is 1.
PerformanceSurface payoff_surface(std::size_t n_draws, std::span<const double> lambdas,
                                  std::span<const double> thetas);

struct CriterionCurves {
    PerformanceSurface surface;
    Selection maximin;
    Selection regret;
    Selection bayes;
};

/// Maximin, minimax regret, and subjective Bayes over a lambda grid.
/// An empty prior means uniform over `thetas`.
CriterionCurves criterion_curves(std::size_t n_draws, std::span<const double> lambdas,
                                 std::span<const double> thetas,
                                 std::span<const double> prior = {});

} // namespace rmdp::urn
