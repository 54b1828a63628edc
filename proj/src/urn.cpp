#include "rmdp/urn.hpp"

#include "rmdp/csv.hpp"
#include "rmdp/errors.hpp"

#include <cmath>

namespace rmdp::urn {

namespace {

void check_setup(const UrnSetup& setup) {
    if (setup.n_draws == 0) throw InvalidArgument("urn needs at least one draw");
    if (!(setup.lambda >= 0.0) || setup.lambda > 1.0)
        throw InvalidArgument("lambda must lie in [0, 1]");
}

void check_theta(double theta) {
    if (!(theta >= 0.0) || theta > 1.0) throw InvalidArgument("theta must lie in [0, 1]");
}

} // namespace

double urn_decision(std::size_t black_draws, const UrnSetup& setup) {
    check_setup(setup);
    if (black_draws > setup.n_draws) throw InvalidArgument("more black draws than draws");
    const double share = static_cast<double>(black_draws) / static_cast<double>(setup.n_draws);
    return setup.lambda * share + (1.0 - setup.lambda) * 0.5;
}

double binomial_pmf(std::size_t n, std::size_t r, double theta) {
    check_theta(theta);
    if (r > n) return 0.0;
    if (theta == 0.0) return r == 0 ? 1.0 : 0.0;
    if (theta == 1.0) return r == n ? 1.0 : 0.0;
    const double dn = static_cast<double>(n);
    const double dr = static_cast<double>(r);
    const double log_choose = std::lgamma(dn + 1.0) - std::lgamma(dr + 1.0) - std::lgamma(dn - dr + 1.0);
    return std::exp(log_choose + dr * std::log(theta) + (dn - dr) * std::log1p(-theta));
}

double expected_payoff(const UrnSetup& setup, double theta) {
    check_setup(setup);
    check_theta(theta);
    double total = 0.0;
    for (std::size_t r = 0; r <= setup.n_draws; ++r) {
        const double err = urn_decision(r, setup) - theta;
        total += binomial_pmf(setup.n_draws, r, theta) * (1.0 - err * err);
    }
    return total;
}

double expected_payoff_closed_form(const UrnSetup& setup, double theta) {
    check_setup(setup);
    check_theta(theta);
    const double l = setup.lambda;
    const double n = static_cast<double>(setup.n_draws);
    return 1.0 - l * l * theta * (1.0 - theta) / n - (1.0 - l) * (1.0 - l) * (theta - 0.5) * (theta - 0.5);
}

std::vector<double> unit_grid(double step) {
    if (!(step > 0.0) || step > 1.0) throw InvalidArgument("grid step must lie in (0, 1]");
    const double count = std::round(1.0 / step);
    if (std::abs(count * step - 1.0) > 1e-9) throw InvalidArgument("grid step must divide 1");
    const auto n = static_cast<std::size_t>(count);
    std::vector<double> grid(n + 1);
    for (std::size_t i = 0; i <= n; ++i) grid[i] = static_cast<double>(i) / count;
    return grid;
}

PerformanceSurface payoff_surface(std::size_t n_draws, std::span<const double> lambdas,
                                  std::span<const double> thetas) {
    if (lambdas.empty() || thetas.empty()) throw InvalidArgument("urn grids must be non-empty");
    PerformanceSurface surface;
    surface.candidates.assign(lambdas.begin(), lambdas.end());
    for (double t : thetas) {
        check_theta(t);
        surface.points.push_back(csv::format_number(t));
    }
    surface.best_attainable.assign(thetas.size(), 1.0);
    surface.scores.reserve(lambdas.size() * thetas.size());
    for (double l : lambdas)
        for (double t : thetas) surface.scores.push_back(expected_payoff({n_draws, l}, t));
    return surface;
}

CriterionCurves criterion_curves(std::size_t n_draws, std::span<const double> lambdas,
                                 std::span<const double> thetas, std::span<const double> prior) {
    CriterionCurves out;
    out.surface = payoff_surface(n_draws, lambdas, thetas);
    out.maximin = maximin_select(out.surface);
    out.regret = minimax_regret_select(out.surface);
    const auto uniform = uniform_prior(thetas.size());
    out.bayes = bayes_select(out.surface, prior.empty() ? std::span<const double>(uniform) : prior);
    return out;
}

} // namespace rmdp::urn
