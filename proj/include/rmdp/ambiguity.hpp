#pragma once

#include "rmdp/simplex.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rmdp {

/// Inverse CDF of the chi-squared law with `df` degrees of freedom.
/// Requires df >= 1 and w in [0, 1); w = 1 is rejected (infinite quantile).
double chi2_quantile(unsigned df, double w);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/**
 * KL radius for a set over `support_size` atoms estimated from `n_obs`
 * observations at confidence `w`: F^{-1}_{support_size-1}(w) / (2 n_obs).
 *
 * Returns +infinity for w = 1 (the whole simplex). Throws DegenerateSet when
 * support_size < 2.
 */
double calibrate_radius(std::size_t n_obs, std::size_t support_size, double w);

/// An estimate restricted to the atoms it gives positive probability.
struct SupportedEstimate {
    std::vector<std::size_t> atoms;  ///< indices into the original support
    Distribution center;             ///< renormalized weights on `atoms`
};

/// Drops zero-probability atoms of `estimate`.
SupportedEstimate restrict_support(const Distribution& estimate);

/**
 * KL ball { q : KL(q || center) <= radius } around a strictly positive center.
 *
 * A radius of +infinity stands for the whole simplex over the support.
 */
struct AmbiguitySet {
    Distribution center;
    double radius = 0.0;
    std::optional<std::size_t> n_obs;
    std::optional<double> confidence;

    /// Checks the invariants; throws InvalidArgument.
    void validate() const;

    std::size_t size() const noexcept { return center.size(); }

    /// Radius from calibrate_radius. Singleton supports get radius 0.
    static AmbiguitySet calibrated(Distribution center, std::size_t n_obs, double confidence);
    static AmbiguitySet with_radius(Distribution center, double radius);
};

/// Which branch of the worst-case solution produced a WorstCaseResult.
enum class WorstCaseRegime {
    center,    ///< radius 0: the center itself
    constant,  ///< constant value vector, every feasible q is optimal
    boundary,  ///< radius beyond the breakpoint: mass on the argmin atoms
    interior   ///< dual solution with the KL constraint active
};

struct WorstCaseResult {
    double value = 0.0;
    Distribution minimizer;
    WorstCaseRegime regime = WorstCaseRegime::center;
    /// Optimal dual multiplier mu*; meaningful for the interior regime only.
    double dual_variable = 0.0;
};

/// Breakpoint radius -ln(sum of center mass on the argmin atoms of v).
double breakpoint_radius(const Distribution& center, std::span<const double> v);

/**
 * min { q . v : KL(q || center) <= radius }.
 *
 * Solved through the one-dimensional dual
 *   max_{mu > 0} -mu * radius - mu * ln sum_i center_i exp(-v_i / mu)
 * by bisection on its derivative KL(q_mu || center) - radius, where
 * q_mu is proportional to center_i exp(-v_i / mu). Exponentials are shifted
 * by min v. Radii at or beyond breakpoint_radius return the closed-form
 * boundary solution. Throws InvalidArgument on non-finite or mis-sized v.
 */
WorstCaseResult worst_case_expectation(const AmbiguitySet& set, std::span<const double> v);

} // namespace rmdp
