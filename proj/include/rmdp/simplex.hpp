#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rmdp {

/// Tolerance on the total mass of a Distribution.
inline constexpr double kMassTolerance = 1e-12;

/**
 * Probability vector over a finite support {0, ..., size()-1}.
 *
 * Construction validates that every weight is non-negative and that the
 * weights sum to one within kMassTolerance. Instances are immutable.
 */
class Distribution {
public:
    explicit Distribution(std::vector<double> probs);

    /// Rescales non-negative weights with a positive sum.
    static Distribution normalized(std::vector<double> weights);
    static Distribution point_mass(std::size_t size, std::size_t atom);
    static Distribution uniform(std::size_t size);

    std::span<const double> probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }

    /// Expectation of `values` under this distribution.
    double dot(std::span<const double> values) const;

    /// True when every weight is strictly positive.
    bool strictly_positive() const noexcept;

    friend bool operator==(const Distribution&, const Distribution&) = default;

private:
    std::vector<double> probs_;
};

/// Kullback-Leibler divergence sum_i q_i ln(q_i / p_i) with 0 ln 0 = 0.
/// Throws InvalidArgument on a size mismatch and InfiniteDivergence when
/// q_i > 0 = p_i.
double kl_divergence(const Distribution& q, const Distribution& p);

/// Interior points of the probability simplex on a regular lattice.
struct SimplexGrid {
    std::size_t dim = 0;
    double increment = 0.0;
    /// Number of increments per unit mass, i.e. 1 / increment.
    std::size_t divisions = 0;
    std::vector<Distribution> points;
};

/**
 * Enumerates every strictly interior point of the (dim-1)-simplex whose
 * weights are positive integer multiples of `increment`.
 *
 * Points are produced in lexicographic order of their integer compositions.
 * Throws InvalidArgument when increment is not in (0, 1), does not divide one,
 * or dim < 2; throws EmptyGrid when no interior point exists.
 */
SimplexGrid build_simplex_grid(std::size_t dim, double increment);

/// Multinomial counts of `n` categorical draws from `p`, deterministic in `seed`.
std::vector<std::size_t> multinomial_sample(const Distribution& p, std::size_t n,
                                            std::uint64_t seed);

} // namespace rmdp
