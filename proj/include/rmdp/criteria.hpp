#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rmdp {

/**
 * Expected performance of each candidate decision function (indexed by a
 * robustness or shrinkage parameter) at each point of a parameter grid.
 */
struct PerformanceSurface {
    std::vector<double> candidates;
    std::vector<std::string> points;
    /// Row-major by candidate: scores[c * points.size() + p].
    std::vector<double> scores;
    /// Best performance attainable at each point (the regret benchmark).
    std::vector<double> best_attainable;

    double score(std::size_t candidate, std::size_t point) const {
        return scores[candidate * points.size() + point];
    }

    /// Throws InvalidArgument when empty, mis-sized, non-finite, or when
    /// best_attainable falls below a candidate's score by more than 1e-9.
    void validate() const;
};

struct Selection {
    std::size_t index = 0;
    double candidate = 0.0;
    /// Criterion value per candidate (min score, max regret, or mean score).
    std::vector<double> criterion;
};

/// Candidate with the largest minimum score; ties go to the smallest candidate value.
Selection maximin_select(const PerformanceSurface& surface);

/// Candidate with the smallest maximum of best_attainable - score.
Selection minimax_regret_select(const PerformanceSurface& surface);

/// Candidate with the largest prior-weighted mean score. Prior weights must
/// be non-negative, sum to one, and match the number of points.
Selection bayes_select(const PerformanceSurface& surface, std::span<const double> prior);

std::vector<double> uniform_prior(std::size_t n_points);

/// `candidate,point_id,score,best_attainable`, one row per cell.
void write_surface_csv(std::ostream& out, const PerformanceSurface& surface);
PerformanceSurface read_surface_csv(std::istream& in);

} // namespace rmdp
