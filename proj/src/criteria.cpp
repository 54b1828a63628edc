#include "rmdp/criteria.hpp"

#include "rmdp/csv.hpp"
#include "rmdp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>

namespace rmdp {

void PerformanceSurface::validate() const {
    if (candidates.empty() || points.empty())
        throw InvalidArgument("performance surface needs candidates and points");
    if (scores.size() != candidates.size() * points.size())
        throw InvalidArgument("performance surface score table has the wrong size");
    if (best_attainable.size() != points.size())
        throw InvalidArgument("performance surface needs one best_attainable per point");
    for (double s : scores)
        if (!std::isfinite(s)) throw InvalidArgument("performance surface scores must be finite");
    for (std::size_t p = 0; p < points.size(); ++p) {
        if (!std::isfinite(best_attainable[p]))
            throw InvalidArgument("best_attainable must be finite");
        for (std::size_t c = 0; c < candidates.size(); ++c)
            if (best_attainable[p] < score(c, p) - 1e-9)
                throw InvalidArgument("best_attainable below a candidate's score at point " +
                                      points[p]);
    }
}

namespace {

// Index of the best criterion value; ties resolved toward the smallest candidate.
template <class Better>
Selection pick(const PerformanceSurface& surface, std::vector<double> criterion, Better better) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < criterion.size(); ++c) {
        if (better(criterion[c], criterion[best]) ||
            (criterion[c] == criterion[best] &&
             surface.candidates[c] < surface.candidates[best]))
            best = c;
    }
    return {best, surface.candidates[best], std::move(criterion)};
}

} // namespace

Selection maximin_select(const PerformanceSurface& surface) {
    surface.validate();
    std::vector<double> worst(surface.candidates.size());
    for (std::size_t c = 0; c < worst.size(); ++c) {
        worst[c] = surface.score(c, 0);
        for (std::size_t p = 1; p < surface.points.size(); ++p)
            worst[c] = std::min(worst[c], surface.score(c, p));
    }
    return pick(surface, std::move(worst), std::greater<>());
}

Selection minimax_regret_select(const PerformanceSurface& surface) {
    surface.validate();
    std::vector<double> regret(surface.candidates.size());
    for (std::size_t c = 0; c < regret.size(); ++c) {
        regret[c] = surface.best_attainable[0] - surface.score(c, 0);
        for (std::size_t p = 1; p < surface.points.size(); ++p)
            regret[c] = std::max(regret[c], surface.best_attainable[p] - surface.score(c, p));
    }
    return pick(surface, std::move(regret), std::less<>());
}

Selection bayes_select(const PerformanceSurface& surface, std::span<const double> prior) {
    surface.validate();
    if (prior.size() != surface.points.size())
        throw InvalidArgument("prior weights must match the number of grid points");
    double total = 0.0;
    for (double w : prior) {
        if (!(w >= 0.0)) throw InvalidArgument("prior weights must be non-negative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("prior weights must sum to one");

    std::vector<double> mean(surface.candidates.size(), 0.0);
    for (std::size_t c = 0; c < mean.size(); ++c)
        for (std::size_t p = 0; p < surface.points.size(); ++p)
            mean[c] += prior[p] * surface.score(c, p);
    return pick(surface, std::move(mean), std::greater<>());
}

std::vector<double> uniform_prior(std::size_t n_points) {
    if (n_points == 0) throw InvalidArgument("uniform prior needs at least one point");
    return std::vector<double>(n_points, 1.0 / static_cast<double>(n_points));
}

void write_surface_csv(std::ostream& out, const PerformanceSurface& surface) {
    csv::write_row(out, {"candidate", "point_id", "score", "best_attainable"});
    for (std::size_t c = 0; c < surface.candidates.size(); ++c)
        for (std::size_t p = 0; p < surface.points.size(); ++p)
            csv::write_row(out, {csv::format_number(surface.candidates[c]), surface.points[p],
                                 csv::format_number(surface.score(c, p)),
                                 csv::format_number(surface.best_attainable[p])});
}

PerformanceSurface read_surface_csv(std::istream& in) {
    std::vector<std::string> fields;
    std::size_t line = 0;
    if (!csv::read_row(in, fields, line) ||
        fields != std::vector<std::string>{"candidate", "point_id", "score", "best_attainable"})
        throw DataError("surface csv header must be candidate,point_id,score,best_attainable",
                        line);

    PerformanceSurface surface;
    std::map<std::string, std::size_t> point_index;
    std::vector<std::vector<std::optional<double>>> cells;
    while (csv::read_row(in, fields, line)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 4) throw DataError("expected 4 fields", line);
        const double candidate = csv::parse_number(fields[0], line);
        if (surface.candidates.empty() || surface.candidates.back() != candidate) {
            surface.candidates.push_back(candidate);
            cells.emplace_back();
        }
        auto [it, inserted] = point_index.try_emplace(fields[1], surface.points.size());
        if (inserted) {
            surface.points.push_back(fields[1]);
            surface.best_attainable.push_back(csv::parse_number(fields[3], line));
        }
        auto& row = cells.back();
        if (row.size() <= it->second) row.resize(it->second + 1);
        if (row[it->second]) throw DataError("duplicate cell for point " + fields[1], line);
        row[it->second] = csv::parse_number(fields[2], line);
    }
    for (auto& row : cells) {
        if (row.size() != surface.points.size())
            throw DataError("surface csv is missing cells");
        for (auto& cell : row) {
            if (!cell) throw DataError("surface csv is missing cells");
            surface.scores.push_back(*cell);
        }
    }
    surface.validate();
    return surface;
}

} // namespace rmdp
