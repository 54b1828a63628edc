#include "rmdp/simplex.hpp"

#include "rmdp/errors.hpp"
#include "rmdp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rmdp {

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw InvalidArgument("distribution needs a non-empty support");
    double total = 0.0;
    for (double w : probs_) {
        if (!std::isfinite(w) || w < 0.0)
            throw InvalidArgument("distribution weights must be finite and non-negative");
        total += w;
    }
    if (std::abs(total - 1.0) > kMassTolerance)
        throw InvalidArgument("distribution weights sum to " + std::to_string(total) +
                              ", expected 1");
}

Distribution Distribution::normalized(std::vector<double> weights) {
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw InvalidArgument("weights must be finite and non-negative");
        total += w;
    }
    if (!(total > 0.0)) throw InvalidArgument("weights must have a positive sum");
    for (double& w : weights) w /= total;
    return Distribution(std::move(weights));
}

Distribution Distribution::point_mass(std::size_t size, std::size_t atom) {
    if (atom >= size) throw InvalidArgument("point mass atom outside support");
    std::vector<double> probs(size, 0.0);
    probs[atom] = 1.0;
    return Distribution(std::move(probs));
}

Distribution Distribution::uniform(std::size_t size) {
    if (size == 0) throw InvalidArgument("uniform distribution needs a non-empty support");
    return normalized(std::vector<double>(size, 1.0));
}

double Distribution::dot(std::span<const double> values) const {
    if (values.size() != probs_.size())
        throw InvalidArgument("value vector length does not match support size");
    return std::inner_product(probs_.begin(), probs_.end(), values.begin(), 0.0);
}

bool Distribution::strictly_positive() const noexcept {
    return std::all_of(probs_.begin(), probs_.end(), [](double w) { return w > 0.0; });
}

double kl_divergence(const Distribution& q, const Distribution& p) {
    if (q.size() != p.size()) throw InvalidArgument("kl divergence of mismatched supports");
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] == 0.0) continue;
        if (p[i] == 0.0) throw InfiniteDivergence(i);
        total += q[i] * std::log(q[i] / p[i]);
    }
    // rounding can leave tiny negatives when q == p
    return std::max(total, 0.0);
}

namespace {

// Calls visit(parts) for every composition of `total` into `parts.size()`
// positive integers, in lexicographic order.
template <class Visit>
void for_each_positive_composition(std::vector<std::size_t>& parts, std::size_t pos,
                                   std::size_t remaining, Visit& visit) {
    const std::size_t left = parts.size() - pos;
    if (left == 1) {
        parts[pos] = remaining;
        visit(parts);
        return;
    }
    for (std::size_t k = 1; k + (left - 1) <= remaining; ++k) {
        parts[pos] = k;
        for_each_positive_composition(parts, pos + 1, remaining - k, visit);
    }
}

} // namespace

SimplexGrid build_simplex_grid(std::size_t dim, double increment) {
    if (dim < 2) throw InvalidArgument("simplex grid needs dim >= 2");
    if (!(increment > 0.0) || !(increment < 1.0))
        throw InvalidArgument("simplex grid increment must lie in (0, 1)");
    const double ratio = 1.0 / increment;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * rounded)
        throw InvalidArgument("simplex grid increment must divide 1");
    const auto divisions = static_cast<std::size_t>(rounded);
    if (divisions < dim)
        throw EmptyGrid("no interior simplex point with dim " + std::to_string(dim) +
                        " and increment " + std::to_string(increment));

    SimplexGrid grid{dim, increment, divisions, {}};
    std::vector<std::size_t> parts(dim, 0);
    auto visit = [&](const std::vector<std::size_t>& c) {
        std::vector<double> probs(c.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            probs[i] = static_cast<double>(c[i]) / static_cast<double>(divisions);
        grid.points.push_back(Distribution::normalized(std::move(probs)));
    };
    for_each_positive_composition(parts, 0, divisions, visit);
    return grid;
}

std::vector<std::size_t> multinomial_sample(const Distribution& p, std::size_t n,
                                            std::uint64_t seed) {
    if (n == 0) throw InvalidArgument("multinomial sample size must be positive");
    Rng rng(seed);
    std::vector<std::size_t> counts(p.size(), 0);
    for (std::size_t k = 0; k < n; ++k) ++counts[rng.categorical(p.probs())];
    return counts;
}

} // namespace rmdp
