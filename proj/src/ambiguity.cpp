#include "rmdp/ambiguity.hpp"

#include "rmdp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rmdp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
constexpr int kMaxSeriesTerms = 10000;

double gamma_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < kMaxSeriesTerms; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper tail Q(a, x) by the modified Lentz continued fraction.
double gamma_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxSeriesTerms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) throw InvalidArgument("incomplete gamma needs a > 0");
    if (x < 0.0 || std::isnan(x)) throw InvalidArgument("incomplete gamma needs x >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return gamma_series(a, x);
    return 1.0 - gamma_continued_fraction(a, x);
}

double chi2_quantile(unsigned df, double w) {
    if (df == 0) throw InvalidArgument("chi-squared quantile needs df >= 1");
    if (!(w >= 0.0) || w > 1.0) throw InvalidArgument("chi-squared quantile needs w in [0, 1)");
    if (w == 1.0) throw InvalidArgument("chi-squared quantile at w = 1 is infinite");
    if (w == 0.0) return 0.0;

    const double a = 0.5 * df;
    auto cdf = [a](double x) { return regularized_gamma_p(a, 0.5 * x); };

    double lo = 0.0;
    double hi = std::max(1.0, static_cast<double>(df));
    while (cdf(hi) < w) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1e-10 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < w)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double calibrate_radius(std::size_t n_obs, std::size_t support_size, double w) {
    if (n_obs == 0) throw InvalidArgument("radius calibration needs n_obs >= 1");
    if (support_size < 2)
        throw DegenerateSet("ambiguity set over a single atom has no ambiguity");
    if (!(w >= 0.0) || w > 1.0) throw InvalidArgument("confidence must lie in [0, 1]");
    if (w == 1.0) return std::numeric_limits<double>::infinity();
    return chi2_quantile(static_cast<unsigned>(support_size - 1), w) /
           (2.0 * static_cast<double>(n_obs));
}

SupportedEstimate restrict_support(const Distribution& estimate) {
    std::vector<std::size_t> atoms;
    std::vector<double> weights;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        if (estimate[i] > 0.0) {
            atoms.push_back(i);
            weights.push_back(estimate[i]);
        }
    }
    return {std::move(atoms), Distribution::normalized(std::move(weights))};
}

void AmbiguitySet::validate() const {
    if (!center.strictly_positive())
        throw InvalidArgument("ambiguity set center must be strictly positive on its support");
    if (!(radius >= 0.0)) throw InvalidArgument("ambiguity set radius must be non-negative");
    if (confidence) {
        if (!(*confidence >= 0.0) || *confidence > 1.0)
            throw InvalidArgument("ambiguity set confidence must lie in [0, 1]");
        if (center.size() > 1 && ((radius == 0.0) != (*confidence == 0.0)))
            throw InvalidArgument("ambiguity set radius is zero iff confidence is zero");
    }
}

AmbiguitySet AmbiguitySet::calibrated(Distribution center, std::size_t n_obs, double confidence) {
    double radius = 0.0;
    if (center.size() >= 2) radius = calibrate_radius(n_obs, center.size(), confidence);
    AmbiguitySet set{std::move(center), radius, n_obs, confidence};
    set.validate();
    return set;
}

AmbiguitySet AmbiguitySet::with_radius(Distribution center, double radius) {
    AmbiguitySet set{std::move(center), radius, std::nullopt, std::nullopt};
    set.validate();
    return set;
}

double breakpoint_radius(const Distribution& center, std::span<const double> v) {
    const double vmin = *std::min_element(v.begin(), v.end());
    double mass = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] == vmin) mass += center[i];
    return -std::log(mass);
}

namespace {

// Tilted distribution q_mu and its divergence from the center, with
// exponents shifted by min v so every factor lies in (0, 1].
struct Tilt {
    std::vector<double> q;
    double kl = 0.0;
};

Tilt tilt(std::span<const double> center, std::span<const double> shifted, double mu) {
    Tilt t;
    t.q.resize(center.size());
    double z = 0.0;
    for (std::size_t i = 0; i < center.size(); ++i) {
        t.q[i] = center[i] * std::exp(-shifted[i] / mu);
        z += t.q[i];
    }
    double mean_shift = 0.0;
    for (std::size_t i = 0; i < center.size(); ++i) {
        t.q[i] /= z;
        mean_shift += t.q[i] * shifted[i];
    }
    // KL(q || p) = sum q_i (-s_i / mu - ln z)
    t.kl = std::max(0.0, -mean_shift / mu - std::log(z));
    return t;
}

constexpr int kMaxBracketSteps = 2000;
constexpr int kMaxBisectionSteps = 400;
constexpr double kDualTolerance = 1e-12;

} // namespace

WorstCaseResult worst_case_expectation(const AmbiguitySet& set, std::span<const double> v) {
    const Distribution& p = set.center;
    if (v.size() != p.size())
        throw InvalidArgument("value vector length does not match ambiguity set support");
    for (double x : v)
        if (!std::isfinite(x)) throw InvalidArgument("worst-case values must be finite");

    const auto [min_it, max_it] = std::minmax_element(v.begin(), v.end());
    const double vmin = *min_it;
    const double vmax = *max_it;

    if (set.radius == 0.0) return {p.dot(v), p, WorstCaseRegime::center, 0.0};
    if (vmin == vmax) return {vmin, p, WorstCaseRegime::constant, 0.0};

    auto boundary = [&] {
        std::vector<double> q(p.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] == vmin) q[i] = p[i];
        return WorstCaseResult{vmin, Distribution::normalized(std::move(q)),
                               WorstCaseRegime::boundary, 0.0};
    };
    if (set.radius >= breakpoint_radius(p, v)) return boundary();

    std::vector<double> shifted(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) shifted[i] = v[i] - vmin;

    // KL(q_mu || p) decreases from the breakpoint (mu -> 0) to 0 (mu -> inf).
    // Bracket the root of KL(q_mu) = radius with lo infeasible, hi feasible.
    double hi = vmax - vmin;
    double lo = hi;
    if (tilt(p.probs(), shifted, hi).kl > set.radius) {
        int steps = 0;
        do {
            lo = hi;
            hi *= 2.0;
        } while (tilt(p.probs(), shifted, hi).kl > set.radius && ++steps < kMaxBracketSteps);
    } else {
        int steps = 0;
        do {
            hi = lo;
            lo *= 0.5;
            if (lo < std::numeric_limits<double>::min() || ++steps >= kMaxBracketSteps)
                return boundary();
        } while (tilt(p.probs(), shifted, lo).kl <= set.radius);
    }

    for (int it = 0; it < kMaxBisectionSteps && hi - lo > kDualTolerance * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tilt(p.probs(), shifted, mid).kl > set.radius)
            lo = mid;
        else
            hi = mid;
    }

    Tilt best = tilt(p.probs(), shifted, hi);
    double value = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) value += best.q[i] * shifted[i];
    value += vmin;
    return {value, Distribution::normalized(std::move(best.q)), WorstCaseRegime::interior, hi};
}

} // namespace rmdp
