#include "rmdp/experiments.hpp"

#include "rmdp/errors.hpp"
#include "rmdp/parallel.hpp"
#include "rmdp/rng.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rmdp::experiments {

zurcher::TransitionEstimate multinomial_estimate(const Distribution& truth, std::size_t draws,
                                                 std::uint64_t root_seed, std::size_t point,
                                                 std::size_t sample) {
    return zurcher::TransitionEstimate::from_counts(
        multinomial_sample(truth, draws, derive_seed(root_seed, {point, sample})));
}

namespace {

std::string point_label(const Distribution& p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += '/';
        std::ostringstream os;
        os << p[i];
        out += os.str();
    }
    return out;
}

// Performance of the rule solved from `estimate` at every omega, warm
// starting each solve from the previous omega's fixed point.
void solve_sample(const ExAnteConfig& ex, const zurcher::ZurcherConfig& config,
                  const Distribution& truth, const Distribution& estimate, std::size_t point,
                  std::size_t sample, std::vector<double>& performance,
                  std::vector<CellFailure>& failures) {
    std::vector<zurcher::ChoiceProbabilities> rules;
    std::vector<std::size_t> solved;
    zurcher::EvOptions options = ex.solver;
    for (std::size_t w = 0; w < ex.omega_grid.size(); ++w) {
        zurcher::ZurcherConfig cfg = config;
        cfg.confidence = ex.omega_grid[w];
        try {
            const auto sol = zurcher::solve_ev(cfg, estimate, options);
            if (!sol.converged)
                throw NonConvergence("ev solve did not converge", sol.residual, sol.iterations);
            options.warm_start = sol.ev.ev;
            rules.push_back(zurcher::choice_probabilities(cfg, sol));
            solved.push_back(w);
        } catch (const Error& e) {
            failures.push_back({point, sample, ex.omega_grid[w], e.what()});
        }
    }

    if (ex.mode == EvaluationMode::exact) {
        for (std::size_t i = 0; i < rules.size(); ++i)
            performance[solved[i]] = exact_performance(config, rules[i], truth, ex.fleet.n_months);
    } else if (!rules.empty()) {
        FleetSimConfig fleet = ex.fleet;
        fleet.seed = derive_seed(ex.seed, {point, sample, 0xf1ee7});
        fleet.recorded_buses = 0;
        fleet.jobs = 1;
        const auto sim = simulate_fleet(config, rules, truth, fleet);
        for (std::size_t i = 0; i < rules.size(); ++i) performance[solved[i]] = sim.mean_total[i];
    }
}

} // namespace

ExAnteResult ex_ante_sweep(const ExAnteConfig& ex, const zurcher::ZurcherConfig& config) {
    config.validate();
    if (config.max_jump + 1 != ex.dim)
        throw InvalidArgument("ex-ante sweep needs max_jump == dim - 1");
    if (ex.omega_grid.empty()) throw InvalidArgument("omega grid must be non-empty");
    for (double w : ex.omega_grid)
        if (!(w >= 0.0) || w > 1.0) throw InvalidArgument("omega grid must lie within [0, 1]");
    if (ex.samples_per_point == 0) throw InvalidArgument("samples_per_point must be positive");
    if (!ex.sample_source && ex.draws_per_sample == 0)
        throw InvalidArgument("draws_per_sample must be positive");

    ExAnteResult result;
    result.grid = build_simplex_grid(ex.dim, ex.increment);
    const std::size_t n_points = result.grid.points.size();
    const std::size_t n_samples = ex.samples_per_point;
    const std::size_t n_omega = ex.omega_grid.size();
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    result.cell_performance.assign(
        n_points, std::vector<std::vector<double>>(n_samples, std::vector<double>(n_omega, nan)));
    std::vector<std::vector<std::optional<Distribution>>> estimates(
        n_points, std::vector<std::optional<Distribution>>(n_samples));
    std::vector<std::vector<CellFailure>> failures(n_points * n_samples);

    // one work item per (point, sample); the benchmark rules use index n_samples
    const std::size_t per_point = n_samples + 1;
    std::vector<std::vector<double>> benchmark(n_points, std::vector<double>(n_omega, nan));
    std::vector<std::vector<CellFailure>> benchmark_failures(n_points);

    parallel_for(n_points * per_point, ex.jobs, [&](std::size_t item) {
        const std::size_t point = item / per_point;
        const std::size_t sample = item % per_point;
        const Distribution& truth = result.grid.points[point];
        if (sample == n_samples) {
            solve_sample(ex, config, truth, truth, point, sample, benchmark[point],
                         benchmark_failures[point]);
            return;
        }
        const auto estimate = ex.sample_source
                                  ? ex.sample_source(point, sample, truth)
                                  : multinomial_estimate(truth, ex.draws_per_sample, ex.seed,
                                                         point, sample);
        estimates[point][sample] = estimate.jump_probs;
        solve_sample(ex, config, truth, estimate.jump_probs, point, sample,
                     result.cell_performance[point][sample], failures[point * n_samples + sample]);
    });

    for (auto& per : failures)
        for (auto& f : per) result.failures.push_back(std::move(f));
    for (auto& per : benchmark_failures)
        for (auto& f : per) result.failures.push_back(std::move(f));
    for (auto& row : estimates) {
        result.estimates.emplace_back();
        for (auto& e : row) result.estimates.back().push_back(std::move(*e));
    }

    PerformanceSurface& surface = result.surface;
    surface.candidates = ex.omega_grid;
    for (const auto& p : result.grid.points) surface.points.push_back(point_label(p));
    surface.scores.assign(n_omega * n_points, nan);
    for (std::size_t w = 0; w < n_omega; ++w) {
        for (std::size_t p = 0; p < n_points; ++p) {
            double sum = 0.0;
            std::size_t ok = 0;
            for (std::size_t s = 0; s < n_samples; ++s) {
                const double v = result.cell_performance[p][s][w];
                if (std::isnan(v)) continue;
                sum += v;
                ++ok;
            }
            if (ok == 0)
                throw Error("every sample failed at grid point " + surface.points[p] +
                            " and omega " + std::to_string(ex.omega_grid[w]));
            surface.scores[w * n_points + p] = sum / static_cast<double>(ok);
        }
    }
    for (std::size_t p = 0; p < n_points; ++p) {
        double best = -std::numeric_limits<double>::infinity();
        for (double v : benchmark[p])
            if (!std::isnan(v)) best = std::max(best, v);
        // simulation noise can put a sampled rule above the benchmark
        for (std::size_t w = 0; w < n_omega; ++w) best = std::max(best, surface.score(w, p));
        surface.best_attainable.push_back(best);
    }

    result.maximin = maximin_select(surface);
    result.regret = minimax_regret_select(surface);
    result.bayes = bayes_select(surface, uniform_prior(n_points));
    return result;
}

Preset parse_preset(const std::string& name) {
    if (name == "desk") return Preset::desk;
    if (name == "paper") return Preset::paper;
    throw InvalidArgument("unknown preset '" + name + "' (expected desk or paper)");
}

std::string to_string(Preset preset) { return preset == Preset::desk ? "desk" : "paper"; }

zurcher::ZurcherConfig zurcher_preset(Preset preset) {
    zurcher::ZurcherConfig config;
    if (preset == Preset::desk) config.n_states = 30;
    return config;
}

ExAnteConfig ex_ante_preset(Preset preset) {
    ExAnteConfig ex;
    if (preset == Preset::desk) {
        ex.increment = 0.2;
        ex.samples_per_point = 20;
        ex.fleet = FleetSimConfig{100, 5000, 0, 5000, 0, 1};
    } else {
        ex.increment = 0.1;
        ex.samples_per_point = 100;
        ex.fleet = FleetSimConfig{1000, 100000, 0, 100000, 0, 1};
    }
    return ex;
}

MisspecificationConfig misspecification_preset(Preset preset) {
    MisspecificationConfig mc;
    for (int k = 0; k <= 19; ++k) mc.truth_confidences.push_back(static_cast<double>(k) / 20.0);
    if (preset == Preset::desk) {
        mc.mode = EvaluationMode::exact;
        mc.fleet = FleetSimConfig{200, 5000, 0, 10, 1, 1};
    } else {
        mc.mode = EvaluationMode::simulate;
        mc.fleet = FleetSimConfig{1000, 100000, 0, 100, 1, 1};
    }
    return mc;
}

} // namespace rmdp::experiments
