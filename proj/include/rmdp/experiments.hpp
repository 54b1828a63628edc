#pragma once

#include "rmdp/criteria.hpp"
#include "rmdp/simplex.hpp"
#include "rmdp/zurcher.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rmdp::experiments {

// ---------------------------------------------------------------- fleet

struct FleetSimConfig {
    std::size_t n_buses = 1000;
    std::size_t n_months = 100000;
    std::uint64_t seed = 0;
    /// Mean cumulative utility is recorded every `path_stride` months.
    std::size_t path_stride = 100;
    /// Mileage trajectories are kept for this many leading buses.
    std::size_t recorded_buses = 1;
    std::size_t jobs = 1;
};

struct FleetResult {
    /// Months t (0-based) at which mean_path is recorded; the last entry is n_months - 1.
    std::vector<std::size_t> path_months;
    /// [candidate][k]: fleet mean of discounted utility accrued through path_months[k].
    std::vector<std::vector<double>> mean_path;
    /// [candidate]: fleet mean and standard error of total discounted utility.
    std::vector<double> mean_total;
    std::vector<double> std_error;
    /// [candidate][bus][t]: mileage state at the start of month t.
    std::vector<std::vector<std::vector<std::size_t>>> trajectories;
    /// [candidate][bus]: total discounted utility per bus.
    std::vector<std::vector<double>> per_bus_total;
};

/**
 * Simulates every decision rule on the same fleet with common random numbers.
 *
 * Each bus owns a random stream; every month draws, in order, the uniform
 * for the mileage jump and the extreme value shocks for maintain and replace.
 * A rule maintains when value_diff(x) + e_maintain >= e_replace, accrues the
 * chosen action's utility plus its shock discounted by discount^t, and the
 * bus moves by a jump from `true_jump_law`, from state 0 after a replacement.
 * Every bus starts at state 0.
 */
FleetResult simulate_fleet(const zurcher::ZurcherConfig& config,
                           std::span<const zurcher::ChoiceProbabilities> rules,
                           const Distribution& true_jump_law, const FleetSimConfig& sim);

// ------------------------------------------------------------- ex post

enum class EvaluationMode { exact, simulate };

/// Expected discounted utility from a new bus (state 0) of a logit rule when
/// `true_jump_law` governs mileage, over `horizon` months (0: unbounded).
double exact_performance(const zurcher::ZurcherConfig& config,
                         const zurcher::ChoiceProbabilities& rule,
                         const Distribution& true_jump_law, std::size_t horizon = 0);

/// Both evaluation modes measure performance over fleet.n_months months, so
/// exact values are the expectation of what a simulation reports.
struct MisspecificationConfig {
    /// First entry is the as-if rule the others are compared to.
    std::vector<double> rule_confidences{0.0, 0.5, 0.95};
    /// Confidences of the worst-case laws that act as the truth.
    std::vector<double> truth_confidences;
    std::size_t representative_state = 15;
    EvaluationMode mode = EvaluationMode::exact;
    FleetSimConfig fleet;
    zurcher::EvOptions solver;
    std::size_t jobs = 1;
};

struct MisspecificationCurve {
    std::vector<double> rule_confidences;
    std::vector<double> truth_confidences;
    std::vector<Distribution> truth_laws;
    /// [rule][truth]
    std::vector<std::vector<double>> performance;
    /// [rule][truth], rule minus as-if; positive means the rule beats as-if.
    std::vector<std::vector<double>> difference;
    /// [rule][truth]; zero in exact mode.
    std::vector<std::vector<double>> std_error;
    /// [rule]: first truth confidence where the difference turns positive,
    /// linearly interpolated; NaN when it never does.
    std::vector<double> crossing;
};

MisspecificationCurve misspecification_curve(const zurcher::ZurcherConfig& config,
                                              const zurcher::TransitionEstimate& estimate,
                                              const MisspecificationConfig& mc);

/// First grid point where `series` turns positive, linearly interpolated
/// between the bracketing points; NaN when it never does.
double first_positive_crossing(std::span<const double> grid, std::span<const double> series);

// ------------------------------------------------------------- ex ante

/// Supplies the jump-law estimate for (point index, sample index).
using SampleSource =
    std::function<zurcher::TransitionEstimate(std::size_t point, std::size_t sample,
                                              const Distribution& truth)>;

struct ExAnteConfig {
    std::size_t dim = 3;
    double increment = 0.1;
    std::size_t samples_per_point = 100;
    std::size_t draws_per_sample = 55;
    std::vector<double> omega_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    EvaluationMode mode = EvaluationMode::exact;
    /// Fleet used per cell in simulate mode; n_months is the evaluation
    /// horizon in both modes.
    FleetSimConfig fleet{100, 5000, 0, 5000, 0, 1};
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    zurcher::EvOptions solver;
    /// Overrides multinomial sampling when set.
    SampleSource sample_source;
};

struct CellFailure {
    std::size_t point = 0;
    std::size_t sample = 0;
    double omega = 0.0;
    std::string message;
};

struct ExAnteResult {
    SimplexGrid grid;
    PerformanceSurface surface;
    /// [point][sample][omega]; NaN for failed cells.
    std::vector<std::vector<std::vector<double>>> cell_performance;
    /// [point][sample]: the estimate each sample produced.
    std::vector<std::vector<Distribution>> estimates;
    std::vector<CellFailure> failures;
    Selection maximin;
    Selection regret;
    Selection bayes;
};

/// The default SampleSource: counts of `draws` jumps from the truth, seeded
/// from (root seed, point, sample).
zurcher::TransitionEstimate multinomial_estimate(const Distribution& truth, std::size_t draws,
                                                 std::uint64_t root_seed, std::size_t point,
                                                 std::size_t sample);

/**
 * Performance surface of the omega-robust rules over a simplex grid of true
 * jump laws. At each point one law drives every state (uncertainty coupled
 * across states), while each rule is solved with rectangular sets.
 * config.max_jump must equal dim - 1.
 */
ExAnteResult ex_ante_sweep(const ExAnteConfig& ex, const zurcher::ZurcherConfig& config);

// -------------------------------------------------------------- presets

enum class Preset { desk, paper };

Preset parse_preset(const std::string& name);
std::string to_string(Preset preset);

zurcher::ZurcherConfig zurcher_preset(Preset preset);
ExAnteConfig ex_ante_preset(Preset preset);
MisspecificationConfig misspecification_preset(Preset preset);

} // namespace rmdp::experiments
