#pragma once

#include "rmdp/mdp.hpp"
#include "rmdp/simplex.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rmdp::zurcher {

inline constexpr std::size_t kMaintain = 0;
inline constexpr std::size_t kReplace = 1;

/// Bus engine replacement setup. Mileage is binned; costs are in utility units.
struct ZurcherConfig {
    std::size_t n_states = 78;
    double bin_width = 5000.0;
    double replacement_cost = 50.0;
    /// Maintenance cost per bin index: c(x) = maintenance_slope * x.
    double maintenance_slope = 0.4;
    double discount = 0.9999;
    std::size_t max_jump = 3;
    double confidence = 0.0;
    /// Observations per state used to size every state's ambiguity set.
    std::size_t pooled_n_obs = 55;

    void validate() const;

    double utility(std::size_t state, std::size_t action) const {
        return action == kReplace ? -replacement_cost
                                  : -maintenance_slope * static_cast<double>(state);
    }
    double mileage(std::size_t state) const { return static_cast<double>(state) * bin_width; }
};

/// Monthly record: `odometer` is mileage since the last engine replacement at
/// the start of the month, `replaced` the decision taken that month.
struct OdometerRow {
    std::string bus_id;
    long month = 0;
    double odometer = 0.0;
    bool replaced = false;
};

/// Pooled maximum likelihood estimate of the monthly jump law over
/// {0, ..., max_jump} bins.
struct TransitionEstimate {
    Distribution jump_probs;
    std::vector<std::size_t> counts;
    std::size_t n_obs = 0;

    static TransitionEstimate from_counts(std::vector<std::size_t> counts);
};

/// Reads `bus_id,month,odometer,replace`; throws DataError with the line number.
std::vector<OdometerRow> read_odometer_csv(std::istream& in);
void write_odometer_csv(std::ostream& out, std::span<const OdometerRow> rows);

/**
 * Discretizes odometer readings and counts monthly bin jumps.
 *
 * Rows are grouped by bus in order of appearance and must be sorted by month
 * within a bus. The jump of month t is bin(t+1) - bin(t), or bin(t+1) - 0
 * when the engine was replaced in month t. Throws DataError on a jump above
 * max_jump or a negative jump without a replacement.
 */
TransitionEstimate ingest_odometer_data(std::span<const OdometerRow> rows,
                                        const ZurcherConfig& config);

struct SyntheticFleet {
    std::size_t n_buses = 37;
    /// Readings per bus; 37 buses x 117 readings give 4,292 transitions.
    std::size_t n_readings = 117;
    /// Replace once the mileage bin reaches this index.
    std::size_t replace_bin = 40;
    std::uint64_t seed = 0;
};

/// Monthly jump law used when no odometer file is supplied: about 60% on one
/// bin and 1.28% on two bins.
Distribution default_jump_law();

/// Odometer panel with jumps drawn from `jump_law` and threshold replacement.
/// Requires replace_bin + max_jump < n_states so no jump is truncated.
std::vector<OdometerRow> synthesize_odometer_data(const Distribution& jump_law,
                                                  const ZurcherConfig& config,
                                                  const SyntheticFleet& fleet);

/**
 * Continuation sets: entry x is the KL set over the states reachable from x
 * in one month, with jumps past the last bin absorbed there. Every set is
 * calibrated from pooled_n_obs at the configured confidence over its own
 * distinct support.
 */
std::vector<TransitionSet> continuation_sets(const ZurcherConfig& config,
                                             const Distribution& jump_probs);

/// Two-action MdpSpec (maintain, replace) over the continuation sets. With
/// confidence 0 its centers are the jump law itself, as needed for exact
/// policy evaluation.
MdpSpec to_mdp(const ZurcherConfig& config, const Distribution& jump_probs);

/// Value of a new mileage state, log-sum-exp over actions.
struct EvFunction {
    std::vector<double> ev;
};

struct LogitUpdate {
    std::vector<double> values;
    /// Worst-case expected value of next month's state, per current state.
    std::vector<double> continuation;
    /// Per state, over continuation_sets()[x].targets.
    std::vector<Distribution> worst_case;
};

/// Λ(v)(x) = log sum_a exp[u(x, a) + d * min_{q in P((1 - a) x)} q . v].
LogitUpdate robust_logsumexp_apply(const ZurcherConfig& config,
                                   std::span<const TransitionSet> sets,
                                   std::span<const double> v);

struct EvSolution {
    EvFunction ev;
    std::vector<TransitionSet> sets;
    std::vector<Distribution> worst_case;
    std::vector<double> continuation;
    std::size_t iterations = 0;
    double residual = 0.0;
    double error_bound = 0.0;
    bool converged = false;
};

struct EvOptions {
    double kappa = 1e-8;
    std::size_t max_iter = 1'000'000;
    Acceleration acceleration = Acceleration::span_extrapolation;
    /// Starting point; empty means v = 0.
    std::vector<double> warm_start;
};

/// Fixed point of robust_logsumexp_apply. Reports non-convergence through
/// EvSolution::converged rather than throwing.
EvSolution solve_ev(const ZurcherConfig& config, const TransitionEstimate& estimate,
                    const EvOptions& options = {});
EvSolution solve_ev(const ZurcherConfig& config, const Distribution& jump_probs,
                    const EvOptions& options = {});

struct ChoiceProbabilities {
    std::vector<double> maintain_prob;
    /// v(x, maintain) - v(x, replace); the logit index behind maintain_prob.
    std::vector<double> value_diff;
};

ChoiceProbabilities choice_probabilities(const ZurcherConfig& config, const EvSolution& solution);

/// Logit rule as a StochasticPolicy over to_mdp(), with the expected taste
/// shock -sum_a P_a ln P_a of mean-zero extreme value errors as bonus.
StochasticPolicy logit_policy(const ChoiceProbabilities& choice);

/// Law over jumps {0, ..., max_jump} implied by a law over `targets` reached
/// from `state`. Mass absorbed at the last bin goes to the smallest jump
/// reaching it.
Distribution jump_distribution(std::size_t state, std::span<const std::size_t> targets,
                               const Distribution& law, std::size_t max_jump);

struct WorstCaseJumpRow {
    double confidence = 0.0;
    std::size_t n_obs = 0;
    Distribution jump_probs;
};

/// Worst-case jump law at `state` (default 15, i.e. 75,000 miles at the
/// default bin width) for every (confidence, n_obs) pair.
std::vector<WorstCaseJumpRow> worst_case_jump_table(const ZurcherConfig& config,
                                                    const TransitionEstimate& estimate,
                                                    std::span<const double> confidences,
                                                    std::span<const std::size_t> n_obs_variants,
                                                    std::size_t state = 15,
                                                    const EvOptions& options = {});

} // namespace rmdp::zurcher
