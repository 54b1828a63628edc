#pragma once

#include "rmdp/ambiguity.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rmdp {

/// Ambiguity set over next states: atom k of `set` is state `targets[k]`.
struct TransitionSet {
    std::vector<std::size_t> targets;
    AmbiguitySet set;
};

/**
 * Finite robust Markov decision problem with (s, a)-rectangular KL sets.
 *
 * Rectangularity: the solver lets nature pick a worst-case law independently
 * for every state, action, and period. Sets are never coupled, even when the
 * data that produced them came from one shared law.
 *
 * Utilities and transition sets are stored row-major by state.
 */
struct MdpSpec {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::vector<double> utility;
    double discount = 0.0;
    std::vector<TransitionSet> transitions;

    double u(std::size_t s, std::size_t a) const { return utility[s * n_actions + a]; }
    const TransitionSet& transition(std::size_t s, std::size_t a) const {
        return transitions[s * n_actions + a];
    }

    /// Throws InvalidArgument on any broken invariant.
    void validate() const;
};

/// One application of the robust Bellman operator.
struct BellmanUpdate {
    std::vector<double> values;
    std::vector<std::size_t> policy;
    /// Per (s, a), row-major; the law over `transition(s, a).targets`.
    std::vector<Distribution> worst_case;
    /// u(s, a) + discount * worst-case continuation, row-major.
    std::vector<double> action_values;
};

/// max_a [u(s, a) + discount * min_{q in set(s, a)} q . w]; ties go to the lowest action.
BellmanUpdate robust_bellman_apply(const MdpSpec& spec, std::span<const double> w);

enum class Acceleration {
    none,
    /// Adds discount/(1-discount) * midpoint(Λv - v) after each sweep, and
    /// once more to the returned values. Valid for monotone operators with
    /// Λ(v + c) = Λ(v) + discount * c, where the fixed point lies between
    /// Λv + d/(1-d) min(Λv - v) and Λv + d/(1-d) max(Λv - v).
    span_extrapolation
};

/// (min, max) of next - prev, elementwise.
std::pair<double, double> change_bounds(std::span<const double> next,
                                        std::span<const double> prev);

struct SolverOptions {
    double kappa = 1e-8;
    std::size_t max_iter = 1'000'000;
    Acceleration acceleration = Acceleration::none;
};

struct RobustSolution {
    std::vector<double> values;
    std::vector<std::size_t> policy;
    std::vector<Distribution> worst_case;
    std::size_t iterations = 0;
    /// Sup-norm distance between the last two iterates.
    double residual = 0.0;
    bool converged = false;
    double discount = 0.0;
    /// Sup-norm bound on the distance of `values` to the fixed point:
    /// residual * d / (1 - d) without acceleration, half the span bound with it.
    double error_bound = 0.0;
};

/// Robust value iteration from v = 0 until the sup-norm change is at most
/// kappa. A run that exhausts max_iter comes back with converged == false.
RobustSolution robust_value_iteration(const MdpSpec& spec, const SolverOptions& options = {});

/// Randomized stationary policy with an optional per-state utility bonus
/// (the expected taste shock of a logit rule).
struct StochasticPolicy {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::vector<double> probs;  ///< row-major by state
    std::vector<double> bonus;  ///< empty or one entry per state

    static StochasticPolicy deterministic(std::span<const std::size_t> policy,
                                          std::size_t n_actions);
};

/**
 * Exact discounted value of a policy when the centers of `truth` are the
 * actual transition laws (radii are ignored): solves (I - d P_pi) v = r_pi.
 */
std::vector<double> evaluate_policy_under_truth(const MdpSpec& truth,
                                                const StochasticPolicy& policy);
std::vector<double> evaluate_policy_under_truth(const MdpSpec& truth,
                                                std::span<const std::size_t> policy);

/// Expected discounted utility over the first `horizon` periods from every
/// state, (I - (d P_pi)^H) v_inf, with the matrix power taken by squaring.
/// A horizon of 0 means no truncation.
std::vector<double> evaluate_policy_over_horizon(const MdpSpec& truth,
                                                 const StochasticPolicy& policy,
                                                 std::size_t horizon);

/// Expected discounted utility accumulated through each period t < horizon
/// when starting in `initial_state`, by exact propagation of the state law.
std::vector<double> expected_cumulative_utility(const MdpSpec& truth,
                                                const StochasticPolicy& policy,
                                                std::size_t initial_state, std::size_t horizon);


} // namespace rmdp
