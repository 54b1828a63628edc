#include "rmdp/mdp.hpp"

#include "rmdp/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace rmdp {

void MdpSpec::validate() const {
    if (n_states == 0 || n_actions == 0)
        throw InvalidArgument("mdp needs at least one state and one action");
    if (!(discount >= 0.0) || !(discount < 1.0))
        throw InvalidArgument("mdp discount must lie in [0, 1)");
    if (utility.size() != n_states * n_actions)
        throw InvalidArgument("mdp utility table has the wrong size");
    if (transitions.size() != n_states * n_actions)
        throw InvalidArgument("mdp transition table has the wrong size");
    for (double x : utility)
        if (!std::isfinite(x)) throw InvalidArgument("mdp utilities must be finite");
    for (const auto& t : transitions) {
        if (t.targets.size() != t.set.size())
            throw InvalidArgument("transition targets do not match the ambiguity set support");
        for (auto target : t.targets)
            if (target >= n_states) throw InvalidArgument("transition target is not a valid state");
        t.set.validate();
    }
}

namespace {

std::vector<double> gather(std::span<const double> w, std::span<const std::size_t> targets) {
    std::vector<double> out(targets.size());
    for (std::size_t k = 0; k < targets.size(); ++k) out[k] = w[targets[k]];
    return out;
}

} // namespace

std::pair<double, double> change_bounds(std::span<const double> next,
                                        std::span<const double> prev) {
    double lo = next[0] - prev[0];
    double hi = lo;
    for (std::size_t i = 1; i < next.size(); ++i) {
        lo = std::min(lo, next[i] - prev[i]);
        hi = std::max(hi, next[i] - prev[i]);
    }
    return {lo, hi};
}

BellmanUpdate robust_bellman_apply(const MdpSpec& spec, std::span<const double> w) {
    if (w.size() != spec.n_states) throw InvalidArgument("value vector has the wrong size");
    for (double x : w)
        if (!std::isfinite(x)) throw InvalidArgument("value vector must be finite");

    BellmanUpdate out;
    out.values.resize(spec.n_states);
    out.policy.resize(spec.n_states);
    out.action_values.resize(spec.n_states * spec.n_actions);
    out.worst_case.reserve(spec.n_states * spec.n_actions);

    for (std::size_t s = 0; s < spec.n_states; ++s) {
        double best = 0.0;
        std::size_t best_action = 0;
        for (std::size_t a = 0; a < spec.n_actions; ++a) {
            const auto& t = spec.transition(s, a);
            const auto local = gather(w, t.targets);
            auto wc = worst_case_expectation(t.set, local);
            const double q = spec.u(s, a) + spec.discount * wc.value;
            out.action_values[s * spec.n_actions + a] = q;
            out.worst_case.push_back(std::move(wc.minimizer));
            if (a == 0 || q > best) {
                best = q;
                best_action = a;
            }
        }
        out.values[s] = best;
        out.policy[s] = best_action;
    }
    return out;
}

RobustSolution robust_value_iteration(const MdpSpec& spec, const SolverOptions& options) {
    if (!(options.kappa > 0.0)) throw InvalidArgument("kappa must be positive");
    spec.validate();

    const double d = spec.discount;
    const bool extrapolate = options.acceleration == Acceleration::span_extrapolation;
    std::vector<double> v(spec.n_states, 0.0);
    RobustSolution sol;
    sol.discount = d;
    for (std::size_t it = 1;; ++it) {
        BellmanUpdate next = robust_bellman_apply(spec, v);
        const auto [lo, hi] = change_bounds(next.values, v);
        sol.residual = std::max(std::abs(lo), std::abs(hi));
        sol.iterations = it;
        const double shift = extrapolate ? d / (1.0 - d) * 0.5 * (lo + hi) : 0.0;
        if (sol.residual <= options.kappa || it >= options.max_iter) {
            sol.converged = sol.residual <= options.kappa;
            sol.values = std::move(next.values);
            for (double& x : sol.values) x += shift;
            sol.policy = std::move(next.policy);
            sol.worst_case = std::move(next.worst_case);
            sol.error_bound = extrapolate ? d / (1.0 - d) * 0.5 * (hi - lo)
                                          : d / (1.0 - d) * sol.residual;
            return sol;
        }
        for (std::size_t s = 0; s < v.size(); ++s) v[s] = next.values[s] + shift;
    }
}

StochasticPolicy StochasticPolicy::deterministic(std::span<const std::size_t> policy,
                                                 std::size_t n_actions) {
    StochasticPolicy out{policy.size(), n_actions,
                         std::vector<double>(policy.size() * n_actions, 0.0), {}};
    for (std::size_t s = 0; s < policy.size(); ++s) {
        if (policy[s] >= n_actions) throw InvalidArgument("policy action out of range");
        out.probs[s * n_actions + policy[s]] = 1.0;
    }
    return out;
}

namespace {

struct InducedChain {
    Eigen::MatrixXd transition;
    Eigen::VectorXd reward;
};

InducedChain induced_chain(const MdpSpec& truth, const StochasticPolicy& policy) {
    if (policy.n_states != truth.n_states || policy.n_actions != truth.n_actions ||
        policy.probs.size() != truth.n_states * truth.n_actions)
        throw InvalidArgument("policy shape does not match the mdp");
    if (!policy.bonus.empty() && policy.bonus.size() != truth.n_states)
        throw InvalidArgument("policy bonus must have one entry per state");

    const auto n = static_cast<Eigen::Index>(truth.n_states);
    InducedChain chain{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
    for (std::size_t s = 0; s < truth.n_states; ++s) {
        const auto row = static_cast<Eigen::Index>(s);
        if (!policy.bonus.empty()) chain.reward(row) = policy.bonus[s];
        for (std::size_t a = 0; a < truth.n_actions; ++a) {
            const double pa = policy.probs[s * truth.n_actions + a];
            if (pa == 0.0) continue;
            chain.reward(row) += pa * truth.u(s, a);
            const auto& t = truth.transition(s, a);
            for (std::size_t k = 0; k < t.targets.size(); ++k)
                chain.transition(row, static_cast<Eigen::Index>(t.targets[k])) +=
                    pa * t.set.center[k];
        }
    }
    return chain;
}

} // namespace

std::vector<double> evaluate_policy_under_truth(const MdpSpec& truth,
                                                const StochasticPolicy& policy) {
    truth.validate();
    const auto chain = induced_chain(truth, policy);
    const auto n = chain.reward.size();
    const Eigen::MatrixXd system =
        Eigen::MatrixXd::Identity(n, n) - truth.discount * chain.transition;
    const Eigen::VectorXd values = system.partialPivLu().solve(chain.reward);
    return {values.data(), values.data() + n};
}

std::vector<double> evaluate_policy_under_truth(const MdpSpec& truth,
                                                std::span<const std::size_t> policy) {
    return evaluate_policy_under_truth(truth,
                                       StochasticPolicy::deterministic(policy, truth.n_actions));
}

std::vector<double> evaluate_policy_over_horizon(const MdpSpec& truth,
                                                 const StochasticPolicy& policy,
                                                 std::size_t horizon) {
    truth.validate();
    const auto chain = induced_chain(truth, policy);
    const auto n = chain.reward.size();
    const Eigen::MatrixXd step = truth.discount * chain.transition;
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - step;
    Eigen::VectorXd values = system.partialPivLu().solve(chain.reward);
    if (horizon > 0) {
        Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
        Eigen::MatrixXd base = step;
        for (std::size_t h = horizon; h > 0; h >>= 1) {
            if (h & 1) power = power * base;
            if (h > 1) base = base * base;
        }
        values -= power * values;
    }
    return {values.data(), values.data() + n};
}

std::vector<double> expected_cumulative_utility(const MdpSpec& truth,
                                                const StochasticPolicy& policy,
                                                std::size_t initial_state, std::size_t horizon) {
    truth.validate();
    if (initial_state >= truth.n_states) throw InvalidArgument("initial state out of range");
    const auto chain = induced_chain(truth, policy);
    Eigen::RowVectorXd law = Eigen::RowVectorXd::Zero(chain.reward.size());
    law(static_cast<Eigen::Index>(initial_state)) = 1.0;

    std::vector<double> out(horizon);
    double weight = 1.0;
    double total = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        total += weight * law.dot(chain.reward);
        out[t] = total;
        law = law * chain.transition;
        weight *= truth.discount;
    }
    return out;
}

} // namespace rmdp
