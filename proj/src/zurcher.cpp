#include "rmdp/zurcher.hpp"

#include "rmdp/ambiguity.hpp"
#include "rmdp/csv.hpp"
#include "rmdp/errors.hpp"
#include "rmdp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

namespace rmdp::zurcher {

void ZurcherConfig::validate() const {
    if (n_states < max_jump + 1) throw InvalidArgument("n_states must be at least max_jump + 1");
    if (!(bin_width > 0.0)) throw InvalidArgument("bin_width must be positive");
    if (!(replacement_cost >= 0.0) || !(maintenance_slope >= 0.0))
        throw InvalidArgument("costs must be non-negative");
    if (!(discount >= 0.0) || !(discount < 1.0))
        throw InvalidArgument("discount must lie in [0, 1)");
    if (!(confidence >= 0.0) || confidence > 1.0)
        throw InvalidArgument("confidence must lie in [0, 1]");
    if (pooled_n_obs == 0) throw InvalidArgument("pooled_n_obs must be positive");
}

TransitionEstimate TransitionEstimate::from_counts(std::vector<std::size_t> counts) {
    std::size_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw DataError("no transitions to estimate from");
    std::vector<double> probs(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j)
        probs[j] = static_cast<double>(counts[j]) / static_cast<double>(total);
    return {Distribution::normalized(std::move(probs)), std::move(counts), total};
}

std::vector<OdometerRow> read_odometer_csv(std::istream& in) {
    std::vector<std::string> fields;
    std::size_t line = 0;
    if (!csv::read_row(in, fields, line)) throw DataError("odometer csv is empty");
    const std::vector<std::string> header{"bus_id", "month", "odometer", "replace"};
    if (fields != header)
        throw DataError("odometer csv header must be bus_id,month,odometer,replace", line);

    std::vector<OdometerRow> rows;
    while (csv::read_row(in, fields, line)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 4) throw DataError("expected 4 fields", line);
        OdometerRow row;
        row.bus_id = fields[0];
        row.month = csv::parse_integer(fields[1], line);
        row.odometer = csv::parse_number(fields[2], line);
        if (!(row.odometer >= 0.0)) throw DataError("odometer must be non-negative", line);
        if (fields[3] == "0")
            row.replaced = false;
        else if (fields[3] == "1")
            row.replaced = true;
        else
            throw DataError("replace must be 0 or 1", line);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_odometer_csv(std::ostream& out, std::span<const OdometerRow> rows) {
    csv::write_row(out, {"bus_id", "month", "odometer", "replace"});
    for (const auto& r : rows)
        csv::write_row(out, {r.bus_id, std::to_string(r.month), csv::format_number(r.odometer),
                             r.replaced ? "1" : "0"});
}

namespace {

std::size_t mileage_bin(double odometer, const ZurcherConfig& config) {
    const auto bin = static_cast<std::size_t>(std::floor(odometer / config.bin_width));
    return std::min(bin, config.n_states - 1);
}

std::vector<double> gather(std::span<const double> v, std::span<const std::size_t> targets) {
    std::vector<double> out(targets.size());
    for (std::size_t k = 0; k < targets.size(); ++k) out[k] = v[targets[k]];
    return out;
}

double log_sum_exp(double a, double b) {
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

} // namespace

TransitionEstimate ingest_odometer_data(std::span<const OdometerRow> rows,
                                        const ZurcherConfig& config) {
    config.validate();
    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<const OdometerRow*>> by_bus;
    for (const auto& row : rows) {
        auto [it, inserted] = by_bus.try_emplace(row.bus_id);
        if (inserted) order.push_back(row.bus_id);
        it->second.push_back(&row);
    }

    std::vector<std::size_t> counts(config.max_jump + 1, 0);
    for (const auto& bus : order) {
        const auto& history = by_bus.at(bus);
        for (std::size_t t = 0; t + 1 < history.size(); ++t) {
            const auto& now = *history[t];
            const auto& next = *history[t + 1];
            const std::string where = "bus " + bus + " month " + std::to_string(now.month);
            if (next.month <= now.month)
                throw DataError(where + ": rows must be sorted by month within a bus");
            const long base = now.replaced ? 0 : static_cast<long>(mileage_bin(now.odometer, config));
            const long jump = static_cast<long>(mileage_bin(next.odometer, config)) - base;
            if (jump < 0) throw DataError(where + ": mileage decreases without a replacement");
            if (jump > static_cast<long>(config.max_jump))
                throw DataError(where + ": jump of " + std::to_string(jump) +
                                " bins exceeds max_jump " + std::to_string(config.max_jump));
            ++counts[static_cast<std::size_t>(jump)];
        }
    }
    return TransitionEstimate::from_counts(std::move(counts));
}

Distribution default_jump_law() { return Distribution({0.3919, 0.5953, 0.0128, 0.0}); }

std::vector<OdometerRow> synthesize_odometer_data(const Distribution& jump_law,
                                                  const ZurcherConfig& config,
                                                  const SyntheticFleet& fleet) {
    config.validate();
    if (jump_law.size() > config.max_jump + 1)
        throw InvalidArgument("jump law has jumps beyond max_jump");
    // readings at the last bin would hide truncated jumps from the estimator
    if (fleet.replace_bin + config.max_jump >= config.n_states)
        throw InvalidArgument("replace_bin + max_jump must stay below n_states");
    std::vector<OdometerRow> rows;
    rows.reserve(fleet.n_buses * fleet.n_readings);
    for (std::size_t b = 0; b < fleet.n_buses; ++b) {
        Rng rng(derive_seed(fleet.seed, {b}));
        std::size_t bin = 0;
        for (std::size_t t = 0; t < fleet.n_readings; ++t) {
            const double offset = 0.999 * (rng.uniform() - 0.5) + 0.5;
            const bool replace = bin >= fleet.replace_bin;
            rows.push_back({"bus" + std::to_string(b + 1), static_cast<long>(t + 1),
                            (static_cast<double>(bin) + offset) * config.bin_width, replace});
            const std::size_t base = replace ? 0 : bin;
            bin = std::min(base + rng.categorical(jump_law.probs()), config.n_states - 1);
        }
    }
    return rows;
}

std::vector<TransitionSet> continuation_sets(const ZurcherConfig& config,
                                             const Distribution& jump_probs) {
    config.validate();
    if (jump_probs.size() > config.max_jump + 1)
        throw InvalidArgument("jump law has jumps beyond max_jump");
    std::vector<TransitionSet> sets;
    sets.reserve(config.n_states);
    for (std::size_t x = 0; x < config.n_states; ++x) {
        std::map<std::size_t, double> mass;
        for (std::size_t j = 0; j < jump_probs.size(); ++j)
            if (jump_probs[j] > 0.0) mass[std::min(x + j, config.n_states - 1)] += jump_probs[j];
        std::vector<std::size_t> targets;
        std::vector<double> weights;
        for (auto [target, w] : mass) {
            targets.push_back(target);
            weights.push_back(w);
        }
        sets.push_back({std::move(targets),
                        AmbiguitySet::calibrated(Distribution::normalized(std::move(weights)),
                                                 config.pooled_n_obs, config.confidence)});
    }
    return sets;
}

MdpSpec to_mdp(const ZurcherConfig& config, const Distribution& jump_probs) {
    auto sets = continuation_sets(config, jump_probs);
    MdpSpec spec;
    spec.n_states = config.n_states;
    spec.n_actions = 2;
    spec.discount = config.discount;
    for (std::size_t x = 0; x < config.n_states; ++x) {
        spec.utility.push_back(config.utility(x, kMaintain));
        spec.utility.push_back(config.utility(x, kReplace));
        spec.transitions.push_back(sets[x]);
        spec.transitions.push_back(sets[0]);
    }
    return spec;
}

LogitUpdate robust_logsumexp_apply(const ZurcherConfig& config,
                                   std::span<const TransitionSet> sets,
                                   std::span<const double> v) {
    if (v.size() != config.n_states || sets.size() != config.n_states)
        throw InvalidArgument("value vector and sets must cover every mileage state");
    LogitUpdate out;
    out.values.resize(config.n_states);
    out.continuation.resize(config.n_states);
    out.worst_case.reserve(config.n_states);
    for (std::size_t x = 0; x < config.n_states; ++x) {
        auto wc = worst_case_expectation(sets[x].set, gather(v, sets[x].targets));
        out.continuation[x] = wc.value;
        out.worst_case.push_back(std::move(wc.minimizer));
    }
    const double replace =
        config.utility(0, kReplace) + config.discount * out.continuation[0];
    for (std::size_t x = 0; x < config.n_states; ++x) {
        const double maintain =
            config.utility(x, kMaintain) + config.discount * out.continuation[x];
        out.values[x] = log_sum_exp(maintain, replace);
    }
    return out;
}

EvSolution solve_ev(const ZurcherConfig& config, const TransitionEstimate& estimate,
                    const EvOptions& options) {
    return solve_ev(config, estimate.jump_probs, options);
}

EvSolution solve_ev(const ZurcherConfig& config, const Distribution& jump_probs,
                    const EvOptions& options) {
    if (!(options.kappa > 0.0)) throw InvalidArgument("kappa must be positive");
    EvSolution sol;
    sol.sets = continuation_sets(config, jump_probs);

    const double d = config.discount;
    const bool extrapolate = options.acceleration == Acceleration::span_extrapolation;
    std::vector<double> v = options.warm_start;
    if (v.empty()) v.assign(config.n_states, 0.0);
    if (v.size() != config.n_states) throw InvalidArgument("warm start has the wrong size");

    for (std::size_t it = 1;; ++it) {
        auto next = robust_logsumexp_apply(config, sol.sets, v);
        const auto [lo, hi] = change_bounds(next.values, v);
        const double shift = extrapolate ? d / (1.0 - d) * 0.5 * (lo + hi) : 0.0;
        sol.residual = std::max(std::abs(lo), std::abs(hi));
        sol.iterations = it;
        if (sol.residual <= options.kappa || it >= options.max_iter) {
            sol.converged = sol.residual <= options.kappa;
            sol.error_bound = extrapolate ? d / (1.0 - d) * 0.5 * (hi - lo)
                                          : d / (1.0 - d) * sol.residual;
            sol.ev.ev = std::move(next.values);
            for (double& x : sol.ev.ev) x += shift;
            break;
        }
        for (std::size_t x = 0; x < v.size(); ++x) v[x] = next.values[x] + shift;
    }
    auto at_fixed_point = robust_logsumexp_apply(config, sol.sets, sol.ev.ev);
    sol.continuation = std::move(at_fixed_point.continuation);
    sol.worst_case = std::move(at_fixed_point.worst_case);
    return sol;
}

ChoiceProbabilities choice_probabilities(const ZurcherConfig& config, const EvSolution& solution) {
    if (solution.continuation.size() != config.n_states)
        throw InvalidArgument("ev solution does not match the configuration");
    ChoiceProbabilities out;
    const double replace = config.utility(0, kReplace) + config.discount * solution.continuation[0];
    for (std::size_t x = 0; x < config.n_states; ++x) {
        const double maintain =
            config.utility(x, kMaintain) + config.discount * solution.continuation[x];
        const double diff = maintain - replace;
        out.value_diff.push_back(diff);
        out.maintain_prob.push_back(diff >= 0.0 ? 1.0 / (1.0 + std::exp(-diff))
                                                : std::exp(diff) / (1.0 + std::exp(diff)));
    }
    return out;
}

StochasticPolicy logit_policy(const ChoiceProbabilities& choice) {
    const std::size_t n = choice.value_diff.size();
    StochasticPolicy policy{n, 2, std::vector<double>(2 * n), std::vector<double>(n)};
    auto xlogx = [](double p) { return p > 0.0 ? p * std::log(p) : 0.0; };
    for (std::size_t x = 0; x < n; ++x) {
        const double diff = choice.value_diff[x];
        // 1 - P(maintain) from the index keeps precision when P is near one
        const double replace =
            diff >= 0.0 ? std::exp(-diff) / (1.0 + std::exp(-diff)) : 1.0 / (1.0 + std::exp(diff));
        const double maintain = choice.maintain_prob[x];
        policy.probs[2 * x + kMaintain] = maintain;
        policy.probs[2 * x + kReplace] = replace;
        policy.bonus[x] = -xlogx(maintain) - xlogx(replace);
    }
    return policy;
}

Distribution jump_distribution(std::size_t state, std::span<const std::size_t> targets,
                               const Distribution& law, std::size_t max_jump) {
    if (targets.size() != law.size()) throw InvalidArgument("law does not match targets");
    std::vector<double> probs(max_jump + 1, 0.0);
    for (std::size_t k = 0; k < targets.size(); ++k) {
        if (targets[k] < state || targets[k] - state > max_jump)
            throw InvalidArgument("target is not reachable in one month");
        probs[targets[k] - state] += law[k];
    }
    return Distribution::normalized(std::move(probs));
}

std::vector<WorstCaseJumpRow> worst_case_jump_table(const ZurcherConfig& config,
                                                    const TransitionEstimate& estimate,
                                                    std::span<const double> confidences,
                                                    std::span<const std::size_t> n_obs_variants,
                                                    std::size_t state, const EvOptions& options) {
    if (state >= config.n_states) throw InvalidArgument("representative state out of range");
    std::vector<WorstCaseJumpRow> rows;
    for (double omega : confidences) {
        if (!(omega >= 0.0) || !(omega < 1.0))
            throw InvalidArgument("worst-case table confidences must lie in [0, 1)");
        for (std::size_t n_obs : n_obs_variants) {
            ZurcherConfig cfg = config;
            cfg.confidence = omega;
            cfg.pooled_n_obs = n_obs;
            const auto sol = solve_ev(cfg, estimate, options);
            if (!sol.converged)
                throw NonConvergence("worst-case table solve did not converge", sol.residual,
                                     sol.iterations);
            rows.push_back({omega, n_obs,
                            jump_distribution(state, sol.sets[state].targets,
                                              sol.worst_case[state], config.max_jump)});
        }
    }
    return rows;
}

} // namespace rmdp::zurcher
