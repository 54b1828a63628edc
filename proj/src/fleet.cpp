#include "rmdp/experiments.hpp"

#include "rmdp/errors.hpp"
#include "rmdp/parallel.hpp"
#include "rmdp/rng.hpp"

#include <cmath>

namespace rmdp::experiments {

using zurcher::kMaintain;
using zurcher::kReplace;

namespace {

struct BusOutcome {
    std::vector<double> path;  // cumulative discounted utility at recorded months
    double total = 0.0;
    std::vector<std::size_t> trajectory;
};

BusOutcome simulate_bus(const zurcher::ZurcherConfig& config,
                        const zurcher::ChoiceProbabilities& rule, const Distribution& law,
                        const FleetSimConfig& sim, std::size_t bus, bool record) {
    Rng rng(derive_seed(sim.seed, {bus}));
    BusOutcome out;
    out.path.reserve(sim.n_months / sim.path_stride + 1);
    if (record) out.trajectory.reserve(sim.n_months);
    std::size_t x = 0;
    double weight = 1.0;
    double total = 0.0;
    for (std::size_t t = 0; t < sim.n_months; ++t) {
        const double jump_draw = rng.uniform();
        const double shock_maintain = rng.gumbel();
        const double shock_replace = rng.gumbel();
        if (record) out.trajectory.push_back(x);

        const bool maintain = rule.value_diff[x] + shock_maintain >= shock_replace;
        const std::size_t action = maintain ? kMaintain : kReplace;
        total += weight * (config.utility(x, action) + (maintain ? shock_maintain : shock_replace));
        weight *= config.discount;

        const std::size_t base = maintain ? x : 0;
        x = std::min(base + Rng::categorical(law.probs(), jump_draw), config.n_states - 1);
        if ((t + 1) % sim.path_stride == 0 || t + 1 == sim.n_months) out.path.push_back(total);
    }
    out.total = total;
    return out;
}

} // namespace

FleetResult simulate_fleet(const zurcher::ZurcherConfig& config,
                           std::span<const zurcher::ChoiceProbabilities> rules,
                           const Distribution& true_jump_law, const FleetSimConfig& sim) {
    config.validate();
    if (sim.n_months == 0) throw InvalidArgument("fleet simulation horizon must be positive");
    if (sim.n_buses == 0) throw InvalidArgument("fleet simulation needs at least one bus");
    if (sim.path_stride == 0) throw InvalidArgument("path_stride must be positive");
    if (true_jump_law.size() > config.n_states)
        throw InvalidArgument("jump law is wider than the state space");
    for (const auto& rule : rules)
        if (rule.value_diff.size() != config.n_states)
            throw InvalidArgument("every decision rule must cover the state space");

    const std::size_t n_rules = rules.size();
    std::vector<std::vector<BusOutcome>> outcomes(n_rules, std::vector<BusOutcome>(sim.n_buses));
    parallel_for(sim.n_buses, sim.jobs, [&](std::size_t bus) {
        const bool record = bus < sim.recorded_buses;
        for (std::size_t c = 0; c < n_rules; ++c)
            outcomes[c][bus] = simulate_bus(config, rules[c], true_jump_law, sim, bus, record);
    });

    FleetResult result;
    for (std::size_t t = 0; t < sim.n_months; ++t)
        if ((t + 1) % sim.path_stride == 0 || t + 1 == sim.n_months) result.path_months.push_back(t);

    const double n = static_cast<double>(sim.n_buses);
    for (std::size_t c = 0; c < n_rules; ++c) {
        std::vector<double> mean(result.path_months.size(), 0.0);
        std::vector<double> totals;
        std::vector<std::vector<std::size_t>> trajectories;
        double sum = 0.0;
        for (std::size_t bus = 0; bus < sim.n_buses; ++bus) {
            auto& o = outcomes[c][bus];
            for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += o.path[k];
            sum += o.total;
            totals.push_back(o.total);
            if (bus < sim.recorded_buses) trajectories.push_back(std::move(o.trajectory));
        }
        for (double& m : mean) m /= n;
        const double avg = sum / n;
        double ss = 0.0;
        for (double v : totals) ss += (v - avg) * (v - avg);
        const double se = sim.n_buses > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;

        result.mean_path.push_back(std::move(mean));
        result.mean_total.push_back(avg);
        result.std_error.push_back(se);
        result.trajectories.push_back(std::move(trajectories));
        result.per_bus_total.push_back(std::move(totals));
    }
    return result;
}

} // namespace rmdp::experiments
