#pragma once

#include "rmdp/mdp.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace testing_support {

inline rmdp::Distribution random_distribution(std::mt19937_64& gen, std::size_t size,
                                              double floor = 0.02) {
    std::uniform_real_distribution<double> unif(floor, 1.0);
    std::vector<double> w(size);
    for (auto& x : w) x = unif(gen);
    return rmdp::Distribution::normalized(std::move(w));
}

// Random MDP whose sets have 2-3 distinct targets (fewer on tiny state spaces) and radii drawn from
// [0, max_radius]; max_radius = 0 gives a plain MDP.
inline rmdp::MdpSpec random_mdp(std::uint64_t seed, std::size_t n_states, std::size_t n_actions,
                                double discount, double max_radius) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    rmdp::MdpSpec m;
    m.n_states = n_states;
    m.n_actions = n_actions;
    m.discount = discount;
    for (std::size_t i = 0; i < n_states * n_actions; ++i) {
        m.utility.push_back(unif(gen) * 10.0 - 5.0);
        const std::size_t support = std::min<std::size_t>(2 + gen() % 2, n_states);
        std::vector<std::size_t> targets;
        while (targets.size() < support) {
            const std::size_t t = gen() % n_states;
            if (std::find(targets.begin(), targets.end(), t) == targets.end())
                targets.push_back(t);
        }
        const double radius = max_radius * unif(gen);
        m.transitions.push_back(
            {targets, rmdp::AmbiguitySet::with_radius(random_distribution(gen, support), radius)});
    }
    return m;
}

}  // namespace testing_support
