// Acceptance checks: one PASS/FAIL line per criterion, each including its
// runtime budget. Usage: acceptance <path-to-rmdp-cli> [--expect-fail N,...]
// [--only N,...]
// Exits 0 when the failing criteria are exactly the expected ones.

#include "rmdp/ambiguity.hpp"
#include "rmdp/errors.hpp"
#include "rmdp/experiments.hpp"
#include "rmdp/mdp_json.hpp"
#include "rmdp/savgol.hpp"
#include "rmdp/urn.hpp"
#include "rmdp/zurcher.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

using namespace rmdp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok;
    std::string detail;
};

std::string fmt(double x, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

Outcome urn_optima() {
    const auto curves = urn::criterion_curves(50, urn::unit_grid(0.001), urn::unit_grid(0.01));
    const double m = curves.maximin.candidate;
    const double b = curves.bayes.candidate;
    const bool ok = std::abs(m - std::sqrt(50.0) / (1 + std::sqrt(50.0))) <= 0.01 &&
                    std::abs(b - 50.0 / 52.0) <= 0.01;
    return {ok, "maximin " + fmt(m) + " (0.8761), bayes " + fmt(b) + " (0.9615)"};
}

Outcome urn_closed_form() {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j) {
            const urn::UrnSetup s{50, i / 99.0};
            const double theta = j / 99.0;
            worst = std::max(worst, std::abs(urn::expected_payoff(s, theta) -
                                             urn::expected_payoff_closed_form(s, theta)));
        }
    return {worst <= 1e-12, "max abs gap " + fmt(worst, 3) + " over 100x100 grid"};
}

Outcome worst_case_oracle() {
    std::mt19937_64 gen(31337);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst_gap = 0.0, worst_active = 0.0;
    std::size_t active = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + trial % 2;
        const auto p = testing_support::random_distribution(gen, n, 0.02);
        std::vector<double> v(n);
        for (auto& x : v) x = unif(gen);
        const double rho = unif(gen) * unif(gen);
        const auto wc = worst_case_expectation(AmbiguitySet::with_radius(p, rho), v);
        const std::vector<double> pv(p.probs().begin(), p.probs().end());
        worst_gap = std::max(worst_gap, std::abs(wc.value - oracle::grid_worst_case(pv, v, rho)));
        if (rho < breakpoint_radius(p, v)) {
            ++active;
            worst_active = std::max(worst_active, std::abs(kl_divergence(wc.minimizer, p) - rho));
        }
    }
    return {worst_gap <= 2e-3 && worst_active <= 1e-8,
            "max value gap " + fmt(worst_gap, 3) + ", max |KL - rho| " + fmt(worst_active, 3) +
                " on " + std::to_string(active) + " interior instances"};
}

Outcome calibration() {
    const double r = calibrate_radius(55, 4, 0.95);
    const double ref = oracle::chi2_quantile(3, 0.95) / 110.0;
    return {std::abs(r - ref) <= 1e-4 && std::abs(r - 0.07104) <= 1e-4,
            "radius " + fmt(r, 7) + ", quadrature oracle " + fmt(ref, 7)};
}

Outcome contraction() {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> unif(-50.0, 50.0);
    double worst_excess = -1e300;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const double discount = 0.5 + 0.49 * (unif(gen) + 50.0) / 100.0;
        const auto m = testing_support::random_mdp(seed, 2 + seed % 12, 1 + seed % 3, discount, 1.0);
        std::vector<double> w(m.n_states), w2(m.n_states);
        for (std::size_t i = 0; i < m.n_states; ++i) {
            w[i] = unif(gen);
            w2[i] = unif(gen);
        }
        const double lhs = sup_distance(robust_bellman_apply(m, w).values,
                                        robust_bellman_apply(m, w2).values);
        worst_excess = std::max(worst_excess, lhs - m.discount * sup_distance(w, w2));
    }
    return {worst_excess <= 1e-10, "max of |Tw - Tw'| - d|w - w'| is " + fmt(worst_excess, 3)};
}

Outcome omega_monotonicity() {
    auto c = experiments::zurcher_preset(experiments::Preset::desk);
    std::vector<double> prev_ev, prev_p;
    bool ok = true;
    double worst_ev = -1e300, worst_p = -1e300;
    for (double w : {0.0, 0.25, 0.5, 0.75, 0.95}) {
        c.confidence = w;
        const auto sol = zurcher::solve_ev(c, zurcher::default_jump_law());
        ok = ok && sol.converged;
        const auto p = zurcher::choice_probabilities(c, sol).maintain_prob;
        if (!prev_ev.empty())
            for (std::size_t x = 0; x < p.size(); ++x) {
                worst_ev = std::max(worst_ev, sol.ev.ev[x] - prev_ev[x]);
                worst_p = std::max(worst_p, prev_p[x] - p[x]);
            }
        prev_ev = sol.ev.ev;
        prev_p = p;
    }
    // values carry error bounds below 1e-6 at this scale
    ok = ok && worst_ev <= 1e-6 && worst_p <= 1e-9;
    return {ok, "largest value increase " + fmt(worst_ev, 3) +
                    ", largest maintenance decrease " + fmt(worst_p, 3)};
}

Outcome omega_zero_equivalence() {
    const double kappa = 1e-8;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const auto m = testing_support::random_mdp(seed, 10, 3, 0.95, 0.0);
        worst = std::max(worst, sup_distance(robust_value_iteration(m, {kappa}).values,
                                             oracle::classic_value_iteration(m, kappa)));
    }
    const auto z = zurcher::to_mdp(experiments::zurcher_preset(experiments::Preset::desk),
                                   zurcher::default_jump_law());
    const double zgap = sup_distance(robust_value_iteration(z, {kappa}).values,
                                     oracle::classic_value_iteration(z, kappa));
    return {worst <= 2 * kappa && zgap <= 2 * kappa,
            "random MDPs " + fmt(worst, 3) + ", desk bus model " + fmt(zgap, 3) +
                " (2 kappa = 2e-08)"};
}

zurcher::TransitionEstimate desk_estimate(const zurcher::ZurcherConfig& c) {
    const auto rows = zurcher::synthesize_odometer_data(
        zurcher::default_jump_law(), c, {37, 117, c.n_states - 1 - c.max_jump, 0});
    return zurcher::ingest_odometer_data(rows, c);
}

Outcome expost_shape() {
    const auto c = experiments::zurcher_preset(experiments::Preset::desk);
    const auto est = desk_estimate(c);
    const auto mc = experiments::misspecification_preset(experiments::Preset::desk);
    const auto curve = experiments::misspecification_curve(c, est, mc);
    const std::size_t last = curve.truth_confidences.size() - 1;
    bool ok = curve.truth_confidences.front() == 0.0 && curve.truth_confidences[last] == 0.95;
    double robust_at_zero = -1e300;
    for (std::size_t r = 1; r < curve.rule_confidences.size(); ++r)
        robust_at_zero = std::max(robust_at_zero, curve.difference[r][0]);
    ok = ok && robust_at_zero <= 0.0 && curve.difference[1][last] > 0.0;

    // exact values against a simulated fleet of the same horizon
    std::vector<zurcher::ChoiceProbabilities> rules;
    for (double w : curve.rule_confidences) {
        auto cfg = c;
        cfg.confidence = w;
        rules.push_back(zurcher::choice_probabilities(cfg, zurcher::solve_ev(cfg, est)));
    }
    auto fleet = mc.fleet;
    fleet.seed = 5;
    fleet.recorded_buses = 0;
    double worst_z = 0.0;
    for (std::size_t k : {std::size_t{0}, last / 2, last}) {
        const auto sim = experiments::simulate_fleet(c, rules, curve.truth_laws[k], fleet);
        for (std::size_t r = 0; r < rules.size(); ++r)
            worst_z = std::max(worst_z, std::abs(sim.mean_total[r] - curve.performance[r][k]) /
                                            sim.std_error[r]);
    }
    ok = ok && worst_z <= 3.0;
    return {ok, "robust minus as-if at omega'=0: " + fmt(robust_at_zero) +
                    " (<= 0), robust(0.5) at omega'=0.95: " + fmt(curve.difference[1][last]) +
                    " (> 0), crossings " + fmt(curve.crossing[1], 3) + " / " +
                    fmt(curve.crossing[2], 3) + ", exact vs simulated max " + fmt(worst_z, 3) +
                    " SE"};
}

Outcome exante_criteria() {
    auto ex = experiments::ex_ante_preset(experiments::Preset::desk);
    auto c = experiments::zurcher_preset(experiments::Preset::desk);
    c.max_jump = ex.dim - 1;
    const auto r = experiments::ex_ante_sweep(ex, c);
    const bool ok = r.maximin.candidate > 0.0 && r.bayes.candidate == 0.0 && r.failures.empty();
    return {ok, "maximin omega* " + fmt(r.maximin.candidate) + " (want > 0), bayes omega* " +
                    fmt(r.bayes.candidate) + " (want 0), regret omega* " +
                    fmt(r.regret.candidate)};
}

Outcome savgol_exactness() {
    double worst = 0.0;
    for (std::size_t order = 0; order <= 5; ++order)
        for (std::size_t window : {7, 11, 21, 31}) {
            if (window <= order) continue;
            std::vector<double> y(101);
            for (std::size_t i = 0; i < y.size(); ++i) {
                const double x = static_cast<double>(i) / 20.0 - 2.5;
                y[i] = 0.0;
                for (std::size_t k = 0; k <= order; ++k) y[i] += std::pow(-0.7, k) * std::pow(x, k);
            }
            const auto s = savitzky_golay_smooth(y, window, order);
            worst = std::max(worst, sup_distance(s, y));
        }
    return {worst <= 1e-9, "max deviation " + fmt(worst, 3)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Runs every CLI command twice and compares the output trees byte for byte.
Outcome cli_determinism(const std::string& cli) {
    const fs::path root = fs::temp_directory_path() / "rmdp_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    {
        std::ofstream mdp(root / "mdp.json");
        mdp << mdp_to_json(testing_support::random_mdp(4, 6, 2, 0.9, 0.2)).dump();
    }
    const std::vector<std::pair<std::string, std::string>> commands{
        {"urn", "urn --seed 3"},
        {"synth", "synth-data --seed 3"},
        {"zurcher", "zurcher-solve --seed 3"},
        {"expost", "expost --seed 3"},
        {"exante", "exante --seed 3"},
        {"criteria", "criteria --data " + (root / "a_exante" / "surface.csv").string()},
        {"mdp", "solve-mdp --data " + (root / "mdp.json").string()},
    };
    std::size_t files = 0;
    std::string problem;
    for (const auto& [name, args] : commands) {
        for (const char* run : {"a_", "b_"}) {
            const auto out = root / (run + name);
            const std::string cmd = "\"" + cli + "\" " + args + " --out \"" + out.string() +
                                    "\" 2>/dev/null";
            if (std::system(cmd.c_str()) != 0 && problem.empty()) problem = name + " exited non-zero";
        }
        for (const auto& entry : fs::directory_iterator(root / ("a_" + name))) {
            ++files;
            const auto twin = root / ("b_" + name) / entry.path().filename();
            if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin))
                if (problem.empty()) problem = name + "/" + entry.path().filename().string() + " differs";
        }
    }
    return {problem.empty(), problem.empty() ? std::to_string(commands.size()) + " commands, " +
                                                   std::to_string(files) + " files identical"
                                             : problem};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <rmdp-cli> [--expect-fail N,...] [--only N,...]\n";
        return 2;
    }
    const std::string cli = argv[1];
    std::set<int> expected, only;
    auto parse_list = [](const char* text, std::set<int>& into) {
        std::stringstream ss(text);
        for (std::string item; std::getline(ss, item, ',');) into.insert(std::stoi(item));
    };
    for (int i = 2; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--expect-fail") parse_list(argv[i + 1], expected);
        if (std::string(argv[i]) == "--only") parse_list(argv[i + 1], only);
    }

    const std::vector<Criterion> criteria{
        {1, "urn optima", 1.0, urn_optima},
        {2, "urn closed form", 1.0, urn_closed_form},
        {3, "worst-case oracle equivalence", 30.0, worst_case_oracle},
        {4, "radius calibration", 1.0, calibration},
        {5, "contraction", 30.0, contraction},
        {6, "omega monotonicity", 60.0, omega_monotonicity},
        {7, "omega=0 equivalence", 60.0, omega_zero_equivalence},
        {8, "ex-post misspecification shape", 300.0, expost_shape},
        {9, "ex-ante criteria (desk)", 600.0, exante_criteria},
        {10, "Savitzky-Golay exactness", 1.0, savgol_exactness},
        {11, "CLI determinism", 600.0, [&] { return cli_determinism(cli); }},
    };

    std::set<int> failed;
    std::size_t ran = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        const bool in_time = took.count() < c.budget_s;
        const bool ok = o.ok && in_time;
        if (!ok) failed.insert(c.id);
        std::printf("criterion %2d %s  %-32s %s [%.2f s, budget %.0f s%s]\n", c.id,
                    ok ? "PASS" : "FAIL", c.name, o.detail.c_str(), took.count(), c.budget_s,
                    in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%zu of %zu criteria passed\n", ran - failed.size(), ran);
    if (!only.empty())
        std::erase_if(expected, [&](int id) { return !only.count(id); });
    if (!expected.empty()) {
        std::string list;
        for (int id : expected) list += (list.empty() ? "" : ",") + std::to_string(id);
        std::printf("known failures: %s (%s)\n", list.c_str(),
                    failed == expected ? "as expected" : "MISMATCH");
    }
    return failed == expected ? 0 : 1;
}
