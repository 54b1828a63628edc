// rmdp: batch front end for the urn example, the bus engine model, and the
// robustness experiments. Every command writes CSV tables and a summary.json
// into --out.

#include "settings.hpp"

#include "rmdp/criteria.hpp"
#include "rmdp/csv.hpp"
#include "rmdp/errors.hpp"
#include "rmdp/experiments.hpp"
#include "rmdp/mdp_json.hpp"
#include "rmdp/savgol.hpp"
#include "rmdp/urn.hpp"
#include "rmdp/zurcher.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using rmdp::csv::format_number;

namespace rmdp::cli {
namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kDataError = 3, kNonConvergence = 4 };

struct RunConfig {
    std::string command;
    std::string preset = "desk";
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::vector<std::string> overrides;
    std::string data_path;
};

class Output {
public:
    explicit Output(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_))
            throw InvalidArgument("cannot create output directory " + dir_.string());
    }

    std::ofstream open(const std::string& name) const {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw InvalidArgument("cannot write " + (dir_ / name).string());
        return out;
    }

    void json_file(const std::string& name, const json& doc) const {
        auto out = open(name);
        out << doc.dump(2) << '\n';
    }

private:
    fs::path dir_;
};

// nlohmann writes NaN as null, which is what we want for missing crossings.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json distribution_json(const Distribution& d) {
    return json(std::vector<double>(d.probs().begin(), d.probs().end()));
}

zurcher::ZurcherConfig zurcher_config(experiments::Preset preset, Settings& s) {
    auto c = experiments::zurcher_preset(preset);
    c.n_states = s.count("n_states", c.n_states);
    c.bin_width = s.number("bin_width", c.bin_width);
    c.replacement_cost = s.number("replacement_cost", c.replacement_cost);
    c.maintenance_slope = s.number("maintenance_slope", c.maintenance_slope);
    c.discount = s.number("discount", c.discount);
    c.max_jump = s.count("max_jump", c.max_jump);
    c.pooled_n_obs = s.count("pooled_n_obs", c.pooled_n_obs);
    c.validate();
    return c;
}

zurcher::EvOptions solver_options(Settings& s) {
    zurcher::EvOptions o;
    o.kappa = s.number("kappa", o.kappa);
    o.max_iter = s.count("max_iter", o.max_iter);
    return o;
}

struct EstimateSource {
    zurcher::TransitionEstimate estimate;
    std::string origin;
};

EstimateSource load_estimate(const RunConfig& run, const zurcher::ZurcherConfig& config,
                             Settings& s) {
    zurcher::SyntheticFleet fleet;
    fleet.n_buses = s.count("synthetic_buses", fleet.n_buses);
    fleet.n_readings = s.count("synthetic_readings", fleet.n_readings);
    fleet.replace_bin = s.count(
        "replace_bin", std::min(fleet.replace_bin, config.n_states - 1 - config.max_jump));
    fleet.seed = run.seed;
    if (!run.data_path.empty()) {
        std::ifstream in(run.data_path);
        if (!in) throw DataError("cannot read odometer file " + run.data_path);
        const auto rows = zurcher::read_odometer_csv(in);
        return {zurcher::ingest_odometer_data(rows, config), run.data_path};
    }
    const auto rows = zurcher::synthesize_odometer_data(zurcher::default_jump_law(), config, fleet);
    return {zurcher::ingest_odometer_data(rows, config), "synthetic"};
}

void write_estimate(const Output& out, const zurcher::TransitionEstimate& est) {
    auto f = out.open("mle.csv");
    csv::write_row(f, {"jump", "count", "probability"});
    for (std::size_t j = 0; j < est.counts.size(); ++j)
        csv::write_row(f, {std::to_string(j), std::to_string(est.counts[j]),
                           format_number(est.jump_probs[j])});
}

json estimate_json(const EstimateSource& src) {
    return {{"source", src.origin},
            {"n_obs", src.estimate.n_obs},
            {"jump_probs", distribution_json(src.estimate.jump_probs)}};
}

json selection_json(const PerformanceSurface& surface, const Selection& maximin,
                    const Selection& regret, const Selection& bayes) {
    return {{"maximin", maximin.candidate},
            {"minimax_regret", regret.candidate},
            {"bayes", bayes.candidate},
            {"maximin_value", maximin.criterion[maximin.index]},
            {"max_regret", regret.criterion[regret.index]},
            {"bayes_value", bayes.criterion[bayes.index]},
            {"n_candidates", surface.candidates.size()},
            {"n_points", surface.points.size()}};
}

void write_criteria_csv(const Output& out, const std::string& name, const std::string& label,
                        const PerformanceSurface& surface, const Selection& maximin,
                        const Selection& regret, const Selection& bayes) {
    auto f = out.open(name);
    csv::write_row(f, {label, "min_score", "max_regret", "bayes_mean", "maximin_rank",
                       "regret_rank", "bayes_rank"});
    const std::size_t n = surface.candidates.size();
    auto rank = [&](const std::vector<double>& crit, std::size_t c, bool larger_better) {
        std::size_t r = 1;
        for (std::size_t k = 0; k < n; ++k)
            if (larger_better ? crit[k] > crit[c] : crit[k] < crit[c]) ++r;
        return std::to_string(r);
    };
    for (std::size_t c = 0; c < n; ++c)
        csv::write_row(f, {format_number(surface.candidates[c]), format_number(maximin.criterion[c]),
                           format_number(regret.criterion[c]), format_number(bayes.criterion[c]),
                           rank(maximin.criterion, c, true), rank(regret.criterion, c, false),
                           rank(bayes.criterion, c, true)});
}

// ------------------------------------------------------------------ urn

int cmd_urn(const RunConfig& run, experiments::Preset, Settings& s) {
    const std::size_t n = s.count("n_draws", 50);
    const auto lambdas = urn::unit_grid(s.number("lambda_step", 0.001));
    const auto thetas = urn::unit_grid(s.number("theta_step", 0.01));
    const auto prior = s.numbers("prior", {});
    s.reject_unused();

    const auto curves = urn::criterion_curves(n, lambdas, thetas, prior);
    const Output out(run.out_dir);
    {
        auto f = out.open("urn_payoffs.csv");
        csv::write_row(f, {"lambda", "theta", "expected_payoff", "closed_form"});
        for (std::size_t l = 0; l < lambdas.size(); ++l)
            for (std::size_t t = 0; t < thetas.size(); ++t)
                csv::write_row(f, {format_number(lambdas[l]), format_number(thetas[t]),
                                   format_number(curves.surface.score(l, t)),
                                   format_number(urn::expected_payoff_closed_form(
                                       {n, lambdas[l]}, thetas[t]))});
    }
    write_criteria_csv(out, "urn_criteria.csv", "lambda", curves.surface, curves.maximin,
                       curves.regret, curves.bayes);
    {
        auto f = out.open("urn_optima.csv");
        csv::write_row(f, {"criterion", "lambda", "value"});
        csv::write_row(f, {"maximin", format_number(curves.maximin.candidate),
                           format_number(curves.maximin.criterion[curves.maximin.index])});
        csv::write_row(f, {"minimax_regret", format_number(curves.regret.candidate),
                           format_number(curves.regret.criterion[curves.regret.index])});
        csv::write_row(f, {"bayes", format_number(curves.bayes.candidate),
                           format_number(curves.bayes.criterion[curves.bayes.index])});
    }
    const double root = std::sqrt(static_cast<double>(n));
    out.json_file("summary.json",
                  {{"command", "urn"},
                   {"n_draws", n},
                   {"selection", selection_json(curves.surface, curves.maximin, curves.regret,
                                                curves.bayes)},
                   {"analytic", {{"maximin", root / (1.0 + root)},
                                 {"bayes", static_cast<double>(n) / (n + 2.0)}}}});
    return kOk;
}

// ----------------------------------------------------------- synth-data

int cmd_synth(const RunConfig& run, experiments::Preset preset, Settings& s) {
    const auto config = zurcher_config(preset, s);
    zurcher::SyntheticFleet fleet;
    fleet.n_buses = s.count("synthetic_buses", fleet.n_buses);
    fleet.n_readings = s.count("synthetic_readings", fleet.n_readings);
    fleet.replace_bin = s.count(
        "replace_bin", std::min(fleet.replace_bin, config.n_states - 1 - config.max_jump));
    fleet.seed = run.seed;
    auto law = s.numbers("jump_law", {});
    s.reject_unused();

    const auto jump_law = law.empty() ? zurcher::default_jump_law() : Distribution(law);
    const auto rows = zurcher::synthesize_odometer_data(jump_law, config, fleet);
    const Output out(run.out_dir);
    auto f = out.open("odometer.csv");
    zurcher::write_odometer_csv(f, rows);
    out.json_file("summary.json", {{"command", "synth-data"},
                                   {"rows", rows.size()},
                                   {"jump_law", distribution_json(jump_law)}});
    return kOk;
}

// -------------------------------------------------------- zurcher-solve

int cmd_zurcher(const RunConfig& run, experiments::Preset preset, Settings& s) {
    const auto config = zurcher_config(preset, s);
    const auto options = solver_options(s);
    const auto omegas = s.numbers("omegas", {0.0, 0.5, 0.95});
    const auto n_obs_variants = s.counts("n_obs_variants", {config.pooled_n_obs, 27});
    const std::size_t state = s.count("state", 15);
    const auto source = load_estimate(run, config, s);
    s.reject_unused();

    const Output out(run.out_dir);
    write_estimate(out, source.estimate);

    json per_omega = json::array();
    auto ev_file = out.open("ev.csv");
    csv::write_row(ev_file, {"omega", "state", "mileage", "ev", "maintain_prob", "value_diff"});
    for (double w : omegas) {
        auto cfg = config;
        cfg.confidence = w;
        const auto sol = zurcher::solve_ev(cfg, source.estimate, options);
        if (!sol.converged)
            throw NonConvergence("ev solve did not converge at omega " + format_number(w),
                                 sol.residual, sol.iterations);
        const auto choice = zurcher::choice_probabilities(cfg, sol);
        for (std::size_t x = 0; x < cfg.n_states; ++x)
            csv::write_row(ev_file, {format_number(w), std::to_string(x),
                                     format_number(cfg.mileage(x)), format_number(sol.ev.ev[x]),
                                     format_number(choice.maintain_prob[x]),
                                     format_number(choice.value_diff[x])});
        per_omega.push_back({{"omega", w},
                             {"iterations", sol.iterations},
                             {"error_bound", sol.error_bound},
                             {"maintain_prob_at_state", number(state < cfg.n_states
                                                                   ? choice.maintain_prob[state]
                                                                   : NAN)}});
    }

    std::vector<double> table_omegas;
    for (double w : omegas)
        if (w < 1.0) table_omegas.push_back(w);
    const auto table = zurcher::worst_case_jump_table(config, source.estimate, table_omegas,
                                                      n_obs_variants, state, options);
    auto wc = out.open("worst_case.csv");
    csv::write_row(wc, {"omega", "n_obs", "jump", "probability"});
    json wc_json = json::array();
    for (const auto& row : table) {
        double heavy = 0.0;
        for (std::size_t j = 0; j < row.jump_probs.size(); ++j) {
            csv::write_row(wc, {format_number(row.confidence), std::to_string(row.n_obs),
                                std::to_string(j), format_number(row.jump_probs[j])});
            if (j >= 2) heavy += row.jump_probs[j];
        }
        wc_json.push_back({{"omega", row.confidence},
                           {"n_obs", row.n_obs},
                           {"mass_two_or_more", heavy}});
    }

    out.json_file("summary.json", {{"command", "zurcher-solve"},
                                   {"preset", run.preset},
                                   {"seed", run.seed},
                                   {"n_states", config.n_states},
                                   {"state", state},
                                   {"estimate", estimate_json(source)},
                                   {"solves", per_omega},
                                   {"worst_case", wc_json}});
    return kOk;
}

// --------------------------------------------------------------- expost

int cmd_expost(const RunConfig& run, experiments::Preset preset, Settings& s) {
    const auto config = zurcher_config(preset, s);
    auto mc = experiments::misspecification_preset(preset);
    mc.solver = solver_options(s);
    mc.rule_confidences = s.numbers("rule_omegas", mc.rule_confidences);
    mc.truth_confidences = s.numbers("truth_omegas", mc.truth_confidences);
    mc.representative_state = s.count("state", mc.representative_state);
    const auto mode = s.text("mode", mc.mode == experiments::EvaluationMode::exact ? "exact" : "simulate");
    if (mode != "exact" && mode != "simulate")
        throw InvalidArgument("mode must be exact or simulate");
    mc.mode = mode == "exact" ? experiments::EvaluationMode::exact
                              : experiments::EvaluationMode::simulate;
    mc.fleet.n_buses = s.count("n_buses", mc.fleet.n_buses);
    mc.fleet.n_months = s.count("n_months", mc.fleet.n_months);
    mc.fleet.path_stride = s.count("path_stride", mc.fleet.path_stride);
    mc.fleet.recorded_buses = s.count("recorded_buses", mc.fleet.recorded_buses);
    const std::size_t sg_window = s.count("savgol_window", 21);
    const std::size_t sg_order = s.count("savgol_order", 3);
    mc.fleet.seed = run.seed;
    mc.fleet.jobs = run.jobs;
    mc.jobs = run.jobs;
    const auto source = load_estimate(run, config, s);
    s.reject_unused();

    const auto curve = experiments::misspecification_curve(config, source.estimate, mc);
    const Output out(run.out_dir);
    write_estimate(out, source.estimate);
    {
        auto f = out.open("misspecification.csv");
        csv::write_row(f, {"rule_omega", "truth_omega", "performance", "difference", "std_error"});
        for (std::size_t r = 0; r < curve.rule_confidences.size(); ++r)
            for (std::size_t k = 0; k < curve.truth_confidences.size(); ++k)
                csv::write_row(f, {format_number(curve.rule_confidences[r]),
                                   format_number(curve.truth_confidences[k]),
                                   format_number(curve.performance[r][k]),
                                   format_number(curve.difference[r][k]),
                                   format_number(curve.std_error[r][k])});
    }
    {
        auto f = out.open("truth_laws.csv");
        csv::write_row(f, {"truth_omega", "jump", "probability"});
        for (std::size_t k = 0; k < curve.truth_laws.size(); ++k)
            for (std::size_t j = 0; j < curve.truth_laws[k].size(); ++j)
                csv::write_row(f, {format_number(curve.truth_confidences[k]), std::to_string(j),
                                   format_number(curve.truth_laws[k][j])});
    }

    // Fleet run of every rule when the estimate is the truth.
    std::vector<zurcher::ChoiceProbabilities> rules;
    for (double w : mc.rule_confidences) {
        auto cfg = config;
        cfg.confidence = w;
        const auto sol = zurcher::solve_ev(cfg, source.estimate, mc.solver);
        if (!sol.converged)
            throw NonConvergence("ev solve did not converge", sol.residual, sol.iterations);
        rules.push_back(zurcher::choice_probabilities(cfg, sol));
    }
    const auto fleet = experiments::simulate_fleet(config, rules, source.estimate.jump_probs, mc.fleet);
    {
        auto f = out.open("fleet_paths.csv");
        csv::write_row(f, {"rule_omega", "month", "mean_utility", "smoothed"});
        for (std::size_t r = 0; r < rules.size(); ++r) {
            const auto& path = fleet.mean_path[r];
            std::vector<double> smooth = path;
            if (path.size() >= sg_window) smooth = savitzky_golay_smooth(path, sg_window, sg_order);
            for (std::size_t k = 0; k < path.size(); ++k)
                csv::write_row(f, {format_number(mc.rule_confidences[r]),
                                   std::to_string(fleet.path_months[k]), format_number(path[k]),
                                   format_number(smooth[k])});
        }
    }
    {
        auto f = out.open("mileage_paths.csv");
        csv::write_row(f, {"rule_omega", "bus", "month", "state", "mileage"});
        for (std::size_t r = 0; r < rules.size(); ++r)
            for (std::size_t b = 0; b < fleet.trajectories[r].size(); ++b)
                for (std::size_t t = 0; t < fleet.trajectories[r][b].size(); ++t) {
                    const auto x = fleet.trajectories[r][b][t];
                    csv::write_row(f, {format_number(mc.rule_confidences[r]), std::to_string(b),
                                       std::to_string(t), std::to_string(x),
                                       format_number(config.mileage(x))});
                }
    }

    json rules_json = json::array();
    for (std::size_t r = 0; r < curve.rule_confidences.size(); ++r)
        rules_json.push_back({{"omega", curve.rule_confidences[r]},
                              {"crossing", number(curve.crossing[r])},
                              {"difference_at_first_truth", curve.difference[r].front()},
                              {"difference_at_last_truth", curve.difference[r].back()},
                              {"fleet_mean_total", fleet.mean_total[r]},
                              {"fleet_std_error", fleet.std_error[r]}});
    out.json_file("summary.json",
                  {{"command", "expost"},
                   {"preset", run.preset},
                   {"seed", run.seed},
                   {"mode", mode},
                   {"estimate", estimate_json(source)},
                   {"rules", rules_json}});
    return kOk;
}

// --------------------------------------------------------------- exante

int cmd_exante(const RunConfig& run, experiments::Preset preset, Settings& s) {
    auto config = zurcher_config(preset, s);
    auto ex = experiments::ex_ante_preset(preset);
    ex.dim = s.count("dim", ex.dim);
    if (!s.has("max_jump")) config.max_jump = ex.dim - 1;
    ex.increment = s.number("increment", ex.increment);
    ex.samples_per_point = s.count("samples", ex.samples_per_point);
    ex.draws_per_sample = s.count("draws", ex.draws_per_sample);
    ex.omega_grid = s.numbers("omegas", ex.omega_grid);
    const auto mode = s.text("mode", "exact");
    if (mode != "exact" && mode != "simulate")
        throw InvalidArgument("mode must be exact or simulate");
    ex.mode = mode == "exact" ? experiments::EvaluationMode::exact
                              : experiments::EvaluationMode::simulate;
    ex.fleet.n_buses = s.count("n_buses", ex.fleet.n_buses);
    ex.fleet.n_months = s.count("n_months", ex.fleet.n_months);
    ex.fleet.path_stride = ex.fleet.n_months;
    ex.solver = solver_options(s);
    ex.seed = run.seed;
    ex.jobs = run.jobs;
    s.reject_unused();

    const auto result = experiments::ex_ante_sweep(ex, config);
    const Output out(run.out_dir);
    {
        auto f = out.open("surface.csv");
        write_surface_csv(f, result.surface);
    }
    write_criteria_csv(out, "criteria.csv", "omega", result.surface, result.maximin,
                       result.regret, result.bayes);
    {
        auto f = out.open("cells.csv");
        csv::write_row(f, {"point_id", "sample", "estimate", "omega", "performance"});
        for (std::size_t p = 0; p < result.cell_performance.size(); ++p)
            for (std::size_t k = 0; k < result.cell_performance[p].size(); ++k) {
                std::string est;
                for (std::size_t j = 0; j < result.estimates[p][k].size(); ++j)
                    est += (j ? "/" : "") + format_number(result.estimates[p][k][j]);
                for (std::size_t w = 0; w < ex.omega_grid.size(); ++w)
                    csv::write_row(f, {result.surface.points[p], std::to_string(k), est,
                                       format_number(ex.omega_grid[w]),
                                       format_number(result.cell_performance[p][k][w])});
            }
    }
    {
        auto f = out.open("errors.csv");
        csv::write_row(f, {"point", "sample", "omega", "message"});
        for (const auto& e : result.failures)
            csv::write_row(f, {std::to_string(e.point), std::to_string(e.sample),
                               format_number(e.omega), e.message});
    }
    out.json_file("summary.json",
                  {{"command", "exante"},
                   {"preset", run.preset},
                   {"seed", run.seed},
                   {"mode", mode},
                   {"grid_points", result.grid.points.size()},
                   {"samples_per_point", ex.samples_per_point},
                   {"failed_cells", result.failures.size()},
                   {"selection", selection_json(result.surface, result.maximin, result.regret,
                                                result.bayes)}});
    return result.failures.empty() ? kOk : kNonConvergence;
}

// ------------------------------------------------------------- criteria

int cmd_criteria(const RunConfig& run, experiments::Preset, Settings& s) {
    const auto prior = s.numbers("prior", {});
    s.reject_unused();
    if (run.data_path.empty()) throw InvalidArgument("criteria needs --data <surface.csv>");
    std::ifstream in(run.data_path);
    if (!in) throw DataError("cannot read surface file " + run.data_path);
    const auto surface = read_surface_csv(in);
    const auto weights = prior.empty() ? uniform_prior(surface.points.size()) : prior;
    const auto maximin = maximin_select(surface);
    const auto regret = minimax_regret_select(surface);
    const auto bayes = bayes_select(surface, weights);
    const Output out(run.out_dir);
    write_criteria_csv(out, "criteria.csv", "candidate", surface, maximin, regret, bayes);
    out.json_file("summary.json", {{"command", "criteria"},
                                   {"selection", selection_json(surface, maximin, regret, bayes)}});
    return kOk;
}

// ------------------------------------------------------------ solve-mdp

int cmd_solve_mdp(const RunConfig& run, experiments::Preset, Settings& s) {
    SolverOptions options;
    options.kappa = s.number("kappa", options.kappa);
    options.max_iter = s.count("max_iter", options.max_iter);
    const auto accel = s.text("acceleration", "none");
    if (accel != "none" && accel != "span") throw InvalidArgument("acceleration must be none or span");
    options.acceleration = accel == "span" ? Acceleration::span_extrapolation : Acceleration::none;
    s.reject_unused();
    if (run.data_path.empty()) throw InvalidArgument("solve-mdp needs --data <mdp.json>");

    std::ifstream in(run.data_path);
    if (!in) throw DataError("cannot read mdp file " + run.data_path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("mdp file is not valid json: ") + e.what());
    }
    const auto spec = mdp_from_json(doc);
    const auto sol = robust_value_iteration(spec, options);
    if (!sol.converged)
        throw NonConvergence("robust value iteration did not converge", sol.residual,
                             sol.iterations);

    const Output out(run.out_dir);
    {
        auto f = out.open("values.csv");
        csv::write_row(f, {"state", "value", "action"});
        for (std::size_t st = 0; st < spec.n_states; ++st)
            csv::write_row(f, {std::to_string(st), format_number(sol.values[st]),
                               std::to_string(sol.policy[st])});
    }
    {
        auto f = out.open("worst_case.csv");
        csv::write_row(f, {"state", "action", "target", "probability"});
        for (std::size_t st = 0; st < spec.n_states; ++st)
            for (std::size_t a = 0; a < spec.n_actions; ++a) {
                const auto& t = spec.transition(st, a);
                const auto& q = sol.worst_case[st * spec.n_actions + a];
                for (std::size_t k = 0; k < t.targets.size(); ++k)
                    csv::write_row(f, {std::to_string(st), std::to_string(a),
                                       std::to_string(t.targets[k]), format_number(q[k])});
            }
    }
    out.json_file("summary.json", {{"command", "solve-mdp"},
                                   {"iterations", sol.iterations},
                                   {"residual", sol.residual},
                                   {"error_bound", sol.error_bound}});
    return kOk;
}

}  // namespace
}  // namespace rmdp::cli

int main(int argc, char** argv) {
    using namespace rmdp;
    using namespace rmdp::cli;

    CLI::App app{"Robust decision rules under KL ambiguity"};
    app.require_subcommand(1);
    RunConfig run;

    struct Command {
        const char* name;
        const char* help;
        int (*fn)(const RunConfig&, experiments::Preset, Settings&);
        bool needs_data;
    };
    const Command commands[] = {
        {"urn", "payoff curves and optimal shrinkage for the urn example", cmd_urn, false},
        {"synth-data", "write a synthetic odometer panel", cmd_synth, false},
        {"zurcher-solve", "estimate the jump law, solve EV and worst cases per omega", cmd_zurcher, true},
        {"expost", "misspecification curves and fleet simulation", cmd_expost, true},
        {"exante", "performance surface over a simplex of jump laws", cmd_exante, false},
        {"criteria", "re-run criterion selection on a surface csv", cmd_criteria, true},
        {"solve-mdp", "robust value iteration for an mdp json file", cmd_solve_mdp, true},
    };
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--preset", run.preset, "desk or paper")->capture_default_str();
        sub->add_option("--seed", run.seed, "root random seed")->capture_default_str();
        sub->add_option("--config", run.config_path, "key=value settings file");
        sub->add_option("--out", run.out_dir, "output directory")->capture_default_str();
        sub->add_option("--set", run.overrides, "override a setting, key=value")
            ->allow_extra_args(false);
        sub->add_option("--jobs", run.jobs, "worker threads")->capture_default_str()
            ->check(CLI::PositiveNumber);
        if (c.needs_data) sub->add_option("--data", run.data_path, "input file");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    const auto* chosen = app.get_subcommands().front();
    const auto it = std::find_if(std::begin(commands), std::end(commands),
                                 [&](const Command& c) { return chosen->get_name() == c.name; });
    run.command = it->name;

    const auto start = std::chrono::steady_clock::now();
    try {
        const auto preset = experiments::parse_preset(run.preset);
        Settings settings;
        if (!run.config_path.empty()) settings.load_file(run.config_path);
        for (const auto& kv : run.overrides) settings.assign(kv);
        const int code = it->fn(run, preset, settings);
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        std::cerr << run.command << ": done in " << took.count() << " s\n";
        return code;
    } catch (const NonConvergence& e) {
        std::cerr << run.command << ": " << e.what() << '\n';
        return kNonConvergence;
    } catch (const DataError& e) {
        std::cerr << run.command << ": data error: " << e.what() << '\n';
        return kDataError;
    } catch (const InvalidArgument& e) {
        std::cerr << run.command << ": config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const EmptyGrid& e) {
        std::cerr << run.command << ": config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DegenerateSet& e) {
        std::cerr << run.command << ": config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << run.command << ": " << e.what() << '\n';
        return kFailure;
    }
}
