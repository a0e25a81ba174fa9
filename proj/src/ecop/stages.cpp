/*
 * Copyright 2026 The ecop Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "ecop/stages.hpp"

#include "ecop/calibration.hpp"
#include "ecop/cases.hpp"
#include "ecop/error.hpp"
#include "ecop/format.hpp"
#include "ecop/hash.hpp"
#include "ecop/json_io.hpp"
#include "ecop/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ecop
{

namespace fs = std::filesystem;

namespace
{

std::string created_at(const nlohmann::json& options)
{
    return field_or<std::string>(options, "created_at", default_created_at());
}

void write_text(const std::string& path, const std::string& text)
{
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(ErrorKind::runtime, "cannot write " + tmp.string());
        }
        out << text;
        if (!out.flush()) {
            fail(ErrorKind::runtime, "write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fail(ErrorKind::runtime, "cannot move output into place at " + path);
    }
}

std::size_t positive_count(const nlohmann::json& options, const std::string& key, std::size_t fallback)
{
    auto v = field_or<long long>(options, key, static_cast<long long>(fallback));
    if (v <= 0) {
        fail(ErrorKind::config, "'" + key + "' must be positive");
    }
    return static_cast<std::size_t>(v);
}

std::uint64_t seed_of(const nlohmann::json& options)
{
    auto v = field_or<long long>(options, "seed", 0);
    if (v < 0) {
        fail(ErrorKind::config, "seed must be non-negative");
    }
    return static_cast<std::uint64_t>(v);
}

/// Scenario with xi and tau replaced by a calibration estimate when one is given.
ScenarioConfig scenario_with_estimate(const nlohmann::json& options)
{
    ScenarioConfig scenario = load_scenario(field<std::string>(options, "scenario"));
    if (options.contains("estimate") && !options.at("estimate").is_null()) {
        auto artifact = load_artifact(field<std::string>(options, "estimate"), ArtifactKind::estimate);
        EstimateRecord est = estimate_from_payload(artifact.payload);
        scenario.policy.xi = est.policy.xi;
        scenario.policy.tau = est.policy.tau;
        if (est.policy.schedule.covers(scenario.horizon)) {
            scenario.policy.schedule = est.policy.schedule;
        }
        scenario.validate();
    }
    return scenario;
}

nlohmann::json series_digest(const CaseSeries& series)
{
    return {{"start", format_date(series.dates.front())},
            {"end", format_date(series.dates.back())},
            {"confirmed_sha256", sha256_hex(nlohmann::json(series.cumulative_confirmed).dump())}};
}

nlohmann::json point_json(const ParetoPoint& p, std::size_t index)
{
    return {{"index", index}, {"f1", p.f1}, {"f2", p.f2}, {"schedule", p.schedule}};
}

} // namespace

std::size_t pattern_weeks(double horizon)
{
    return static_cast<std::size_t>(std::ceil(horizon / 7.0 - 1e-12));
}

CostAnalysis analyze_costs(const FrontRecord& front, const CostParams& params, const std::vector<double>& grid)
{
    CostAnalysis a;
    a.params = params;
    a.units = unit_costs(params);
    const double horizon = front.horizon();
    a.optimum = cost_optimal(front.front, a.units, horizon);
    a.map = sweep_cost_per_infection(front.front, a.units.c1, grid, horizon);
    a.segmentation = segment_cops(a.map, front.front, pattern_weeks(horizon));
    return a;
}

nlohmann::json cost_analysis_json(const FrontRecord& front, const CostAnalysis& a)
{
    nlohmann::json optimal = point_json(a.optimum.point, a.optimum.index);
    optimal["total_cost"] = a.optimum.total_cost;
    nlohmann::json sweep = nlohmann::json::array();
    for (std::size_t k = 0; k < a.map.grid.size(); ++k) {
        sweep.push_back({{"cost_per_infection", a.map.grid[k]},
                         {"index", a.map.optimal_index[k]},
                         {"f1", a.map.optimal_f1[k]},
                         {"total_cost", a.map.optimal_total_cost[k]}});
    }
    nlohmann::json segment_of_c2 = nullptr;
    if (a.units.c2 >= a.map.grid.front() && a.units.c2 <= a.map.grid.back()) {
        segment_of_c2 = a.segmentation.find(a.units.c2);
    }
    return {{"schema_version", kSchemaVersion},
            {"provenance", front.front.provenance},
            {"c1", a.units.c1},
            {"c2", a.units.c2},
            {"horizon", front.horizon()},
            {"optimal", optimal},
            {"sweep", sweep},
            {"segments", a.segmentation.segments},
            {"segment_of_c2", segment_of_c2}};
}

std::string costmap_csv(const CostAnalysis& a)
{
    std::ostringstream out;
    out << "cost_per_infection,optimal_index,optimal_f1,total_cost,segment\n";
    std::size_t seg = 0;
    for (std::size_t k = 0; k < a.map.grid.size(); ++k) {
        while (seg + 1 < a.segmentation.segments.size() && k > a.segmentation.segments[seg].last_grid) {
            ++seg;
        }
        out << format_double(a.map.grid[k]) << ',' << a.map.optimal_index[k] << ','
            << format_double(a.map.optimal_f1[k]) << ',' << format_double(a.map.optimal_total_cost[k]) << ','
            << seg << '\n';
    }
    return out.str();
}

std::string trajectory_csv(const Trajectory& traj, double horizon)
{
    std::ostringstream out;
    out << "t,s,e,i,q,r,d,cumulative_confirmed,cumulative_incidence\n";
    const auto days = static_cast<long>(std::floor(horizon + 1e-9));
    for (long day = 0; day <= days; ++day) {
        std::size_t k = traj.index_at(static_cast<double>(day));
        const StateVector& x = traj.states[k];
        out << format_double(traj.times[k]) << ',' << format_double(x.s) << ',' << format_double(x.e) << ','
            << format_double(x.i) << ',' << format_double(x.q) << ',' << format_double(x.r) << ','
            << format_double(x.d) << ',' << format_double(traj.cumulative_confirmed[k]) << ','
            << format_double(traj.cumulative_incidence[k]) << '\n';
    }
    return out.str();
}

nlohmann::json run_simulate_stage(const nlohmann::json& options)
{
    ScenarioConfig scenario = load_scenario(field<std::string>(options, "scenario"));
    scenario.horizon = field_or<double>(options, "horizon", scenario.horizon);
    scenario.step = field_or<double>(options, "step", scenario.step);
    if (!(scenario.horizon > 0.0 && scenario.horizon <= kMaxSimulationHorizon)) {
        fail(ErrorKind::out_of_range, "horizon must lie in (0, " + format_double(kMaxSimulationHorizon) + "] days");
    }
    if (!(scenario.step >= kMinSimulationStep)) {
        fail(ErrorKind::out_of_range, "step must be at least " + format_double(kMinSimulationStep));
    }
    if (!scenario.policy.schedule.covers(scenario.horizon)) {
        // Extend with the last knot so longer horizons stay covered.
        auto knots = scenario.policy.schedule.knots();
        while (!MuSchedule(knots, scenario.policy.schedule.spacing()).covers(scenario.horizon)) {
            knots.push_back(knots.back());
        }
        scenario.policy.schedule = MuSchedule(knots, scenario.policy.schedule.spacing());
    }
    scenario.validate();
    Trajectory traj = simulate(StateVector::susceptible_only(scenario.population), scenario.disease, scenario.policy,
                               scenario.horizon, scenario.step);
    std::string csv = trajectory_csv(traj, scenario.horizon);
    nlohmann::json report = {{"stage", "simulate"},
                             {"final_confirmed", traj.final_confirmed()},
                             {"final_incidence", traj.final_incidence()},
                             {"warnings", nlohmann::json::array()}};
    if (options.contains("out") && !options.at("out").is_null()) {
        std::string out = field<std::string>(options, "out");
        write_text(out, csv);
        report["out"] = out;
    }
    else {
        report["csv"] = csv;
    }
    return report;
}

nlohmann::json run_calibrate_stage(const nlohmann::json& options)
{
    nlohmann::json warnings = nlohmann::json::array();
    ScenarioConfig scenario = load_scenario(field<std::string>(options, "scenario"));
    const std::string data_path = field<std::string>(options, "data");
    const std::string location = field_or<std::string>(options, "location", "South Korea");
    std::optional<Date> start;
    std::optional<Date> end;
    if (options.contains("start") && !options.at("start").is_null()) {
        start = parse_date(field<std::string>(options, "start"));
    }
    if (options.contains("end") && !options.at("end").is_null()) {
        end = parse_date(field<std::string>(options, "end"));
    }
    const int days = static_cast<int>(positive_count(options, "days", 336));
    LoadedCases loaded = load_case_series(data_path, location, start, end, days);
    for (const auto& w : loaded.warnings) {
        warnings.push_back(w);
    }

    const std::size_t restarts = positive_count(options, "restarts", 25);
    const std::size_t budget = positive_count(options, "budget", 100000);
    const std::size_t chain_length = positive_count(options, "chain_length", 1000000);
    const std::size_t thin = positive_count(options, "thin", 100);
    const std::size_t pinned = static_cast<std::size_t>(field_or<long long>(options, "pinned_knots", 2));
    const double xi_max = field_or<double>(options, "xi_max", 5.0);
    const double prior_sd = field_or<double>(options, "prior_sd", 0.05);
    const std::uint64_t seed = seed_of(options);

    nlohmann::json digest = series_digest(loaded.series);
    EstimationProblem problem = EstimationProblem::build(scenario.disease, scenario.population, loaded.series, xi_max,
                                                         scenario.knot_spacing, pinned, scenario.step);
    RestartResult fit = run_restarts(problem, restarts, budget, seed);
    const Estimate& best = fit.best();

    PosteriorOptions post;
    post.prior_sd = prior_sd;
    post.dram.thin = thin;
    double sigma = options.contains("sigma_obs") ? field<double>(options, "sigma_obs") : rms_residual(problem, best);
    if (!(sigma > 0.0)) {
        double peak = *std::max_element(problem.data.cumulative_confirmed.begin(),
                                        problem.data.cumulative_confirmed.end());
        sigma = 1e-9 * std::max(peak, 1.0);
    }
    post.sigma_obs = sigma;
    Chain chain = dram_sample(problem, best, chain_length, seed, post);

    EstimateRecord est;
    for (const auto& spec : problem.theta_spec) {
        est.names.push_back(spec.name);
    }
    est.theta = best.theta;
    est.loss = best.loss_value;
    for (const auto& run : fit.runs) {
        est.evaluations += run.evaluations_used;
        est.restart_losses.push_back(run.loss_value);
    }
    est.policy = problem.policy(best.theta);
    est.sigma_obs = sigma;

    nlohmann::json settings = {{"restarts", restarts},     {"budget", budget},     {"chain_length", chain_length},
                               {"thin", thin},             {"pinned_knots", pinned}, {"xi_max", xi_max},
                               {"prior_sd", prior_sd},     {"location", location}, {"sigma_obs", sigma}};
    const std::string hash = config_hash(
        {{"stage", "calibrate"}, {"scenario", scenario.to_json()}, {"data", digest}, {"settings", settings}});
    const std::string stamp = created_at(options);

    const std::string estimate_out = field<std::string>(options, "estimate_out");
    const std::string chain_out = field<std::string>(options, "chain_out");
    save_artifact({ArtifactKind::estimate, stamp, {hash, seed}, estimate_payload(est)}, estimate_out);
    save_artifact({ArtifactKind::chain, stamp, {hash, seed}, chain_payload({est.names, chain})}, chain_out);

    nlohmann::json theta = nlohmann::json::object();
    for (std::size_t k = 0; k < est.names.size(); ++k) {
        theta[est.names[k]] = est.theta[k];
    }
    return {{"stage", "calibrate"},
            {"estimate", estimate_out},
            {"chain", chain_out},
            {"theta", theta},
            {"loss", est.loss},
            {"sigma_obs", sigma},
            {"acceptance_rate", chain.acceptance_rate},
            {"config_hash", hash},
            {"warnings", warnings}};
}

nlohmann::json run_sensitivity_stage(const nlohmann::json& options)
{
    nlohmann::json warnings = nlohmann::json::array();
    ScenarioConfig scenario = scenario_with_estimate(options);
    SensitivitySpec spec = SensitivitySpec::defaults(scenario.disease, scenario.policy, scenario.horizon);
    spec.samples = positive_count(options, "samples", 1000);
    const std::string mu = field_or<std::string>(options, "mu", "fixed");
    if (mu == "fixed") {
        for (auto& r : spec.ranges) {
            if (r.name == "mu") {
                r.lower = r.upper = 0.0;
            }
        }
    }
    else if (mu != "sampled") {
        fail(ErrorKind::config, "'mu' must be fixed or sampled");
    }
    spec.validate();
    SensitivityResult result = run_sensitivity(spec, scenario.population, seed_of(options), scenario.step);
    for (const auto& n : result.notes) {
        warnings.push_back(n);
    }
    std::ostringstream csv;
    write_prcc_csv(csv, result);
    nlohmann::json report = {{"stage", "sensitivity"},
                             {"samples_used", result.samples_used},
                             {"samples_dropped", result.samples_dropped},
                             {"warnings", warnings}};
    if (options.contains("out") && !options.at("out").is_null()) {
        std::string out = field<std::string>(options, "out");
        write_text(out, csv.str());
        report["out"] = out;
    }
    else {
        report["csv"] = csv.str();
    }
    return report;
}

nlohmann::json run_optimize_stage(const nlohmann::json& options)
{
    nlohmann::json warnings = nlohmann::json::array();
    ScenarioConfig scenario = scenario_with_estimate(options);
    if (options.contains("objective_form")) {
        scenario.objective_form = objective_form_from(field<std::string>(options, "objective_form"));
    }
    const std::size_t runs = positive_count(options, "runs", 100);
    const std::size_t population = positive_count(options, "population", 100);
    const std::size_t generations = positive_count(options, "generations", 200);
    const std::uint64_t seed = seed_of(options);

    MooProblem problem = scenario.moo_problem();
    ParetoFront front = assemble_front(nsga2_runs(problem, runs, population, generations, seed));
    FrontRecord record{front, problem.describe(),
                       {{"runs", runs}, {"population", population}, {"generations", generations}}};
    const std::string out = field<std::string>(options, "out");
    save_artifact({ArtifactKind::front, created_at(options), {front.provenance, seed}, front_payload(record)}, out);

    nlohmann::json strategies = nlohmann::json::array();
    for (double fraction : {0.1, 0.01, 0.001, 0.0001, 0.00001}) {
        try {
            std::size_t k = select_by_f2_fraction(front, fraction, scenario.population);
            strategies.push_back({{"fraction", fraction}, {"index", k}, {"f1", front.points[k].f1}});
        }
        catch (const Error& e) {
            warnings.push_back(e.what());
        }
    }
    return {{"stage", "optimize"},
            {"out", out},
            {"points", front.size()},
            {"f1_min", front.empty() ? 0.0 : front.points.front().f1},
            {"f1_max", front.empty() ? 0.0 : front.points.back().f1},
            {"provenance", front.provenance},
            {"strategies", strategies},
            {"warnings", warnings}};
}

nlohmann::json run_cost_stage(const nlohmann::json& options)
{
    nlohmann::json warnings = nlohmann::json::array();
    PipelineArtifact artifact = load_artifact(field<std::string>(options, "front"), ArtifactKind::front);
    FrontRecord record = front_from_payload(artifact.payload);
    if (artifact.provenance.config_hash != record.front.provenance) {
        warnings.push_back("front payload provenance " + record.front.provenance +
                           " differs from the artifact header " + artifact.provenance.config_hash);
    }
    if (options.contains("scenario") && !options.at("scenario").is_null()) {
        ScenarioConfig scenario = scenario_with_estimate(options);
        if (auto w = provenance_warning(artifact, scenario.moo_problem().provenance())) {
            warnings.push_back(*w);
        }
    }
    CostsConfig costs = load_costs(field<std::string>(options, "costs"));
    CostAnalysis analysis = analyze_costs(record, costs.params, costs.grid.values());

    nlohmann::json report = cost_analysis_json(record, analysis);
    report.erase("sweep");
    report["stage"] = "cost";
    report["segment_count"] = analysis.segmentation.segments.size();
    if (options.contains("out") && !options.at("out").is_null()) {
        const std::string out = field<std::string>(options, "out");
        const std::string hash = config_hash({{"stage", "cost"},
                                              {"front", record.front.provenance},
                                              {"params", costs.params},
                                              {"grid", costs.grid.to_json()}});
        CostMapRecord cm{costs.params, analysis.units.c2, analysis.map, analysis.segmentation};
        save_artifact({ArtifactKind::costmap, created_at(options), {hash, artifact.provenance.seed},
                       costmap_payload(cm)},
                      out);
        report["out"] = out;
    }
    if (options.contains("csv") && !options.at("csv").is_null()) {
        const std::string csv = field<std::string>(options, "csv");
        write_text(csv, costmap_csv(analysis));
        report["csv"] = csv;
    }
    report["warnings"] = warnings;
    return report;
}

nlohmann::json run_pipeline_stage(const nlohmann::json& options)
{
    const fs::path config_path = field<std::string>(options, "config");
    const nlohmann::json config = read_json_file(config_path.string());
    const fs::path base = config_path.parent_path();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (base / p).string(); };

    const std::uint64_t seed = seed_of(options);
    std::string out_dir = field_or<std::string>(options, "out_dir", "");
    if (out_dir.empty()) {
        out_dir = resolve(field_or<std::string>(config, "out_dir", "pipeline_out"));
    }
    fs::create_directories(out_dir);
    auto out = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    const std::string scenario = resolve(field<std::string>(config, "scenario"));
    const std::string costs = resolve(field<std::string>(config, "costs"));
    const nlohmann::json data = field<nlohmann::json>(config, "data");
    const std::string stamp = created_at(options);

    nlohmann::json warnings = nlohmann::json::array();
    nlohmann::json stages = nlohmann::json::object();
    auto collect = [&](const char* name, nlohmann::json report) {
        for (const auto& w : report.at("warnings")) {
            warnings.push_back(std::string(name) + ": " + w.get<std::string>());
        }
        report.erase("csv");
        stages[name] = std::move(report);
    };

    nlohmann::json cal = field_or<nlohmann::json>(config, "calibration", nlohmann::json::object());
    cal["scenario"] = scenario;
    cal["data"] = resolve(field<std::string>(data, "path"));
    for (const char* key : {"location", "start", "end", "days"}) {
        if (data.contains(key)) {
            cal[key] = data.at(key);
        }
    }
    cal["seed"] = seed;
    cal["created_at"] = stamp;
    cal["estimate_out"] = out("estimate.json");
    cal["chain_out"] = out("chain.json");
    collect("calibrate", run_calibrate_stage(cal));

    nlohmann::json sens = field_or<nlohmann::json>(config, "sensitivity", nlohmann::json::object());
    sens["scenario"] = scenario;
    sens["estimate"] = out("estimate.json");
    sens["seed"] = seed;
    sens["out"] = out("prcc.csv");
    collect("sensitivity", run_sensitivity_stage(sens));

    nlohmann::json opt = field_or<nlohmann::json>(config, "optimization", nlohmann::json::object());
    opt["scenario"] = scenario;
    opt["estimate"] = out("estimate.json");
    opt["seed"] = seed;
    opt["created_at"] = stamp;
    opt["out"] = out("front.json");
    collect("optimize", run_optimize_stage(opt));

    nlohmann::json cost = {{"front", out("front.json")},
                           {"costs", costs},
                           {"scenario", scenario},
                           {"estimate", out("estimate.json")},
                           {"created_at", stamp},
                           {"out", out("costmap.json")},
                           {"csv", out("costmap.csv")}};
    collect("cost", run_cost_stage(cost));

    return {{"stage", "pipeline"}, {"out_dir", out_dir}, {"seed", seed}, {"stages", stages}, {"warnings", warnings}};
}

nlohmann::json run_stage(const std::string& name, const nlohmann::json& options)
{
    if (!options.is_object()) {
        fail(ErrorKind::format, "stage options must be a JSON object");
    }
    if (name == "simulate") {
        return run_simulate_stage(options);
    }
    if (name == "calibrate") {
        return run_calibrate_stage(options);
    }
    if (name == "sensitivity") {
        return run_sensitivity_stage(options);
    }
    if (name == "optimize") {
        return run_optimize_stage(options);
    }
    if (name == "cost") {
        return run_cost_stage(options);
    }
    if (name == "pipeline") {
        return run_pipeline_stage(options);
    }
    fail(ErrorKind::config, "unknown stage '" + name + "'");
}

} // namespace ecop
