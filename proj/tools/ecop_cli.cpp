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

// Stage-oriented command line front end. Talks to the library only through
// the C API.

#include "ecop/ecop.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

int exit_code(ecop_status status)
{
    switch (status) {
    case ECOP_OK:
        return kExitOk;
    case ECOP_CONFIG:
    case ECOP_FORMAT:
    case ECOP_OUT_OF_RANGE:
    case ECOP_INVALID_ARGUMENT:
        return kExitConfig;
    default:
        return kExitRuntime;
    }
}

const char* status_name(ecop_status status)
{
    switch (status) {
    case ECOP_OK:
        return "ok";
    case ECOP_CONFIG:
        return "config error";
    case ECOP_NOT_FOUND:
        return "not found";
    case ECOP_OUT_OF_RANGE:
        return "out of range";
    case ECOP_DEGENERATE:
        return "degenerate input";
    case ECOP_FORMAT:
        return "format error";
    case ECOP_PROVENANCE:
        return "provenance mismatch";
    case ECOP_RUNTIME:
        return "runtime error";
    case ECOP_INVALID_ARGUMENT:
        return "invalid argument";
    }
    return "error";
}

int report_failure(ecop_status status)
{
    std::cerr << "ecop: " << status_name(status) << ": " << ecop_last_error() << '\n';
    return exit_code(status);
}

struct Owned {
    char* text = nullptr;
    ~Owned()
    {
        ecop_string_free(text);
    }
};

// Runs a stage, prints warnings to stderr and the report (or CSV) to stdout.
int run(const std::string& stage, const nlohmann::json& options, bool quiet)
{
    Owned report;
    ecop_status status = ecop_run_stage(stage.c_str(), options.dump().c_str(), &report.text);
    if (status != ECOP_OK) {
        return report_failure(status);
    }
    nlohmann::json j = nlohmann::json::parse(report.text);
    for (const auto& w : j.value("warnings", nlohmann::json::array())) {
        std::cerr << "ecop: warning: " << w.get<std::string>() << '\n';
    }
    if (j.contains("csv")) {
        std::cout << j.at("csv").get<std::string>();
    }
    else if (!quiet) {
        std::cout << j.dump(2) << '\n';
    }
    return kExitOk;
}

template <class T>
void put(nlohmann::json& options, const char* key, const std::optional<T>& value)
{
    if (value) {
        options[key] = *value;
    }
}

int serve(const std::string& front, const std::string& scenario, const std::string& host, int port)
{
    ecop_service* raw = nullptr;
    ecop_status status = ecop_service_create(front.c_str(), scenario.c_str(), &raw);
    if (status != ECOP_OK) {
        return report_failure(status);
    }
    std::unique_ptr<ecop_service, void (*)(ecop_service*)> service(raw, ecop_service_free);

    // Signals are taken by a helper thread so stopping happens outside a handler.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    int bound = 0;
    status = ecop_service_bind(service.get(), host.c_str(), port, &bound);
    if (status != ECOP_OK) {
        return report_failure(status);
    }
    std::cerr << "ecop: serving on port " << bound << '\n';

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        ecop_service_stop(service.get());
    });
    status = ecop_service_listen(service.get());
    // Wake the waiter if listen returned for another reason.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return status == ECOP_OK ? kExitOk : report_failure(status);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Epidemic cost-optimal policy pipeline"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(ecop_version()));

    std::uint64_t seed = 0;
    std::optional<std::string> created_at;
    bool quiet = false;
    app.add_option("--seed", seed, "Seed for every random draw")->capture_default_str();
    app.add_option("--created-at", created_at, "Timestamp stamped into artifacts (ISO-8601)");
    app.add_flag("-q,--quiet", quiet, "Do not print the stage report");

    nlohmann::json options = nlohmann::json::object();
    std::string stage;

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate one scenario and write a daily trajectory CSV");
    std::string sim_scenario;
    std::optional<std::string> sim_out;
    std::optional<double> sim_horizon, sim_step;
    sim->add_option("--scenario", sim_scenario, "Scenario JSON")->required();
    sim->add_option("--out", sim_out, "Trajectory CSV path (stdout when absent)");
    sim->add_option("--horizon", sim_horizon, "Days to simulate");
    sim->add_option("--step", sim_step, "RK4 step in days");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "Fit the policy parameters to case data");
    std::string cal_scenario, cal_data, cal_estimate = "estimate.json", cal_chain = "chain.json";
    std::optional<std::string> cal_location, cal_start, cal_end;
    std::optional<long long> cal_days, cal_restarts, cal_budget, cal_chain_length, cal_thin;
    std::optional<double> cal_sigma;
    cal->add_option("--scenario", cal_scenario, "Scenario JSON")->required();
    cal->add_option("--data", cal_data, "Case CSV")->required();
    cal->add_option("--location", cal_location, "Location name in the CSV");
    cal->add_option("--start", cal_start, "First day of the window (YYYY-MM-DD)");
    cal->add_option("--end", cal_end, "Last day of the window (YYYY-MM-DD)");
    cal->add_option("--days", cal_days, "Window length when --end is absent");
    cal->add_option("--restarts", cal_restarts, "Independent DE restarts");
    cal->add_option("--budget", cal_budget, "Loss evaluations per restart");
    cal->add_option("--chain-length", cal_chain_length, "DRAM iterations");
    cal->add_option("--thin", cal_thin, "Keep every n-th chain sample");
    cal->add_option("--sigma-obs", cal_sigma, "Observation noise (persons); estimated when absent");
    cal->add_option("--estimate-out", cal_estimate, "Estimate artifact path")->capture_default_str();
    cal->add_option("--chain-out", cal_chain, "Chain artifact path")->capture_default_str();

    // sensitivity
    auto* sens = app.add_subcommand("sensitivity", "PRCC sensitivity analysis; writes a tidy CSV");
    std::string sens_scenario;
    std::optional<std::string> sens_estimate, sens_out, sens_mu;
    std::optional<long long> sens_samples;
    sens->add_option("--scenario", sens_scenario, "Scenario JSON")->required();
    sens->add_option("--estimate", sens_estimate, "Estimate artifact to take policy parameters from");
    sens->add_option("--samples", sens_samples, "Latin hypercube samples");
    sens->add_option("--mu", sens_mu, "Treatment of mu: fixed or sampled")->check(CLI::IsMember({"fixed", "sampled"}));
    sens->add_option("--out", sens_out, "PRCC CSV path (stdout when absent)");

    // optimize
    auto* opt = app.add_subcommand("optimize", "Multi-objective optimization of mu schedules");
    std::string opt_scenario, opt_out = "front.json";
    std::optional<std::string> opt_estimate, opt_form;
    std::optional<long long> opt_runs, opt_population, opt_generations;
    opt->add_option("--scenario", opt_scenario, "Scenario JSON")->required();
    opt->add_option("--estimate", opt_estimate, "Estimate artifact to take policy parameters from");
    opt->add_option("--runs", opt_runs, "Independent NSGA-II runs");
    opt->add_option("--population", opt_population, "Population per run");
    opt->add_option("--generations", opt_generations, "Generations per run");
    opt->add_option("--objective-form", opt_form, "incidence (default) or literal")
        ->check(CLI::IsMember({"incidence", "literal"}));
    opt->add_option("--out", opt_out, "Front artifact path")->capture_default_str();

    // cost
    auto* cost = app.add_subcommand("cost", "Cost-optimal strategies over a front");
    std::string cost_front, cost_costs;
    std::optional<std::string> cost_scenario, cost_estimate, cost_out, cost_csv;
    cost->add_option("--front", cost_front, "Front artifact")->required();
    cost->add_option("--costs", cost_costs, "Costs JSON");
    cost->add_option("--scenario", cost_scenario, "Scenario JSON, checked against the front's provenance");
    cost->add_option("--estimate", cost_estimate, "Estimate artifact used with --scenario");
    cost->add_option("--out", cost_out, "Costmap artifact path");
    cost->add_option("--csv", cost_csv, "Tidy costmap CSV path");

    // serve
    auto* srv = app.add_subcommand("serve", "HTTP service for front retrieval, simulation and cost queries");
    std::string srv_front, srv_scenario, srv_host = "127.0.0.1";
    int srv_port = 8080;
    srv->add_option("--front", srv_front, "Front artifact")->required();
    srv->add_option("--scenario", srv_scenario, "Scenario JSON")->required();
    srv->add_option("--host", srv_host, "Bind host (ECOP_BIND=host:port overrides)")->capture_default_str();
    srv->add_option("--port", srv_port, "Bind port, 0 for any")->capture_default_str()->check(CLI::Range(0, 65535));

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "Run every stage from one config with one seed");
    std::string pipe_config;
    std::optional<std::string> pipe_out_dir;
    pipe->add_option("--config", pipe_config, "Pipeline JSON")->required();
    pipe->add_option("--out-dir", pipe_out_dir, "Output directory (config value when absent)");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::Success& e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    options["seed"] = seed;
    put(options, "created_at", created_at);

    if (sim->parsed()) {
        stage = "simulate";
        options["scenario"] = sim_scenario;
        put(options, "out", sim_out);
        put(options, "horizon", sim_horizon);
        put(options, "step", sim_step);
    }
    else if (cal->parsed()) {
        stage = "calibrate";
        options["scenario"] = cal_scenario;
        options["data"] = cal_data;
        put(options, "location", cal_location);
        put(options, "start", cal_start);
        put(options, "end", cal_end);
        put(options, "days", cal_days);
        put(options, "restarts", cal_restarts);
        put(options, "budget", cal_budget);
        put(options, "chain_length", cal_chain_length);
        put(options, "thin", cal_thin);
        put(options, "sigma_obs", cal_sigma);
        options["estimate_out"] = cal_estimate;
        options["chain_out"] = cal_chain;
    }
    else if (sens->parsed()) {
        stage = "sensitivity";
        options["scenario"] = sens_scenario;
        put(options, "estimate", sens_estimate);
        put(options, "samples", sens_samples);
        put(options, "mu", sens_mu);
        put(options, "out", sens_out);
    }
    else if (opt->parsed()) {
        stage = "optimize";
        options["scenario"] = opt_scenario;
        put(options, "estimate", opt_estimate);
        put(options, "runs", opt_runs);
        put(options, "population", opt_population);
        put(options, "generations", opt_generations);
        put(options, "objective_form", opt_form);
        options["out"] = opt_out;
    }
    else if (cost->parsed()) {
        stage = "cost";
        options["front"] = cost_front;
        if (!cost_costs.empty()) {
            options["costs"] = cost_costs;
        }
        put(options, "scenario", cost_scenario);
        put(options, "estimate", cost_estimate);
        put(options, "out", cost_out);
        put(options, "csv", cost_csv);
    }
    else if (srv->parsed()) {
        return serve(srv_front, srv_scenario, srv_host, srv_port);
    }
    else if (pipe->parsed()) {
        stage = "pipeline";
        options["config"] = pipe_config;
        put(options, "out_dir", pipe_out_dir);
    }
    return run(stage, options, quiet);
}
