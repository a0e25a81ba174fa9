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
#include "ecop/service.hpp"

#include "ecop/format.hpp"
#include "ecop/json_io.hpp"
#include "ecop/stages.hpp"

#include <httplib.h>

#include <cmath>
#include <cstdlib>

namespace ecop
{

namespace
{

const char* kind_name(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::config:
        return "config";
    case ErrorKind::not_found:
        return "not_found";
    case ErrorKind::out_of_range:
        return "out_of_range";
    case ErrorKind::degenerate:
        return "degenerate";
    case ErrorKind::format:
        return "format";
    case ErrorKind::provenance:
        return "provenance";
    case ErrorKind::runtime:
        return "runtime";
    }
    return "runtime";
}

HttpReply error_reply(int status, const char* kind, const std::string& message)
{
    nlohmann::json j = {{"schema_version", kSchemaVersion}, {"error", {{"kind", kind}, {"message", message}}}};
    return {status, j.dump()};
}

HttpReply error_reply(const Error& e)
{
    return error_reply(http_status(e.kind()), kind_name(e.kind()), e.what());
}

nlohmann::json parse_body(std::string_view body)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    }
    catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, std::string("request body is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        fail(ErrorKind::format, "request body must be a JSON object");
    }
    return j;
}

template <class F>
HttpReply guarded(F&& f)
{
    try {
        return f();
    }
    catch (const Error& e) {
        return error_reply(e);
    }
    catch (const nlohmann::json::exception& e) {
        return error_reply(400, "format", e.what());
    }
    catch (const std::exception& e) {
        return error_reply(500, "runtime", e.what());
    }
}

} // namespace

int http_status(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::format:
        return 400;
    case ErrorKind::not_found:
        return 404;
    case ErrorKind::config:
    case ErrorKind::out_of_range:
    case ErrorKind::degenerate:
        return 422;
    case ErrorKind::provenance:
        return 409;
    case ErrorKind::runtime:
        return 500;
    }
    return 500;
}

CostService::CostService(FrontRecord front, ScenarioConfig scenario)
    : front_(std::move(front))
    , scenario_(std::move(scenario))
{
    if (front_.front.empty()) {
        fail(ErrorKind::config, "the loaded front has no points");
    }
    (void)front_.horizon();
    nlohmann::json j = {{"schema_version", kSchemaVersion},
                        {"provenance", front_.front.provenance},
                        {"horizon", front_.horizon()},
                        {"points", front_.front.points}};
    front_body_ = j.dump();
}

CostService CostService::from_files(const std::string& front_path, const std::string& scenario_path)
{
    auto artifact = load_artifact(front_path, ArtifactKind::front);
    return CostService(front_from_payload(artifact.payload), load_scenario(scenario_path));
}

HttpReply CostService::get_front() const
{
    return {200, front_body_};
}

HttpReply CostService::post_cost_optimal(std::string_view body) const
{
    return guarded([&] {
        nlohmann::json j = parse_body(body);
        CostParams params = j.get<CostParams>();
        params.validate();
        GridSpec grid;
        if (j.contains("grid") && !j.at("grid").is_null()) {
            grid = GridSpec::from_json(field<nlohmann::json>(j, "grid"));
        }
        CostAnalysis analysis = analyze_costs(front_, params, grid.values());
        return HttpReply{200, cost_analysis_json(front_, analysis).dump()};
    });
}

HttpReply CostService::post_simulate(std::string_view body) const
{
    return guarded([&] {
        nlohmann::json j = parse_body(body);
        DiseaseParams disease = j.contains("disease_params") ? field<DiseaseParams>(j, "disease_params")
                                                             : scenario_.disease;
        const double horizon = field_or<double>(j, "horizon", scenario_.horizon);
        const double step = field_or<double>(j, "step", scenario_.step);
        const double population = field_or<double>(j, "population", scenario_.population);
        PolicyParams policy = scenario_.policy;
        if (j.contains("policy_params")) {
            const auto& p = field<nlohmann::json>(j, "policy_params");
            policy.xi = field<double>(p, "xi");
            policy.tau = field<double>(p, "tau");
            policy.schedule = p.contains("schedule") ? field<MuSchedule>(p, "schedule") : MuSchedule::covering(horizon);
        }
        if (!(horizon > 0.0 && horizon <= kMaxSimulationHorizon)) {
            fail(ErrorKind::out_of_range, "horizon must lie in (0, " + format_double(kMaxSimulationHorizon) + "]");
        }
        if (!(step >= kMinSimulationStep) || !std::isfinite(step)) {
            fail(ErrorKind::out_of_range, "step must be at least " + format_double(kMinSimulationStep));
        }
        if (!(population > 0.0) || !std::isfinite(population)) {
            fail(ErrorKind::out_of_range, "population must be positive");
        }
        if (!policy.schedule.covers(horizon)) {
            fail(ErrorKind::out_of_range, "schedule does not cover the horizon");
        }
        disease.validate();
        policy.validate();
        Trajectory traj = simulate(StateVector::susceptible_only(population), disease, policy, horizon, step);

        nlohmann::json out = {{"schema_version", kSchemaVersion}, {"provenance", front_.front.provenance}};
        std::vector<double> t, s, e, i, q, r, d, cc, ci;
        const auto days = static_cast<long>(std::floor(horizon + 1e-9));
        for (long day = 0; day <= days; ++day) {
            std::size_t k = traj.index_at(static_cast<double>(day));
            const StateVector& x = traj.states[k];
            t.push_back(traj.times[k]);
            s.push_back(x.s);
            e.push_back(x.e);
            i.push_back(x.i);
            q.push_back(x.q);
            r.push_back(x.r);
            d.push_back(x.d);
            cc.push_back(traj.cumulative_confirmed[k]);
            ci.push_back(traj.cumulative_incidence[k]);
        }
        out["t"] = t;
        out["s"] = s;
        out["e"] = e;
        out["i"] = i;
        out["q"] = q;
        out["r"] = r;
        out["d"] = d;
        out["cumulative_confirmed"] = cc;
        out["cumulative_incidence"] = ci;
        return HttpReply{200, out.dump()};
    });
}

HttpReply CostService::handle(std::string_view method, std::string_view path, std::string_view body) const
{
    if (path == "/v1/front") {
        return method == "GET" ? get_front() : error_reply(405, "config", "use GET");
    }
    if (path == "/v1/cost-optimal") {
        return method == "POST" ? post_cost_optimal(body) : error_reply(405, "config", "use POST");
    }
    if (path == "/v1/simulate") {
        return method == "POST" ? post_simulate(body) : error_reply(405, "config", "use POST");
    }
    return error_reply(404, "not_found", "no route for " + std::string(path));
}

std::pair<std::string, int> resolve_bind_address(std::string host, int port)
{
    const char* env = std::getenv("ECOP_BIND");
    if (env != nullptr && *env != '\0') {
        std::string value(env);
        auto colon = value.rfind(':');
        if (colon == std::string::npos) {
            host = value;
        }
        else {
            if (colon > 0) {
                host = value.substr(0, colon);
            }
            try {
                port = std::stoi(value.substr(colon + 1));
            }
            catch (const std::exception&) {
                fail(ErrorKind::config, "ECOP_BIND port is not a number: " + value);
            }
        }
    }
    if (port < 0 || port > 65535) {
        fail(ErrorKind::config, "port out of range: " + std::to_string(port));
    }
    return {host, port};
}

struct HttpServer::Impl {
    const CostService& service;
    httplib::Server server;

    explicit Impl(const CostService& s)
        : service(s)
    {
        auto reply = [this](const httplib::Request& req, httplib::Response& res) {
            HttpReply r = service.handle(req.method, req.path, req.body);
            res.status = r.status;
            res.set_header("Access-Control-Allow-Origin", "*");
            res.set_content(r.body, "application/json");
        };
        server.Get("/v1/front", reply);
        server.Post("/v1/cost-optimal", reply);
        server.Post("/v1/simulate", reply);
        server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", "*");
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });
        server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
            if (res.body.empty()) {
                HttpReply r = error_reply(res.status, res.status == 404 ? "not_found" : "config",
                                          "request to " + req.path + " failed");
                res.set_content(r.body, "application/json");
            }
        });
    }
};

HttpServer::HttpServer(const CostService& service)
    : impl_(std::make_unique<Impl>(service))
{
}

HttpServer::~HttpServer()
{
    stop();
}

int HttpServer::bind(const std::string& host, int port)
{
    if (port == 0) {
        int bound = impl_->server.bind_to_any_port(host);
        if (bound <= 0) {
            fail(ErrorKind::runtime, "cannot bind " + host + " to a free port");
        }
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) {
        fail(ErrorKind::runtime, "cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void HttpServer::listen()
{
    if (!impl_->server.listen_after_bind()) {
        fail(ErrorKind::runtime, "server stopped with an error");
    }
}

void HttpServer::stop()
{
    if (impl_) {
        impl_->server.stop();
    }
}

} // namespace ecop
