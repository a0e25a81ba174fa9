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
#include "ecop/ecop.h"

#include "ecop/artifact.hpp"
#include "ecop/service.hpp"
#include "ecop/stages.hpp"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

struct ecop_front {
    ecop::FrontRecord record;
};

struct ecop_service {
    ecop::CostService service;
    std::unique_ptr<ecop::HttpServer> server;
};

namespace
{

thread_local std::string last_error;

ecop_status status_of(ecop::ErrorKind kind) noexcept
{
    switch (kind) {
    case ecop::ErrorKind::config:
        return ECOP_CONFIG;
    case ecop::ErrorKind::not_found:
        return ECOP_NOT_FOUND;
    case ecop::ErrorKind::out_of_range:
        return ECOP_OUT_OF_RANGE;
    case ecop::ErrorKind::degenerate:
        return ECOP_DEGENERATE;
    case ecop::ErrorKind::format:
        return ECOP_FORMAT;
    case ecop::ErrorKind::provenance:
        return ECOP_PROVENANCE;
    case ecop::ErrorKind::runtime:
        return ECOP_RUNTIME;
    }
    return ECOP_RUNTIME;
}

ecop_status set_error(ecop_status status, const char* message) noexcept
{
    try {
        last_error = message;
    }
    catch (...) {
        last_error.clear();
    }
    return status;
}

// Runs `f` and converts exceptions into status codes.
template <class F>
ecop_status guard(F&& f) noexcept
{
    try {
        last_error.clear();
        f();
        return ECOP_OK;
    }
    catch (const ecop::Error& e) {
        return set_error(status_of(e.kind()), e.what());
    }
    catch (const nlohmann::json::exception& e) {
        return set_error(ECOP_FORMAT, e.what());
    }
    catch (const std::bad_alloc&) {
        return set_error(ECOP_RUNTIME, "out of memory");
    }
    catch (const std::exception& e) {
        return set_error(ECOP_RUNTIME, e.what());
    }
    catch (...) {
        return set_error(ECOP_RUNTIME, "unknown failure");
    }
}

char* copy_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) {
        throw std::bad_alloc();
    }
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

ecop::CostParams to_params(const ecop_cost_params& p)
{
    ecop::CostParams params;
    params.gdp = p.gdp;
    params.gdp_max_reduction = p.gdp_max_reduction;
    params.hospitalization_cost = p.hospitalization_cost;
    params.vsl = p.vsl;
    params.fatality = p.fatality;
    params.validate();
    return params;
}

#define ECOP_REQUIRE(cond, what)                                                                                       \
    do {                                                                                                               \
        if (!(cond)) {                                                                                                 \
            return set_error(ECOP_INVALID_ARGUMENT, what);                                                             \
        }                                                                                                              \
    } while (0)

} // namespace

extern "C" {

const char* ecop_version(void)
{
    return "0.1.0";
}

const char* ecop_last_error(void)
{
    return last_error.c_str();
}

void ecop_string_free(char* text)
{
    std::free(text);
}

ecop_status ecop_run_stage(const char* stage, const char* options_json, char** report_json)
{
    ECOP_REQUIRE(stage != nullptr && options_json != nullptr && report_json != nullptr, "null argument");
    *report_json = nullptr;
    return guard([&] {
        nlohmann::json options;
        try {
            options = nlohmann::json::parse(options_json);
        }
        catch (const nlohmann::json::exception& e) {
            ecop::fail(ecop::ErrorKind::config, std::string("options are not valid JSON: ") + e.what());
        }
        nlohmann::json report = ecop::run_stage(stage, options);
        *report_json = copy_string(report.dump(2));
    });
}

ecop_status ecop_front_load(const char* path, ecop_front** out)
{
    ECOP_REQUIRE(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    return guard([&] {
        auto artifact = ecop::load_artifact(path, ecop::ArtifactKind::front);
        auto handle = std::make_unique<ecop_front>();
        handle->record = ecop::front_from_payload(artifact.payload);
        *out = handle.release();
    });
}

void ecop_front_free(ecop_front* front)
{
    delete front;
}

size_t ecop_front_size(const ecop_front* front)
{
    return front == nullptr ? 0 : front->record.front.size();
}

ecop_status ecop_front_point(const ecop_front* front, size_t index, double* f1, double* f2)
{
    ECOP_REQUIRE(front != nullptr && f1 != nullptr && f2 != nullptr, "null argument");
    if (index >= front->record.front.size()) {
        return set_error(ECOP_OUT_OF_RANGE, "front index out of range");
    }
    const auto& p = front->record.front.points[index];
    *f1 = p.f1;
    *f2 = p.f2;
    last_error.clear();
    return ECOP_OK;
}

const char* ecop_front_provenance(const ecop_front* front)
{
    return front == nullptr ? "" : front->record.front.provenance.c_str();
}

ecop_status ecop_cost_optimal(const ecop_front* front, const ecop_cost_params* params, ecop_cost_choice* out)
{
    ECOP_REQUIRE(front != nullptr && params != nullptr && out != nullptr, "null argument");
    return guard([&] {
        ecop::CostParams p = to_params(*params);
        ecop::UnitCosts units = ecop::unit_costs(p);
        ecop::CostOptimum best = ecop::cost_optimal(front->record.front, units, front->record.horizon());
        out->index = best.index;
        out->f1 = best.point.f1;
        out->f2 = best.point.f2;
        out->total_cost = best.total_cost;
        out->c1 = units.c1;
        out->c2 = units.c2;
    });
}

ecop_status ecop_cost_analysis_json(const ecop_front* front, const ecop_cost_params* params, const char* grid_json,
                                    char** out_json)
{
    ECOP_REQUIRE(front != nullptr && params != nullptr && out_json != nullptr, "null argument");
    *out_json = nullptr;
    return guard([&] {
        ecop::GridSpec grid;
        if (grid_json != nullptr) {
            grid = ecop::GridSpec::from_json(nlohmann::json::parse(grid_json));
        }
        auto analysis = ecop::analyze_costs(front->record, to_params(*params), grid.values());
        *out_json = copy_string(ecop::cost_analysis_json(front->record, analysis).dump());
    });
}

ecop_status ecop_service_create(const char* front_path, const char* scenario_path, ecop_service** out)
{
    ECOP_REQUIRE(front_path != nullptr && scenario_path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    return guard([&] {
        auto handle = std::unique_ptr<ecop_service>(
            new ecop_service{ecop::CostService::from_files(front_path, scenario_path), nullptr});
        *out = handle.release();
    });
}

void ecop_service_free(ecop_service* service)
{
    delete service;
}

ecop_status ecop_service_handle(const ecop_service* service, const char* method, const char* path, const char* body,
                                int* http_status, char** response_body)
{
    ECOP_REQUIRE(service != nullptr && method != nullptr && path != nullptr && http_status != nullptr
                     && response_body != nullptr,
                 "null argument");
    *response_body = nullptr;
    return guard([&] {
        ecop::HttpReply reply = service->service.handle(method, path, body == nullptr ? "" : body);
        *response_body = copy_string(reply.body);
        *http_status = reply.status;
    });
}

ecop_status ecop_service_bind(ecop_service* service, const char* host, int port, int* bound_port)
{
    ECOP_REQUIRE(service != nullptr && host != nullptr, "null argument");
    ECOP_REQUIRE(service->server == nullptr, "service is already bound");
    return guard([&] {
        auto [h, p] = ecop::resolve_bind_address(host, port);
        auto server = std::make_unique<ecop::HttpServer>(service->service);
        int actual = server->bind(h, p);
        service->server = std::move(server);
        if (bound_port != nullptr) {
            *bound_port = actual;
        }
    });
}

ecop_status ecop_service_listen(ecop_service* service)
{
    ECOP_REQUIRE(service != nullptr, "null argument");
    ECOP_REQUIRE(service->server != nullptr, "bind before listening");
    return guard([&] { service->server->listen(); });
}

void ecop_service_stop(ecop_service* service)
{
    if (service != nullptr && service->server != nullptr) {
        service->server->stop();
    }
}

} // extern "C"
