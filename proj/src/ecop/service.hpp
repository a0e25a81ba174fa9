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
#ifndef ECOP_SERVICE_HPP
#define ECOP_SERVICE_HPP

#include "ecop/artifact.hpp"
#include "ecop/config.hpp"
#include "ecop/error.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace ecop
{

struct HttpReply {
    int status = 200;
    std::string body;
};

/// 400 for malformed input, 422 for invalid values, 404 for missing resources.
int http_status(ErrorKind kind) noexcept;

/**
 * Request handlers over an immutable front and scenario. Handlers are const
 * and safe to call concurrently.
 */
class CostService
{
public:
    CostService(FrontRecord front, ScenarioConfig scenario);

    /// Loads a front artifact and a scenario file.
    static CostService from_files(const std::string& front_path, const std::string& scenario_path);

    HttpReply get_front() const;
    /// Body: {gdp, gdp_max_reduction, hospitalization_cost, vsl, fatality, grid?: {min, max, n}}.
    HttpReply post_cost_optimal(std::string_view body) const;
    /// Body: {disease_params?, policy_params?, horizon?, step?, population?}; absent parts come from the scenario.
    HttpReply post_simulate(std::string_view body) const;
    /// Routes by method and path; unknown paths give 404.
    HttpReply handle(std::string_view method, std::string_view path, std::string_view body) const;

    const FrontRecord& front() const noexcept
    {
        return front_;
    }
    const ScenarioConfig& scenario() const noexcept
    {
        return scenario_;
    }

private:
    FrontRecord front_;
    ScenarioConfig scenario_;
    std::string front_body_;
};

/// Host and port after applying ECOP_BIND ("host:port") when it is set.
std::pair<std::string, int> resolve_bind_address(std::string host, int port);

/// HTTP/1.1 front end for a CostService.
class HttpServer
{
public:
    explicit HttpServer(const CostService& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and returns the port; port 0 picks a free one.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace ecop

#endif
