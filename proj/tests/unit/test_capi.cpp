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
#include "test_support.hpp"

#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <cstring>
#include <string>

using ecop_test::TempDir;

namespace
{

std::string scenario_path()
{
    return ecop_test::source_path("configs/korea_scenario.json");
}

struct Fixture {
    TempDir dir{"capi"};
    std::string front_path = dir.file("front.json");

    Fixture()
    {
        nlohmann::json options = {{"scenario", scenario_path()},
                                  {"runs", 2},
                                  {"population", 20},
                                  {"generations", 10},
                                  {"seed", 4},
                                  {"out", front_path}};
        char* report = nullptr;
        REQUIRE(ecop_run_stage("optimize", options.dump().c_str(), &report) == ECOP_OK);
        ecop_string_free(report);
    }
};

const Fixture& fixture()
{
    static const Fixture f;
    return f;
}

ecop_cost_params korea()
{
    return {31902.0 * 51710000.0 / 365.0, 0.0426, 4613.0, 2000000.0, 0.0173};
}

int run_cli(const std::string& args)
{
    std::string cmd = std::string(ECOP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("version and error state")
{
    CHECK(std::strcmp(ecop_version(), "0.1.0") == 0);
    char* report = nullptr;
    CHECK(ecop_run_stage("nonsense", "{}", &report) == ECOP_CONFIG);
    CHECK(report == nullptr);
    CHECK(std::strlen(ecop_last_error()) > 0);
    CHECK(ecop_run_stage("simulate", "{bad", &report) == ECOP_CONFIG);
    CHECK(ecop_run_stage(nullptr, "{}", &report) == ECOP_INVALID_ARGUMENT);
    ecop_string_free(nullptr);
}

TEST_CASE("stage runner")
{
    TempDir dir("capi_sim");
    nlohmann::json options = {{"scenario", scenario_path()}, {"out", dir.file("traj.csv")}};
    char* report = nullptr;
    REQUIRE(ecop_run_stage("simulate", options.dump().c_str(), &report) == ECOP_OK);
    REQUIRE(report != nullptr);
    CHECK(std::strlen(ecop_last_error()) == 0);
    ecop_string_free(report);
    std::string csv = ecop_test::read_file(dir.file("traj.csv"));
    CHECK(csv.rfind("t,s,e,i,q,r,d,cumulative_confirmed,cumulative_incidence\n", 0) == 0);

    options["scenario"] = dir.file("missing.json");
    CHECK(ecop_run_stage("simulate", options.dump().c_str(), &report) == ECOP_NOT_FOUND);
}

TEST_CASE("front handle and cost optimum")
{
    ecop_front* front = nullptr;
    REQUIRE(ecop_front_load(fixture().front_path.c_str(), &front) == ECOP_OK);
    const size_t n = ecop_front_size(front);
    REQUIRE(n > 1);
    double f1 = 0.0;
    double f2 = 0.0;
    double last_f1 = -1.0;
    for (size_t i = 0; i < n; ++i) {
        REQUIRE(ecop_front_point(front, i, &f1, &f2) == ECOP_OK);
        CHECK(f1 > last_f1);
        last_f1 = f1;
    }
    CHECK(ecop_front_point(front, n, &f1, &f2) == ECOP_OUT_OF_RANGE);
    CHECK(std::strlen(ecop_front_provenance(front)) == 64);

    ecop_cost_params p = korea();
    ecop_cost_choice choice{};
    REQUIRE(ecop_cost_optimal(front, &p, &choice) == ECOP_OK);
    CHECK(choice.c2 == doctest::Approx(39213.0).epsilon(1e-12));
    CHECK(choice.c1 == doctest::Approx(p.gdp * p.gdp_max_reduction));
    CHECK(choice.index < n);
    CHECK(choice.total_cost == doctest::Approx(choice.c1 * choice.f1 * 336.0 + choice.c2 * choice.f2));

    char* json = nullptr;
    REQUIRE(ecop_cost_analysis_json(front, &p, R"({"min": 1000, "max": 100000, "n": 5})", &json) == ECOP_OK);
    auto j = nlohmann::json::parse(json);
    ecop_string_free(json);
    CHECK(j.at("sweep").size() == 5);
    CHECK(j.at("optimal").at("index") == choice.index);

    p.fatality = 3.0;
    CHECK(ecop_cost_optimal(front, &p, &choice) == ECOP_OUT_OF_RANGE);
    CHECK(ecop_cost_optimal(front, nullptr, &choice) == ECOP_INVALID_ARGUMENT);
    ecop_front_free(front);

    ecop_front* none = nullptr;
    CHECK(ecop_front_load("/nonexistent/front.json", &none) == ECOP_NOT_FOUND);
    CHECK(none == nullptr);
}

TEST_CASE("service handle")
{
    ecop_service* svc = nullptr;
    REQUIRE(ecop_service_create(fixture().front_path.c_str(), scenario_path().c_str(), &svc) == ECOP_OK);
    int status = 0;
    char* body = nullptr;
    REQUIRE(ecop_service_handle(svc, "GET", "/v1/front", nullptr, &status, &body) == ECOP_OK);
    CHECK(status == 200);
    ecop_string_free(body);
    REQUIRE(ecop_service_handle(svc, "POST", "/v1/cost-optimal", R"({"gdp": 1})", &status, &body) == ECOP_OK);
    CHECK(status == 400);
    ecop_string_free(body);
    ecop_service_stop(svc);
    ecop_service_free(svc);
}

TEST_CASE("command line exit codes")
{
    const auto& fx = fixture();
    CHECK(run_cli("--version") == 0);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("simulate --no-such-flag") == 2);
    CHECK(run_cli("cost --front " + fx.dir.file("missing.json") + " --costs " +
                  ecop_test::source_path("configs/korea_costs.json")) == 1);

    std::string csv = fx.dir.file("cli_traj.csv");
    CHECK(run_cli("simulate --scenario " + scenario_path() + " --out " + csv) == 0);
    CHECK(ecop_test::read_file(csv).find("cumulative_incidence") != std::string::npos);

    std::string bad = fx.dir.file("bad_scenario.json");
    ecop_test::write_file(bad, R"({"population": -5})");
    CHECK(run_cli("simulate --scenario " + bad) == 2);

    std::string costmap = fx.dir.file("costmap.json");
    CHECK(run_cli("cost --front " + fx.front_path + " --costs " + ecop_test::source_path("configs/korea_costs.json") +
                  " --out " + costmap) == 0);
    auto artifact = nlohmann::json::parse(ecop_test::read_file(costmap));
    CHECK(artifact.at("kind") == "costmap");
    CHECK(artifact.at("schema_version") == 1);
}
