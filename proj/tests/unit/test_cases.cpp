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
#include "ecop/cases.hpp"
#include "ecop/config.hpp"
#include "ecop/error.hpp"
#include "test_support.hpp"

#include <random>

using namespace ecop;
using ecop_test::TempDir;
using ecop_test::write_file;

namespace
{

std::string csv(const std::string& body)
{
    return "date,location,cumulative_confirmed,cumulative_deaths\n" + body;
}

ScenarioConfig valid_scenario()
{
    ScenarioConfig s;
    s.policy.schedule = MuSchedule::covering(s.horizon);
    return s;
}

} // namespace

TEST_CASE("dates parse and format")
{
    CHECK(format_date(parse_date("2020-02-29")) == "2020-02-29");
    CHECK((parse_date("2020-03-01") - parse_date("2020-02-28")).count() == 2);
    CHECK_ERROR_KIND(parse_date("2020-02-30"), ErrorKind::format);
    CHECK_ERROR_KIND(parse_date("20200101"), ErrorKind::format);
}

TEST_CASE("three-row series passes through")
{
    TempDir dir("cases");
    write_file(dir.file("c.csv"), csv("2020-01-01,A,1,0\n2020-01-02,A,2,0\n2020-01-03,A,2,1\n2020-01-02,B,9,9\n"));
    auto loaded = load_case_series(dir.file("c.csv"), "A", parse_date("2020-01-01"), parse_date("2020-01-03"));
    CHECK(loaded.series.cumulative_confirmed == std::vector<double>{1, 2, 2});
    REQUIRE(loaded.series.cumulative_deaths.has_value());
    CHECK(*loaded.series.cumulative_deaths == std::vector<double>{0, 0, 1});
    CHECK(loaded.warnings.empty());
    CHECK(format_date(loaded.series.dates.front()) == "2020-01-01");
}

TEST_CASE("decreasing counts are repaired with a warning")
{
    TempDir dir("cases");
    write_file(dir.file("c.csv"), csv("2020-01-01,A,5,0\n2020-01-02,A,4,0\n2020-01-03,A,6,0\n"));
    auto loaded = load_case_series(dir.file("c.csv"), "A", parse_date("2020-01-01"), parse_date("2020-01-03"));
    CHECK(loaded.series.cumulative_confirmed == std::vector<double>{5, 5, 6});
    CHECK(loaded.warnings.size() == 1);
}

TEST_CASE("gaps are forward filled and the window opens at the first case")
{
    TempDir dir("cases");
    write_file(dir.file("c.csv"), csv("2020-01-01,A,0,0\n2020-01-03,A,3,0\n2020-01-06,A,7,1\n"));
    auto loaded = load_case_series(dir.file("c.csv"), "A", std::nullopt, std::nullopt, 3);
    CHECK(format_date(loaded.series.dates.front()) == "2020-01-03");
    CHECK(loaded.series.cumulative_confirmed == std::vector<double>{3, 3, 3, 7});
}

TEST_CASE("case loading errors")
{
    TempDir dir("cases");
    write_file(dir.file("c.csv"), csv("2020-01-01,A,1,0\n2020-01-02,A,2,0\n"));
    CHECK_ERROR_KIND(load_case_series(dir.file("missing.csv"), "A"), ErrorKind::not_found);
    CHECK_ERROR_KIND(load_case_series(dir.file("c.csv"), "Nowhere"), ErrorKind::not_found);
    CHECK_ERROR_KIND(load_case_series(dir.file("c.csv"), "A", parse_date("2020-01-02"), parse_date("2020-01-01")),
                     ErrorKind::config);
    CHECK_ERROR_KIND(load_case_series(dir.file("c.csv"), "A", parse_date("2021-01-01"), parse_date("2021-02-01")),
                     ErrorKind::config);
    write_file(dir.file("bad.csv"), "when,where\n2020-01-01,A\n");
    CHECK_ERROR_KIND(load_case_series(dir.file("bad.csv"), "A"), ErrorKind::format);
    write_file(dir.file("short.csv"), csv("2020-01-01,A\n"));
    CHECK_ERROR_KIND(load_case_series(dir.file("short.csv"), "A"), ErrorKind::format);
}

TEST_CASE("repair is idempotent on random series")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(30);
        for (double& x : v) {
            x = std::uniform_int_distribution<int>(0, 100)(rng);
        }
        CaseSeries s = CaseSeries::daily(parse_date("2020-01-01"), v);
        s.cumulative_deaths = v;
        repair_monotone(s);
        CaseSeries twice = s;
        CHECK(repair_monotone(twice).empty());
        CHECK(twice.cumulative_confirmed == s.cumulative_confirmed);
        CHECK(*twice.cumulative_deaths == *s.cumulative_deaths);
        for (std::size_t k = 1; k < v.size(); ++k) {
            CHECK(s.cumulative_confirmed[k] >= s.cumulative_confirmed[k - 1]);
            CHECK(s.cumulative_confirmed[k] >= v[k]);
        }
    }
}

TEST_CASE("shipped data file loads")
{
    auto loaded = load_case_series(ecop_test::source_path("data/cases.csv"), "South Korea",
                                   parse_date("2020-01-20"), std::nullopt, 336);
    CHECK(loaded.series.size() == 337);
    CHECK(loaded.warnings.empty());
}

TEST_CASE("shipped scenario and costs load")
{
    ScenarioConfig s = load_scenario(ecop_test::source_path("configs/korea_scenario.json"));
    CHECK(s.population == 51710000.0);
    CHECK(s.disease.r0 == 2.87);
    CHECK(s.policy.xi == 0.278);
    CHECK(s.policy.tau == 0.6218);
    CHECK(s.horizon == 336.0);
    CHECK(s.policy.schedule.covers(336.0));
    CHECK(ScenarioConfig::from_json(s.to_json()).to_json() == s.to_json());

    CostsConfig c = load_costs(ecop_test::source_path("configs/korea_costs.json"));
    CHECK(c.params.gdp == doctest::Approx(31902.0 * 51710000.0 / 365.0));
    CHECK(c.params.hospitalization_cost + c.params.fatality * c.params.vsl == 39213.0);
    CHECK(c.grid.n == 200);
}

TEST_CASE("config errors map to kinds")
{
    TempDir dir("config");
    CHECK_ERROR_KIND(load_scenario(dir.file("none.json")), ErrorKind::not_found);
    write_file(dir.file("broken.json"), "{");
    CHECK_ERROR_KIND(load_scenario(dir.file("broken.json")), ErrorKind::format);

    nlohmann::json s = valid_scenario().to_json();
    CHECK_NOTHROW(ScenarioConfig::from_json(s));
    s["population"] = -1;
    CHECK_ERROR_KIND(ScenarioConfig::from_json(s), ErrorKind::config);
    s = valid_scenario().to_json();
    s["population"] = 1000;
    s["horizon"] = 1000;
    CHECK_ERROR_KIND(ScenarioConfig::from_json(s), ErrorKind::config);

    nlohmann::json costs = {{"gdp", 1e8}, {"gdp_max_reduction", 0.04}, {"hospitalization_cost", 10.0},
                            {"vsl", 1e6}, {"fatality", 0.01}};
    CHECK(CostsConfig::from_json(costs).params.gdp == 1e8);
    auto both = costs;
    both["gdp_basis"] = {{"per_capita_usd", 1.0}, {"population", 1.0}};
    CHECK_ERROR_KIND(CostsConfig::from_json(both), ErrorKind::format);
    auto neg = costs;
    neg["vsl"] = -1.0;
    CHECK_ERROR_KIND(CostsConfig::from_json(neg), ErrorKind::out_of_range);
    auto grid = costs;
    grid["grid"] = {{"min", 10.0}, {"max", 5.0}, {"n", 10}};
    CHECK_ERROR_KIND(CostsConfig::from_json(grid), ErrorKind::out_of_range);
}
