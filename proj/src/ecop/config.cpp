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
#include "ecop/config.hpp"

#include "ecop/error.hpp"
#include "ecop/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ecop
{

nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::not_found, "file not found: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return nlohmann::json::parse(ss.str());
    }
    catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, path + " is not valid JSON: " + e.what());
    }
}

void ScenarioConfig::validate() const
{
    if (!(population > 0.0) || !std::isfinite(population)) {
        fail(ErrorKind::config, "population must be positive");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon) || !(step > 0.0) || !(knot_spacing > 0.0)) {
        fail(ErrorKind::config, "horizon, step and knot_spacing must be positive");
    }
    disease.validate();
    policy.validate();
    if (!policy.schedule.covers(horizon)) {
        fail(ErrorKind::config, "policy schedule does not cover the horizon");
    }
}

nlohmann::json ScenarioConfig::to_json() const
{
    return {{"population", population},
            {"disease", disease},
            {"policy", policy},
            {"horizon", horizon},
            {"step", step},
            {"optimization", {{"knot_spacing", knot_spacing}, {"objective_form", ecop::to_string(objective_form)}}}};
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j)
{
    ScenarioConfig c;
    c.population = field<double>(j, "population");
    c.disease = field<DiseaseParams>(j, "disease");
    c.horizon = field_or<double>(j, "horizon", kDefaultHorizon);
    c.step = field_or<double>(j, "step", kDefaultStep);
    const auto& policy = field<nlohmann::json>(j, "policy");
    c.policy.xi = field<double>(policy, "xi");
    c.policy.tau = field<double>(policy, "tau");
    c.policy.schedule = policy.contains("schedule") ? field<MuSchedule>(policy, "schedule")
                                                    : MuSchedule::covering(c.horizon);
    if (j.contains("optimization")) {
        const auto& opt = field<nlohmann::json>(j, "optimization");
        c.knot_spacing = field_or<double>(opt, "knot_spacing", 14.0);
        c.objective_form = objective_form_from(field_or<std::string>(opt, "objective_form", "incidence"));
    }
    c.validate();
    return c;
}

MooProblem ScenarioConfig::moo_problem() const
{
    MooProblem p = MooProblem::build(disease, policy.xi, policy.tau, population, horizon, knot_spacing,
                                     objective_form);
    p.step = step;
    return p;
}

ScenarioConfig load_scenario(const std::string& path)
{
    return ScenarioConfig::from_json(read_json_file(path));
}

std::vector<double> GridSpec::values() const
{
    return log_grid(min, max, n);
}

nlohmann::json GridSpec::to_json() const
{
    return {{"min", min}, {"max", max}, {"n", n}};
}

GridSpec GridSpec::from_json(const nlohmann::json& j)
{
    GridSpec g;
    g.min = field_or<double>(j, "min", kDefaultGridMin);
    g.max = field_or<double>(j, "max", kDefaultGridMax);
    g.n = field_or<std::size_t>(j, "n", kDefaultGridSize);
    if (!(g.min > 0.0) || !(g.max > g.min) || !std::isfinite(g.max) || g.n < 2 || g.n > 100000) {
        fail(ErrorKind::out_of_range, "grid needs 0 < min < max and 2 <= n <= 100000");
    }
    return g;
}

nlohmann::json CostsConfig::to_json() const
{
    nlohmann::json j = params;
    j["grid"] = grid.to_json();
    return j;
}

CostsConfig CostsConfig::from_json(const nlohmann::json& j)
{
    if (!j.is_object()) {
        fail(ErrorKind::format, "costs must be a JSON object");
    }
    CostsConfig c;
    const bool direct = j.contains("gdp");
    const bool basis = j.contains("gdp_basis");
    if (direct == basis) {
        fail(ErrorKind::format, "give exactly one of 'gdp' and 'gdp_basis'");
    }
    if (direct) {
        c.params.gdp = field<double>(j, "gdp");
    }
    else {
        const auto& b = field<nlohmann::json>(j, "gdp_basis");
        c.params.gdp = field<double>(b, "per_capita_usd") * field<double>(b, "population") /
                       field_or<double>(b, "days_per_year", 365.0);
    }
    c.params.gdp_max_reduction = field<double>(j, "gdp_max_reduction");
    c.params.hospitalization_cost = field<double>(j, "hospitalization_cost");
    c.params.vsl = field<double>(j, "vsl");
    c.params.fatality = field<double>(j, "fatality");
    c.params.validate();
    if (j.contains("grid")) {
        c.grid = GridSpec::from_json(field<nlohmann::json>(j, "grid"));
    }
    return c;
}

CostsConfig load_costs(const std::string& path)
{
    return CostsConfig::from_json(read_json_file(path));
}

} // namespace ecop
