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
#ifndef ECOP_CONFIG_HPP
#define ECOP_CONFIG_HPP

#include "ecop/cost.hpp"
#include "ecop/model.hpp"
#include "ecop/pareto.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ecop
{

/// Reads and parses a JSON file. Missing file: not_found; bad JSON: format.
nlohmann::json read_json_file(const std::string& path);

/// Population, disease constants, policy and optimization setup.
struct ScenarioConfig {
    double population = 51710000.0;
    DiseaseParams disease;
    PolicyParams policy;
    double horizon = kDefaultHorizon;
    double step = kDefaultStep;
    double knot_spacing = 14.0;
    ObjectiveForm objective_form = ObjectiveForm::incidence;

    void validate() const;
    nlohmann::json to_json() const;
    static ScenarioConfig from_json(const nlohmann::json& j);

    /// Decision problem with xi and tau taken from `policy`.
    MooProblem moo_problem() const;
};

ScenarioConfig load_scenario(const std::string& path);

struct GridSpec {
    double min = kDefaultGridMin;
    double max = kDefaultGridMax;
    std::size_t n = kDefaultGridSize;

    std::vector<double> values() const;
    nlohmann::json to_json() const;
    static GridSpec from_json(const nlohmann::json& j);
};

/**
 * Cost inputs. `gdp` is given directly, or derived from a "gdp_basis" object
 * {per_capita_usd, population, days_per_year} as per_capita * population / days.
 */
struct CostsConfig {
    CostParams params;
    GridSpec grid;

    nlohmann::json to_json() const;
    static CostsConfig from_json(const nlohmann::json& j);
};

CostsConfig load_costs(const std::string& path);

} // namespace ecop

#endif
