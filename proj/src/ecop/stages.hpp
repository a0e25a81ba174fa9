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
#ifndef ECOP_STAGES_HPP
#define ECOP_STAGES_HPP

#include "ecop/artifact.hpp"
#include "ecop/config.hpp"
#include "ecop/cost.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ecop
{

/// Limits on user-supplied simulation requests.
inline constexpr double kMaxSimulationHorizon = 3650.0;
inline constexpr double kMinSimulationStep = 0.01;

/// Everything the cost endpoint and the cost stage report.
struct CostAnalysis {
    CostParams params;
    UnitCosts units;
    CostOptimum optimum;
    CostOptimalMap map;
    CopSegmentation segmentation;
};

/// Weeks classified per schedule: the horizon rounded up to whole weeks.
std::size_t pattern_weeks(double horizon);

CostAnalysis analyze_costs(const FrontRecord& front, const CostParams& params, const std::vector<double>& grid);

/// {schema_version, provenance, c1, c2, horizon, optimal, sweep, segments, segment_of_c2}.
nlohmann::json cost_analysis_json(const FrontRecord& front, const CostAnalysis& analysis);

/// Tidy CSV: cost_per_infection,optimal_index,optimal_f1,total_cost,segment.
std::string costmap_csv(const CostAnalysis& analysis);

/// Daily trajectory CSV: t,s,e,i,q,r,d,cumulative_confirmed,cumulative_incidence.
std::string trajectory_csv(const Trajectory& trajectory, double horizon);

/**
 * Stage runners. Each takes an options object (file paths, counts, seed) and
 * returns a report object; a "warnings" array lists non-fatal problems.
 * Relative paths are used as given.
 */
nlohmann::json run_simulate_stage(const nlohmann::json& options);
nlohmann::json run_calibrate_stage(const nlohmann::json& options);
nlohmann::json run_sensitivity_stage(const nlohmann::json& options);
nlohmann::json run_optimize_stage(const nlohmann::json& options);
nlohmann::json run_cost_stage(const nlohmann::json& options);
/// Runs every stage from one pipeline config with a single seed.
nlohmann::json run_pipeline_stage(const nlohmann::json& options);

/// Dispatch by stage name; unknown names are config errors.
nlohmann::json run_stage(const std::string& name, const nlohmann::json& options);

} // namespace ecop

#endif
