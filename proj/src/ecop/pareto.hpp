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
#ifndef ECOP_PARETO_HPP
#define ECOP_PARETO_HPP

#include "ecop/bounds.hpp"
#include "ecop/model.hpp"
#include "ecop/nsga2.hpp"

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ecop
{

enum class ObjectiveForm {
    /// f2 = cumulative incidence, the integral of lambda * S.
    incidence,
    /// f2 = integral of mu * R0 * alpha / (1 - tau) * I * S / N.
    literal,
};

const char* to_string(ObjectiveForm form) noexcept;
ObjectiveForm objective_form_from(const std::string& name);

/// Search over mu schedules with every knot free; xi and tau stay fixed.
struct MooProblem {
    DiseaseParams disease;
    double xi = 0.0;
    double tau = 0.0;
    StateVector initial;
    double horizon = kDefaultHorizon;
    double knot_spacing = 14.0;
    std::size_t decision_dim = 0;
    double lower = 0.0;
    double upper = kMaxMu;
    ObjectiveForm form = ObjectiveForm::incidence;
    double step = kDefaultStep;

    /// Knot count is the smallest that covers the horizon.
    static MooProblem build(const DiseaseParams& disease, double xi, double tau, double population,
                            double horizon = kDefaultHorizon, double knot_spacing = 14.0,
                            ObjectiveForm form = ObjectiveForm::incidence);

    MuSchedule schedule(std::span<const double> knots) const;
    Bounds bounds() const;
    void validate() const;
    /// Everything that determines the objectives; input to the provenance hash.
    nlohmann::json describe() const;
    std::string provenance() const;
};

/// Exact time average of the piecewise-linear schedule over [0, horizon].
double time_average(const MuSchedule& schedule, double horizon);

struct Objectives {
    double f1 = 0.0;
    double f2 = 0.0;
};

Objectives objectives(const MuSchedule& schedule, const MooProblem& problem);

struct ParetoPoint {
    double f1 = 0.0;
    double f2 = 0.0;
    MuSchedule schedule;

    friend bool operator==(const ParetoPoint&, const ParetoPoint&) = default;
};

/// Non-dominated points sorted by ascending f1 with strictly decreasing f2.
struct ParetoFront {
    std::vector<ParetoPoint> points;
    /// Hash of the problem that produced the points.
    std::string provenance;

    std::size_t size() const noexcept
    {
        return points.size();
    }
    bool empty() const noexcept
    {
        return points.empty();
    }

    friend bool operator==(const ParetoFront&, const ParetoFront&) = default;
};

/// Points closer than this in f1, and relatively in f2, are treated as one.
inline constexpr double kDedupTolerance = 1e-9;

/// Global non-dominated subset of `points`, de-duplicated and sorted by f1.
/// Among duplicates the earliest point in input order is kept.
std::vector<ParetoPoint> non_dominated(std::vector<ParetoPoint> points);

bool mutually_non_dominated(const ParetoFront& front) noexcept;

/// One NSGA-II run; the rank-0 set becomes a front tagged with the problem hash.
ParetoFront nsga2_run(const MooProblem& problem, std::size_t population = 100, std::size_t generations = 200,
                      std::uint64_t seed = 0, const Nsga2Options& options = {});

/// Independent runs with seeds seed, seed+1, ...
std::vector<ParetoFront> nsga2_runs(const MooProblem& problem, std::size_t runs, std::size_t population,
                                    std::size_t generations, std::uint64_t seed, const Nsga2Options& options = {});

/// Union of all runs reduced to the global non-dominated set. All runs must
/// carry the same provenance hash.
ParetoFront assemble_front(const std::vector<ParetoFront>& runs);

/// Index of the point whose f2 is nearest fraction * population; ties go to the smaller f1.
std::size_t select_by_f2_fraction(const ParetoFront& front, double fraction, double population);

/// Area dominated by the front inside the box bounded by the reference point.
double hypervolume(const ParetoFront& front, double ref_f1, double ref_f2);

} // namespace ecop

#endif
