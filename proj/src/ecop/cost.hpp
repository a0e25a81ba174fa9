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
#ifndef ECOP_COST_HPP
#define ECOP_COST_HPP

#include "ecop/model.hpp"
#include "ecop/pareto.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ecop
{

/// Economic inputs. gdp is the daily national GDP base in USD/day.
struct CostParams {
    double gdp = 0.0;
    double gdp_max_reduction = 0.0;
    double hospitalization_cost = 0.0;
    double vsl = 0.0;
    double fatality = 0.0;

    /// Throws ErrorKind::out_of_range on negative or non-finite values and on
    /// fractions above one.
    void validate() const;

    /// Korea baseline: per-capita GDP 31,902 USD scaled to a daily national
    /// figure for `population`, 4.26% maximum reduction, c2 = 39,213 USD.
    static CostParams korea_baseline(double population);

    friend bool operator==(const CostParams&, const CostParams&) = default;
};

struct UnitCosts {
    /// USD per day at full stringency (mu = 1).
    double c1 = 0.0;
    /// USD per infection.
    double c2 = 0.0;
};

UnitCosts unit_costs(const CostParams& params);

struct CostEntry {
    double intervention_cost = 0.0;
    double infection_cost = 0.0;
    double total_cost = 0.0;
};

/// One entry per front point, in front order.
struct CostCurve {
    std::vector<CostEntry> entries;
};

CostCurve cost_curve(const ParetoFront& front, const UnitCosts& costs, double horizon);
CostCurve cost_curve(const ParetoFront& front, const CostParams& params, double horizon);

struct CostOptimum {
    std::size_t index = 0;
    ParetoPoint point;
    double total_cost = 0.0;
};

/// Minimum total cost; ties go to the smaller f1.
CostOptimum cost_optimal(const ParetoFront& front, const UnitCosts& costs, double horizon);
CostOptimum cost_optimal(const ParetoFront& front, const CostParams& params, double horizon);

/// `n` log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

inline constexpr double kDefaultGridMin = 1e3;
inline constexpr double kDefaultGridMax = 1e7;
inline constexpr std::size_t kDefaultGridSize = 200;

std::vector<double> default_cost_grid();

/// Piece of the lower envelope of the total-cost lines c1*H*f1 + g*f2.
/// The piece's point is optimal for g in (from, next piece's from].
struct EnvelopePiece {
    double from = 0.0;
    std::size_t index = 0;

    friend bool operator==(const EnvelopePiece&, const EnvelopePiece&) = default;
};

struct CostOptimalMap {
    double c1 = 0.0;
    double horizon = 0.0;
    std::vector<double> grid;
    std::vector<std::size_t> optimal_index;
    std::vector<double> optimal_f1;
    std::vector<double> optimal_total_cost;
    /// Exact lower envelope over [grid.front(), grid.back()]; the first piece
    /// starts at grid.front() and also covers that value.
    std::vector<EnvelopePiece> envelope;
    std::string provenance;

    /// Optimal front index at any cost per infection inside the grid range.
    std::size_t lookup(double cost_per_infection) const;

    friend bool operator==(const CostOptimalMap&, const CostOptimalMap&) = default;
};

/// Cost-optimal point per grid value with c1 held at the params' value.
CostOptimalMap sweep_cost_per_infection(const ParetoFront& front, const CostParams& params,
                                        const std::vector<double>& grid, double horizon);
CostOptimalMap sweep_cost_per_infection(const ParetoFront& front, double c1, const std::vector<double>& grid,
                                        double horizon);

/// Weekly reading of a schedule.
struct PatternDescriptor {
    /// First week with mu > 0.05; empty for an all-zero schedule.
    std::optional<int> begin;
    std::vector<int> increase;
    std::vector<int> strong;
    std::vector<int> decrease;

    friend bool operator==(const PatternDescriptor&, const PatternDescriptor&) = default;
};

inline constexpr double kStrongFraction = 0.75;
inline constexpr double kChangeBand = 0.05;

/// Each week takes the value of the knot period containing its midpoint.
/// Strong: mu >= 0.75 max. Otherwise increase or decrease when the level
/// moved by more than 0.05 from the previous period. `weeks` = 0 covers all
/// knot periods.
PatternDescriptor classify_pattern(const MuSchedule& schedule, std::size_t weeks = 0);

std::string describe_weeks(const std::vector<int>& weeks);

struct CopSegment {
    /// Cost-per-infection interval (lower, upper]; the first segment also
    /// contains its lower end.
    double lower = 0.0;
    double upper = 0.0;
    std::size_t first_grid = 0;
    std::size_t last_grid = 0;
    /// Distinct optimal front indices in grid order.
    std::vector<std::size_t> indices;
    PatternDescriptor pattern;
    double min_total_cost = 0.0;
    double max_total_cost = 0.0;
    double min_infections = 0.0;
    double max_infections = 0.0;

    friend bool operator==(const CopSegment&, const CopSegment&) = default;
};

struct CopSegmentation {
    std::vector<CopSegment> segments;

    /// Segment containing the cost per infection.
    std::size_t find(double cost_per_infection) const;

    friend bool operator==(const CopSegmentation&, const CopSegmentation&) = default;
};

/// Splits the map where the optimal schedule's pattern changes. Boundaries sit
/// at the exact crossover between the envelope pieces on either side.
CopSegmentation segment_cops(const CostOptimalMap& map, const ParetoFront& front, std::size_t weeks = 0);

} // namespace ecop

#endif
