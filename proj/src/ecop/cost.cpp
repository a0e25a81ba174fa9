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
#include "ecop/cost.hpp"

#include "ecop/error.hpp"
#include "ecop/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace ecop
{

namespace
{

void check_horizon(double horizon)
{
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        fail(ErrorKind::config, "horizon must be positive");
    }
}

void check_front(const ParetoFront& front)
{
    if (front.empty()) {
        fail(ErrorKind::config, "front is empty");
    }
}

void check_unit_costs(const UnitCosts& costs)
{
    if (!(costs.c1 >= 0.0) || !(costs.c2 >= 0.0) || !std::isfinite(costs.c1) || !std::isfinite(costs.c2)) {
        fail(ErrorKind::out_of_range, "unit costs must be finite and non-negative");
    }
}

void check_grid(const std::vector<double>& grid)
{
    if (grid.size() < 2) {
        fail(ErrorKind::config, "cost grid needs at least two values");
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(grid[k] >= 0.0) || !std::isfinite(grid[k]) || (k > 0 && !(grid[k] > grid[k - 1]))) {
            fail(ErrorKind::config, "cost grid must be finite, non-negative and strictly increasing");
        }
    }
}

// Line of total cost against cost per infection g: a + g * b.
struct Line {
    double a;
    double b;
    std::size_t index;
};

// g at which line q (smaller slope) starts to undercut p.
double crossing(const Line& p, const Line& q)
{
    return (q.a - p.a) / (p.b - q.b);
}

std::vector<EnvelopePiece> lower_envelope(const ParetoFront& front, double c1h, double lo, double hi)
{
    std::vector<Line> lines;
    lines.reserve(front.size());
    for (std::size_t i = 0; i < front.size(); ++i) {
        lines.push_back({c1h * front.points[i].f1, front.points[i].f2, i});
    }
    std::sort(lines.begin(), lines.end(), [&](const Line& x, const Line& y) {
        if (x.b != y.b) {
            return x.b > y.b;
        }
        if (x.a != y.a) {
            return x.a < y.a;
        }
        return front.points[x.index].f1 < front.points[y.index].f1;
    });

    std::vector<Line> hull;
    for (const Line& l : lines) {
        if (!hull.empty() && hull.back().b == l.b) {
            continue; // same slope, higher or equal intercept
        }
        while (hull.size() >= 2 && crossing(hull[hull.size() - 2], l) <= crossing(hull[hull.size() - 2], hull.back())) {
            hull.pop_back();
        }
        hull.push_back(l);
    }

    // hull[k] is optimal on (x_k, x_{k+1}] with x_0 = -inf.
    std::vector<EnvelopePiece> pieces;
    for (std::size_t k = 0; k < hull.size(); ++k) {
        double from = k == 0 ? -std::numeric_limits<double>::infinity() : crossing(hull[k - 1], hull[k]);
        double to = k + 1 < hull.size() ? crossing(hull[k], hull[k + 1]) : std::numeric_limits<double>::infinity();
        if (to < lo) {
            continue;
        }
        if (pieces.empty()) {
            pieces.push_back({lo, hull[k].index});
            continue;
        }
        if (from >= hi) {
            break;
        }
        pieces.push_back({from, hull[k].index});
    }
    return pieces;
}

} // namespace

void CostParams::validate() const
{
    const double values[] = {gdp, gdp_max_reduction, hospitalization_cost, vsl, fatality};
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            fail(ErrorKind::out_of_range, "cost parameters must be finite and non-negative");
        }
    }
    if (gdp_max_reduction > 1.0) {
        fail(ErrorKind::out_of_range, "gdp_max_reduction " + format_double(gdp_max_reduction) + " exceeds 1");
    }
    if (fatality > 1.0) {
        fail(ErrorKind::out_of_range, "fatality " + format_double(fatality) + " exceeds 1");
    }
}

CostParams CostParams::korea_baseline(double population)
{
    CostParams p;
    p.gdp = 31902.0 * population / 365.0;
    p.gdp_max_reduction = 0.0426;
    p.hospitalization_cost = 4613.0;
    p.vsl = 2000000.0;
    p.fatality = 0.0173;
    return p;
}

UnitCosts unit_costs(const CostParams& params)
{
    params.validate();
    return {params.gdp * params.gdp_max_reduction, params.hospitalization_cost + params.fatality * params.vsl};
}

CostCurve cost_curve(const ParetoFront& front, const UnitCosts& costs, double horizon)
{
    check_front(front);
    check_horizon(horizon);
    check_unit_costs(costs);
    CostCurve curve;
    curve.entries.reserve(front.size());
    for (const auto& p : front.points) {
        CostEntry e;
        e.intervention_cost = costs.c1 * p.f1 * horizon;
        e.infection_cost = costs.c2 * p.f2;
        e.total_cost = e.intervention_cost + e.infection_cost;
        curve.entries.push_back(e);
    }
    return curve;
}

CostCurve cost_curve(const ParetoFront& front, const CostParams& params, double horizon)
{
    return cost_curve(front, unit_costs(params), horizon);
}

CostOptimum cost_optimal(const ParetoFront& front, const UnitCosts& costs, double horizon)
{
    check_front(front);
    check_horizon(horizon);
    check_unit_costs(costs);
    std::size_t best = 0;
    double best_total = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < front.size(); ++i) {
        const auto& p = front.points[i];
        double total = costs.c1 * p.f1 * horizon + costs.c2 * p.f2;
        if (total < best_total || (total == best_total && p.f1 < front.points[best].f1)) {
            best = i;
            best_total = total;
        }
    }
    return {best, front.points[best], best_total};
}

CostOptimum cost_optimal(const ParetoFront& front, const CostParams& params, double horizon)
{
    return cost_optimal(front, unit_costs(params), horizon);
}

std::vector<double> log_grid(double lo, double hi, std::size_t n)
{
    if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi) || n < 2) {
        fail(ErrorKind::config, "log grid needs 0 < lo < hi and at least two points");
    }
    std::vector<double> grid(n);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t k = 0; k < n; ++k) {
        grid[k] = std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

std::vector<double> default_cost_grid()
{
    return log_grid(kDefaultGridMin, kDefaultGridMax, kDefaultGridSize);
}

std::size_t CostOptimalMap::lookup(double g) const
{
    if (envelope.empty() || grid.empty()) {
        fail(ErrorKind::config, "cost map is empty");
    }
    if (!(g >= grid.front() && g <= grid.back())) {
        fail(ErrorKind::out_of_range, "cost per infection " + format_double(g) + " outside the map range [" +
                                          format_double(grid.front()) + ", " + format_double(grid.back()) + "]");
    }
    auto it = std::lower_bound(envelope.begin(), envelope.end(), g,
                               [](const EnvelopePiece& p, double v) { return p.from < v; });
    std::size_t k = static_cast<std::size_t>(it - envelope.begin());
    return envelope[k == 0 ? 0 : k - 1].index;
}

CostOptimalMap sweep_cost_per_infection(const ParetoFront& front, double c1, const std::vector<double>& grid,
                                        double horizon)
{
    check_front(front);
    check_horizon(horizon);
    check_grid(grid);
    CostOptimalMap map;
    map.c1 = c1;
    map.horizon = horizon;
    map.grid = grid;
    map.provenance = front.provenance;
    map.optimal_index.reserve(grid.size());
    map.optimal_f1.reserve(grid.size());
    map.optimal_total_cost.reserve(grid.size());
    for (double g : grid) {
        CostOptimum o = cost_optimal(front, UnitCosts{c1, g}, horizon);
        map.optimal_index.push_back(o.index);
        map.optimal_f1.push_back(o.point.f1);
        map.optimal_total_cost.push_back(o.total_cost);
    }
    map.envelope = lower_envelope(front, c1 * horizon, grid.front(), grid.back());
    return map;
}

CostOptimalMap sweep_cost_per_infection(const ParetoFront& front, const CostParams& params,
                                        const std::vector<double>& grid, double horizon)
{
    return sweep_cost_per_infection(front, unit_costs(params).c1, grid, horizon);
}

PatternDescriptor classify_pattern(const MuSchedule& schedule, std::size_t weeks)
{
    const auto& knots = schedule.knots();
    if (knots.empty()) {
        fail(ErrorKind::config, "schedule has no knots");
    }
    if (weeks == 0) {
        weeks = static_cast<std::size_t>(std::ceil(static_cast<double>(knots.size()) * schedule.spacing() / 7.0));
    }
    auto period_of = [&](std::size_t w) {
        double mid = 7.0 * static_cast<double>(w) + 3.5;
        return std::min(static_cast<std::size_t>(mid / schedule.spacing()), knots.size() - 1);
    };
    double peak = 0.0;
    for (std::size_t w = 0; w < weeks; ++w) {
        peak = std::max(peak, knots[period_of(w)]);
    }
    PatternDescriptor d;
    if (!(peak > 0.0)) {
        return d;
    }
    for (std::size_t w = 0; w < weeks; ++w) {
        const std::size_t p = period_of(w);
        const double level = knots[p];
        const double previous = p == 0 ? 0.0 : knots[p - 1];
        const int week = static_cast<int>(w);
        if (!d.begin && level > kChangeBand) {
            d.begin = week;
        }
        if (level >= kStrongFraction * peak) {
            d.strong.push_back(week);
        }
        else if (level - previous > kChangeBand) {
            d.increase.push_back(week);
        }
        else if (previous - level > kChangeBand) {
            d.decrease.push_back(week);
        }
    }
    return d;
}

std::string describe_weeks(const std::vector<int>& weeks)
{
    std::string out;
    for (std::size_t k = 0; k < weeks.size();) {
        std::size_t j = k;
        while (j + 1 < weeks.size() && weeks[j + 1] == weeks[j] + 1) {
            ++j;
        }
        if (!out.empty()) {
            out += ',';
        }
        out += std::to_string(weeks[k]);
        if (j > k) {
            out += '-' + std::to_string(weeks[j]);
        }
        k = j + 1;
    }
    return out;
}

std::size_t CopSegmentation::find(double g) const
{
    if (segments.empty()) {
        fail(ErrorKind::config, "segmentation is empty");
    }
    if (!(g >= segments.front().lower && g <= segments.back().upper)) {
        fail(ErrorKind::out_of_range, "cost per infection " + format_double(g) + " outside the segmented range");
    }
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (g <= segments[s].upper) {
            return s;
        }
    }
    return segments.size() - 1;
}

CopSegmentation segment_cops(const CostOptimalMap& map, const ParetoFront& front, std::size_t weeks)
{
    check_front(front);
    if (map.grid.empty() || map.optimal_index.size() != map.grid.size() ||
        map.optimal_total_cost.size() != map.grid.size()) {
        fail(ErrorKind::config, "cost map is empty or inconsistent");
    }
    std::map<std::size_t, PatternDescriptor> cache;
    auto pattern = [&](std::size_t index) -> const PatternDescriptor& {
        if (index >= front.size()) {
            fail(ErrorKind::config, "cost map refers to a point outside the front");
        }
        auto it = cache.find(index);
        if (it == cache.end()) {
            it = cache.emplace(index, classify_pattern(front.points[index].schedule, weeks)).first;
        }
        return it->second;
    };

    auto open = [&](std::size_t k, double lower) {
        CopSegment s;
        s.lower = lower;
        s.first_grid = k;
        s.last_grid = k;
        s.pattern = pattern(map.optimal_index[k]);
        s.min_total_cost = s.max_total_cost = map.optimal_total_cost[k];
        s.min_infections = s.max_infections = front.points[map.optimal_index[k]].f2;
        s.indices.push_back(map.optimal_index[k]);
        return s;
    };

    CopSegmentation out;
    CopSegment cur = open(0, map.grid.front());
    for (std::size_t k = 1; k < map.grid.size(); ++k) {
        const std::size_t index = map.optimal_index[k];
        if (pattern(index) == cur.pattern) {
            cur.last_grid = k;
            if (cur.indices.back() != index) {
                cur.indices.push_back(index);
            }
            cur.min_total_cost = std::min(cur.min_total_cost, map.optimal_total_cost[k]);
            cur.max_total_cost = std::max(cur.max_total_cost, map.optimal_total_cost[k]);
            cur.min_infections = std::min(cur.min_infections, front.points[index].f2);
            cur.max_infections = std::max(cur.max_infections, front.points[index].f2);
            continue;
        }
        // The boundary is the first crossover after the previous grid value
        // where the pattern leaves the current one.
        const double left = map.grid[k - 1];
        const double right = map.grid[k];
        double boundary = std::numeric_limits<double>::quiet_NaN();
        double first_break = std::numeric_limits<double>::quiet_NaN();
        for (const auto& piece : map.envelope) {
            if (!(piece.from > left) || piece.from > right) {
                continue;
            }
            if (std::isnan(first_break)) {
                first_break = piece.from;
            }
            if (!(pattern(piece.index) == cur.pattern)) {
                boundary = piece.from;
                break;
            }
        }
        if (std::isnan(boundary)) {
            boundary = std::isnan(first_break) ? left : first_break;
        }
        cur.upper = boundary;
        out.segments.push_back(std::move(cur));
        cur = open(k, boundary);
    }
    cur.upper = map.grid.back();
    out.segments.push_back(std::move(cur));
    return out;
}

} // namespace ecop
