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
#include "ecop/pareto.hpp"

#include "ecop/error.hpp"
#include "ecop/format.hpp"
#include "ecop/hash.hpp"
#include "ecop/json_io.hpp"
#include "ecop/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ecop
{

namespace
{

bool near_duplicate(const ParetoPoint& a, const ParetoPoint& b) noexcept
{
    return std::abs(a.f1 - b.f1) <= kDedupTolerance &&
           std::abs(a.f2 - b.f2) <= kDedupTolerance * std::max({1.0, std::abs(a.f2), std::abs(b.f2)});
}

} // namespace

const char* to_string(ObjectiveForm form) noexcept
{
    return form == ObjectiveForm::incidence ? "incidence" : "literal";
}

ObjectiveForm objective_form_from(const std::string& name)
{
    if (name == "incidence") {
        return ObjectiveForm::incidence;
    }
    if (name == "literal") {
        return ObjectiveForm::literal;
    }
    fail(ErrorKind::config, "unknown objective form '" + name + "' (expected incidence or literal)");
}

MooProblem MooProblem::build(const DiseaseParams& disease, double xi, double tau, double population,
                             double horizon, double knot_spacing, ObjectiveForm form)
{
    MooProblem p;
    p.disease = disease;
    p.xi = xi;
    p.tau = tau;
    p.initial = StateVector::susceptible_only(population);
    p.horizon = horizon;
    p.knot_spacing = knot_spacing;
    p.form = form;
    if (!(horizon > 0.0) || !(knot_spacing > 0.0)) {
        fail(ErrorKind::config, "horizon and knot spacing must be positive");
    }
    p.decision_dim = MuSchedule::covering(horizon, 0.0, knot_spacing).size();
    p.validate();
    return p;
}

MuSchedule MooProblem::schedule(std::span<const double> knots) const
{
    if (knots.size() != decision_dim) {
        fail(ErrorKind::config, "schedule has " + std::to_string(knots.size()) + " knots, expected " +
                                    std::to_string(decision_dim));
    }
    return MuSchedule(std::vector<double>(knots.begin(), knots.end()), knot_spacing);
}

Bounds MooProblem::bounds() const
{
    return Bounds::uniform(decision_dim, lower, upper);
}

void MooProblem::validate() const
{
    disease.validate();
    initial.validate();
    PolicyParams policy;
    policy.xi = xi;
    policy.tau = tau;
    policy.validate();
    if (decision_dim < 1) {
        fail(ErrorKind::config, "at least one free knot is required");
    }
    if (!(lower >= 0.0 && lower < upper && upper <= kMaxMu)) {
        fail(ErrorKind::config, "knot bounds must satisfy 0 <= lower < upper <= 0.95");
    }
    if (!MuSchedule::constant(0.0, decision_dim, knot_spacing).covers(horizon)) {
        fail(ErrorKind::config, "decision knots do not cover the horizon");
    }
    if (!(step > 0.0) || !(horizon > 0.0)) {
        fail(ErrorKind::config, "horizon and step must be positive");
    }
}

nlohmann::json MooProblem::describe() const
{
    return {
        {"disease", disease},
        {"xi", xi},
        {"tau", tau},
        {"initial", {{"s", initial.s}, {"e", initial.e}, {"i", initial.i},
                     {"q", initial.q}, {"r", initial.r}, {"d", initial.d}}},
        {"horizon", horizon},
        {"knot_spacing", knot_spacing},
        {"decision_dim", decision_dim},
        {"bounds", {lower, upper}},
        {"objective_form", to_string(form)},
        {"step", step},
    };
}

std::string MooProblem::provenance() const
{
    return config_hash(describe());
}

double time_average(const MuSchedule& schedule, double horizon)
{
    if (!(horizon > 0.0) || !schedule.covers(horizon)) {
        fail(ErrorKind::config, "schedule must cover a positive horizon");
    }
    // Integrate mu - min(mu) so that a constant schedule averages to its value exactly.
    double base = *std::min_element(schedule.knots().begin(), schedule.knots().end());
    double area = 0.0;
    double t0 = 0.0;
    double v0 = schedule.at(0.0) - base;
    for (std::size_t k = 1; t0 < horizon; ++k) {
        double t1 = std::min(static_cast<double>(k) * schedule.spacing(), horizon);
        double v1 = schedule.at(t1) - base;
        area += 0.5 * (v0 + v1) * (t1 - t0);
        t0 = t1;
        v0 = v1;
    }
    return base + area / horizon;
}

Objectives objectives(const MuSchedule& schedule, const MooProblem& problem)
{
    PolicyParams policy;
    policy.xi = problem.xi;
    policy.tau = problem.tau;
    policy.schedule = schedule;
    Trajectory traj = simulate(problem.initial, problem.disease, policy, problem.horizon, problem.step);

    Objectives out;
    out.f1 = time_average(schedule, problem.horizon);
    if (problem.form == ObjectiveForm::incidence) {
        out.f2 = traj.final_incidence();
        return out;
    }
    const double rate = problem.disease.r0 * policy.confirmation_rate(problem.disease);
    auto integrand = [&](std::size_t k) {
        const StateVector& x = traj.states[k];
        double n = x.n_effective();
        return n > 0.0 ? schedule.at(traj.times[k]) * rate * x.i * x.s / n : 0.0;
    };
    double acc = 0.0;
    double prev = integrand(0);
    for (std::size_t k = 1; k < traj.size(); ++k) {
        double cur = integrand(k);
        acc += 0.5 * (prev + cur) * (traj.times[k] - traj.times[k - 1]);
        prev = cur;
    }
    out.f2 = acc;
    return out;
}

std::vector<ParetoPoint> non_dominated(std::vector<ParetoPoint> points)
{
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].f1 != points[b].f1) {
            return points[a].f1 < points[b].f1;
        }
        return points[a].f2 < points[b].f2;
    });
    // Sweep by ascending f1: a point survives only if it lowers the best f2 so far.
    std::vector<ParetoPoint> out;
    double best_f2 = std::numeric_limits<double>::infinity();
    for (std::size_t idx : order) {
        ParetoPoint& p = points[idx];
        if (!std::isfinite(p.f1) || !std::isfinite(p.f2) || !(p.f2 < best_f2)) {
            continue;
        }
        best_f2 = p.f2;
        if (!out.empty() && near_duplicate(out.back(), p)) {
            continue;
        }
        out.push_back(std::move(p));
    }
    return out;
}

bool mutually_non_dominated(const ParetoFront& front) noexcept
{
    for (std::size_t a = 0; a < front.size(); ++a) {
        for (std::size_t b = 0; b < front.size(); ++b) {
            const auto& p = front.points[a];
            const auto& q = front.points[b];
            if (a != b && p.f1 <= q.f1 && p.f2 <= q.f2 && (p.f1 < q.f1 || p.f2 < q.f2)) {
                return false;
            }
        }
    }
    return true;
}

ParetoFront nsga2_run(const MooProblem& problem, std::size_t population, std::size_t generations,
                      std::uint64_t seed, const Nsga2Options& options)
{
    problem.validate();
    auto objective = [&problem](std::span<const double> x) -> ObjectiveVector {
        try {
            Objectives o = objectives(problem.schedule(x), problem);
            return {o.f1, o.f2};
        }
        catch (const Error&) {
            return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        }
    };
    auto best = nsga2(objective, problem.bounds(), population, generations, seed, options);
    std::vector<ParetoPoint> points;
    points.reserve(best.size());
    for (auto& ind : best) {
        points.push_back({ind.f[0], ind.f[1], problem.schedule(ind.x)});
    }
    return {non_dominated(std::move(points)), problem.provenance()};
}

std::vector<ParetoFront> nsga2_runs(const MooProblem& problem, std::size_t runs, std::size_t population,
                                    std::size_t generations, std::uint64_t seed, const Nsga2Options& options)
{
    if (runs == 0) {
        fail(ErrorKind::config, "at least one run is required");
    }
    std::vector<ParetoFront> fronts(runs);
    unsigned threads = options.threads == 0 ? default_threads() : options.threads;
    // Parallelize across runs when there are enough of them; otherwise inside each run.
    Nsga2Options inner = options;
    inner.threads = runs >= threads ? 1u : threads;
    parallel_for(
        runs, [&](std::size_t k) { fronts[k] = nsga2_run(problem, population, generations, seed + k, inner); },
        runs >= threads ? threads : 1u);
    return fronts;
}

ParetoFront assemble_front(const std::vector<ParetoFront>& runs)
{
    if (runs.empty()) {
        fail(ErrorKind::config, "no fronts to assemble");
    }
    std::vector<ParetoPoint> all;
    for (const auto& run : runs) {
        if (run.provenance != runs.front().provenance) {
            fail(ErrorKind::provenance, "fronts come from different problems (provenance " +
                                            runs.front().provenance + " vs " + run.provenance + ")");
        }
        all.insert(all.end(), run.points.begin(), run.points.end());
    }
    return {non_dominated(std::move(all)), runs.front().provenance};
}

std::size_t select_by_f2_fraction(const ParetoFront& front, double fraction, double population)
{
    if (front.empty()) {
        fail(ErrorKind::config, "front is empty");
    }
    const double target = fraction * population;
    double lo = front.points.back().f2;
    double hi = front.points.front().f2;
    if (!std::isfinite(target) || target < lo || target > hi) {
        fail(ErrorKind::out_of_range, "target f2 " + format_double(target) + " outside the attainable range [" +
                                          format_double(lo) + ", " + format_double(hi) + "]");
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < front.size(); ++k) {
        if (std::abs(front.points[k].f2 - target) < std::abs(front.points[best].f2 - target)) {
            best = k;
        }
    }
    return best;
}

double hypervolume(const ParetoFront& front, double ref_f1, double ref_f2)
{
    std::vector<ParetoPoint> pts = non_dominated(front.points);
    double volume = 0.0;
    double prev_f2 = ref_f2;
    for (const auto& p : pts) {
        if (p.f1 >= ref_f1 || p.f2 >= prev_f2) {
            continue;
        }
        volume += (ref_f1 - p.f1) * (prev_f2 - p.f2);
        prev_f2 = p.f2;
    }
    return volume;
}

} // namespace ecop
