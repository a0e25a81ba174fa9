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
#include "ecop/error.hpp"
#include "ecop/nsga2.hpp"
#include "ecop/pareto.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace ecop;

namespace
{

constexpr double kKorea = 51710000.0;

ObjectiveVector zdt1(std::span<const double> x)
{
    double g = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        g += x[i];
    }
    g = 1.0 + 9.0 * g / static_cast<double>(x.size() - 1);
    return {x[0], g * (1.0 - std::sqrt(x[0] / g))};
}

// Root mean squared distance to the analytic front, divided by the set size.
double generational_distance(const std::vector<Nsga2Individual>& set)
{
    double sum = 0.0;
    for (const auto& ind : set) {
        double best = 1e300;
        for (int k = 0; k <= 20000; ++k) {
            double a = k / 20000.0;
            best = std::min(best, std::hypot(ind.f[0] - a, ind.f[1] - (1.0 - std::sqrt(a))));
        }
        sum += best * best;
    }
    return std::sqrt(sum) / static_cast<double>(set.size());
}

bool brute_dominates(const ParetoPoint& a, const ParetoPoint& b)
{
    return a.f1 <= b.f1 && a.f2 <= b.f2 && (a.f1 < b.f1 || a.f2 < b.f2);
}

ParetoFront points_front(std::vector<std::pair<double, double>> fs, const std::string& tag = "p")
{
    ParetoFront f;
    f.provenance = tag;
    for (auto [a, b] : fs) {
        f.points.push_back({a, b, MuSchedule::constant(std::min(a, 0.95), 2)});
    }
    return f;
}

} // namespace

TEST_CASE("dominance and non-dominated sorting")
{
    CHECK(dominates({1, 2}, {2, 2}));
    CHECK_FALSE(dominates({1, 2}, {1, 2}));
    CHECK_FALSE(dominates({1, 3}, {2, 2}));
    std::vector<ObjectiveVector> f = {{1, 5}, {2, 2}, {3, 1}, {2, 6}, {4, 4}, {5, 5}};
    auto fronts = non_dominated_sort(f);
    REQUIRE(fronts.size() == 3);
    CHECK(fronts[0] == std::vector<std::size_t>{0, 1, 2});
    CHECK(fronts[1] == std::vector<std::size_t>{3, 4});
    CHECK(fronts[2] == std::vector<std::size_t>{5});
    auto cd = crowding_distance(f, fronts[0]);
    CHECK(std::isinf(cd[0]));
    CHECK(std::isinf(cd[2]));
    // Middle point: (3 - 1) / (3 - 1) + (5 - 1) / (5 - 1) = 2.
    CHECK(cd[1] == doctest::Approx(2.0));
}

TEST_CASE("NSGA-II converges on ZDT1")
{
    auto r = nsga2(zdt1, Bounds::uniform(30, 0.0, 1.0), 100, 250, 0);
    CHECK(generational_distance(r) < 0.01);
    std::vector<ObjectiveVector> f;
    for (const auto& ind : r) {
        f.push_back(ind.f);
    }
    CHECK(non_dominated_sort(f).size() == 1);
}

TEST_CASE("NSGA-II is deterministic per seed")
{
    auto a = nsga2(zdt1, Bounds::uniform(5, 0.0, 1.0), 20, 10, 3);
    auto b = nsga2(zdt1, Bounds::uniform(5, 0.0, 1.0), 20, 10, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
    }
    MooProblem p = MooProblem::build(DiseaseParams{}, 0.278, 0.6218, kKorea, 56.0);
    CHECK(nsga2_run(p, 20, 5, 9) == nsga2_run(p, 20, 5, 9));
}

TEST_CASE("objective values")
{
    MooProblem p = MooProblem::build(DiseaseParams{}, 0.278, 0.6218, kKorea);
    CHECK(p.decision_dim == 25);
    CHECK(objectives(MuSchedule::constant(0.37, 25), p).f1 == doctest::Approx(0.37).epsilon(1e-14));
    CHECK(time_average(MuSchedule({0.0, 0.8}), 14.0) == doctest::Approx(0.4));
    CHECK(time_average(MuSchedule({0.0, 0.8, 0.0}), 21.0) == doctest::Approx(0.8 * (7.0 + 7.0 * 0.75) / 21.0));

    Objectives open = objectives(MuSchedule::constant(0.0, 25), p);
    Objectives closed = objectives(MuSchedule::constant(0.95, 25), p);
    CHECK(closed.f2 < open.f2);
    // Uncontrolled importation-driven epidemic, from an independent high-accuracy integration.
    CHECK(open.f2 == doctest::Approx(50651738.9797).epsilon(1e-5));

    MooProblem lit = MooProblem::build(DiseaseParams{}, 0.278, 0.6218, kKorea, 336.0, 14.0, ObjectiveForm::literal);
    CHECK(objectives(MuSchedule::constant(0.0, 25), lit).f2 == 0.0);
    CHECK(objectives(MuSchedule::constant(0.5, 25), lit).f2 > 0.0);
    CHECK(lit.provenance() != p.provenance());
    CHECK(objective_form_from("literal") == ObjectiveForm::literal);
    CHECK_ERROR_KIND(objective_form_from("other"), ErrorKind::config);
}

TEST_CASE("front assembly")
{
    ParetoFront a = points_front({{0.3, 5}, {0.1, 9}, {0.5, 2}});
    ParetoFront single = assemble_front({a});
    REQUIRE(single.size() == 3);
    CHECK(single.points[0].f1 == 0.1);
    CHECK(single.points[2].f1 == 0.5);
    CHECK(mutually_non_dominated(single));

    ParetoFront b = points_front({{0.05, 8}, {0.25, 4}, {0.45, 1}});
    ParetoFront both = assemble_front({a, b});
    for (const auto& p : both.points) {
        bool in_b = std::any_of(b.points.begin(), b.points.end(),
                                [&](const ParetoPoint& q) { return q.f1 == p.f1 && q.f2 == p.f2; });
        CHECK(in_b);
    }
    ParetoFront dup = assemble_front({a, a});
    CHECK(dup.size() == 3);

    CHECK_ERROR_KIND(assemble_front({a, points_front({{0.2, 3}}, "other")}), ErrorKind::provenance);
    CHECK_ERROR_KIND(assemble_front({}), ErrorKind::config);
}

TEST_CASE("assembled front equals the brute-force set for 125 schedules")
{
    MooProblem p = MooProblem::build(DiseaseParams{}, 0.278, 0.6218, kKorea, 28.0);
    REQUIRE(p.decision_dim == 3);
    const double levels[] = {0.0, 0.2375, 0.475, 0.7125, 0.95};
    std::vector<ParetoPoint> all;
    ParetoFront run;
    run.provenance = p.provenance();
    for (double a : levels) {
        for (double b : levels) {
            for (double c : levels) {
                std::vector<double> k = {a, b, c};
                Objectives o = objectives(p.schedule(k), p);
                all.push_back({o.f1, o.f2, p.schedule(k)});
            }
        }
    }
    // Split into five "runs" of 25 candidates each.
    std::vector<ParetoFront> runs(5);
    for (std::size_t i = 0; i < all.size(); ++i) {
        runs[i / 25].provenance = p.provenance();
        runs[i / 25].points.push_back(all[i]);
    }
    ParetoFront assembled = assemble_front(runs);

    std::vector<ParetoPoint> expected;
    for (const auto& c : all) {
        bool dominated = std::any_of(all.begin(), all.end(), [&](const ParetoPoint& o) { return brute_dominates(o, c); });
        bool repeated = std::any_of(expected.begin(), expected.end(),
                                    [&](const ParetoPoint& e) { return e.f1 == c.f1 && e.f2 == c.f2; });
        if (!dominated && !repeated) {
            expected.push_back(c);
        }
    }
    std::sort(expected.begin(), expected.end(), [](const auto& x, const auto& y) { return x.f1 < y.f1; });
    CHECK(assembled.points == expected);
    CHECK(expected.size() > 5);
}

TEST_CASE("strategy selection by infection fraction")
{
    ParetoFront f = points_front({{0.1, 1000}, {0.2, 500}, {0.3, 100}, {0.4, 10}});
    CHECK(select_by_f2_fraction(f, 500.0 / 1e4, 1e4) == 1);
    CHECK(select_by_f2_fraction(f, 100.0 / 1e4, 1e4) == 2);
    double last_f1 = 0.0;
    for (double frac : {0.1, 0.05, 0.01, 0.005, 0.001}) {
        double f1 = f.points[select_by_f2_fraction(f, frac, 1e4)].f1;
        CHECK(f1 >= last_f1);
        last_f1 = f1;
    }
    CHECK_ERROR_KIND(select_by_f2_fraction(f, 1e-6, 1e4), ErrorKind::out_of_range);
    CHECK_ERROR_KIND(select_by_f2_fraction(ParetoFront{}, 0.1, 1e4), ErrorKind::config);
}

TEST_CASE("hypervolume of a staircase")
{
    ParetoFront f = points_front({{1, 3}, {2, 1}});
    // Union of [1,4]x[3,4] and [2,4]x[1,4] below the reference (4, 4).
    CHECK(hypervolume(f, 4.0, 4.0) == doctest::Approx(3.0 + 4.0));
}
