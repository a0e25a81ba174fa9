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
#include "ecop/nsga2.hpp"

#include "ecop/error.hpp"
#include "ecop/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace ecop
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

ObjectiveVector sanitize(ObjectiveVector f)
{
    for (double& v : f) {
        if (!std::isfinite(v)) {
            v = kInf;
        }
    }
    return f;
}

void evaluate(const MultiObjective& objective, std::vector<Nsga2Individual>& pop, std::size_t from,
              unsigned threads)
{
    parallel_for(
        pop.size() - from, [&](std::size_t i) { pop[from + i].f = sanitize(objective(pop[from + i].x)); }, threads);
}

struct Ranked {
    std::vector<std::size_t> rank;
    std::vector<double> crowding;
};

Ranked rank_population(const std::vector<Nsga2Individual>& pop)
{
    std::vector<ObjectiveVector> f;
    f.reserve(pop.size());
    for (const auto& ind : pop) {
        f.push_back(ind.f);
    }
    Ranked r;
    r.rank.assign(pop.size(), 0);
    r.crowding.assign(pop.size(), 0.0);
    auto fronts = non_dominated_sort(f);
    for (std::size_t k = 0; k < fronts.size(); ++k) {
        auto cd = crowding_distance(f, fronts[k]);
        for (std::size_t m = 0; m < fronts[k].size(); ++m) {
            r.rank[fronts[k][m]] = k;
            r.crowding[fronts[k][m]] = cd[m];
        }
    }
    return r;
}

} // namespace

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept
{
    bool strictly = false;
    for (std::size_t m = 0; m < a.size(); ++m) {
        if (a[m] > b[m]) {
            return false;
        }
        if (a[m] < b[m]) {
            strictly = true;
        }
    }
    return strictly;
}

std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<ObjectiveVector>& f)
{
    const std::size_t n = f.size();
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(f[p], f[q])) {
                dominated_by[p].push_back(q);
                ++count[q];
            }
            else if (dominates(f[q], f[p])) {
                dominated_by[q].push_back(p);
                ++count[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (count[p] == 0) {
            fronts[0].push_back(p);
        }
    }
    while (!fronts.back().empty()) {
        std::vector<std::size_t> next;
        for (std::size_t p : fronts.back()) {
            for (std::size_t q : dominated_by[p]) {
                if (--count[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& f, const std::vector<std::size_t>& front)
{
    const std::size_t n = front.size();
    std::vector<double> d(n, 0.0);
    if (n <= 2) {
        std::fill(d.begin(), d.end(), kInf);
        return d;
    }
    std::vector<std::size_t> order(n);
    for (std::size_t m = 0; m < f[front[0]].size(); ++m) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return f[front[a]][m] < f[front[b]][m]; });
        double lo = f[front[order.front()]][m];
        double hi = f[front[order.back()]][m];
        d[order.front()] = kInf;
        d[order.back()] = kInf;
        if (!(hi > lo) || !std::isfinite(hi - lo)) {
            continue;
        }
        for (std::size_t k = 1; k + 1 < n; ++k) {
            d[order[k]] += (f[front[order[k + 1]]][m] - f[front[order[k - 1]]][m]) / (hi - lo);
        }
    }
    return d;
}

std::vector<Nsga2Individual> nsga2(const MultiObjective& objective, const Bounds& bounds, std::size_t population,
                                   std::size_t generations, std::uint64_t seed, const Nsga2Options& options)
{
    bounds.validate();
    if (population < 20 || population % 2 != 0) {
        fail(ErrorKind::config, "NSGA-II population must be even and at least 20");
    }
    if (!(options.crossover_probability >= 0.0 && options.crossover_probability <= 1.0) ||
        !(options.eta_crossover >= 0.0) || !(options.eta_mutation >= 0.0) ||
        !(options.mutation_probability >= 0.0 && options.mutation_probability <= 1.0)) {
        fail(ErrorKind::config, "invalid NSGA-II variation parameters");
    }
    const std::size_t dim = bounds.dim();
    const double pm = options.mutation_probability > 0.0 ? options.mutation_probability : 1.0 / static_cast<double>(dim);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, population - 1);

    std::vector<Nsga2Individual> pop(population);
    for (auto& ind : pop) {
        ind.x.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            ind.x[j] = bounds.lower[j] + unit(rng) * bounds.width(j);
        }
    }
    evaluate(objective, pop, 0, options.threads);
    Ranked ranked = rank_population(pop);

    auto tournament = [&]() -> const Nsga2Individual& {
        std::size_t a = pick(rng);
        std::size_t b = pick(rng);
        if (ranked.rank[a] != ranked.rank[b]) {
            return pop[ranked.rank[a] < ranked.rank[b] ? a : b];
        }
        return pop[ranked.crowding[b] > ranked.crowding[a] ? b : a];
    };
    auto mutate = [&](std::vector<double>& x) {
        const double eta = options.eta_mutation;
        for (std::size_t j = 0; j < dim; ++j) {
            if (unit(rng) >= pm) {
                continue;
            }
            double lo = bounds.lower[j];
            double w = bounds.width(j);
            double d1 = (x[j] - lo) / w;
            double d2 = (bounds.upper[j] - x[j]) / w;
            double u = unit(rng);
            double dq;
            if (u < 0.5) {
                double v = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
                dq = std::pow(v, 1.0 / (eta + 1.0)) - 1.0;
            }
            else {
                double v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
                dq = 1.0 - std::pow(v, 1.0 / (eta + 1.0));
            }
            x[j] = bounds.reflect(j, x[j] + dq * w, rng);
        }
    };

    for (std::size_t gen = 0; gen < generations; ++gen) {
        pop.reserve(2 * population);
        for (std::size_t k = 0; k < population; k += 2) {
            Nsga2Individual c1{tournament().x, {}};
            Nsga2Individual c2{tournament().x, {}};
            if (unit(rng) < options.crossover_probability) {
                for (std::size_t j = 0; j < dim; ++j) {
                    if (unit(rng) >= 0.5 || std::abs(c1.x[j] - c2.x[j]) <= 1e-14) {
                        continue;
                    }
                    double u = unit(rng);
                    double beta = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (options.eta_crossover + 1.0))
                                           : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (options.eta_crossover + 1.0));
                    double a = c1.x[j];
                    double b = c2.x[j];
                    double y1 = bounds.reflect(j, 0.5 * ((1.0 + beta) * a + (1.0 - beta) * b), rng);
                    double y2 = bounds.reflect(j, 0.5 * ((1.0 - beta) * a + (1.0 + beta) * b), rng);
                    // Random assignment of the pair mixes parent genes across children.
                    if (unit(rng) < 0.5) {
                        std::swap(y1, y2);
                    }
                    c1.x[j] = y1;
                    c2.x[j] = y2;
                }
            }
            mutate(c1.x);
            mutate(c2.x);
            pop.push_back(std::move(c1));
            pop.push_back(std::move(c2));
        }
        evaluate(objective, pop, population, options.threads);

        // Environmental selection over parents plus offspring.
        std::vector<ObjectiveVector> f;
        f.reserve(pop.size());
        for (const auto& ind : pop) {
            f.push_back(ind.f);
        }
        std::vector<Nsga2Individual> next;
        next.reserve(2 * population);
        for (const auto& front : non_dominated_sort(f)) {
            if (next.size() + front.size() <= population) {
                for (std::size_t i : front) {
                    next.push_back(std::move(pop[i]));
                }
                continue;
            }
            auto cd = crowding_distance(f, front);
            std::vector<std::size_t> order(front.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
            for (std::size_t k = 0; next.size() < population; ++k) {
                next.push_back(std::move(pop[front[order[k]]]));
            }
            break;
        }
        pop = std::move(next);
        ranked = rank_population(pop);
    }

    std::vector<Nsga2Individual> best;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (ranked.rank[i] == 0) {
            best.push_back(pop[i]);
        }
    }
    return best;
}

} // namespace ecop
