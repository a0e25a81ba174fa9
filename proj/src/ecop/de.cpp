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
#include "ecop/de.hpp"

#include "ecop/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace ecop
{

namespace
{

struct Member {
    std::vector<double> x;
    double value;
};

double safe_value(double v)
{
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

// Draws k distinct indices from [0, n) excluding `skip`.
template <class Rng>
std::array<std::size_t, 3> distinct(std::size_t n, std::size_t skip, std::size_t k, Rng& rng)
{
    std::array<std::size_t, 3> out{};
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t r;
        do {
            r = pick(rng);
        } while (r == skip || std::find(out.begin(), out.begin() + static_cast<long>(c), r) !=
                                  out.begin() + static_cast<long>(c));
        out[c] = r;
    }
    return out;
}

} // namespace

std::size_t de_initial_population(std::size_t dim, const DeOptions& options)
{
    if (options.initial_population > 0) {
        return options.initial_population;
    }
    return std::clamp<std::size_t>(18 * dim, 40, 300);
}

DeResult de_minimize(const Objective& objective, const Bounds& bounds, std::size_t budget,
                     std::uint64_t seed, const DeOptions& options)
{
    bounds.validate();
    const std::size_t dim = bounds.dim();
    const std::size_t n_init = de_initial_population(dim, options);
    const std::size_t n_min = std::max<std::size_t>(options.min_population, 4);
    if (n_init < n_min) {
        fail(ErrorKind::config, "initial population smaller than minimum population");
    }
    if (budget < n_init * 10) {
        fail(ErrorKind::config, "budget " + std::to_string(budget) + " below 10 x population (" +
                                    std::to_string(n_init * 10) + ")");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Member> pop(n_init);
    for (auto& m : pop) {
        m.x.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            m.x[j] = bounds.lower[j] + unit(rng) * bounds.width(j);
        }
    }
    parallel_for(
        pop.size(), [&](std::size_t i) { pop[i].value = safe_value(objective(pop[i].x)); },
        options.threads);
    std::size_t nfe = pop.size();

    auto best_of = [&] {
        return static_cast<std::size_t>(
            std::min_element(pop.begin(), pop.end(),
                             [](const Member& a, const Member& b) { return a.value < b.value; }) -
            pop.begin());
    };

    DeResult result;
    std::size_t best = best_of();
    result.best = pop[best].x;
    result.best_value = pop[best].value;
    result.history.push_back(result.best_value);

    const std::size_t h = std::max<std::size_t>(options.memory_size, 1);
    std::vector<double> mem_f(h, 0.5);
    std::vector<double> mem_cr(h, 0.5);
    std::size_t mem_pos = 0;

    std::array<double, kDeOperatorCount> op_prob;
    op_prob.fill(1.0 / kDeOperatorCount);

    std::vector<std::vector<double>> trials;
    std::vector<double> trial_values;
    std::vector<int> trial_op;
    std::vector<double> trial_f;
    std::vector<double> trial_cr;

    while (nfe < budget) {
        const std::size_t n = pop.size();
        const std::size_t batch = std::min(n, budget - nfe);
        trials.assign(batch, std::vector<double>(dim));
        trial_values.assign(batch, 0.0);
        trial_op.assign(batch, 0);
        trial_f.assign(batch, 0.0);
        trial_cr.assign(batch, 0.0);
        std::vector<std::size_t> ranked(n);
        std::iota(ranked.begin(), ranked.end(), std::size_t{0});
        std::stable_sort(ranked.begin(), ranked.end(),
                         [&](std::size_t a, std::size_t b) { return pop[a].value < pop[b].value; });
        const auto top = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::ceil(options.best_fraction * static_cast<double>(n))), 2, n);
        std::uniform_int_distribution<std::size_t> choose_top(0, top - 1);

        std::discrete_distribution<int> choose_op(op_prob.begin(), op_prob.end());
        std::uniform_int_distribution<std::size_t> choose_mem(0, h - 1);
        for (std::size_t i = 0; i < batch; ++i) {
            int op = choose_op(rng);
            std::size_t r = choose_mem(rng);
            double cr = std::clamp(std::normal_distribution<double>(mem_cr[r], 0.1)(rng), 0.0, 1.0);
            double f;
            do {
                f = std::cauchy_distribution<double>(mem_f[r], 0.1)(rng);
            } while (f <= 0.0);
            f = std::min(f, 1.0);

            auto idx = distinct(n, i, op == static_cast<int>(DeOperator::rand_1) ? 3 : 2, rng);
            const auto& xi = pop[i].x;
            const auto& xb = pop[ranked[choose_top(rng)]].x;
            std::vector<double> donor(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                switch (static_cast<DeOperator>(op)) {
                case DeOperator::rand_1:
                    donor[j] = pop[idx[0]].x[j] + f * (pop[idx[1]].x[j] - pop[idx[2]].x[j]);
                    break;
                case DeOperator::best_1:
                    donor[j] = xb[j] + f * (pop[idx[0]].x[j] - pop[idx[1]].x[j]);
                    break;
                case DeOperator::current_to_best_1:
                    donor[j] = xi[j] + f * (xb[j] - xi[j]) + f * (pop[idx[0]].x[j] - pop[idx[1]].x[j]);
                    break;
                }
            }
            std::size_t j_rand = std::uniform_int_distribution<std::size_t>(0, dim - 1)(rng);
            auto& u = trials[i];
            for (std::size_t j = 0; j < dim; ++j) {
                double v = (j == j_rand || unit(rng) <= cr) ? donor[j] : xi[j];
                u[j] = bounds.reflect(j, v, rng);
            }
            trial_op[i] = op;
            trial_f[i] = f;
            trial_cr[i] = cr;
        }

        parallel_for(
            batch, [&](std::size_t i) { trial_values[i] = safe_value(objective(trials[i])); },
            options.threads);
        nfe += batch;

        std::vector<double> s_f, s_cr, s_w;
        std::array<double, kDeOperatorCount> op_gain{};
        std::array<std::size_t, kDeOperatorCount> op_used{};
        for (std::size_t i = 0; i < batch; ++i) {
            auto op = static_cast<std::size_t>(trial_op[i]);
            ++op_used[op];
            double parent = pop[i].value;
            if (trial_values[i] < parent) {
                double gain = std::isfinite(parent) ? parent - trial_values[i] : 1.0;
                op_gain[op] += std::isfinite(parent) ? gain / std::max(std::abs(parent), 1e-300) : 1.0;
                s_f.push_back(trial_f[i]);
                s_cr.push_back(trial_cr[i]);
                s_w.push_back(std::isfinite(gain) ? gain : 1.0);
                pop[i].x = std::move(trials[i]);
                pop[i].value = trial_values[i];
            }
        }

        if (!s_f.empty()) {
            double wsum = std::accumulate(s_w.begin(), s_w.end(), 0.0);
            double num = 0.0, den = 0.0, cr_mean = 0.0;
            for (std::size_t k = 0; k < s_f.size(); ++k) {
                double w = wsum > 0.0 ? s_w[k] / wsum : 1.0 / static_cast<double>(s_f.size());
                num += w * s_f[k] * s_f[k];
                den += w * s_f[k];
                cr_mean += w * s_cr[k];
            }
            mem_f[mem_pos] = den > 0.0 ? num / den : 0.5;
            mem_cr[mem_pos] = cr_mean;
            mem_pos = (mem_pos + 1) % h;
        }

        // Operator probabilities follow mean relative improvement per use.
        std::array<double, kDeOperatorCount> quality{};
        double qsum = 0.0;
        for (std::size_t k = 0; k < kDeOperatorCount; ++k) {
            quality[k] = op_used[k] > 0 ? op_gain[k] / static_cast<double>(op_used[k]) : 0.0;
            qsum += quality[k];
        }
        if (qsum > 0.0) {
            double floor = options.min_operator_probability;
            double total = 0.0;
            for (std::size_t k = 0; k < kDeOperatorCount; ++k) {
                op_prob[k] = std::clamp(quality[k] / qsum, floor, 1.0 - 2.0 * floor);
                total += op_prob[k];
            }
            for (auto& p : op_prob) {
                p /= total;
            }
        }

        // Linear population size reduction, dropping the worst members.
        double progress = static_cast<double>(nfe) / static_cast<double>(budget);
        auto target = static_cast<std::size_t>(std::lround(
            static_cast<double>(n_init) + (static_cast<double>(n_min) - static_cast<double>(n_init)) * progress));
        target = std::max(target, n_min);
        if (target < pop.size()) {
            std::stable_sort(pop.begin(), pop.end(),
                             [](const Member& a, const Member& b) { return a.value < b.value; });
            pop.resize(target);
        }

        best = best_of();
        if (pop[best].value < result.best_value) {
            result.best = pop[best].x;
            result.best_value = pop[best].value;
        }
        result.history.push_back(result.best_value);
    }

    result.evaluations = nfe;
    result.operator_probabilities = op_prob;
    return result;
}

} // namespace ecop
