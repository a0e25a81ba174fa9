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
#ifndef ECOP_DE_HPP
#define ECOP_DE_HPP

#include "ecop/bounds.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ecop
{

using Objective = std::function<double(std::span<const double>)>;

enum class DeOperator : int { rand_1 = 0, best_1 = 1, current_to_best_1 = 2 };
inline constexpr std::size_t kDeOperatorCount = 3;

struct DeOptions {
    /// 0 picks 18 * dim clamped to [40, 300].
    std::size_t initial_population = 0;
    std::size_t min_population = 4;
    /// Entries in the success-history memory for F and CR.
    std::size_t memory_size = 6;
    /// Floor on each operator's selection probability.
    double min_operator_probability = 0.1;
    /// The "best" member used by best/1 and current-to-best/1 is drawn from
    /// this top fraction of the population (at least two members).
    double best_fraction = 0.1;
    unsigned threads = 0;
};

struct DeResult {
    std::vector<double> best;
    double best_value = 0.0;
    std::size_t evaluations = 0;
    /// Best-so-far value after each generation (generation 0 is the initial population).
    std::vector<double> history;
    std::array<double, kDeOperatorCount> operator_probabilities{};
};

std::size_t de_initial_population(std::size_t dim, const DeOptions& options = {});

/**
 * Adaptive multi-operator differential evolution.
 *
 * Each trial vector is built by one of rand/1, best/1 or current-to-best/1
 * (the "best" vector is a random member of the top `best_fraction`),
 * picked with probabilities that follow each operator's recent relative
 * improvement. F and CR are drawn around a success-history memory, the
 * population shrinks linearly from its initial size to `min_population` as
 * the budget is spent, and out-of-bounds coordinates are reflected. A trial
 * replaces its parent only if strictly better. Deterministic for a given seed
 * regardless of thread count.
 */
DeResult de_minimize(const Objective& objective, const Bounds& bounds, std::size_t budget,
                     std::uint64_t seed, const DeOptions& options = {});

} // namespace ecop

#endif
