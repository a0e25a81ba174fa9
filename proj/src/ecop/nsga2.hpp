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
#ifndef ECOP_NSGA2_HPP
#define ECOP_NSGA2_HPP

#include "ecop/bounds.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ecop
{

using ObjectiveVector = std::vector<double>;
/// Objectives to minimize. Non-finite entries are treated as +inf.
using MultiObjective = std::function<ObjectiveVector(std::span<const double>)>;

struct Nsga2Options {
    double crossover_probability = 0.9;
    /// Distribution index of simulated binary crossover.
    double eta_crossover = 20.0;
    /// Distribution index of polynomial mutation.
    double eta_mutation = 20.0;
    /// Per-variable mutation probability; 0 selects 1/dim.
    double mutation_probability = 0.0;
    unsigned threads = 0;
};

struct Nsga2Individual {
    std::vector<double> x;
    ObjectiveVector f;
};

/// Pareto dominance for minimization: a <= b everywhere and a < b somewhere.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept;

/// Fronts of increasing rank, each a list of indices in ascending order.
std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<ObjectiveVector>& f);

/// Crowding distance of each member of `front`, aligned with it. Boundary members get +inf.
std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& f, const std::vector<std::size_t>& front);

/**
 * Elitist NSGA-II: binary tournament on (rank, crowding), simulated binary
 * crossover, polynomial mutation, reflection into bounds, and truncation of
 * parents plus offspring by rank then crowding distance. Returns the rank-0
 * members of the final population in population order. Population must be
 * even and at least 20.
 */
std::vector<Nsga2Individual> nsga2(const MultiObjective& objective, const Bounds& bounds, std::size_t population,
                                   std::size_t generations, std::uint64_t seed, const Nsga2Options& options = {});

} // namespace ecop

#endif
