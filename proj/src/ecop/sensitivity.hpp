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
#ifndef ECOP_SENSITIVITY_HPP
#define ECOP_SENSITIVITY_HPP

#include "ecop/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace ecop
{

enum class SensitivityOutput { cumulative_confirmed, infections };

const char* to_string(SensitivityOutput output) noexcept;
SensitivityOutput sensitivity_output_from(const std::string& name);

struct ParameterRange {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;

    double width() const noexcept
    {
        return upper - lower;
    }
};

/**
 * Sampled inputs, in this order: beta, kappa, alpha, gamma, fatality, xi, tau, mu.
 * beta is the composite transmission rate R0 * alpha / (1 - tau); the sampled
 * value is converted back to R0 per sample. mu is held constant in time.
 */
struct SensitivitySpec {
    std::vector<ParameterRange> ranges;
    std::size_t samples = 1000;
    std::vector<SensitivityOutput> outputs{SensitivityOutput::cumulative_confirmed, SensitivityOutput::infections};
    std::vector<double> eval_times;

    static const std::vector<std::string>& parameter_names();

    /// Ranges of +-50% around the baseline, mu in [0, 0.95], eval times every 14 days.
    static SensitivitySpec defaults(const DiseaseParams& disease, const PolicyParams& policy,
                                    double horizon = kDefaultHorizon);

    /// Parameters with a positive range width.
    std::size_t varied_count() const;
    void validate() const;
};

/**
 * Latin hypercube sample with one row per sample and one column per range.
 * Each column holds exactly one point in each of the `samples` equal-width
 * strata of its range; zero-width ranges yield a constant column.
 */
Eigen::MatrixXd lhs_sample(const SensitivitySpec& spec, std::uint64_t seed);

/// Ranks starting at 1; ties receive their average rank.
Eigen::VectorXd ranks(const Eigen::Ref<const Eigen::VectorXd>& values);

struct Prcc {
    /// coefficients(j, k): parameter j against output column k.
    Eigen::MatrixXd coefficients;
    /// Parameters left out of every regression: constant or collinear with others.
    std::vector<bool> excluded;
    /// Output columns with no rank variation; their coefficients are 0.
    std::vector<bool> constant_output;
    std::vector<std::string> notes;
};

/**
 * Partial rank correlation of each sample column with each output column:
 * the Pearson correlation of the residuals of the ranked parameter and the
 * ranked output after least-squares regression on the other ranked
 * parameters and an intercept. Excluded parameters get coefficient 0.
 */
Prcc prcc(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& outputs);

struct SensitivityResult {
    std::vector<std::string> parameters;
    std::vector<SensitivityOutput> outputs;
    std::vector<double> eval_times;
    /// One matrix per output: parameters x eval_times.
    std::vector<Eigen::MatrixXd> coefficients;
    std::vector<bool> excluded;
    std::size_t samples_used = 0;
    std::size_t samples_dropped = 0;
    std::vector<std::string> notes;

    double coefficient(SensitivityOutput output, const std::string& parameter, std::size_t time_index) const;
};

/**
 * Simulates every LHS sample from a fully susceptible population of size
 * `population` and returns PRCC time series. Samples whose simulation fails
 * are dropped and counted.
 */
SensitivityResult run_sensitivity(const SensitivitySpec& spec, double population, std::uint64_t seed,
                                  double step = kDefaultStep, unsigned threads = 0);

/// Tidy CSV: output,parameter,time,prcc.
void write_prcc_csv(std::ostream& out, const SensitivityResult& result);

} // namespace ecop

#endif
