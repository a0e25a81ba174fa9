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
#ifndef ECOP_DRAM_HPP
#define ECOP_DRAM_HPP

#include "ecop/bounds.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ecop
{

/// Unnormalized log density; -inf marks zero density.
using LogDensity = std::function<double(std::span<const double>)>;

struct DramOptions {
    /// Iterations before the proposal covariance is first adapted.
    std::size_t adapt_start = 1000;
    std::size_t adapt_interval = 100;
    /// Standard-deviation shrink factor of the second-stage proposal.
    double dr_scale = 0.2;
    /// Relative diagonal regularization of the adapted covariance.
    double epsilon = 1e-8;
    /// Keep every `thin`-th state.
    std::size_t thin = 1;
    double burn_in_fraction = 0.5;
};

/// Thinned Markov chain. Row r of `samples` is the state after iteration r * thin.
struct Chain {
    Eigen::MatrixXd samples;
    std::vector<double> log_posterior;
    std::size_t iterations = 0;
    std::size_t thin = 1;
    std::size_t burn_in = 0;
    double acceptance_rate = 0.0;
    /// Fraction of first-stage rejections rescued by the delayed-rejection stage.
    double second_stage_rate = 0.0;

    std::size_t first_posterior_row() const noexcept;
    /// Stored rows at or after the burn-in iteration.
    Eigen::MatrixXd posterior() const;
};

/**
 * Delayed-rejection adaptive Metropolis.
 *
 * Gaussian random-walk proposals whose covariance is periodically replaced by
 * 2.38^2/d times the chain's empirical covariance. A rejected first-stage
 * move triggers one second-stage proposal with covariance scaled by
 * dr_scale^2, accepted with the delayed-rejection probability that keeps the
 * target invariant. States outside `bounds` have zero density.
 */
Chain dram_sample(const LogDensity& log_density, const Bounds& bounds, std::span<const double> init,
                  const Eigen::MatrixXd& initial_covariance, std::size_t iterations, std::uint64_t seed,
                  const DramOptions& options = {});

/// Same, with an uncorrelated initial proposal of the given standard deviations.
Chain dram_sample(const LogDensity& log_density, const Bounds& bounds, std::span<const double> init,
                  std::span<const double> initial_sd, std::size_t iterations, std::uint64_t seed,
                  const DramOptions& options = {});

struct ChainDiagnostics {
    std::vector<double> mean;
    std::vector<double> sd;
    std::vector<double> lower95;
    std::vector<double> upper95;
    /// Pearson correlation of post-burn-in samples. Pairs involving a
    /// zero-variance column are reported as 0 off the diagonal.
    Eigen::MatrixXd correlation;
    std::vector<bool> zero_variance;
    std::size_t posterior_samples = 0;
};

ChainDiagnostics chain_diagnostics(const Chain& chain);

/// Sample quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double p);

} // namespace ecop

#endif
