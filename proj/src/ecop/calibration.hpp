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
#ifndef ECOP_CALIBRATION_HPP
#define ECOP_CALIBRATION_HPP

#include "ecop/cases.hpp"
#include "ecop/de.hpp"
#include "ecop/dram.hpp"
#include "ecop/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ecop
{

struct ParameterSpec {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
};

/**
 * Fit of the policy parameters theta = (xi, tau, mu_p, ..., mu_{K-1}) to a
 * cumulative confirmed series. Data day k is simulation time t = k. The
 * first `pinned_knots` schedule knots are held at zero.
 */
struct EstimationProblem {
    std::vector<ParameterSpec> theta_spec;
    DiseaseParams fixed;
    StateVector initial;
    CaseSeries data;
    double knot_spacing = 14.0;
    std::size_t knot_count = 0;
    std::size_t pinned_knots = 2;
    double step = kDefaultStep;

    static EstimationProblem build(const DiseaseParams& disease, double population, CaseSeries data,
                                   double xi_max = 5.0, double knot_spacing = 14.0,
                                   std::size_t pinned_knots = 2, double step = kDefaultStep);

    std::size_t dim() const noexcept
    {
        return theta_spec.size();
    }
    double horizon() const noexcept
    {
        return data.span_days();
    }
    Bounds bounds() const;
    PolicyParams policy(std::span<const double> theta) const;
    /// Inverse of policy(): theta for a given xi, tau and knot vector.
    std::vector<double> theta_of(double xi, double tau, const std::vector<double>& knots) const;
    void validate() const;
};

/// Residuals sim - data at each data day; throws if the simulation fails.
std::vector<double> residuals(std::span<const double> theta, const EstimationProblem& problem);

/**
 * Trapezoid-weighted L2 distance between simulated and observed cumulative
 * confirmed counts, sqrt(sum_k w_k r_k^2) with unit day spacing. Units are
 * persons * day^(1/2). Infinite if the simulation fails.
 */
double loss(std::span<const double> theta, const EstimationProblem& problem);

struct Estimate {
    std::vector<double> theta;
    double loss_value = 0.0;
    std::size_t evaluations_used = 0;
    std::uint64_t seed = 0;
    std::vector<double> history;
};

Estimate de_optimize(const EstimationProblem& problem, std::size_t budget, std::uint64_t seed,
                     const DeOptions& options = {});

struct RestartResult {
    std::vector<Estimate> runs;
    std::size_t best_index = 0;

    const Estimate& best() const
    {
        return runs.at(best_index);
    }
};

/// Independent runs with seeds seed, seed+1, ...; best is the first argmin.
RestartResult run_restarts(const EstimationProblem& problem, std::size_t restarts = 25,
                           std::size_t budget_each = 100000, std::uint64_t seed = 0,
                           const DeOptions& options = {});

struct PosteriorOptions {
    /// Standard deviation of the Normal prior around the initial estimate,
    /// in each parameter's natural units.
    double prior_sd = 0.05;
    /// Observation noise; defaults to the RMS residual of the initial estimate.
    std::optional<double> sigma_obs;
    DramOptions dram;
};

double rms_residual(const EstimationProblem& problem, const Estimate& estimate);

/// Log posterior: -loss^2 / (2 sigma^2) plus the Normal prior, -inf off bounds.
LogDensity log_posterior(const EstimationProblem& problem, const Estimate& center, double sigma_obs,
                         double prior_sd);

/// Per-coordinate proposal scales from the curvature of the log density.
std::vector<double> laplace_scales(const LogDensity& density, const Bounds& bounds,
                                   std::span<const double> at, double max_sd);

/**
 * Inverse of the negative finite-difference Hessian of the log density at
 * `at`. Falls back to the diagonal of laplace_scales() when the Hessian is
 * not negative definite. Variances are capped at max_sd^2.
 */
Eigen::MatrixXd laplace_covariance(const LogDensity& density, const Bounds& bounds, std::span<const double> at,
                                   double max_sd);

Chain dram_sample(const EstimationProblem& problem, const Estimate& init, std::size_t iterations,
                  std::uint64_t seed, const PosteriorOptions& options = {});

} // namespace ecop

#endif
