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
#include "ecop/calibration.hpp"

#include "ecop/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ecop
{

EstimationProblem EstimationProblem::build(const DiseaseParams& disease, double population, CaseSeries data,
                                           double xi_max, double knot_spacing, std::size_t pinned_knots,
                                           double step)
{
    data.validate_dates();
    if (data.size() < 2) {
        fail(ErrorKind::config, "calibration needs at least two observation days");
    }
    if (!(population > 0.0)) {
        fail(ErrorKind::config, "population must be positive");
    }
    EstimationProblem p;
    p.fixed = disease;
    p.initial = StateVector::susceptible_only(population);
    p.data = std::move(data);
    p.knot_spacing = knot_spacing;
    p.step = step;
    p.knot_count = MuSchedule::covering(p.horizon(), 0.0, knot_spacing).size();
    p.pinned_knots = std::min(pinned_knots, p.knot_count);

    p.theta_spec.push_back({"xi", 0.0, xi_max});
    p.theta_spec.push_back({"tau", 0.0, kMaxMu});
    for (std::size_t k = p.pinned_knots; k < p.knot_count; ++k) {
        p.theta_spec.push_back({"mu" + std::to_string(k), 0.0, kMaxMu});
    }
    p.validate();
    return p;
}

void EstimationProblem::validate() const
{
    fixed.validate();
    data.validate_dates();
    if (theta_spec.size() != 2 + knot_count - pinned_knots) {
        fail(ErrorKind::config, "parameter descriptors do not match the knot layout");
    }
    for (const auto& spec : theta_spec) {
        if (!std::isfinite(spec.lower) || !std::isfinite(spec.upper) || !(spec.lower < spec.upper)) {
            fail(ErrorKind::config, "parameter '" + spec.name + "' needs finite bounds with lower < upper");
        }
    }
    double per_day = 1.0 / step;
    if (!(step > 0.0) || std::abs(per_day - std::round(per_day)) > 1e-12) {
        fail(ErrorKind::config, "calibration step must divide one day");
    }
    if (!MuSchedule::covering(horizon(), 0.0, knot_spacing).covers(horizon())) {
        fail(ErrorKind::config, "knot layout does not cover the calibration window");
    }
}

Bounds EstimationProblem::bounds() const
{
    Bounds b;
    for (const auto& spec : theta_spec) {
        b.lower.push_back(spec.lower);
        b.upper.push_back(spec.upper);
    }
    return b;
}

PolicyParams EstimationProblem::policy(std::span<const double> theta) const
{
    if (theta.size() != dim()) {
        fail(ErrorKind::config, "theta has " + std::to_string(theta.size()) + " entries, expected " +
                                    std::to_string(dim()));
    }
    std::vector<double> knots(knot_count, 0.0);
    for (std::size_t k = pinned_knots; k < knot_count; ++k) {
        knots[k] = theta[2 + k - pinned_knots];
    }
    PolicyParams p;
    p.xi = theta[0];
    p.tau = theta[1];
    p.schedule = MuSchedule(std::move(knots), knot_spacing);
    return p;
}

std::vector<double> EstimationProblem::theta_of(double xi, double tau, const std::vector<double>& knots) const
{
    if (knots.size() != knot_count) {
        fail(ErrorKind::config, "knot vector length does not match the problem");
    }
    std::vector<double> theta{xi, tau};
    theta.insert(theta.end(), knots.begin() + static_cast<long>(pinned_knots), knots.end());
    return theta;
}

std::vector<double> residuals(std::span<const double> theta, const EstimationProblem& problem)
{
    Trajectory traj = simulate(problem.initial, problem.fixed, problem.policy(theta), problem.horizon(), problem.step);
    const auto per_day = static_cast<std::size_t>(std::lround(1.0 / problem.step));
    std::vector<double> r(problem.data.size());
    for (std::size_t k = 0; k < r.size(); ++k) {
        r[k] = traj.cumulative_confirmed[k * per_day] - problem.data.cumulative_confirmed[k];
    }
    return r;
}

double loss(std::span<const double> theta, const EstimationProblem& problem)
{
    std::vector<double> r;
    try {
        r = residuals(theta, problem);
    }
    catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        double w = (k == 0 || k + 1 == r.size()) ? 0.5 : 1.0;
        acc += w * r[k] * r[k];
    }
    double value = std::sqrt(acc);
    return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
}

Estimate de_optimize(const EstimationProblem& problem, std::size_t budget, std::uint64_t seed,
                     const DeOptions& options)
{
    problem.validate();
    auto objective = [&problem](std::span<const double> theta) { return loss(theta, problem); };
    DeResult r = de_minimize(objective, problem.bounds(), budget, seed, options);
    Estimate e;
    e.theta = std::move(r.best);
    e.loss_value = r.best_value;
    e.evaluations_used = r.evaluations;
    e.seed = seed;
    e.history = std::move(r.history);
    return e;
}

RestartResult run_restarts(const EstimationProblem& problem, std::size_t restarts, std::size_t budget_each,
                           std::uint64_t seed, const DeOptions& options)
{
    if (restarts == 0) {
        fail(ErrorKind::config, "restarts must be at least 1");
    }
    RestartResult out;
    for (std::size_t k = 0; k < restarts; ++k) {
        out.runs.push_back(de_optimize(problem, budget_each, seed + k, options));
        if (out.runs.back().loss_value < out.runs[out.best_index].loss_value) {
            out.best_index = k;
        }
    }
    return out;
}

double rms_residual(const EstimationProblem& problem, const Estimate& estimate)
{
    double span = problem.horizon();
    return estimate.loss_value / std::sqrt(span);
}

LogDensity log_posterior(const EstimationProblem& problem, const Estimate& center, double sigma_obs,
                         double prior_sd)
{
    if (!(sigma_obs > 0.0) || !(prior_sd > 0.0)) {
        fail(ErrorKind::config, "observation noise and prior scale must be positive");
    }
    return [&problem, mu = center.theta, sigma_obs, prior_sd](std::span<const double> theta) {
        double l = loss(theta, problem);
        if (!std::isfinite(l)) {
            return -std::numeric_limits<double>::infinity();
        }
        double lp = -0.5 * (l / sigma_obs) * (l / sigma_obs);
        for (std::size_t j = 0; j < theta.size(); ++j) {
            double z = (theta[j] - mu[j]) / prior_sd;
            lp -= 0.5 * z * z;
        }
        return lp;
    };
}

std::vector<double> laplace_scales(const LogDensity& density, const Bounds& bounds, std::span<const double> at,
                                   double max_sd)
{
    std::vector<double> x(at.begin(), at.end());
    double f0 = density(x);
    std::vector<double> sd(x.size(), max_sd);
    for (std::size_t j = 0; j < x.size(); ++j) {
        double h = 1e-4 * bounds.width(j);
        // Keep the three-point stencil inside the box.
        double c = std::clamp(x[j], bounds.lower[j] + h, bounds.upper[j] - h);
        auto eval = [&](double v) {
            std::vector<double> y = x;
            y[j] = v;
            return density(y);
        };
        double fc = c == x[j] ? f0 : eval(c);
        double curvature = -(eval(c + h) - 2.0 * fc + eval(c - h)) / (h * h);
        if (std::isfinite(curvature) && curvature > 0.0) {
            sd[j] = std::clamp(1.0 / std::sqrt(curvature), 1e-9 * bounds.width(j), max_sd);
        }
    }
    return sd;
}

Eigen::MatrixXd laplace_covariance(const LogDensity& density, const Bounds& bounds, std::span<const double> at,
                                   double max_sd)
{
    const std::size_t d = at.size();
    std::vector<double> h(d), c(d);
    for (std::size_t j = 0; j < d; ++j) {
        h[j] = 1e-4 * bounds.width(j);
        // Keep every stencil point inside the box.
        c[j] = std::clamp(at[j], bounds.lower[j] + h[j], bounds.upper[j] - h[j]);
    }
    auto eval = [&](std::size_t a, double da, std::size_t b, double db) {
        std::vector<double> y = c;
        y[a] += da * h[a];
        y[b] += db * h[b];
        return density(y);
    };
    const double f0 = density(c);
    Eigen::MatrixXd neg_hessian(d, d);
    for (std::size_t a = 0; a < d; ++a) {
        const auto ia = static_cast<Eigen::Index>(a);
        neg_hessian(ia, ia) = -(eval(a, 1, a, 0) - 2.0 * f0 + eval(a, -1, a, 0)) / (h[a] * h[a]);
        for (std::size_t b = a + 1; b < d; ++b) {
            const auto ib = static_cast<Eigen::Index>(b);
            double v = -(eval(a, 1, b, 1) - eval(a, 1, b, -1) - eval(a, -1, b, 1) + eval(a, -1, b, -1)) /
                       (4.0 * h[a] * h[b]);
            neg_hessian(ia, ib) = v;
            neg_hessian(ib, ia) = v;
        }
    }

    Eigen::MatrixXd cov;
    Eigen::LLT<Eigen::MatrixXd> llt(neg_hessian);
    if (neg_hessian.allFinite() && llt.info() == Eigen::Success) {
        cov = llt.solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
    }
    if (cov.size() == 0 || !cov.allFinite() || Eigen::LLT<Eigen::MatrixXd>(cov).info() != Eigen::Success) {
        std::vector<double> sd = laplace_scales(density, bounds, at, max_sd);
        Eigen::VectorXd var = Eigen::Map<const Eigen::VectorXd>(sd.data(), static_cast<Eigen::Index>(d));
        return var.cwiseProduct(var).asDiagonal();
    }
    // Cap marginal variances while keeping the correlation structure.
    Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
    Eigen::VectorXd capped = sd.cwiseMin(max_sd).cwiseMax(1e-12);
    Eigen::VectorXd ratio = capped.cwiseQuotient(sd);
    return ratio.asDiagonal() * cov * ratio.asDiagonal();
}

Chain dram_sample(const EstimationProblem& problem, const Estimate& init, std::size_t iterations, std::uint64_t seed,
                  const PosteriorOptions& options)
{
    problem.validate();
    Bounds bounds = problem.bounds();
    if (!bounds.contains(init.theta)) {
        fail(ErrorKind::config, "initial estimate lies outside the parameter bounds");
    }
    double sigma = options.sigma_obs.value_or(rms_residual(problem, init));
    if (!(sigma > 0.0)) {
        // A perfect fit leaves no residual scale; fall back to a tiny fraction of the data.
        double peak = *std::max_element(problem.data.cumulative_confirmed.begin(),
                                        problem.data.cumulative_confirmed.end());
        sigma = 1e-9 * std::max(peak, 1.0);
    }
    LogDensity density = log_posterior(problem, init, sigma, options.prior_sd);
    if (!std::isfinite(density(init.theta))) {
        fail(ErrorKind::runtime, "log posterior is not finite at the initial estimate");
    }
    Eigen::MatrixXd proposal = laplace_covariance(density, bounds, init.theta, options.prior_sd);
    proposal *= 2.38 * 2.38 / static_cast<double>(bounds.dim());
    return dram_sample(density, bounds, init.theta, proposal, iterations, seed, options.dram);
}

} // namespace ecop
