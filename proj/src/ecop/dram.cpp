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
#include "ecop/dram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ecop
{

namespace
{

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double evaluate(const LogDensity& log_density, const Bounds& bounds, const Eigen::VectorXd& x)
{
    std::span<const double> view(x.data(), static_cast<std::size_t>(x.size()));
    if (!bounds.contains(view)) {
        return kNegInf;
    }
    double lp = log_density(view);
    return std::isnan(lp) ? kNegInf : lp;
}

double accept_prob(double lp_to, double lp_from)
{
    if (lp_to == kNegInf) {
        return 0.0;
    }
    return std::min(1.0, std::exp(lp_to - lp_from));
}

} // namespace

std::size_t Chain::first_posterior_row() const noexcept
{
    return (burn_in + thin - 1) / thin;
}

Eigen::MatrixXd Chain::posterior() const
{
    auto first = static_cast<Eigen::Index>(first_posterior_row());
    first = std::min(first, samples.rows());
    return samples.bottomRows(samples.rows() - first);
}

Chain dram_sample(const LogDensity& log_density, const Bounds& bounds, std::span<const double> init,
                  std::span<const double> initial_sd, std::size_t iterations, std::uint64_t seed,
                  const DramOptions& options)
{
    if (initial_sd.size() != bounds.dim()) {
        fail(ErrorKind::config, "proposal scales must match the parameter count");
    }
    Eigen::VectorXd var(static_cast<Eigen::Index>(initial_sd.size()));
    for (std::size_t j = 0; j < initial_sd.size(); ++j) {
        var[static_cast<Eigen::Index>(j)] = initial_sd[j] * initial_sd[j];
    }
    return dram_sample(log_density, bounds, init, Eigen::MatrixXd(var.asDiagonal()), iterations, seed, options);
}

Chain dram_sample(const LogDensity& log_density, const Bounds& bounds, std::span<const double> init,
                  const Eigen::MatrixXd& initial_covariance, std::size_t iterations, std::uint64_t seed,
                  const DramOptions& options)
{
    bounds.validate();
    const auto d = static_cast<Eigen::Index>(bounds.dim());
    if (init.size() != bounds.dim() || initial_covariance.rows() != d || initial_covariance.cols() != d) {
        fail(ErrorKind::config, "initial state and proposal covariance must match the parameter count");
    }
    if (iterations == 0 || options.thin == 0) {
        fail(ErrorKind::config, "iterations and thin must be positive");
    }

    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(init.data(), d);
    double lp = evaluate(log_density, bounds, x);
    if (!std::isfinite(lp)) {
        fail(ErrorKind::runtime, "log posterior is not finite at the initial state");
    }

    Eigen::LLT<Eigen::MatrixXd> initial_llt(initial_covariance);
    if (initial_llt.info() != Eigen::Success || !initial_covariance.allFinite()) {
        fail(ErrorKind::config, "initial proposal covariance must be symmetric positive definite");
    }
    Eigen::MatrixXd chol = initial_llt.matrixL();
    Eigen::VectorXd base_var = initial_covariance.diagonal();
    const double scale = 2.38 * 2.38 / static_cast<double>(d);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Chain chain;
    chain.iterations = iterations;
    chain.thin = options.thin;
    chain.burn_in = static_cast<std::size_t>(std::floor(options.burn_in_fraction * static_cast<double>(iterations)));
    const std::size_t stored = (iterations + options.thin - 1) / options.thin;
    chain.samples.resize(static_cast<Eigen::Index>(stored), d);
    chain.log_posterior.reserve(stored);

    // Running moments of the chain for covariance adaptation.
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(d, d);
    std::size_t seen = 0;

    std::size_t accepted = 0;
    std::size_t first_rejects = 0;
    std::size_t rescued = 0;
    Eigen::VectorXd z1(d), z2(d);

    for (std::size_t it = 0; it < iterations; ++it) {
        for (Eigen::Index j = 0; j < d; ++j) {
            z1[j] = normal(rng);
        }
        Eigen::VectorXd y1 = x + chol * z1;
        double lp1 = evaluate(log_density, bounds, y1);
        double a1 = accept_prob(lp1, lp);
        if (unit(rng) < a1) {
            x = std::move(y1);
            lp = lp1;
            ++accepted;
        }
        else {
            ++first_rejects;
            for (Eigen::Index j = 0; j < d; ++j) {
                z2[j] = normal(rng);
            }
            Eigen::VectorXd y2 = x + options.dr_scale * (chol * z2);
            double lp2 = evaluate(log_density, bounds, y2);
            double a2 = 0.0;
            if (lp2 != kNegInf) {
                double a1_rev = accept_prob(lp1, lp2);
                if (a1_rev < 1.0) {
                    // q1 is Gaussian with the current covariance; normalizers cancel.
                    Eigen::VectorXd w = chol.triangularView<Eigen::Lower>().solve(y1 - y2);
                    double log_q_rev = -0.5 * w.squaredNorm();
                    double log_q_fwd = -0.5 * z1.squaredNorm();
                    double log_num = lp2 + log_q_rev + std::log1p(-a1_rev);
                    double log_den = lp + log_q_fwd + std::log1p(-a1);
                    a2 = std::min(1.0, std::exp(log_num - log_den));
                }
            }
            if (a2 > 0.0 && unit(rng) < a2) {
                x = std::move(y2);
                lp = lp2;
                ++accepted;
                ++rescued;
            }
        }

        ++seen;
        Eigen::VectorXd delta = x - mean;
        mean += delta / static_cast<double>(seen);
        m2 += delta * (x - mean).transpose();

        if (it + 1 >= options.adapt_start && (it + 1) % options.adapt_interval == 0 && seen > 1) {
            Eigen::MatrixXd cov = m2 / static_cast<double>(seen - 1);
            cov.diagonal() += options.epsilon * base_var;
            Eigen::LLT<Eigen::MatrixXd> llt(scale * cov);
            if (llt.info() == Eigen::Success) {
                chol = llt.matrixL();
            }
        }

        if (it % options.thin == 0) {
            chain.samples.row(static_cast<Eigen::Index>(it / options.thin)) = x.transpose();
            chain.log_posterior.push_back(lp);
        }
    }

    chain.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(iterations);
    chain.second_stage_rate =
        first_rejects > 0 ? static_cast<double>(rescued) / static_cast<double>(first_rejects) : 0.0;
    return chain;
}

double quantile(std::vector<double> values, double p)
{
    if (values.empty()) {
        fail(ErrorKind::config, "quantile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, values.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

ChainDiagnostics chain_diagnostics(const Chain& chain)
{
    Eigen::MatrixXd post = chain.posterior();
    if (post.rows() < 2) {
        fail(ErrorKind::config, "chain has fewer than two post-burn-in samples");
    }
    const Eigen::Index d = post.cols();
    const auto n = static_cast<double>(post.rows());

    ChainDiagnostics diag;
    diag.posterior_samples = static_cast<std::size_t>(post.rows());
    Eigen::VectorXd mean = post.colwise().mean();
    Eigen::MatrixXd centered = post.rowwise() - mean.transpose();
    Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1.0);

    diag.correlation = Eigen::MatrixXd::Zero(d, d);
    diag.zero_variance.assign(static_cast<std::size_t>(d), false);
    for (Eigen::Index j = 0; j < d; ++j) {
        // Relative threshold: a column of identical values still has rounding-level variance.
        double scale = std::max(1.0, mean[j] * mean[j]);
        diag.zero_variance[static_cast<std::size_t>(j)] = !(cov(j, j) > 1e-24 * scale);
    }
    for (Eigen::Index a = 0; a < d; ++a) {
        diag.correlation(a, a) = 1.0;
        for (Eigen::Index b = a + 1; b < d; ++b) {
            double r = 0.0;
            if (!diag.zero_variance[static_cast<std::size_t>(a)] &&
                !diag.zero_variance[static_cast<std::size_t>(b)]) {
                r = std::clamp(cov(a, b) / std::sqrt(cov(a, a) * cov(b, b)), -1.0, 1.0);
            }
            diag.correlation(a, b) = r;
            diag.correlation(b, a) = r;
        }
    }

    for (Eigen::Index j = 0; j < d; ++j) {
        std::vector<double> col(post.col(j).data(), post.col(j).data() + post.rows());
        diag.mean.push_back(mean[j]);
        diag.sd.push_back(std::sqrt(std::max(cov(j, j), 0.0)));
        diag.lower95.push_back(quantile(col, 0.025));
        diag.upper95.push_back(quantile(col, 0.975));
    }
    return diag;
}

} // namespace ecop
