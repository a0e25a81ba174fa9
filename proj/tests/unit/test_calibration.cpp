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
#include "ecop/de.hpp"
#include "ecop/dram.hpp"
#include "ecop/error.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace ecop;

namespace
{

double sphere(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) {
        s += v * v;
    }
    return s;
}

double rosenbrock(std::span<const double> x)
{
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        s += 100.0 * std::pow(x[i + 1] - x[i] * x[i], 2) + std::pow(1.0 - x[i], 2);
    }
    return s;
}

constexpr double kKorea = 51710000.0;

// 56-day synthetic world: knots 0..4, the first two pinned.
struct Synthetic {
    EstimationProblem problem;
    std::vector<double> truth;
};

Synthetic synthetic_problem(double noise = 0.0, std::uint64_t seed = 0)
{
    DiseaseParams d;
    auto start = parse_date("2020-01-20");
    auto proto = EstimationProblem::build(d, kKorea, CaseSeries::daily(start, std::vector<double>(57, 0.0)));
    std::vector<double> knots = {0.0, 0.0, 0.3, 0.6, 0.5};
    auto truth = proto.theta_of(0.278, 0.6218, knots);
    auto clean = residuals(truth, proto);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, noise);
    for (double& v : clean) {
        v += noise > 0.0 ? n(rng) : 0.0;
    }
    return {EstimationProblem::build(d, kKorea, CaseSeries::daily(start, clean)), truth};
}

} // namespace

TEST_CASE("DE solves the 10-D sphere")
{
    auto r = de_minimize(sphere, Bounds::uniform(10, -5.0, 5.0), 100000, 1);
    CHECK(r.best_value < 1e-8);
    CHECK(r.evaluations <= 100000);
    for (std::size_t g = 1; g < r.history.size(); ++g) {
        CHECK(r.history[g] <= r.history[g - 1]);
    }
}

TEST_CASE("DE solves the 5-D Rosenbrock")
{
    for (std::uint64_t seed : {0u, 1u}) {
        auto r = de_minimize(rosenbrock, Bounds::uniform(5, -5.0, 5.0), 100000, seed);
        CHECK(r.best_value < 1e-4);
    }
}

TEST_CASE("DE is deterministic per seed and respects bounds")
{
    Bounds b({-1.0, 2.0}, {0.5, 3.0});
    auto f = [](std::span<const double> x) { return std::pow(x[0] - 10.0, 2) + std::pow(x[1], 2); };
    auto a = de_minimize(f, b, 5000, 42);
    auto c = de_minimize(f, b, 5000, 42);
    CHECK(a.best == c.best);
    CHECK(a.history == c.history);
    CHECK(b.contains(a.best));
    // The optimum sits on the corner (0.5, 2).
    CHECK(a.best[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(a.best[1] == doctest::Approx(2.0).epsilon(1e-6));
    double psum = a.operator_probabilities[0] + a.operator_probabilities[1] + a.operator_probabilities[2];
    CHECK(psum == doctest::Approx(1.0));
}

TEST_CASE("synthetic data reproduce themselves")
{
    Synthetic s = synthetic_problem();
    double norm = 0.0;
    for (double v : s.problem.data.cumulative_confirmed) {
        norm += v * v;
    }
    CHECK(loss(s.truth, s.problem) < 1e-6 * std::sqrt(norm));

    auto suppressed = s.truth;
    for (std::size_t j = 2; j < suppressed.size(); ++j) {
        suppressed[j] = 0.95;
    }
    // Data drawn with mu = 0 cannot be explained by maximal suppression.
    auto open = synthetic_problem();
    auto open_truth = open.problem.theta_of(0.278, 0.6218, {0, 0, 0, 0, 0});
    auto open_data = residuals(open_truth, open.problem);
    for (std::size_t k = 0; k < open_data.size(); ++k) {
        open_data[k] += open.problem.data.cumulative_confirmed[k];
    }
    auto p0 = EstimationProblem::build(DiseaseParams{}, kKorea,
                                       CaseSeries::daily(parse_date("2020-01-20"), open_data));
    CHECK(loss(suppressed, p0) > loss(open_truth, p0));

    auto bumped = s.truth;
    bumped[0] += 1.0;
    CHECK(loss(bumped, s.problem) > loss(s.truth, s.problem));
}

TEST_CASE("estimation problem layout")
{
    Synthetic s = synthetic_problem();
    CHECK(s.problem.dim() == 5);
    CHECK(s.problem.theta_spec[0].name == "xi");
    CHECK(s.problem.theta_spec[1].name == "tau");
    CHECK(s.problem.theta_spec[2].name == "mu2");
    PolicyParams p = s.problem.policy(s.truth);
    CHECK(p.schedule.knots()[0] == 0.0);
    CHECK(p.schedule.knots()[1] == 0.0);
    CHECK(p.schedule.knots()[3] == 0.6);
    CHECK(p.xi == 0.278);
    CHECK_ERROR_KIND(EstimationProblem::build(DiseaseParams{}, kKorea,
                                              CaseSeries::daily(parse_date("2020-01-20"), {1.0})),
                     ErrorKind::config);
}

TEST_CASE("restarts pick the argmin and reduce to one run")
{
    Synthetic s = synthetic_problem(0.5, 3);
    auto one = run_restarts(s.problem, 1, 3000, 5);
    auto direct = de_optimize(s.problem, 3000, 5);
    CHECK(one.best().theta == direct.theta);
    CHECK(one.best().loss_value == direct.loss_value);

    auto many = run_restarts(s.problem, 4, 3000, 5);
    REQUIRE(many.runs.size() == 4);
    for (const auto& r : many.runs) {
        CHECK(many.best().loss_value <= r.loss_value);
        CHECK(r.evaluations_used <= 3000);
    }
    CHECK(many.runs[0].theta == direct.theta);
}

TEST_CASE("DE recovers tau on a short synthetic window")
{
    Synthetic s = synthetic_problem(0.5, 11);
    auto e = de_optimize(s.problem, 40000, 2);
    CHECK(std::abs(e.theta[1] - 0.6218) < 0.05);
    CHECK(std::abs(e.theta[0] - 0.278) < 0.1);
}

TEST_CASE("DRAM samples a correlated Gaussian")
{
    const Eigen::Vector2d mean(1.0, -2.0);
    Eigen::Matrix2d cov;
    cov << 1.0, 0.8, 0.8, 2.0;
    const Eigen::Matrix2d prec = cov.inverse();
    LogDensity target = [&](std::span<const double> x) {
        Eigen::Vector2d d(x[0] - mean[0], x[1] - mean[1]);
        return -0.5 * d.dot(prec * d);
    };
    std::vector<double> init = {0.0, 0.0};
    std::vector<double> sd = {0.5, 0.5};
    Chain c = dram_sample(target, Bounds::uniform(2, -50.0, 50.0), init, sd, 200000, 17);
    ChainDiagnostics dg = chain_diagnostics(c);
    Eigen::MatrixXd post = c.posterior();

    // Monte Carlo standard error from 50 batch means.
    const Eigen::Index batches = 50;
    const Eigen::Index len = post.rows() / batches;
    for (int j = 0; j < 2; ++j) {
        std::vector<double> m(batches);
        for (Eigen::Index b = 0; b < batches; ++b) {
            m[b] = post.col(j).segment(b * len, len).mean();
        }
        double mm = std::accumulate(m.begin(), m.end(), 0.0) / batches;
        double var = 0.0;
        for (double v : m) {
            var += (v - mm) * (v - mm);
        }
        double se = std::sqrt(var / (batches - 1) / batches);
        CHECK(std::abs(dg.mean[j] - mean[j]) < 3.0 * se);
    }
    Eigen::MatrixXd centered = post.rowwise() - post.colwise().mean();
    Eigen::MatrixXd sample_cov = centered.transpose() * centered / static_cast<double>(post.rows() - 1);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            CHECK(std::abs(sample_cov(i, j) - cov(i, j)) <= 0.15 * std::abs(cov(i, j)));
        }
    }
    CHECK(c.acceptance_rate > 0.1);
    CHECK(c.acceptance_rate < 0.9);
}

TEST_CASE("DRAM never leaves the bounds")
{
    LogDensity flat = [](std::span<const double>) { return 0.0; };
    Bounds b({0.0, -1.0}, {1.0, 0.0});
    std::vector<double> init = {0.5, -0.5};
    std::vector<double> sd = {2.0, 2.0};
    Chain c = dram_sample(flat, b, init, sd, 20000, 3);
    for (Eigen::Index i = 0; i < c.samples.rows(); ++i) {
        std::vector<double> row = {c.samples(i, 0), c.samples(i, 1)};
        CHECK(b.contains(row));
    }
}

TEST_CASE("DRAM acceptance on the synthetic problem after adaptation")
{
    // 112-day window, nine knots, noise 0.5 persons: the recovery experiment's setting.
    DiseaseParams d;
    auto start = parse_date("2020-01-20");
    auto proto = EstimationProblem::build(d, kKorea, CaseSeries::daily(start, std::vector<double>(113, 0.0)));
    auto truth = proto.theta_of(0.278, 0.6218, {0, 0, 0.3, 0.6, 0.7, 0.5, 0.6, 0.7, 0.6});
    auto data = residuals(truth, proto);
    std::mt19937_64 rng(1000);
    std::normal_distribution<double> noise(0.0, 0.5);
    for (double& v : data) {
        v += noise(rng);
    }
    auto problem = EstimationProblem::build(d, kKorea, CaseSeries::daily(start, data));
    auto e = de_optimize(problem, 100000, 0);
    Chain c = dram_sample(problem, e, 50000, 0);
    CHECK(c.acceptance_rate >= 0.1);
    CHECK(c.acceptance_rate <= 0.6);
    Bounds b = problem.bounds();
    for (Eigen::Index i = 0; i < c.samples.rows(); ++i) {
        Eigen::VectorXd r = c.samples.row(i);
        CHECK(b.contains(std::vector<double>(r.data(), r.data() + r.size())));
    }
}

TEST_CASE("chain correlation diagnostics")
{
    Chain c;
    const int n = 100000;
    c.samples = Eigen::MatrixXd(n, 4);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        double a = z(rng);
        c.samples(i, 0) = a;
        c.samples(i, 1) = 3.0 * a + 1.0;
        c.samples(i, 2) = z(rng);
        c.samples(i, 3) = z(rng);
    }
    c.iterations = n;
    c.burn_in = 0;
    ChainDiagnostics dg = chain_diagnostics(c);
    CHECK(dg.correlation(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(dg.correlation(2, 3)) < 0.02);
    CHECK(std::abs(dg.correlation(0, 2)) < 0.02);
    for (int j = 0; j < 4; ++j) {
        CHECK(dg.correlation(j, j) == 1.0);
    }
    CHECK(dg.lower95[2] == doctest::Approx(-1.96).epsilon(0.03));
    CHECK(dg.upper95[2] == doctest::Approx(1.96).epsilon(0.03));
}

TEST_CASE("quantile interpolates order statistics")
{
    CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
    CHECK(quantile({5}, 0.3) == 5.0);
    CHECK(quantile({3, 1, 2}, 0.0) == 1.0);
    CHECK(quantile({3, 1, 2}, 1.0) == 3.0);
}
