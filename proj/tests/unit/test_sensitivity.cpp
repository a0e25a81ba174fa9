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
#include "ecop/error.hpp"
#include "ecop/sensitivity.hpp"
#include "test_support.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace ecop;

namespace
{

SensitivitySpec unit_spec(std::size_t samples)
{
    SensitivitySpec s;
    for (const auto& name : SensitivitySpec::parameter_names()) {
        s.ranges.push_back({name, 0.0, 1.0});
    }
    s.ranges[6].upper = 0.9; // tau stays below 1
    s.ranges[7].upper = 0.9; // mu stays within its bound
    s.samples = samples;
    s.eval_times = {14.0};
    return s;
}

// Partial correlation from the inverse correlation matrix of the ranks:
// r_jy = -P_jy / sqrt(P_jj P_yy). Independent of the residual route.
double direct_prcc(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Eigen::Index j)
{
    const Eigen::Index p = x.cols();
    Eigen::MatrixXd r(x.rows(), p + 1);
    for (Eigen::Index c = 0; c < p; ++c) {
        r.col(c) = ranks(x.col(c));
    }
    r.col(p) = ranks(y);
    Eigen::MatrixXd centered = r.rowwise() - r.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered;
    Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
    Eigen::MatrixXd corr = cov.array() / (sd * sd.transpose()).array();
    Eigen::MatrixXd prec = corr.inverse();
    return -prec(j, p) / std::sqrt(prec(j, j) * prec(p, p));
}

} // namespace

TEST_CASE("latin hypercube stratifies a single parameter")
{
    SensitivitySpec s = unit_spec(10);
    for (std::size_t j = 1; j < s.ranges.size(); ++j) {
        s.ranges[j].upper = s.ranges[j].lower;
    }
    Eigen::MatrixXd m = lhs_sample(s, 4);
    REQUIRE(m.rows() == 10);
    REQUIRE(m.cols() == 8);
    CHECK(m.col(3).isZero());
    for (Eigen::Index c = 0; c < 1; ++c) {
        std::vector<int> hits(10, 0);
        for (Eigen::Index i = 0; i < 10; ++i) {
            int bin = static_cast<int>(std::floor(m(i, c) * 10.0));
            REQUIRE(bin >= 0);
            REQUIRE(bin < 10);
            ++hits[static_cast<std::size_t>(bin)];
        }
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
    CHECK(lhs_sample(s, 4) == m);
    CHECK_FALSE(lhs_sample(s, 5) == m);
}

TEST_CASE("latin hypercube marginals pass Kolmogorov-Smirnov")
{
    SensitivitySpec s = unit_spec(1000);
    Eigen::MatrixXd m = lhs_sample(s, 12);
    const double critical = 1.628 / std::sqrt(1000.0); // alpha = 0.01
    for (Eigen::Index c = 0; c < 6; ++c) {
        std::vector<double> v(m.col(c).data(), m.col(c).data() + m.rows());
        std::sort(v.begin(), v.end());
        double d = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            double n = static_cast<double>(v.size());
            d = std::max({d, std::abs((i + 1) / n - v[i]), std::abs(v[i] - i / n)});
        }
        CHECK(d < critical);
    }
}

TEST_CASE("ranks average ties")
{
    Eigen::VectorXd v(5);
    v << 3.0, 1.0, 3.0, 2.0, 5.0;
    Eigen::VectorXd r = ranks(v);
    CHECK(r[0] == 3.5);
    CHECK(r[1] == 1.0);
    CHECK(r[2] == 3.5);
    CHECK(r[3] == 2.0);
    CHECK(r[4] == 5.0);
}

TEST_CASE("PRCC matches the direct partial rank correlation")
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> z(0.0, 1.0);
    const int n = 200;
    Eigen::MatrixXd x(n, 3);
    Eigen::MatrixXd y(n, 2);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = z(rng);
        x(i, 1) = z(rng) + 0.3 * x(i, 0);
        x(i, 2) = z(rng);
        y(i, 0) = 2.0 * x(i, 0) - 3.0 * x(i, 1) + z(rng);
        y(i, 1) = std::exp(x(i, 2)) + 0.5 * z(rng);
    }
    Prcc p = prcc(x, y);
    for (Eigen::Index k = 0; k < 2; ++k) {
        for (Eigen::Index j = 0; j < 3; ++j) {
            CHECK(std::abs(p.coefficients(j, k) - direct_prcc(x, y.col(k), j)) < 1e-10);
        }
    }
    CHECK(p.coefficients(0, 0) > 0.0);
    CHECK(p.coefficients(1, 0) < 0.0);
    CHECK(std::abs(p.coefficients(1, 0)) > std::abs(p.coefficients(0, 0)));
}

TEST_CASE("PRCC identity and null cases")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = 1000;
    Eigen::MatrixXd x(n, 3);
    Eigen::MatrixXd y(n, 2);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 3; ++j) {
            x(i, j) = u(rng);
        }
        y(i, 0) = x(i, 0);
        y(i, 1) = u(rng);
    }
    Prcc p = prcc(x, y);
    CHECK(p.coefficients(0, 0) > 0.99);
    for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(std::abs(p.coefficients(j, 1)) < 0.1);
    }
}

TEST_CASE("constant columns are excluded and flagged")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd x(50, 2);
    Eigen::MatrixXd y(50, 2);
    for (int i = 0; i < 50; ++i) {
        x(i, 0) = u(rng);
        x(i, 1) = 0.5;
        y(i, 0) = x(i, 0) + 0.1 * u(rng);
        y(i, 1) = 1.0;
    }
    Prcc p = prcc(x, y);
    CHECK_FALSE(p.excluded[0]);
    CHECK(p.excluded[1]);
    CHECK(p.coefficients(1, 0) == 0.0);
    CHECK(p.constant_output[1]);
    CHECK(p.coefficients(0, 1) == 0.0);
    CHECK_FALSE(p.notes.empty());
}

TEST_CASE("zero-width mu range is excluded in a model run")
{
    DiseaseParams d;
    PolicyParams pol;
    pol.xi = 0.278;
    pol.tau = 0.6218;
    pol.schedule = MuSchedule::covering(kDefaultHorizon);
    SensitivitySpec s = SensitivitySpec::defaults(d, pol);
    s.ranges[7] = {"mu", 0.0, 0.0};
    s.samples = 120;
    SensitivityResult r = run_sensitivity(s, 51710000.0, 3);
    CHECK(r.excluded[7]);
    CHECK(r.samples_used + r.samples_dropped == 120);
    CHECK(r.eval_times.size() == 24);
    CHECK(r.coefficient(SensitivityOutput::cumulative_confirmed, "mu", 0) == 0.0);
    std::ostringstream out;
    write_prcc_csv(out, r);
    CHECK(out.str().rfind("output,parameter,time,prcc\n", 0) == 0);
    // Deterministic for a fixed seed regardless of thread scheduling.
    SensitivityResult again = run_sensitivity(s, 51710000.0, 3);
    CHECK(again.coefficients[0] == r.coefficients[0]);
}

TEST_CASE("sensitivity spec validation")
{
    SensitivitySpec s = unit_spec(10);
    s.ranges[6].upper = 1.0;
    CHECK_ERROR_KIND(s.validate(), ErrorKind::config);
    s = unit_spec(10);
    s.ranges.pop_back();
    CHECK_ERROR_KIND(s.validate(), ErrorKind::config);
    s = unit_spec(10);
    std::swap(s.ranges[0], s.ranges[1]);
    CHECK_ERROR_KIND(s.validate(), ErrorKind::config);
}
