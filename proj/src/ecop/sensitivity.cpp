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
#include "ecop/sensitivity.hpp"

#include "ecop/error.hpp"
#include "ecop/format.hpp"
#include "ecop/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

namespace ecop
{

namespace
{

enum Param : std::size_t { p_beta, p_kappa, p_alpha, p_gamma, p_fatality, p_xi, p_tau, p_mu };

// Tolerance for treating a centred rank column as linearly dependent.
constexpr double kRankTolerance = 1e-10;

} // namespace

const char* to_string(SensitivityOutput output) noexcept
{
    return output == SensitivityOutput::cumulative_confirmed ? "cumulative_confirmed" : "infections";
}

SensitivityOutput sensitivity_output_from(const std::string& name)
{
    if (name == "cumulative_confirmed") {
        return SensitivityOutput::cumulative_confirmed;
    }
    if (name == "infections") {
        return SensitivityOutput::infections;
    }
    fail(ErrorKind::config, "unknown sensitivity output '" + name + "'");
}

const std::vector<std::string>& SensitivitySpec::parameter_names()
{
    static const std::vector<std::string> names{"beta", "kappa", "alpha", "gamma", "fatality", "xi", "tau", "mu"};
    return names;
}

SensitivitySpec SensitivitySpec::defaults(const DiseaseParams& disease, const PolicyParams& policy, double horizon)
{
    disease.validate();
    policy.validate();
    auto around = [](const std::string& name, double v, double cap) {
        return ParameterRange{name, 0.5 * v, std::min(1.5 * v, cap)};
    };
    constexpr double inf = std::numeric_limits<double>::infinity();
    SensitivitySpec spec;
    spec.ranges = {
        around("beta", disease.r0 * policy.confirmation_rate(disease), inf),
        around("kappa", disease.kappa, inf),
        around("alpha", disease.alpha, inf),
        around("gamma", disease.gamma, inf),
        around("fatality", disease.fatality, 1.0),
        around("xi", policy.xi, inf),
        around("tau", policy.tau, kMaxMu),
        {"mu", 0.0, kMaxMu},
    };
    for (double t = 14.0; t <= horizon + 1e-9; t += 14.0) {
        spec.eval_times.push_back(t);
    }
    return spec;
}

std::size_t SensitivitySpec::varied_count() const
{
    return static_cast<std::size_t>(
        std::count_if(ranges.begin(), ranges.end(), [](const ParameterRange& r) { return r.width() > 0.0; }));
}

void SensitivitySpec::validate() const
{
    const auto& names = parameter_names();
    if (ranges.size() != names.size()) {
        fail(ErrorKind::config, "sensitivity needs exactly " + std::to_string(names.size()) + " parameter ranges");
    }
    for (std::size_t j = 0; j < ranges.size(); ++j) {
        const auto& r = ranges[j];
        if (r.name != names[j]) {
            fail(ErrorKind::config, "parameter range " + std::to_string(j) + " must be '" + names[j] + "', got '" +
                                        r.name + "'");
        }
        if (!std::isfinite(r.lower) || !std::isfinite(r.upper) || r.upper < r.lower) {
            fail(ErrorKind::config, "range for '" + r.name + "' must be finite with lower <= upper");
        }
    }
    if (ranges[p_tau].upper >= 1.0) {
        fail(ErrorKind::config, "tau range must stay below 1");
    }
    if (ranges[p_mu].lower < 0.0 || ranges[p_mu].upper > kMaxMu) {
        fail(ErrorKind::config, "mu range must lie within [0, 0.95]");
    }
    std::size_t varied = varied_count();
    if (varied == 0) {
        fail(ErrorKind::config, "at least one parameter range must have positive width");
    }
    if (samples < 10 * varied) {
        fail(ErrorKind::config, "need at least " + std::to_string(10 * varied) + " samples for " +
                                    std::to_string(varied) + " varied parameters");
    }
    if (outputs.empty()) {
        fail(ErrorKind::config, "no sensitivity outputs selected");
    }
    if (eval_times.empty()) {
        fail(ErrorKind::config, "no evaluation times given");
    }
    for (std::size_t k = 0; k < eval_times.size(); ++k) {
        if (!(eval_times[k] > 0.0) || !std::isfinite(eval_times[k]) || (k > 0 && eval_times[k] <= eval_times[k - 1])) {
            fail(ErrorKind::config, "evaluation times must be positive and strictly increasing");
        }
    }
}

Eigen::MatrixXd lhs_sample(const SensitivitySpec& spec, std::uint64_t seed)
{
    spec.validate();
    const auto n = static_cast<Eigen::Index>(spec.samples);
    const auto p = static_cast<Eigen::Index>(spec.ranges.size());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd out(n, p);
    std::vector<std::size_t> strata(spec.samples);
    for (Eigen::Index j = 0; j < p; ++j) {
        const auto& r = spec.ranges[static_cast<std::size_t>(j)];
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        std::shuffle(strata.begin(), strata.end(), rng);
        for (Eigen::Index i = 0; i < n; ++i) {
            double u = (static_cast<double>(strata[static_cast<std::size_t>(i)]) + unit(rng)) / static_cast<double>(n);
            out(i, j) = std::min(r.lower + u * r.width(), r.upper);
        }
    }
    return out;
}

Eigen::VectorXd ranks(const Eigen::Ref<const Eigen::VectorXd>& values)
{
    const auto n = static_cast<std::size_t>(values.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[static_cast<Eigen::Index>(a)] < values[static_cast<Eigen::Index>(b)];
    });
    Eigen::VectorXd r(values.size());
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[static_cast<Eigen::Index>(order[j])] == values[static_cast<Eigen::Index>(order[i])]) {
            ++j;
        }
        double avg = 0.5 * static_cast<double>(i + j + 1);
        for (std::size_t k = i; k < j; ++k) {
            r[static_cast<Eigen::Index>(order[k])] = avg;
        }
        i = j;
    }
    return r;
}

Prcc prcc(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& outputs)
{
    const Eigen::Index n = samples.rows();
    const Eigen::Index p = samples.cols();
    const Eigen::Index m = outputs.cols();
    if (outputs.rows() != n) {
        fail(ErrorKind::config, "samples and outputs must have the same number of rows");
    }
    if (n < 3 || p < 1 || m < 1) {
        fail(ErrorKind::config, "PRCC needs at least three rows, one parameter and one output");
    }

    // Centred ranks; regressions then need no intercept column.
    auto centred_ranks = [n](const Eigen::MatrixXd& x) {
        Eigen::MatrixXd r(n, x.cols());
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            r.col(j) = ranks(x.col(j));
            r.col(j).array() -= 0.5 * static_cast<double>(n + 1);
        }
        return r;
    };
    Eigen::MatrixXd rx = centred_ranks(samples);
    Eigen::MatrixXd ry = centred_ranks(outputs);

    Prcc out;
    out.coefficients = Eigen::MatrixXd::Zero(p, m);
    out.excluded.assign(static_cast<std::size_t>(p), false);
    out.constant_output.assign(static_cast<std::size_t>(m), false);

    std::vector<Eigen::Index> kept;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (rx.col(j).squaredNorm() == 0.0) {
            out.excluded[static_cast<std::size_t>(j)] = true;
            out.notes.push_back("parameter " + std::to_string(j) + " is constant; excluded");
        }
        else {
            kept.push_back(j);
        }
    }
    for (Eigen::Index k = 0; k < m; ++k) {
        if (ry.col(k).squaredNorm() == 0.0) {
            out.constant_output[static_cast<std::size_t>(k)] = true;
        }
    }

    // Drop parameters whose ranks are linear combinations of the others.
    if (kept.size() > 1) {
        Eigen::MatrixXd design(n, static_cast<Eigen::Index>(kept.size()));
        for (std::size_t c = 0; c < kept.size(); ++c) {
            design.col(static_cast<Eigen::Index>(c)) = rx.col(kept[c]).normalized();
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        qr.setThreshold(kRankTolerance);
        if (qr.rank() < design.cols()) {
            std::vector<bool> keep(kept.size(), false);
            for (Eigen::Index c = 0; c < qr.rank(); ++c) {
                keep[static_cast<std::size_t>(qr.colsPermutation().indices()[c])] = true;
            }
            std::vector<Eigen::Index> reduced;
            for (std::size_t c = 0; c < kept.size(); ++c) {
                if (keep[c]) {
                    reduced.push_back(kept[c]);
                }
                else {
                    out.excluded[static_cast<std::size_t>(kept[c])] = true;
                    out.notes.push_back("parameter " + std::to_string(kept[c]) +
                                        " is collinear with other parameters; excluded");
                }
            }
            kept = std::move(reduced);
        }
    }

    for (std::size_t c = 0; c < kept.size(); ++c) {
        const Eigen::Index j = kept[c];
        Eigen::VectorXd ex = rx.col(j);
        Eigen::MatrixXd ey = ry;
        if (kept.size() > 1) {
            Eigen::MatrixXd z(n, static_cast<Eigen::Index>(kept.size() - 1));
            Eigen::Index col = 0;
            for (std::size_t o = 0; o < kept.size(); ++o) {
                if (o != c) {
                    z.col(col++) = rx.col(kept[o]);
                }
            }
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
            ex -= z * qr.solve(ex);
            ey -= z * qr.solve(ey);
        }
        const double nx = ex.norm();
        for (Eigen::Index k = 0; k < m; ++k) {
            const double ny = ey.col(k).norm();
            if (out.constant_output[static_cast<std::size_t>(k)] || nx == 0.0 || ny == 0.0) {
                continue;
            }
            out.coefficients(j, k) = std::clamp(ex.dot(ey.col(k)) / (nx * ny), -1.0, 1.0);
        }
    }
    return out;
}

double SensitivityResult::coefficient(SensitivityOutput output, const std::string& parameter,
                                      std::size_t time_index) const
{
    auto o = std::find(outputs.begin(), outputs.end(), output);
    auto p = std::find(parameters.begin(), parameters.end(), parameter);
    if (o == outputs.end() || p == parameters.end() || time_index >= eval_times.size()) {
        fail(ErrorKind::not_found, "no PRCC entry for " + std::string(to_string(output)) + "/" + parameter);
    }
    return coefficients[static_cast<std::size_t>(o - outputs.begin())](p - parameters.begin(),
                                                                       static_cast<Eigen::Index>(time_index));
}

SensitivityResult run_sensitivity(const SensitivitySpec& spec, double population, std::uint64_t seed, double step,
                                  unsigned threads)
{
    spec.validate();
    if (!(population > 0.0)) {
        fail(ErrorKind::config, "population must be positive");
    }
    Eigen::MatrixXd x = lhs_sample(spec, seed);
    const std::size_t n = spec.samples;
    const std::size_t nt = spec.eval_times.size();
    const std::size_t no = spec.outputs.size();
    const double horizon = spec.eval_times.back();

    std::vector<std::optional<std::vector<double>>> rows(n);
    parallel_for(
        n,
        [&](std::size_t i) {
            const auto row = x.row(static_cast<Eigen::Index>(i));
            DiseaseParams d;
            d.kappa = row[p_kappa];
            d.alpha = row[p_alpha];
            d.gamma = row[p_gamma];
            d.fatality = row[p_fatality];
            d.r0 = row[p_beta] * (1.0 - row[p_tau]) / row[p_alpha];
            PolicyParams pol;
            pol.xi = row[p_xi];
            pol.tau = row[p_tau];
            pol.schedule = MuSchedule::covering(horizon, row[p_mu]);
            try {
                Trajectory traj = simulate(StateVector::susceptible_only(population), d, pol, horizon, step);
                std::vector<double> y(no * nt);
                for (std::size_t o = 0; o < no; ++o) {
                    const auto& series = spec.outputs[o] == SensitivityOutput::cumulative_confirmed
                                             ? traj.cumulative_confirmed
                                             : traj.cumulative_incidence;
                    for (std::size_t k = 0; k < nt; ++k) {
                        y[o * nt + k] = series[traj.index_at(spec.eval_times[k])];
                    }
                }
                rows[i] = std::move(y);
            }
            catch (const Error&) {
                // Dropped below.
            }
        },
        threads);

    std::vector<std::size_t> good;
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i]) {
            good.push_back(i);
        }
    }
    SensitivityResult result;
    result.parameters = SensitivitySpec::parameter_names();
    result.outputs = spec.outputs;
    result.eval_times = spec.eval_times;
    result.samples_used = good.size();
    result.samples_dropped = n - good.size();
    if (good.size() < 3) {
        fail(ErrorKind::runtime, "fewer than three samples simulated successfully");
    }

    Eigen::MatrixXd xs(static_cast<Eigen::Index>(good.size()), x.cols());
    Eigen::MatrixXd ys(static_cast<Eigen::Index>(good.size()), static_cast<Eigen::Index>(no * nt));
    for (std::size_t r = 0; r < good.size(); ++r) {
        xs.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(good[r]));
        ys.row(static_cast<Eigen::Index>(r)) =
            Eigen::Map<const Eigen::RowVectorXd>(rows[good[r]]->data(), static_cast<Eigen::Index>(no * nt));
    }
    if (result.samples_dropped > 0) {
        result.notes.push_back(std::to_string(result.samples_dropped) + " samples dropped after simulation failure");
    }

    Prcc pr = prcc(xs, ys);
    result.excluded = pr.excluded;
    for (std::size_t j = 0; j < result.parameters.size(); ++j) {
        if (pr.excluded[j]) {
            result.notes.push_back(result.parameters[j] + (spec.ranges[j].width() > 0.0
                                                               ? " excluded: collinear with other parameters"
                                                               : " excluded: zero-width range"));
        }
    }
    for (std::size_t o = 0; o < no; ++o) {
        result.coefficients.push_back(
            pr.coefficients.middleCols(static_cast<Eigen::Index>(o * nt), static_cast<Eigen::Index>(nt)));
    }
    return result;
}

void write_prcc_csv(std::ostream& out, const SensitivityResult& result)
{
    out << "output,parameter,time,prcc\n";
    for (std::size_t o = 0; o < result.outputs.size(); ++o) {
        for (std::size_t j = 0; j < result.parameters.size(); ++j) {
            if (result.excluded[j]) {
                continue;
            }
            for (std::size_t k = 0; k < result.eval_times.size(); ++k) {
                out << to_string(result.outputs[o]) << ',' << result.parameters[j] << ','
                    << format_double(result.eval_times[k]) << ','
                    << format_double(result.coefficients[o](static_cast<Eigen::Index>(j),
                                                             static_cast<Eigen::Index>(k)))
                    << '\n';
            }
        }
    }
}

} // namespace ecop
