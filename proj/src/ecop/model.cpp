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
#include "ecop/model.hpp"

#include "ecop/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ecop
{

namespace
{

constexpr double kTimeSlack = 1e-9;

bool finite_positive(double v)
{
    return std::isfinite(v) && v > 0.0;
}

} // namespace

void DiseaseParams::validate() const
{
    if (!finite_positive(r0) || !finite_positive(kappa) || !finite_positive(alpha) ||
        !finite_positive(gamma)) {
        fail(ErrorKind::config, "disease rates and r0 must be finite and positive");
    }
    if (!(fatality >= 0.0 && fatality <= 1.0)) {
        fail(ErrorKind::config, "fatality must lie in [0, 1]");
    }
}

MuSchedule::MuSchedule(std::vector<double> knots, double spacing)
    : knots_(std::move(knots))
    , spacing_(spacing)
{
    if (knots_.empty()) {
        fail(ErrorKind::config, "schedule needs at least one knot");
    }
    if (!finite_positive(spacing_)) {
        fail(ErrorKind::config, "knot spacing must be positive");
    }
    for (double k : knots_) {
        if (!(k >= 0.0 && k <= kMaxMu)) {
            fail(ErrorKind::config, "schedule knot " + std::to_string(k) + " outside [0, 0.95]");
        }
    }
}

MuSchedule MuSchedule::constant(double value, std::size_t knots, double spacing)
{
    return MuSchedule(std::vector<double>(knots, value), spacing);
}

MuSchedule MuSchedule::covering(double horizon, double value, double spacing)
{
    auto periods = static_cast<std::size_t>(std::ceil(horizon / spacing - kTimeSlack));
    return constant(value, periods + 1, spacing);
}

double MuSchedule::end_time() const noexcept
{
    return static_cast<double>(knots_.size() - 1) * spacing_;
}

bool MuSchedule::covers(double horizon) const noexcept
{
    return horizon <= end_time() + kTimeSlack;
}

double MuSchedule::at(double t) const
{
    if (!(t >= -kTimeSlack) || t > end_time() + kTimeSlack) {
        fail(ErrorKind::out_of_range,
             "t = " + std::to_string(t) + " outside schedule [0, " + std::to_string(end_time()) + "]");
    }
    double u = std::max(t, 0.0) / spacing_;
    // At an exact knot time u is integral and the left segment returns the knot.
    auto n = static_cast<std::size_t>(std::floor(u));
    if (n + 1 >= knots_.size()) {
        return knots_.back();
    }
    double frac = u - static_cast<double>(n);
    return knots_[n] + frac * (knots_[n + 1] - knots_[n]);
}

double mu_at(const MuSchedule& schedule, double t)
{
    return schedule.at(t);
}

void PolicyParams::validate() const
{
    if (!(xi >= 0.0) || !std::isfinite(xi)) {
        fail(ErrorKind::config, "xi must be finite and non-negative");
    }
    if (!(tau >= 0.0 && tau < 1.0)) {
        fail(ErrorKind::config, "tau must lie in [0, 1)");
    }
}

void StateVector::validate() const
{
    for (double c : compartments()) {
        if (!(c >= 0.0) || !std::isfinite(c)) {
            fail(ErrorKind::config, "compartments must be finite and non-negative");
        }
    }
}

double force_of_infection(const StateVector& state, const DiseaseParams& disease,
                          const PolicyParams& policy, double t)
{
    double n = state.n_effective();
    if (!(n > 0.0)) {
        fail(ErrorKind::degenerate, "force of infection needs S+E+I+R > 0");
    }
    double mu = policy.schedule.at(t);
    return (1.0 - mu) * disease.r0 * policy.confirmation_rate(disease) * state.i / n;
}

Rates derivatives(const StateVector& state, const DiseaseParams& disease,
                  const PolicyParams& policy, double t)
{
    double lambda = state.i > 0.0 ? force_of_infection(state, disease, policy, t) : 0.0;
    double infection = lambda * state.s;
    double progression = disease.kappa * state.e;
    double isolation = policy.confirmation_rate(disease) * state.i;
    double removal = disease.gamma * state.q;
    return {
        -infection,
        infection - progression + policy.xi,
        progression - isolation,
        isolation - removal,
        (1.0 - disease.fatality) * removal,
        disease.fatality * removal,
    };
}

std::size_t Trajectory::index_at(double t) const
{
    if (times.empty()) {
        fail(ErrorKind::out_of_range, "empty trajectory");
    }
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.end()) {
        return times.size() - 1;
    }
    auto idx = static_cast<std::size_t>(it - times.begin());
    if (idx > 0 && std::abs(times[idx - 1] - t) <= std::abs(*it - t)) {
        return idx - 1;
    }
    return idx;
}

namespace
{

// Compartments followed by the two cumulative flows.
using Augmented = std::array<double, 8>;

struct Rhs {
    const DiseaseParams& disease;
    const PolicyParams& policy;
    double confirm_rate;

    Augmented operator()(const Augmented& y, double t) const
    {
        double n = y[0] + y[1] + y[2] + y[4];
        double lambda = 0.0;
        if (y[2] != 0.0) {
            if (!(n > 0.0)) {
                fail(ErrorKind::degenerate, "force of infection needs S+E+I+R > 0");
            }
            lambda = (1.0 - policy.schedule.at(t)) * disease.r0 * confirm_rate * y[2] / n;
        }
        double infection = lambda * y[0];
        double progression = disease.kappa * y[1];
        double isolation = confirm_rate * y[2];
        double removal = disease.gamma * y[3];
        return {
            -infection,
            infection - progression + policy.xi,
            progression - isolation,
            isolation - removal,
            (1.0 - disease.fatality) * removal,
            disease.fatality * removal,
            isolation,
            infection,
        };
    }
};

Augmented axpy(const Augmented& y, double h, const Augmented& k)
{
    Augmented out;
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = y[j] + h * k[j];
    }
    return out;
}

void record(Trajectory& traj, const Augmented& y, double t)
{
    StateVector x{y[0], y[1], y[2], y[3], y[4], y[5], t};
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.cumulative_confirmed.push_back(y[6]);
    traj.cumulative_incidence.push_back(y[7]);
}

} // namespace

Trajectory simulate(const StateVector& initial, const DiseaseParams& disease,
                    const PolicyParams& policy, double horizon, double step)
{
    if (!finite_positive(horizon) || !finite_positive(step)) {
        fail(ErrorKind::config, "horizon and step must be positive");
    }
    disease.validate();
    policy.validate();
    initial.validate();
    if (!policy.schedule.covers(horizon)) {
        fail(ErrorKind::config, "schedule ends at day " + std::to_string(policy.schedule.end_time()) +
                                    " but horizon is " + std::to_string(horizon));
    }

    Rhs rhs{disease, policy, policy.confirmation_rate(disease)};
    auto steps = static_cast<std::size_t>(std::ceil(horizon / step - kTimeSlack));

    Trajectory traj;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.cumulative_confirmed.reserve(steps + 1);
    traj.cumulative_incidence.reserve(steps + 1);

    Augmented y{initial.s, initial.e, initial.i, initial.q, initial.r, initial.d, 0.0, 0.0};
    double t = 0.0;
    record(traj, y, t);
    for (std::size_t k = 1; k <= steps; ++k) {
        double t_next = k == steps ? horizon : static_cast<double>(k) * step;
        double h = t_next - t;
        Augmented k1 = rhs(y, t);
        Augmented k2 = rhs(axpy(y, 0.5 * h, k1), t + 0.5 * h);
        Augmented k3 = rhs(axpy(y, 0.5 * h, k2), t + 0.5 * h);
        Augmented k4 = rhs(axpy(y, h, k3), t_next);
        Augmented next;
        for (std::size_t j = 0; j < next.size(); ++j) {
            next[j] = y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        for (std::size_t j = 0; j < 6; ++j) {
            next[j] = std::max(next[j], 0.0);
        }
        next[6] = std::max(next[6], y[6]);
        next[7] = std::max(next[7], y[7]);
        y = next;
        t = t_next;
        record(traj, y, t);
    }
    return traj;
}

} // namespace ecop
