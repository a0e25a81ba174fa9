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
#ifndef ECOP_MODEL_HPP
#define ECOP_MODEL_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace ecop
{

/// Upper bound on any transmission-reduction level.
inline constexpr double kMaxMu = 0.95;

/// Disease-specific constants. Rates are per day.
struct DiseaseParams {
    double r0       = 2.87;       // basic reproduction number
    double kappa    = 1.0 / 4.0;  // inverse mean latent period
    double alpha    = 1.0 / 10.0; // inverse mean infectious period
    double gamma    = 1.0 / 14.0; // inverse mean isolation period
    double fatality = 0.0173;     // probability of death among confirmed

    void validate() const;

    friend bool operator==(const DiseaseParams&, const DiseaseParams&) = default;
};

/**
 * Piecewise-linear transmission reduction mu(t).
 *
 * Knot k sits at t = k * spacing. Between knots the value is interpolated
 * linearly; at an exact knot time the knot value is returned. The schedule
 * covers [0, (knots - 1) * spacing].
 */
class MuSchedule
{
public:
    MuSchedule() = default;
    explicit MuSchedule(std::vector<double> knots, double spacing = 14.0);

    static MuSchedule constant(double value, std::size_t knots, double spacing = 14.0);
    /// Smallest schedule with the given spacing that covers `horizon` days.
    static MuSchedule covering(double horizon, double value = 0.0, double spacing = 14.0);

    double at(double t) const;
    /// Last time covered by the schedule.
    double end_time() const noexcept;
    bool covers(double horizon) const noexcept;

    const std::vector<double>& knots() const noexcept
    {
        return knots_;
    }
    double spacing() const noexcept
    {
        return spacing_;
    }
    std::size_t size() const noexcept
    {
        return knots_.size();
    }

    friend bool operator==(const MuSchedule&, const MuSchedule&) = default;

private:
    std::vector<double> knots_{0.0};
    double spacing_ = 14.0;
};

double mu_at(const MuSchedule& schedule, double t);

struct PolicyParams {
    double xi  = 0.0; // mean imported cases per day
    double tau = 0.0; // infectious-period reduction, [0, 1)
    MuSchedule schedule;

    void validate() const;
    /// Effective removal rate out of I, alpha / (1 - tau).
    double confirmation_rate(const DiseaseParams& disease) const noexcept
    {
        return disease.alpha / (1.0 - tau);
    }

    friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

struct StateVector {
    double s = 0, e = 0, i = 0, q = 0, r = 0, d = 0;
    double t = 0;

    /// S + E + I + R, the mixing population.
    double n_effective() const noexcept
    {
        return s + e + i + r;
    }
    double total() const noexcept
    {
        return s + e + i + q + r + d;
    }
    std::array<double, 6> compartments() const noexcept
    {
        return {s, e, i, q, r, d};
    }
    void validate() const;

    static StateVector susceptible_only(double population) noexcept
    {
        StateVector x;
        x.s = population;
        return x;
    }
};

using Rates = std::array<double, 6>;

double force_of_infection(const StateVector& state, const DiseaseParams& disease,
                          const PolicyParams& policy, double t);

/// dS..dD/dt in persons per day. The components sum to xi.
Rates derivatives(const StateVector& state, const DiseaseParams& disease,
                  const PolicyParams& policy, double t);

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;
    /// Integral of alpha/(1-tau) * I.
    std::vector<double> cumulative_confirmed;
    /// Integral of lambda * S.
    std::vector<double> cumulative_incidence;

    std::size_t size() const noexcept
    {
        return times.size();
    }
    double final_confirmed() const
    {
        return cumulative_confirmed.back();
    }
    double final_incidence() const
    {
        return cumulative_incidence.back();
    }
    /// Index of the output time closest to t.
    std::size_t index_at(double t) const;
};

inline constexpr double kDefaultStep    = 0.5;
inline constexpr double kDefaultHorizon = 336.0;

/// Fixed-step RK4 integration over [0, horizon]. States are recorded after
/// every step; the last step is shortened if horizon is not a multiple of
/// step. Compartments that overshoot below zero are clamped.
Trajectory simulate(const StateVector& initial, const DiseaseParams& disease,
                    const PolicyParams& policy, double horizon, double step = kDefaultStep);

} // namespace ecop

#endif
