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
#ifndef ECOP_BOUNDS_HPP
#define ECOP_BOUNDS_HPP

#include "ecop/error.hpp"

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace ecop
{

/// Axis-aligned box [lower, upper] in R^n.
struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;

    Bounds() = default;
    Bounds(std::vector<double> lo, std::vector<double> hi)
        : lower(std::move(lo))
        , upper(std::move(hi))
    {
        validate();
    }

    static Bounds uniform(std::size_t dim, double lo, double hi)
    {
        return Bounds(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
    }

    std::size_t dim() const noexcept
    {
        return lower.size();
    }

    double width(std::size_t j) const noexcept
    {
        return upper[j] - lower[j];
    }

    void validate() const
    {
        if (lower.size() != upper.size() || lower.empty()) {
            fail(ErrorKind::config, "bounds need matching, non-empty lower and upper vectors");
        }
        for (std::size_t j = 0; j < lower.size(); ++j) {
            if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]) || !(lower[j] < upper[j])) {
                fail(ErrorKind::config, "bound " + std::to_string(j) + " must be finite with lower < upper");
            }
        }
    }

    bool contains(std::span<const double> x) const noexcept
    {
        if (x.size() != lower.size()) {
            return false;
        }
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (!(x[j] >= lower[j] && x[j] <= upper[j])) {
                return false;
            }
        }
        return true;
    }

    /// Mirror a coordinate back into [lower, upper]; falls back to a uniform
    /// draw when a single reflection overshoots the opposite bound.
    template <class Rng>
    double reflect(std::size_t j, double v, Rng& rng) const
    {
        double lo = lower[j];
        double hi = upper[j];
        if (v < lo) {
            v = 2.0 * lo - v;
        }
        else if (v > hi) {
            v = 2.0 * hi - v;
        }
        if (!(v >= lo && v <= hi)) {
            v = std::uniform_real_distribution<double>(lo, hi)(rng);
        }
        return v;
    }
};

} // namespace ecop

#endif
