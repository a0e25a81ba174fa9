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
#ifndef ECOP_CASES_HPP
#define ECOP_CASES_HPP

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecop
{

using Date = std::chrono::sys_days;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD).
Date parse_date(std::string_view text);
std::string format_date(Date date);

/// Daily cumulative counts for one location.
struct CaseSeries {
    std::vector<Date> dates;
    std::vector<double> cumulative_confirmed;
    std::optional<std::vector<double>> cumulative_deaths;

    std::size_t size() const noexcept
    {
        return dates.size();
    }
    /// Days between first and last observation.
    double span_days() const noexcept
    {
        return dates.empty() ? 0.0 : static_cast<double>((dates.back() - dates.front()).count());
    }
    /// Throws unless dates are strictly increasing and daily.
    void validate_dates() const;

    /// Builds a series starting at `start` with one value per day.
    static CaseSeries daily(Date start, std::vector<double> confirmed);
};

/// Replaces each value by the running maximum. Returns the dates that changed.
std::vector<std::string> repair_monotone(CaseSeries& series);

struct LoadedCases {
    CaseSeries series;
    /// Human-readable data-integrity warnings (e.g. running-max repairs).
    std::vector<std::string> warnings;
};

/**
 * Reads a CSV with header columns date, location, cumulative_confirmed and
 * optionally cumulative_deaths (total_cases / total_deaths are accepted as
 * aliases). Rows for `location` are restricted to [start, end]; days missing
 * from the file are forward-filled. Without `start` the window opens at the
 * first date with a positive confirmed count; without `end` it spans
 * `default_days` days from the start.
 */
LoadedCases load_case_series(const std::string& path, const std::string& location,
                             std::optional<Date> start = std::nullopt,
                             std::optional<Date> end = std::nullopt, int default_days = 336);

} // namespace ecop

#endif
