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
#include "ecop/cases.hpp"

#include "ecop/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace ecop
{

namespace
{

int parse_int(std::string_view text)
{
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        fail(ErrorKind::format, "bad integer '" + std::string(text) + "'");
    }
    return value;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

// Splits one CSV record. Quoted fields may contain commas.
std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        }
        else if (c == ',' && !quoted) {
            fields.emplace_back(trim(field));
            field.clear();
        }
        else {
            field.push_back(c);
        }
    }
    fields.emplace_back(trim(field));
    return fields;
}

std::optional<double> parse_count(std::string_view text)
{
    if (text.empty()) {
        return std::nullopt;
    }
    try {
        std::size_t used = 0;
        double v = std::stod(std::string(text), &used);
        if (used != text.size() || !(v >= 0.0)) {
            fail(ErrorKind::format, "bad count '" + std::string(text) + "'");
        }
        return v;
    }
    catch (const std::invalid_argument&) {
        fail(ErrorKind::format, "bad count '" + std::string(text) + "'");
    }
}

int column(const std::vector<std::string>& header, std::initializer_list<const char*> names)
{
    for (const char* name : names) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it != header.end()) {
            return static_cast<int>(it - header.begin());
        }
    }
    return -1;
}

struct Row {
    std::optional<double> confirmed;
    std::optional<double> deaths;
};

} // namespace

Date parse_date(std::string_view text)
{
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        fail(ErrorKind::format, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
    }
    using namespace std::chrono;
    year_month_day ymd{year{parse_int(text.substr(0, 4))}, month{static_cast<unsigned>(parse_int(text.substr(5, 2)))},
                       day{static_cast<unsigned>(parse_int(text.substr(8, 2)))}};
    if (!ymd.ok()) {
        fail(ErrorKind::format, "invalid calendar date '" + std::string(text) + "'");
    }
    return sys_days{ymd};
}

std::string format_date(Date date)
{
    std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

void CaseSeries::validate_dates() const
{
    if (cumulative_confirmed.size() != dates.size() ||
        (cumulative_deaths && cumulative_deaths->size() != dates.size())) {
        fail(ErrorKind::format, "case series columns have different lengths");
    }
    for (std::size_t k = 1; k < dates.size(); ++k) {
        if ((dates[k] - dates[k - 1]).count() != 1) {
            fail(ErrorKind::format, "case series must have strictly increasing daily dates");
        }
    }
}

CaseSeries CaseSeries::daily(Date start, std::vector<double> confirmed)
{
    CaseSeries s;
    s.dates.reserve(confirmed.size());
    for (std::size_t k = 0; k < confirmed.size(); ++k) {
        s.dates.push_back(start + std::chrono::days{static_cast<int>(k)});
    }
    s.cumulative_confirmed = std::move(confirmed);
    return s;
}

std::vector<std::string> repair_monotone(CaseSeries& series)
{
    std::vector<std::string> changed;
    auto fix = [&](std::vector<double>& values, const char* what) {
        for (std::size_t k = 1; k < values.size(); ++k) {
            if (values[k] < values[k - 1]) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "%s on %s decreased from %.17g to %.17g; replaced by running max",
                              what, format_date(series.dates[k]).c_str(), values[k - 1], values[k]);
                changed.emplace_back(buf);
                values[k] = values[k - 1];
            }
        }
    };
    fix(series.cumulative_confirmed, "cumulative_confirmed");
    if (series.cumulative_deaths) {
        fix(*series.cumulative_deaths, "cumulative_deaths");
    }
    return changed;
}

LoadedCases load_case_series(const std::string& path, const std::string& location, std::optional<Date> start,
                             std::optional<Date> end, int default_days)
{
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::not_found, "cannot open case file '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        fail(ErrorKind::format, "case file '" + path + "' is empty");
    }
    auto header = split_csv(line);
    int c_date = column(header, {"date"});
    int c_loc = column(header, {"location", "country"});
    int c_conf = column(header, {"cumulative_confirmed", "total_cases"});
    int c_death = column(header, {"cumulative_deaths", "total_deaths"});
    if (c_date < 0 || c_loc < 0 || c_conf < 0) {
        fail(ErrorKind::format, "case file needs date, location and cumulative_confirmed columns");
    }

    std::map<Date, Row> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        auto f = split_csv(line);
        if (f.size() < header.size()) {
            fail(ErrorKind::format, path + ":" + std::to_string(lineno) + ": too few fields");
        }
        if (f[static_cast<std::size_t>(c_loc)] != location) {
            continue;
        }
        Date d = parse_date(f[static_cast<std::size_t>(c_date)]);
        Row r;
        r.confirmed = parse_count(f[static_cast<std::size_t>(c_conf)]);
        if (c_death >= 0) {
            r.deaths = parse_count(f[static_cast<std::size_t>(c_death)]);
        }
        rows[d] = r;
    }
    if (rows.empty()) {
        fail(ErrorKind::not_found, "location '" + location + "' not found in '" + path + "'");
    }

    if (!start) {
        auto first = std::find_if(rows.begin(), rows.end(),
                                  [](const auto& kv) { return kv.second.confirmed && *kv.second.confirmed > 0.0; });
        if (first == rows.end()) {
            fail(ErrorKind::config, "no confirmed cases for '" + location + "'; give an explicit window");
        }
        start = first->first;
    }
    if (!end) {
        end = *start + std::chrono::days{default_days};
    }
    if (*end < *start) {
        fail(ErrorKind::config, "calibration window is empty");
    }
    auto in_window = rows.lower_bound(*start);
    if (in_window == rows.end() || in_window->first > *end) {
        fail(ErrorKind::config, "no observations for '" + location + "' inside the window");
    }

    // Seed forward fill from the last observation before the window.
    double confirmed = 0.0;
    std::optional<double> deaths;
    bool has_deaths = c_death >= 0;
    for (auto it = rows.begin(); it != in_window; ++it) {
        if (it->second.confirmed) {
            confirmed = *it->second.confirmed;
        }
        if (it->second.deaths) {
            deaths = it->second.deaths;
        }
    }
    // Clip the window end to the last available observation.
    Date last = std::prev(rows.upper_bound(*end))->first;

    LoadedCases out;
    CaseSeries& s = out.series;
    if (has_deaths) {
        s.cumulative_deaths.emplace();
    }
    for (Date d = *start; d <= last; d += std::chrono::days{1}) {
        auto it = rows.find(d);
        if (it != rows.end()) {
            if (it->second.confirmed) {
                confirmed = *it->second.confirmed;
            }
            if (it->second.deaths) {
                deaths = it->second.deaths;
            }
        }
        s.dates.push_back(d);
        s.cumulative_confirmed.push_back(confirmed);
        if (has_deaths) {
            s.cumulative_deaths->push_back(deaths.value_or(0.0));
        }
    }
    out.warnings = repair_monotone(s);
    return out;
}

} // namespace ecop
