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
#include "ecop/json_io.hpp"

namespace ecop
{

void to_json(nlohmann::json& j, const DiseaseParams& p)
{
    j = {{"r0", p.r0}, {"kappa", p.kappa}, {"alpha", p.alpha}, {"gamma", p.gamma}, {"fatality", p.fatality}};
}

void from_json(const nlohmann::json& j, DiseaseParams& p)
{
    p.r0 = field<double>(j, "r0");
    p.kappa = field<double>(j, "kappa");
    p.alpha = field<double>(j, "alpha");
    p.gamma = field<double>(j, "gamma");
    p.fatality = field<double>(j, "fatality");
}

void to_json(nlohmann::json& j, const MuSchedule& s)
{
    j = {{"knot_spacing", s.spacing()}, {"knots", s.knots()}};
}

void from_json(const nlohmann::json& j, MuSchedule& s)
{
    s = MuSchedule(field<std::vector<double>>(j, "knots"), field_or<double>(j, "knot_spacing", 14.0));
}

void to_json(nlohmann::json& j, const PolicyParams& p)
{
    j = {{"xi", p.xi}, {"tau", p.tau}, {"schedule", p.schedule}};
}

void from_json(const nlohmann::json& j, PolicyParams& p)
{
    p.xi = field<double>(j, "xi");
    p.tau = field<double>(j, "tau");
    p.schedule = field<MuSchedule>(j, "schedule");
}

void to_json(nlohmann::json& j, const ParetoPoint& p)
{
    j = {{"f1", p.f1}, {"f2", p.f2}, {"schedule", p.schedule}};
}

void from_json(const nlohmann::json& j, ParetoPoint& p)
{
    p.f1 = field<double>(j, "f1");
    p.f2 = field<double>(j, "f2");
    p.schedule = field<MuSchedule>(j, "schedule");
}

void to_json(nlohmann::json& j, const ParetoFront& f)
{
    j = {{"provenance", f.provenance}, {"points", f.points}};
}

void from_json(const nlohmann::json& j, ParetoFront& f)
{
    f.provenance = field<std::string>(j, "provenance");
    f.points = field<std::vector<ParetoPoint>>(j, "points");
}

void to_json(nlohmann::json& j, const CostParams& p)
{
    j = {{"gdp", p.gdp},
         {"gdp_max_reduction", p.gdp_max_reduction},
         {"hospitalization_cost", p.hospitalization_cost},
         {"vsl", p.vsl},
         {"fatality", p.fatality}};
}

void from_json(const nlohmann::json& j, CostParams& p)
{
    p.gdp = field<double>(j, "gdp");
    p.gdp_max_reduction = field<double>(j, "gdp_max_reduction");
    p.hospitalization_cost = field<double>(j, "hospitalization_cost");
    p.vsl = field<double>(j, "vsl");
    p.fatality = field<double>(j, "fatality");
}

void to_json(nlohmann::json& j, const PatternDescriptor& d)
{
    j = {{"begin", d.begin ? nlohmann::json(*d.begin) : nlohmann::json(nullptr)},
         {"increase", d.increase},
         {"strong", d.strong},
         {"decrease", d.decrease}};
}

void from_json(const nlohmann::json& j, PatternDescriptor& d)
{
    if (!j.is_object() || !j.contains("begin")) {
        fail(ErrorKind::format, "missing field 'begin'");
    }
    d.begin = j.at("begin").is_null() ? std::nullopt : std::optional<int>(field<int>(j, "begin"));
    d.increase = field<std::vector<int>>(j, "increase");
    d.strong = field<std::vector<int>>(j, "strong");
    d.decrease = field<std::vector<int>>(j, "decrease");
}

void to_json(nlohmann::json& j, const CopSegment& s)
{
    j = {{"lower", s.lower},
         {"upper", s.upper},
         {"first_grid", s.first_grid},
         {"last_grid", s.last_grid},
         {"indices", s.indices},
         {"pattern", s.pattern},
         {"total_cost", {s.min_total_cost, s.max_total_cost}},
         {"infections", {s.min_infections, s.max_infections}}};
}

void from_json(const nlohmann::json& j, CopSegment& s)
{
    s.lower = field<double>(j, "lower");
    s.upper = field<double>(j, "upper");
    s.first_grid = field<std::size_t>(j, "first_grid");
    s.last_grid = field<std::size_t>(j, "last_grid");
    s.indices = field<std::vector<std::size_t>>(j, "indices");
    s.pattern = field<PatternDescriptor>(j, "pattern");
    auto cost = field<std::vector<double>>(j, "total_cost");
    auto inf = field<std::vector<double>>(j, "infections");
    if (cost.size() != 2 || inf.size() != 2) {
        fail(ErrorKind::format, "segment ranges must have two entries");
    }
    s.min_total_cost = cost[0];
    s.max_total_cost = cost[1];
    s.min_infections = inf[0];
    s.max_infections = inf[1];
}

void to_json(nlohmann::json& j, const CostOptimalMap& m)
{
    nlohmann::json envelope = nlohmann::json::array();
    for (const auto& p : m.envelope) {
        envelope.push_back({{"from", p.from}, {"index", p.index}});
    }
    j = {{"c1", m.c1},
         {"horizon", m.horizon},
         {"grid", m.grid},
         {"optimal_index", m.optimal_index},
         {"optimal_f1", m.optimal_f1},
         {"optimal_total_cost", m.optimal_total_cost},
         {"envelope", envelope},
         {"provenance", m.provenance}};
}

void from_json(const nlohmann::json& j, CostOptimalMap& m)
{
    m.c1 = field<double>(j, "c1");
    m.horizon = field<double>(j, "horizon");
    m.grid = field<std::vector<double>>(j, "grid");
    m.optimal_index = field<std::vector<std::size_t>>(j, "optimal_index");
    m.optimal_f1 = field<std::vector<double>>(j, "optimal_f1");
    m.optimal_total_cost = field<std::vector<double>>(j, "optimal_total_cost");
    m.envelope.clear();
    for (const auto& p : field<nlohmann::json>(j, "envelope")) {
        m.envelope.push_back({field<double>(p, "from"), field<std::size_t>(p, "index")});
    }
    m.provenance = field<std::string>(j, "provenance");
    const std::size_t n = m.grid.size();
    if (m.optimal_index.size() != n || m.optimal_f1.size() != n || m.optimal_total_cost.size() != n) {
        fail(ErrorKind::format, "cost map arrays differ in length");
    }
}

} // namespace ecop
