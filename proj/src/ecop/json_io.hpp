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
#ifndef ECOP_JSON_IO_HPP
#define ECOP_JSON_IO_HPP

#include "ecop/cost.hpp"
#include "ecop/error.hpp"
#include "ecop/model.hpp"
#include "ecop/pareto.hpp"

#include <json.hpp>

#include <string>

namespace ecop
{

// Strict conversions: every field is required when reading.
void to_json(nlohmann::json& j, const DiseaseParams& p);
void from_json(const nlohmann::json& j, DiseaseParams& p);
void to_json(nlohmann::json& j, const MuSchedule& s);
void from_json(const nlohmann::json& j, MuSchedule& s);
void to_json(nlohmann::json& j, const PolicyParams& p);
void from_json(const nlohmann::json& j, PolicyParams& p);
void to_json(nlohmann::json& j, const ParetoPoint& p);
void from_json(const nlohmann::json& j, ParetoPoint& p);
void to_json(nlohmann::json& j, const ParetoFront& f);
void from_json(const nlohmann::json& j, ParetoFront& f);
void to_json(nlohmann::json& j, const CostParams& p);
void from_json(const nlohmann::json& j, CostParams& p);
void to_json(nlohmann::json& j, const PatternDescriptor& d);
void from_json(const nlohmann::json& j, PatternDescriptor& d);
void to_json(nlohmann::json& j, const CopSegment& s);
void from_json(const nlohmann::json& j, CopSegment& s);
void to_json(nlohmann::json& j, const CostOptimalMap& m);
void from_json(const nlohmann::json& j, CostOptimalMap& m);

/// Reads `key` from object `j` as T; missing or mistyped fields are format errors naming the field.
template <class T>
T field(const nlohmann::json& j, const std::string& key)
{
    if (!j.is_object()) {
        fail(ErrorKind::format, "expected a JSON object around '" + key + "'");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        fail(ErrorKind::format, "missing field '" + key + "'");
    }
    try {
        return it->template get<T>();
    }
    catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, "field '" + key + "': " + e.what());
    }
}

/// Like field(), but returns `fallback` when the key is absent.
template <class T>
T field_or(const nlohmann::json& j, const std::string& key, T fallback)
{
    return j.is_object() && j.contains(key) ? field<T>(j, key) : fallback;
}

} // namespace ecop

#endif
