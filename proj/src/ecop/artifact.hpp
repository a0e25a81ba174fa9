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
#ifndef ECOP_ARTIFACT_HPP
#define ECOP_ARTIFACT_HPP

#include "ecop/cost.hpp"
#include "ecop/dram.hpp"
#include "ecop/model.hpp"
#include "ecop/pareto.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecop
{

inline constexpr int kSchemaVersion = 1;

enum class ArtifactKind { estimate, chain, front, costmap };

const char* to_string(ArtifactKind kind) noexcept;
ArtifactKind artifact_kind_from(const std::string& name);

struct Provenance {
    std::string config_hash;
    std::uint64_t seed = 0;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct PipelineArtifact {
    ArtifactKind kind = ArtifactKind::estimate;
    /// ISO-8601 UTC timestamp.
    std::string created_at;
    Provenance provenance;
    nlohmann::json payload;

    friend bool operator==(const PipelineArtifact&, const PipelineArtifact&) = default;
};

/// SOURCE_DATE_EPOCH when set, otherwise the Unix epoch, as ISO-8601 UTC.
std::string default_created_at();
std::string format_timestamp(std::int64_t unix_seconds);

std::string serialize_artifact(const PipelineArtifact& artifact);
/// Throws ErrorKind::format on malformed text, an unknown kind, a schema
/// version other than kSchemaVersion, or a kind other than `expected`.
PipelineArtifact parse_artifact(std::string_view text, std::optional<ArtifactKind> expected = std::nullopt);

/// Writes through a temporary file in the same directory and renames it into place.
void save_artifact(const PipelineArtifact& artifact, const std::string& path);
/// Throws ErrorKind::not_found when the file is missing.
PipelineArtifact load_artifact(const std::string& path, std::optional<ArtifactKind> expected = std::nullopt);

/// Warning text when the artifact's hash differs from `expected_hash`.
std::optional<std::string> provenance_warning(const PipelineArtifact& artifact, const std::string& expected_hash);

/// Best calibration estimate.
struct EstimateRecord {
    std::vector<std::string> names;
    std::vector<double> theta;
    double loss = 0.0;
    std::size_t evaluations = 0;
    std::vector<double> restart_losses;
    PolicyParams policy;
    double sigma_obs = 0.0;

    friend bool operator==(const EstimateRecord&, const EstimateRecord&) = default;
};

nlohmann::json estimate_payload(const EstimateRecord& record);
EstimateRecord estimate_from_payload(const nlohmann::json& payload);

/// Thinned posterior chain.
struct ChainRecord {
    std::vector<std::string> names;
    Chain chain;
};

bool operator==(const ChainRecord& a, const ChainRecord& b);

/// Keeps every `thin`-th stored row; thin 1 keeps the chain as is.
Chain thin_chain(const Chain& chain, std::size_t thin);

nlohmann::json chain_payload(const ChainRecord& record);
ChainRecord chain_from_payload(const nlohmann::json& payload);

/// Front plus the description of the problem that produced it.
struct FrontRecord {
    ParetoFront front;
    nlohmann::json problem;
    /// Optimizer settings that produced the front; null when unknown.
    nlohmann::json settings;

    /// Horizon stored in the problem description.
    double horizon() const;

    friend bool operator==(const FrontRecord&, const FrontRecord&) = default;
};

nlohmann::json front_payload(const FrontRecord& record);
FrontRecord front_from_payload(const nlohmann::json& payload);

struct CostMapRecord {
    CostParams params;
    double c2 = 0.0;
    CostOptimalMap map;
    CopSegmentation segmentation;

    friend bool operator==(const CostMapRecord&, const CostMapRecord&) = default;
};

nlohmann::json costmap_payload(const CostMapRecord& record);
CostMapRecord costmap_from_payload(const nlohmann::json& payload);

} // namespace ecop

#endif
