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
#include "ecop/artifact.hpp"

#include "ecop/error.hpp"
#include "ecop/json_io.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ecop
{

namespace fs = std::filesystem;

const char* to_string(ArtifactKind kind) noexcept
{
    switch (kind) {
    case ArtifactKind::estimate:
        return "estimate";
    case ArtifactKind::chain:
        return "chain";
    case ArtifactKind::front:
        return "front";
    case ArtifactKind::costmap:
        return "costmap";
    }
    return "unknown";
}

ArtifactKind artifact_kind_from(const std::string& name)
{
    for (auto kind : {ArtifactKind::estimate, ArtifactKind::chain, ArtifactKind::front, ArtifactKind::costmap}) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    fail(ErrorKind::format, "unknown artifact kind '" + name + "'");
}

std::string format_timestamp(std::int64_t unix_seconds)
{
    using namespace std::chrono;
    sys_seconds tp{seconds{unix_seconds}};
    auto day = floor<days>(tp);
    year_month_day ymd{day};
    hh_mm_ss hms{tp - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

std::string default_created_at()
{
    const char* env = std::getenv("SOURCE_DATE_EPOCH");
    if (env != nullptr && *env != '\0') {
        char* end = nullptr;
        long long v = std::strtoll(env, &end, 10);
        if (end != nullptr && *end == '\0') {
            return format_timestamp(v);
        }
    }
    return format_timestamp(0);
}

std::string serialize_artifact(const PipelineArtifact& artifact)
{
    nlohmann::json j = {
        {"schema_version", kSchemaVersion},
        {"kind", to_string(artifact.kind)},
        {"created_at", artifact.created_at},
        {"provenance", {{"config_hash", artifact.provenance.config_hash}, {"seed", artifact.provenance.seed}}},
        {"payload", artifact.payload},
    };
    return j.dump(2) + "\n";
}

PipelineArtifact parse_artifact(std::string_view text, std::optional<ArtifactKind> expected)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::format, std::string("artifact is not valid JSON: ") + e.what());
    }
    const int version = field<int>(j, "schema_version");
    if (version != kSchemaVersion) {
        fail(ErrorKind::format, "artifact schema_version " + std::to_string(version) + " is not supported (expected " +
                                    std::to_string(kSchemaVersion) + ")");
    }
    PipelineArtifact a;
    a.kind = artifact_kind_from(field<std::string>(j, "kind"));
    if (expected && a.kind != *expected) {
        fail(ErrorKind::format, std::string("expected a ") + to_string(*expected) + " artifact, found " +
                                    to_string(a.kind));
    }
    a.created_at = field<std::string>(j, "created_at");
    const auto& prov = field<nlohmann::json>(j, "provenance");
    a.provenance.config_hash = field<std::string>(prov, "config_hash");
    a.provenance.seed = field<std::uint64_t>(prov, "seed");
    a.payload = field<nlohmann::json>(j, "payload");
    return a;
}

void save_artifact(const PipelineArtifact& artifact, const std::string& path)
{
    const std::string text = serialize_artifact(artifact);
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(ErrorKind::runtime, "cannot write " + tmp.string());
        }
        out << text;
        out.flush();
        if (!out) {
            fail(ErrorKind::runtime, "write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorKind::runtime, "cannot move artifact into place at " + path);
    }
}

PipelineArtifact load_artifact(const std::string& path, std::optional<ArtifactKind> expected)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::not_found, "artifact not found: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_artifact(ss.str(), expected);
}

std::optional<std::string> provenance_warning(const PipelineArtifact& artifact, const std::string& expected_hash)
{
    if (artifact.provenance.config_hash == expected_hash) {
        return std::nullopt;
    }
    return std::string("provenance mismatch: ") + to_string(artifact.kind) + " artifact was produced under config " +
           artifact.provenance.config_hash + ", current config is " + expected_hash;
}

nlohmann::json estimate_payload(const EstimateRecord& r)
{
    return {{"names", r.names},
            {"theta", r.theta},
            {"loss", r.loss},
            {"evaluations", r.evaluations},
            {"restart_losses", r.restart_losses},
            {"policy", r.policy},
            {"sigma_obs", r.sigma_obs}};
}

EstimateRecord estimate_from_payload(const nlohmann::json& j)
{
    EstimateRecord r;
    r.names = field<std::vector<std::string>>(j, "names");
    r.theta = field<std::vector<double>>(j, "theta");
    r.loss = field<double>(j, "loss");
    r.evaluations = field<std::size_t>(j, "evaluations");
    r.restart_losses = field<std::vector<double>>(j, "restart_losses");
    r.policy = field<PolicyParams>(j, "policy");
    r.sigma_obs = field<double>(j, "sigma_obs");
    if (r.names.size() != r.theta.size()) {
        fail(ErrorKind::format, "estimate names and theta differ in length");
    }
    return r;
}

bool operator==(const ChainRecord& a, const ChainRecord& b)
{
    const Chain& x = a.chain;
    const Chain& y = b.chain;
    return a.names == b.names && x.samples.rows() == y.samples.rows() && x.samples.cols() == y.samples.cols() &&
           x.samples == y.samples && x.log_posterior == y.log_posterior && x.iterations == y.iterations &&
           x.thin == y.thin && x.burn_in == y.burn_in && x.acceptance_rate == y.acceptance_rate &&
           x.second_stage_rate == y.second_stage_rate;
}

Chain thin_chain(const Chain& chain, std::size_t thin)
{
    if (thin == 0) {
        fail(ErrorKind::config, "thin must be positive");
    }
    Chain out = chain;
    const auto rows = chain.samples.rows();
    const auto kept = (rows + static_cast<Eigen::Index>(thin) - 1) / static_cast<Eigen::Index>(thin);
    out.samples.resize(kept, chain.samples.cols());
    out.log_posterior.clear();
    for (Eigen::Index r = 0; r < kept; ++r) {
        out.samples.row(r) = chain.samples.row(r * static_cast<Eigen::Index>(thin));
        if (static_cast<std::size_t>(r) * thin < chain.log_posterior.size()) {
            out.log_posterior.push_back(chain.log_posterior[static_cast<std::size_t>(r) * thin]);
        }
    }
    out.thin = chain.thin * thin;
    return out;
}

nlohmann::json chain_payload(const ChainRecord& r)
{
    const Chain& c = r.chain;
    nlohmann::json samples = nlohmann::json::array();
    for (Eigen::Index i = 0; i < c.samples.rows(); ++i) {
        std::vector<double> row(c.samples.cols());
        for (Eigen::Index k = 0; k < c.samples.cols(); ++k) {
            row[k] = c.samples(i, k);
        }
        samples.push_back(row);
    }
    return {{"names", r.names},
            {"iterations", c.iterations},
            {"thin", c.thin},
            {"burn_in", c.burn_in},
            {"acceptance_rate", c.acceptance_rate},
            {"second_stage_rate", c.second_stage_rate},
            {"log_posterior", c.log_posterior},
            {"samples", samples}};
}

ChainRecord chain_from_payload(const nlohmann::json& j)
{
    ChainRecord r;
    r.names = field<std::vector<std::string>>(j, "names");
    Chain& c = r.chain;
    c.iterations = field<std::size_t>(j, "iterations");
    c.thin = field<std::size_t>(j, "thin");
    c.burn_in = field<std::size_t>(j, "burn_in");
    c.acceptance_rate = field<double>(j, "acceptance_rate");
    c.second_stage_rate = field<double>(j, "second_stage_rate");
    c.log_posterior = field<std::vector<double>>(j, "log_posterior");
    auto rows = field<std::vector<std::vector<double>>>(j, "samples");
    c.samples.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(r.names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != r.names.size()) {
            fail(ErrorKind::format, "chain row " + std::to_string(i) + " has the wrong width");
        }
        for (std::size_t k = 0; k < rows[i].size(); ++k) {
            c.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
        }
    }
    if (c.thin == 0) {
        fail(ErrorKind::format, "chain thin must be positive");
    }
    return r;
}

double FrontRecord::horizon() const
{
    return field<double>(problem, "horizon");
}

nlohmann::json front_payload(const FrontRecord& r)
{
    return {{"front", r.front}, {"problem", r.problem}, {"settings", r.settings}};
}

FrontRecord front_from_payload(const nlohmann::json& j)
{
    FrontRecord r;
    r.front = field<ParetoFront>(j, "front");
    r.problem = field<nlohmann::json>(j, "problem");
    r.settings = field_or<nlohmann::json>(j, "settings", nullptr);
    return r;
}

nlohmann::json costmap_payload(const CostMapRecord& r)
{
    return {{"params", r.params}, {"c2", r.c2}, {"map", r.map}, {"segments", r.segmentation.segments}};
}

CostMapRecord costmap_from_payload(const nlohmann::json& j)
{
    CostMapRecord r;
    r.params = field<CostParams>(j, "params");
    r.c2 = field<double>(j, "c2");
    r.map = field<CostOptimalMap>(j, "map");
    r.segmentation.segments = field<std::vector<CopSegment>>(j, "segments");
    return r;
}

} // namespace ecop
