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
#ifndef ECOP_HASH_HPP
#define ECOP_HASH_HPP

#include <json.hpp>

#include <string>
#include <string_view>

namespace ecop
{

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

/// Digest of the compact dump of `config`. Object keys are already sorted,
/// so equal documents hash equally regardless of construction order.
std::string config_hash(const nlohmann::json& config);

} // namespace ecop

#endif
