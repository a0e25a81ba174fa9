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
#ifndef ECOP_ERROR_HPP
#define ECOP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ecop
{

enum class ErrorKind {
    config,        // invalid configuration or precondition
    not_found,     // missing file, country, key
    out_of_range,  // argument outside its admissible domain
    degenerate,    // numerically degenerate input (e.g. empty population)
    format,        // malformed or wrongly versioned file
    provenance,    // artifacts from incompatible configurations
    runtime,       // anything else that failed while running
};

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what)
        , kind_(kind)
    {
    }

    ErrorKind kind() const noexcept
    {
        return kind_;
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

} // namespace ecop

#endif
