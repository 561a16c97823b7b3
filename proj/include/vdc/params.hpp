// Copyright 2026 The VDC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"

namespace vdc {

/// The three non-overlapping parameter domains. Only REPRO parameters take
/// part in data identity.
enum class ParamDomain { Repro, App, Site };

enum class ParamType { Int, Bool, String, Decimal };

inline constexpr ParamDomain kAllDomains[] = {ParamDomain::Repro, ParamDomain::App, ParamDomain::Site};

std::string_view to_string(ParamDomain d);
std::string_view to_string(ParamType t);
ParamDomain parse_domain(std::string_view s);
ParamType parse_param_type(std::string_view s);

using ParamValue = std::variant<std::int64_t, bool, std::string>;
using Bindings = std::map<std::string, ParamValue>;

/// Identifier grammar shared by schema names and template placeholders:
/// [A-Za-z_][A-Za-z0-9_]*
bool is_identifier(std::string_view name);

/// -?(0|[1-9][0-9]*)(\.[0-9]+)?
bool is_decimal_string(std::string_view text);

bool matches_type(const ParamValue& value, ParamType type);

/// int -> decimal, bool -> "true"/"false", strings verbatim.
std::string render_value(const ParamValue& value);

nlohmann::json value_to_json(const ParamValue& value);
/// Accepts JSON integers (signed 64-bit range), booleans and strings.
ParamValue value_from_json(const nlohmann::json& j);

nlohmann::json bindings_to_json(const Bindings& b);
Bindings bindings_from_json(const nlohmann::json& j);

}  // namespace vdc
