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

#include "vdc/params.hpp"

#include <cctype>

#include "vdc/error.hpp"

namespace vdc {

std::string_view to_string(ParamDomain d) {
  switch (d) {
    case ParamDomain::Repro:
      return "REPRO";
    case ParamDomain::App:
      return "APP";
    case ParamDomain::Site:
      return "SITE";
  }
  return "REPRO";
}

std::string_view to_string(ParamType t) {
  switch (t) {
    case ParamType::Int:
      return "int";
    case ParamType::Bool:
      return "bool";
    case ParamType::String:
      return "string";
    case ParamType::Decimal:
      return "decimal";
  }
  return "string";
}

ParamDomain parse_domain(std::string_view s) {
  if (s == "REPRO") return ParamDomain::Repro;
  if (s == "APP") return ParamDomain::App;
  if (s == "SITE") return ParamDomain::Site;
  fail(ErrorKind::BadRequest, "unknown parameter domain '" + std::string(s) + "'");
}

ParamType parse_param_type(std::string_view s) {
  if (s == "int") return ParamType::Int;
  if (s == "bool") return ParamType::Bool;
  if (s == "string") return ParamType::String;
  if (s == "decimal" || s == "decimal-string") return ParamType::Decimal;
  fail(ErrorKind::InvalidSchema, "unknown parameter type '" + std::string(s) + "'");
}

bool is_identifier(std::string_view name) {
  if (name.empty()) return false;
  const auto first = static_cast<unsigned char>(name.front());
  if (!(std::isalpha(first) || first == '_')) return false;
  for (const char c : name.substr(1)) {
    const auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || u == '_')) return false;
  }
  return true;
}

bool is_decimal_string(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && text[i] == '-') ++i;
  if (i >= text.size()) return false;
  if (text[i] == '0') {
    ++i;
  } else if (text[i] >= '1' && text[i] <= '9') {
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  } else {
    return false;
  }
  if (i == text.size()) return true;
  if (text[i] != '.') return false;
  ++i;
  const std::size_t frac = i;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  return i > frac && i == text.size();
}

bool matches_type(const ParamValue& value, ParamType type) {
  switch (type) {
    case ParamType::Int:
      return std::holds_alternative<std::int64_t>(value);
    case ParamType::Bool:
      return std::holds_alternative<bool>(value);
    case ParamType::String:
      return std::holds_alternative<std::string>(value);
    case ParamType::Decimal:
      return std::holds_alternative<std::string>(value) && is_decimal_string(std::get<std::string>(value));
  }
  return false;
}

std::string render_value(const ParamValue& value) {
  if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&value)) return *b ? "true" : "false";
  return std::get<std::string>(value);
}

nlohmann::json value_to_json(const ParamValue& value) {
  return std::visit([](const auto& v) { return nlohmann::json(v); }, value);
}

ParamValue value_from_json(const nlohmann::json& j) {
  using T = nlohmann::json::value_t;
  switch (j.type()) {
    case T::number_integer:
      return j.get<std::int64_t>();
    case T::number_unsigned: {
      const auto u = j.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX)) {
        fail(ErrorKind::UnencodableValue, "integer parameter exceeds signed 64-bit range");
      }
      return static_cast<std::int64_t>(u);
    }
    case T::boolean:
      return j.get<bool>();
    case T::string:
      return j.get<std::string>();
    case T::number_float:
      fail(ErrorKind::UnencodableValue, "floating-point parameter " + j.dump() + "; use a decimal string");
    default:
      fail(ErrorKind::BadRequest, "parameter values must be integers, booleans or strings");
  }
}

nlohmann::json bindings_to_json(const Bindings& b) {
  auto out = nlohmann::json::object();
  for (const auto& [name, value] : b) out[name] = value_to_json(value);
  return out;
}

Bindings bindings_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::BadRequest, "bindings must be a JSON object");
  Bindings out;
  for (const auto& [name, value] : j.items()) out.emplace(name, value_from_json(value));
  return out;
}

}  // namespace vdc
