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

#include "vdc/digest.hpp"

#include <openssl/sha.h>

#include "vdc/error.hpp"

namespace vdc {
namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

// Strings are emitted as UTF-8 with only '"', '\\' and control characters
// escaped. Input is assumed to be valid UTF-8 (nlohmann validates on parse).
void encode_string(const std::string& s, std::string& out) {
  static constexpr char kHex[] = "0123456789abcdef";
  out.push_back('"');
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\b':
        out += "\\b";
        break;
      case '\f':
        out += "\\f";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (c < 0x20) {
          out += "\\u00";
          out.push_back(kHex[c >> 4]);
          out.push_back(kHex[c & 0xF]);
        } else {
          out.push_back(ch);
        }
    }
  }
  out.push_back('"');
}

void encode(const nlohmann::json& v, std::string& out) {
  using T = nlohmann::json::value_t;
  switch (v.type()) {
    case T::null:
      out += "null";
      return;
    case T::boolean:
      out += v.get<bool>() ? "true" : "false";
      return;
    case T::number_integer:
      out += std::to_string(v.get<std::int64_t>());
      return;
    case T::number_unsigned: {
      const auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX)) {
        fail(ErrorKind::UnencodableValue, "integer " + std::to_string(u) + " exceeds signed 64-bit range");
      }
      out += std::to_string(u);
      return;
    }
    case T::number_float:
      fail(ErrorKind::UnencodableValue, "floating-point value " + v.dump() + " has no canonical form");
    case T::string:
      encode_string(v.get_ref<const std::string&>(), out);
      return;
    case T::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& e : v) {
        if (!first) out.push_back(',');
        first = false;
        encode(e, out);
      }
      out.push_back(']');
      return;
    }
    case T::object: {
      // nlohmann::json objects are std::map<std::string, ...>: byte order of
      // UTF-8 keys equals code point order.
      out.push_back('{');
      bool first = true;
      for (const auto& [key, e] : v.items()) {
        if (!first) out.push_back(',');
        first = false;
        encode_string(key, out);
        out.push_back(':');
        encode(e, out);
      }
      out.push_back('}');
      return;
    }
    default:
      fail(ErrorKind::UnencodableValue, "binary or discarded JSON value");
  }
}

}  // namespace

std::string Digest::hex() const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(kSize * 2);
  for (const auto b : bytes_) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

Digest Digest::from_hex(std::string_view text) {
  if (text.size() != kSize * 2) {
    fail(ErrorKind::BadRequest, "digest must be 64 hex characters, got " + std::to_string(text.size()));
  }
  Bytes bytes{};
  for (std::size_t i = 0; i < kSize; ++i) {
    const int hi = hex_value(text[2 * i]);
    const int lo = hex_value(text[2 * i + 1]);
    if (hi < 0 || lo < 0) fail(ErrorKind::BadRequest, "digest is not lowercase hex: '" + std::string(text) + "'");
    bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return Digest(bytes);
}

std::uint64_t Digest::prefix64() const noexcept {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = v << 8 | bytes_[i];
  return v;
}

Digest sha256(std::span<const std::uint8_t> data) {
  Digest::Bytes out{};
  SHA256(data.data(), data.size(), out.data());
  return Digest(out);
}

Digest sha256(std::string_view data) {
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

ObjectId ObjectId::parse(std::string_view text) {
  if (!text.starts_with(kPrefix)) {
    fail(ErrorKind::BadRequest, "object id must start with 'vd1:': '" + std::string(text) + "'");
  }
  return ObjectId(Digest::from_hex(text.substr(kPrefix.size())));
}

std::string canonical_encode(const nlohmann::json& value) {
  std::string out;
  encode(value, out);
  return out;
}

void to_json(nlohmann::json& j, const ObjectId& id) { j = id.str(); }

void from_json(const nlohmann::json& j, ObjectId& id) {
  if (!j.is_string()) fail(ErrorKind::BadRequest, "object id must be a string");
  id = ObjectId::parse(j.get_ref<const std::string&>());
}

}  // namespace vdc
