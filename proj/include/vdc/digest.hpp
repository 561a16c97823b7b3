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

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"

namespace vdc {

/// A 32-byte SHA-256 digest.
class Digest {
 public:
  static constexpr std::size_t kSize = 32;
  using Bytes = std::array<std::uint8_t, kSize>;

  constexpr Digest() = default;
  explicit constexpr Digest(const Bytes& bytes) : bytes_(bytes) {}

  const Bytes& bytes() const noexcept { return bytes_; }

  /// 64 lowercase hex characters.
  std::string hex() const;
  /// Throws Error(BadRequest) unless `text` is exactly 64 hex characters.
  static Digest from_hex(std::string_view text);

  /// First eight bytes read big-endian.
  std::uint64_t prefix64() const noexcept;

  friend auto operator<=>(const Digest&, const Digest&) = default;

 private:
  Bytes bytes_{};
};

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view data);

/// Content address of a virtual data object or derivation, rendered
/// `vd1:<64 hex>`. Ordered by digest bytes.
class ObjectId {
 public:
  static constexpr std::string_view kPrefix = "vd1:";

  constexpr ObjectId() = default;
  explicit constexpr ObjectId(const Digest& digest) : digest_(digest) {}

  const Digest& digest() const noexcept { return digest_; }
  std::string str() const { return std::string(kPrefix) + digest_.hex(); }
  static ObjectId parse(std::string_view text);

  friend auto operator<=>(const ObjectId&, const ObjectId&) = default;

 private:
  Digest digest_;
};

struct ObjectIdHash {
  std::size_t operator()(const ObjectId& id) const noexcept {
    return static_cast<std::size_t>(id.digest().prefix64());
  }
};

/// Canonical JSON: object keys sorted by code point, no insignificant
/// whitespace, integers in minimal decimal form, strings with mandatory
/// escapes only. Floating-point numbers and integers outside the signed
/// 64-bit range raise Error(UnencodableValue).
std::string canonical_encode(const nlohmann::json& value);

void to_json(nlohmann::json& j, const ObjectId& id);
void from_json(const nlohmann::json& j, ObjectId& id);

}  // namespace vdc
