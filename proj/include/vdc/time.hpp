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

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace vdc {

using Duration = std::chrono::seconds;
using Timestamp = std::chrono::sys_seconds;

inline Timestamp from_unix(std::int64_t seconds) { return Timestamp{Duration{seconds}}; }
inline std::int64_t to_unix(Timestamp t) { return t.time_since_epoch().count(); }

/// "YYYY-MM-DDTHH:MM:SSZ"; always UTC with whole seconds.
std::string format_rfc3339(Timestamp t);

/// Accepts the UTC form above plus optional fractional seconds and numeric
/// offsets. Throws Error(BadRequest) on malformed input.
Timestamp parse_rfc3339(std::string_view text);

Timestamp wall_clock_now();

}  // namespace vdc
