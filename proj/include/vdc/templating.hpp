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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vdc/params.hpp"

namespace vdc {

/// A recipe body with `${name}` placeholders and `$$` literal dollars.
/// Immutable once parsed.
class RecipeTemplate {
 public:
  struct Segment {
    enum class Kind { Literal, Placeholder, Escape };
    Kind kind;
    std::string text;  // literal text or placeholder name; empty for Escape
  };

  RecipeTemplate() = default;

  /// Errors: BadPlaceholder for a `$` not followed by `$` or `{identifier}`,
  /// UnterminatedPlaceholder for `${` with no closing brace.
  static RecipeTemplate parse(std::string text);

  const std::string& text() const noexcept { return text_; }
  /// Distinct names in order of first appearance.
  const std::vector<std::string>& placeholders() const noexcept { return placeholders_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  std::size_t escape_count() const noexcept { return escapes_; }

  bool has_placeholder(std::string_view name) const;

 private:
  std::string text_;
  std::vector<Segment> segments_;
  std::vector<std::string> placeholders_;
  std::size_t escapes_ = 0;
};

inline RecipeTemplate parse_template(std::string text) { return RecipeTemplate::parse(std::move(text)); }

/// Substitutes every placeholder and folds `$$` to `$`. Bindings beyond the
/// placeholder set are ignored. Throws UnboundPlaceholder naming every
/// missing placeholder.
std::string instantiate(const RecipeTemplate& tmpl, const Bindings& bindings);

}  // namespace vdc
