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

#include "vdc/templating.hpp"

#include <algorithm>

#include "vdc/error.hpp"

namespace vdc {

RecipeTemplate RecipeTemplate::parse(std::string text) {
  RecipeTemplate t;
  std::string literal;
  auto flush = [&] {
    if (!literal.empty()) {
      t.segments_.push_back({Segment::Kind::Literal, std::move(literal)});
      literal.clear();
    }
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c != '$') {
      literal.push_back(c);
      ++i;
      continue;
    }
    if (i + 1 < text.size() && text[i + 1] == '$') {
      flush();
      t.segments_.push_back({Segment::Kind::Escape, {}});
      ++t.escapes_;
      i += 2;
      continue;
    }
    if (i + 1 >= text.size() || text[i + 1] != '{') {
      fail(ErrorKind::BadPlaceholder, "'$' at offset " + std::to_string(i) + " must be followed by '$' or '{name}'");
    }
    const auto close = text.find('}', i + 2);
    if (close == std::string::npos) {
      fail(ErrorKind::UnterminatedPlaceholder, "'${' at offset " + std::to_string(i) + " has no closing '}'");
    }
    std::string name = text.substr(i + 2, close - i - 2);
    if (!is_identifier(name)) {
      fail(ErrorKind::BadPlaceholder, "invalid placeholder name '" + name + "' at offset " + std::to_string(i));
    }
    flush();
    if (std::find(t.placeholders_.begin(), t.placeholders_.end(), name) == t.placeholders_.end()) {
      t.placeholders_.push_back(name);
    }
    t.segments_.push_back({Segment::Kind::Placeholder, std::move(name)});
    i = close + 1;
  }
  flush();
  t.text_ = std::move(text);
  return t;
}

bool RecipeTemplate::has_placeholder(std::string_view name) const {
  return std::find(placeholders_.begin(), placeholders_.end(), name) != placeholders_.end();
}

std::string instantiate(const RecipeTemplate& tmpl, const Bindings& bindings) {
  std::vector<std::string> missing;
  for (const auto& name : tmpl.placeholders()) {
    if (!bindings.contains(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    fail(ErrorKind::UnboundPlaceholder, "[" + names + "]");
  }

  std::string out;
  out.reserve(tmpl.text().size());
  for (const auto& seg : tmpl.segments()) {
    switch (seg.kind) {
      case RecipeTemplate::Segment::Kind::Literal:
        out += seg.text;
        break;
      case RecipeTemplate::Segment::Kind::Escape:
        out.push_back('$');
        break;
      case RecipeTemplate::Segment::Kind::Placeholder:
        out += render_value(bindings.at(seg.text));
        break;
    }
  }
  return out;
}

}  // namespace vdc
