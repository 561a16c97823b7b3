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

#include <random>
#include <string>

#include "doctest.h"
#include "vdc/error.hpp"
#include "vdc/templating.hpp"

using namespace vdc;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Internal;
}

std::string random_name(std::mt19937_64& rng) {
  static const std::string head = "abcdefghijklmnopqrstuvwxyz_";
  static const std::string tail = "abcdefghijklmnopqrstuvwxyz_0123456789";
  std::string s(1, head[rng() % head.size()]);
  for (auto n = rng() % 6; n > 0; --n) s.push_back(tail[rng() % tail.size()]);
  return s;
}

std::string random_literal(std::mt19937_64& rng) {
  static const std::string alphabet = "abc -=./:\n\t\"'}0123456789";
  std::string s;
  for (auto n = rng() % 8; n > 0; --n) s.push_back(alphabet[rng() % alphabet.size()]);
  return s;
}

/// Random template text; `escapes` allows `$$` segments.
std::string random_template(std::mt19937_64& rng, bool escapes) {
  std::string text;
  for (auto n = rng() % 10; n > 0; --n) {
    switch (rng() % (escapes ? 3 : 2)) {
      case 0:
        text += random_literal(rng);
        break;
      case 1:
        text += "${" + random_name(rng) + "}";
        break;
      default:
        text += "$$";
        break;
    }
  }
  return text;
}

}  // namespace

TEST_CASE("parse collects placeholders in first-occurrence order") {
  const auto t = parse_template("run -seed ${random_seed} -n ${events}");
  CHECK(t.placeholders() == std::vector<std::string>{"random_seed", "events"});
  CHECK(t.escape_count() == 0);
}

TEST_CASE("escapes are not placeholders") {
  const auto t = parse_template("cost: $$5 ${x}");
  CHECK(t.placeholders() == std::vector<std::string>{"x"});
  CHECK(t.escape_count() == 1);
}

TEST_CASE("repeated placeholders are listed once") {
  const auto t = parse_template("${a} ${b} ${a}");
  CHECK(t.placeholders() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("placeholder names must be identifiers") {
  CHECK(kind_of([] { parse_template("bad ${1abc}"); }) == ErrorKind::BadPlaceholder);
  CHECK(kind_of([] { parse_template("bad ${}"); }) == ErrorKind::BadPlaceholder);
  CHECK(kind_of([] { parse_template("bad ${a-b}"); }) == ErrorKind::BadPlaceholder);
  CHECK(kind_of([] { parse_template("lone $ sign"); }) == ErrorKind::BadPlaceholder);
  CHECK(kind_of([] { parse_template("trailing $"); }) == ErrorKind::BadPlaceholder);
  CHECK(kind_of([] { parse_template("open ${abc"); }) == ErrorKind::UnterminatedPlaceholder);
}

TEST_CASE("instantiate substitutes and renders values") {
  CHECK(instantiate(parse_template("-seed ${s}"), {{"s", std::int64_t{42}}}) == "-seed 42");
  CHECK(instantiate(parse_template("a $$ b"), {}) == "a $ b");
  CHECK(instantiate(parse_template("${b} ${i} ${s}"),
                    {{"b", true}, {"i", std::int64_t{-7}}, {"s", std::string("x y")}}) == "true -7 x y");
  CHECK(instantiate(parse_template("${b}"), {{"b", false}}) == "false");
  CHECK(instantiate(parse_template("n=${n}"), {{"n", std::int64_t{1}}, {"extra", std::string("ok")}}) == "n=1");
}

TEST_CASE("unbound placeholders are reported by name") {
  try {
    instantiate(parse_template("-seed ${s}"), {});
    FAIL("expected UnboundPlaceholder");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnboundPlaceholder);
    CHECK(e.detail() == "[s]");
  }
  try {
    instantiate(parse_template("${a} ${b} ${c}"), {{"b", std::int64_t{1}}});
    FAIL("expected UnboundPlaceholder");
  } catch (const Error& e) {
    CHECK(e.detail() == "[a, c]");
  }
}

TEST_CASE("property: self-binding round-trips escape-free templates") {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 2000; ++n) {
    const auto text = random_template(rng, false);
    const auto t = parse_template(text);
    Bindings self;
    for (const auto& p : t.placeholders()) self[p] = "${" + p + "}";
    REQUIRE(instantiate(t, self) == text);
  }
}

TEST_CASE("property: placeholder-free bindings never leave placeholder syntax") {
  std::mt19937_64 rng(12);
  static const std::string alphabet = "xyz 019_-/";
  for (int n = 0; n < 2000; ++n) {
    const auto t = parse_template(random_template(rng, true));
    Bindings b;
    for (const auto& p : t.placeholders()) {
      std::string v;
      for (auto k = rng() % 6; k > 0; --k) v.push_back(alphabet[rng() % alphabet.size()]);
      b[p] = v;
    }
    const auto out = instantiate(t, b);
    REQUIRE(out.find("${") == std::string::npos);
  }
}

TEST_CASE("property: parsing is lossless") {
  std::mt19937_64 rng(13);
  for (int n = 0; n < 2000; ++n) {
    const auto text = random_template(rng, true);
    const auto t = parse_template(text);
    std::string rebuilt;
    for (const auto& s : t.segments()) {
      switch (s.kind) {
        case RecipeTemplate::Segment::Kind::Literal:
          rebuilt += s.text;
          break;
        case RecipeTemplate::Segment::Kind::Escape:
          rebuilt += "$$";
          break;
        case RecipeTemplate::Segment::Kind::Placeholder:
          rebuilt += "${" + s.text + "}";
          break;
      }
    }
    REQUIRE(rebuilt == text);
  }
}
