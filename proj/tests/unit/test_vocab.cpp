// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include <set>

#include "helpers.hpp"
#include "percept_tok/vocab.hpp"

using namespace percept;

TEST_CASE("vocabulary sizes") {
  CHECK(Vocabulary::build(32000).size() == 32466);
  CHECK(Vocabulary::build(1).size() == 467);
}

TEST_CASE("contiguous layout") {
  const auto v = Vocabulary::build(32000);
  CHECK(v.surface_to_id("DEPTH_127") == 32000 + 127);
  CHECK(v.surface_to_id("DEPTH_0") == 32000);
  // Enumerate the expected layout independently and check both directions.
  std::vector<std::string> expected;
  for (int i = 0; i < 128; ++i) expected.push_back("DEPTH_" + std::to_string(i));
  expected.push_back("DEPTH_START");
  expected.push_back("DEPTH_END");
  for (int i = 0; i < 336; ++i) expected.push_back("PIXEL_" + std::to_string(i));
  REQUIRE(expected.size() == v.size() - v.base_size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const TokenId id = static_cast<TokenId>(32000 + i);
    CHECK(v.id_to_surface(id) == expected[i]);
    CHECK(v.surface_to_id(expected[i]) == id);
  }
}

TEST_CASE("surface lookups") {
  const auto v = Vocabulary::build(100);
  CHECK(v.surface_to_id("DEPTH_START") == v.depth_start());
  CHECK(v.surface_to_id("PIXEL_0") == v.family("PIXEL").first);
  CHECK_ERROR(v.surface_to_id("DEPTH_128"), ErrorCode::kUnknownToken);
  CHECK_ERROR(v.surface_to_id("PIXEL_336"), ErrorCode::kUnknownToken);
  CHECK(v.id_to_surface(5) == "<base:5>");
  CHECK(v.surface_to_id("<base:5>") == 5);
  CHECK_FALSE(v.find("hello").has_value());
}

TEST_CASE("round trip over the whole vocabulary and disjoint families") {
  const auto v = Vocabulary::build(50);
  std::set<std::string> forms;
  for (TokenId t = 0; t < v.size(); ++t) {
    const auto f = v.id_to_surface(t);
    CHECK(forms.insert(f).second);
    CHECK(v.surface_to_id(f) == t);
    int owners = v.is_base(t) ? 1 : 0;
    for (const auto& fam : v.families()) owners += fam.contains(t) ? 1 : 0;
    CHECK(owners == 1);
  }
  CHECK(v.family("DEPTH").size() == 128);
  CHECK(v.family("PIXEL").size() == 336);
  CHECK(v.family("DELIM").size() == 2);
}

TEST_CASE("json round trip is bit-stable") {
  const auto v = Vocabulary::build(32000);
  const auto text = v.to_json().dump();
  const auto back = Vocabulary::from_json(nlohmann::json::parse(text));
  CHECK(back.to_json().dump() == text);
  CHECK(back.size() == v.size());
  CHECK(back.depth_token(17) == v.depth_token(17));
  CHECK(text.rfind("{\"base_size\":32000,\"families\":[", 0) == 0);
}

TEST_CASE("specialist mapping is a bijection") {
  const auto v = Vocabulary::build(10);
  const auto m = SpecialistMapping::identity(v);
  REQUIRE(m.size() == 128);
  std::set<TokenId> image;
  for (int c = 0; c < 128; ++c) {
    CHECK(m.to_aux(c) == v.depth_token(c));
    CHECK(m.to_code(m.to_aux(c)) == c);
    image.insert(m.to_aux(c));
  }
  CHECK(image.size() == 128);
  std::vector<int> perm(128);
  for (int i = 0; i < 128; ++i) perm[static_cast<std::size_t>(i)] = 127 - i;
  const auto r = SpecialistMapping::from_codes(v, perm);
  CHECK(r.to_aux(0) == v.depth_token(127));
  perm[0] = perm[1];
  CHECK_ERROR(SpecialistMapping::from_codes(v, perm), ErrorCode::kSupportMismatch);
}

TEST_CASE("token accessors validate ranges") {
  const auto v = Vocabulary::build(10);
  CHECK_ERROR(v.depth_token(128), ErrorCode::kIndexOutOfRange);
  CHECK_ERROR(v.pixel_token(-1), ErrorCode::kIndexOutOfRange);
  CHECK(v.depth_code(v.depth_token(9)) == 9);
  CHECK(v.pixel_coordinate(v.pixel_token(335)) == 335);
  CHECK_ERROR(v.depth_code(v.pixel_token(3)), ErrorCode::kMalformedSequence);
  CHECK_ERROR(v.pixel_coordinate(v.depth_token(3)), ErrorCode::kMalformedBox);
}
