// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "helpers.hpp"
#include "percept_tok/config.hpp"
#include "percept_tok/grammar.hpp"
#include "percept_tok/io.hpp"

using namespace percept;

TEST_CASE("run config round trip") {
  RunConfig c;
  CHECK(RunConfig::from_json(c.to_json()) == c);
  c.seed = 42;
  c.jobs = 3;
  c.codebook.k = 64;
  c.bench.delta_depth = 0.2;
  c.corpus.depth_gen = 7;
  c.grammar = "bbox_tuples";
  const auto j = c.to_json();
  CHECK(RunConfig::from_json(j) == c);
  CHECK(RunConfig::from_json(j).to_json().dump() == j.dump());
}

TEST_CASE("partial overlays") {
  RunConfig c;
  c.merge_json(nlohmann::json::parse(R"({"seed": 9, "codebook": {"k": 32}, "bench": {"scenes": 10}})"));
  CHECK(c.seed == 9);
  CHECK(c.codebook.k == 32);
  CHECK(c.codebook.maps == 1000);
  CHECK(c.bench_scenes == 10);
  CHECK_ERROR(c.merge_json(nlohmann::json::parse(R"({"sed": 1})")), ErrorCode::kInvalidArgument);
  CHECK_ERROR(c.merge_json(nlohmann::json::parse(R"({"codebook": {"kk": 1}})")), ErrorCode::kInvalidArgument);

  const auto dir = testutil::scratch("config");
  const std::string path = (dir / "run.json").string();
  io::write_file_atomic(path, R"({"jobs": 2, "grammar": {"name": "unrestricted", "max_len": 64}})");
  RunConfig f;
  f.merge_file(path);
  CHECK(f.jobs == 2);
  CHECK(f.grammar == "unrestricted");
  CHECK(f.max_len == 64);
}

TEST_CASE("shipped grammar files match the built-ins") {
  const auto vocab = Vocabulary::build(32);
  for (const auto& name : GrammarAutomaton::builtin_names()) {
    const std::string path = std::string(PERCEPT_SOURCE_DIR) + "/grammars/" + name + ".json";
    CHECK(nlohmann::json::parse(io::read_file(path)) == GrammarAutomaton::builtin_description(name));
    const auto g = GrammarAutomaton::load(path, vocab);
    CHECK(g.num_states() == GrammarAutomaton::builtin(name, vocab).num_states());
  }
}
