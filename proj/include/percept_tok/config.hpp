// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "percept_tok/bench.hpp"
#include "percept_tok/curriculum.hpp"
#include "percept_tok/datagen.hpp"
#include "percept_tok/losses.hpp"

namespace percept {

/// Every knob of a CLI invocation. The JSON form is nested by section;
/// reading a partial document leaves unspecified knobs untouched.
struct RunConfig {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::uint32_t base_size = 32000;

  struct Paths {
    std::string vocab = "vocab.json";
    std::string codebook = "codebook.json";
    std::string templates;  // empty: compiled-in defaults
    std::string out_dir = "out";
    bool operator==(const Paths&) const = default;
  } paths;

  struct CodebookKnobs {
    int k = kDepthCodes;
    std::size_t maps = 1000;
    /// Patches sampled per training map; 0 keeps all 100.
    int patches_per_map = 32;
    int max_iters = 50;
    double tol = 1e-4;
    bool operator==(const CodebookKnobs&) const = default;
  } codebook;

  BenchConfig bench;
  std::size_t bench_scenes = 124;

  Schedule schedule{1.0, 1.0, 10000};
  double epsilon = kLogEpsilon;

  CorpusConfig corpus;

  std::string grammar = "perception";
  std::size_t max_len = 1024;

  /// Overlays the keys present in `j`; unknown keys throw InvalidArgument.
  void merge_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  void merge_file(const std::string& path);
};

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace percept
