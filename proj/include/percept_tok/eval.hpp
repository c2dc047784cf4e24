// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "percept_tok/bench.hpp"
#include "percept_tok/depth_codec.hpp"
#include "percept_tok/sample.hpp"
#include "percept_tok/vocab.hpp"

namespace percept {

/// Last standalone letter in A..A+n-1 (case-insensitive); letters beyond
/// the marker count are ignored. Throws Unparseable when none is found.
char extract_label(std::string_view answer, int n_markers);
/// Last integer literal, or a number word zero..fifteen. Throws Unparseable.
int extract_count(std::string_view answer);

struct ItemRecord {
  std::string id;
  std::string predicted;  // empty when unparseable
  std::string gt;
  bool correct = false;
  bool unparseable = false;
  /// Counting only: stated count disagrees with the number of emitted boxes,
  /// or the box span itself is malformed.
  bool inconsistent = false;
};

struct EvalReport {
  std::string suite;
  std::vector<ItemRecord> items;  // sorted by id
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::size_t skipped = 0;  // unparseable, scored as incorrect
  double accuracy = 0.0;
  std::size_t inconsistent = 0;

  nlohmann::ordered_json to_json() const;
  std::string to_table() const;
};

/// A response keyed by suite item id; `answer` is free text or an array of
/// surface forms.
struct Response {
  std::string id;
  Sequence answer;
};

std::vector<Response> read_responses(const std::string& path, const Vocabulary& vocab);
std::string response_to_jsonl(const Response& r, const Vocabulary& vocab);

struct DepthEvalOptions {
  bool bilinear = false;
};

struct DepthEval {
  /// Final-label agreement with ground truth.
  EvalReport label;
  /// Argmax of the decoded depth span at the marker coordinates.
  EvalReport map_consistency;
};

/// Items without a response are scored as unparseable. Responses with a
/// depth span feed the map-consistency report; all feed the label report.
DepthEval relative_depth_accuracy(std::span<const Response> responses,
                                  std::span<const BenchmarkItem> suite, const Codebook& cb,
                                  const Vocabulary& vocab, const DepthEvalOptions& options = {});

EvalReport counting_accuracy(std::span<const Response> responses, std::span<const CountItem> suite,
                             const Vocabulary& vocab);

/// MSE of the decoded prediction against a canonical ground-truth map.
double recon_mse(std::span<const TokenId> pred_tokens, const DepthMap& gt_map, const Codebook& cb,
                 const Vocabulary& vocab);

/// Oracle responses: ground-truth depth tokens and a label read back from
/// the decoded map.
std::vector<Response> oracle_depth_responses(std::span<const BenchmarkItem> suite,
                                             std::span<const DepthMap> maps, const Codebook& cb,
                                             const Vocabulary& vocab, bool bilinear = false);
/// Oracle responses: ground-truth boxes (rescaled to 336-space) and count.
std::vector<Response> oracle_count_responses(std::span<const CountItem> suite,
                                             const Vocabulary& vocab);

}  // namespace percept
