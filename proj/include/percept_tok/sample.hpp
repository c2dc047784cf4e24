// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Prompt/response sequences mix natural-language text with auxiliary
// tokens. On disk a sequence is an array of strings: registered auxiliary
// surface forms decode to tokens, everything else is a text piece.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "percept_tok/vocab.hpp"

namespace percept {

using Piece = std::variant<std::string, TokenId>;
using Sequence = std::vector<Piece>;

void append_text(Sequence& seq, std::string text);
void append_tokens(Sequence& seq, std::span<const TokenId> tokens);

nlohmann::ordered_json sequence_to_json(const Sequence& seq, const Vocabulary& vocab);
Sequence sequence_from_json(const nlohmann::json& j, const Vocabulary& vocab);
/// Splits free text on whitespace; words naming auxiliary tokens become
/// tokens, consecutive other words are re-joined into one text piece.
Sequence sequence_from_text(std::string_view text, const Vocabulary& vocab);

/// All text pieces joined by single spaces.
std::string text_of(const Sequence& seq);
/// Maximal runs of consecutive auxiliary tokens, in order.
std::vector<std::vector<TokenId>> aux_spans(const Sequence& seq);

/// Text pieces map to base ids word by word via a stable FNV-1a hash
/// (a stand-in for a real text tokenizer); aux tokens pass through. Base id 0
/// is kept free for end-of-sequence whenever the base vocabulary allows it.
std::vector<TokenId> to_token_ids(const Sequence& seq, const Vocabulary& vocab);

enum class TaskKind { kDepthGen, kBBoxGen, kDepthCot, kDepthDirect, kCountCot, kCountDirect };

std::string_view task_name(TaskKind t);
TaskKind task_from_name(std::string_view name);
bool is_cot(TaskKind t);
bool is_direct(TaskKind t);

struct MarkerPoint {
  char label = 'A';
  int x = 0;
  int y = 0;
  bool operator==(const MarkerPoint&) const = default;
};

struct QASample {
  std::string image_id;
  TaskKind task = TaskKind::kDepthGen;
  Sequence prompt;
  Sequence response;
  /// Task-specific ground truth: markers/label, or category/count.
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
};

/// Fixed field order: image_id, task, prompt, response, meta.
std::string sample_to_jsonl(const QASample& s, const Vocabulary& vocab);
QASample sample_from_jsonl(const std::string& line, const Vocabulary& vocab);

}  // namespace percept
