// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "percept_tok/sample.hpp"

#include <array>
#include <sstream>

#include "percept_tok/error.hpp"

namespace percept {

void append_text(Sequence& seq, std::string text) { seq.emplace_back(std::move(text)); }

void append_tokens(Sequence& seq, std::span<const TokenId> tokens) {
  for (TokenId t : tokens) seq.emplace_back(t);
}

nlohmann::ordered_json sequence_to_json(const Sequence& seq, const Vocabulary& vocab) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : seq) {
    if (const auto* text = std::get_if<std::string>(&p)) {
      if (vocab.is_aux_surface(*text) || vocab.find(*text)) {
        fail(ErrorCode::kInvalidArgument, "text piece collides with a token surface form: " + *text);
      }
      arr.push_back(*text);
    } else {
      arr.push_back(vocab.id_to_surface(std::get<TokenId>(p)));
    }
  }
  return arr;
}

Sequence sequence_from_json(const nlohmann::json& j, const Vocabulary& vocab) {
  if (j.is_string()) return sequence_from_text(j.get<std::string>(), vocab);
  if (!j.is_array()) fail(ErrorCode::kInvalidArgument, "sequence must be a string or an array");
  Sequence seq;
  for (const auto& e : j) {
    const auto s = e.get<std::string>();
    if (auto id = vocab.find(s)) {
      seq.emplace_back(*id);
    } else {
      seq.emplace_back(s);
    }
  }
  return seq;
}

Sequence sequence_from_text(std::string_view text, const Vocabulary& vocab) {
  Sequence seq;
  std::string pending;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    if (vocab.is_aux_surface(word)) {
      if (!pending.empty()) {
        seq.emplace_back(std::move(pending));
        pending.clear();
      }
      seq.emplace_back(vocab.surface_to_id(word));
    } else {
      if (!pending.empty()) pending += ' ';
      pending += word;
    }
  }
  if (!pending.empty()) seq.emplace_back(std::move(pending));
  return seq;
}

std::string text_of(const Sequence& seq) {
  std::string out;
  for (const auto& p : seq) {
    if (const auto* text = std::get_if<std::string>(&p)) {
      if (!out.empty()) out += ' ';
      out += *text;
    }
  }
  return out;
}

std::vector<std::vector<TokenId>> aux_spans(const Sequence& seq) {
  std::vector<std::vector<TokenId>> spans;
  bool in_span = false;
  for (const auto& p : seq) {
    if (const auto* t = std::get_if<TokenId>(&p)) {
      if (!in_span) spans.emplace_back();
      spans.back().push_back(*t);
      in_span = true;
    } else {
      in_span = false;
    }
  }
  return spans;
}

std::vector<TokenId> to_token_ids(const Sequence& seq, const Vocabulary& vocab) {
  std::vector<TokenId> out;
  for (const auto& p : seq) {
    if (const auto* t = std::get_if<TokenId>(&p)) {
      out.push_back(*t);
      continue;
    }
    std::istringstream in(std::get<std::string>(p));
    std::string word;
    while (in >> word) {
      std::uint64_t h = 0xcbf29ce484222325ULL;
      for (unsigned char c : word) {
        h ^= c;
        h *= 0x100000001b3ULL;
      }
      const std::uint64_t span = vocab.base_size() > 1 ? vocab.base_size() - 1 : 1;
      out.push_back(static_cast<TokenId>(vocab.base_size() > 1 ? 1 + h % span : 0));
    }
  }
  return out;
}

namespace {
constexpr std::array<std::string_view, 6> kTaskNames = {
    "depth_gen", "bbox_gen", "depth_cot", "depth_direct", "count_cot", "count_direct"};
}

std::string_view task_name(TaskKind t) { return kTaskNames[static_cast<std::size_t>(t)]; }

TaskKind task_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kTaskNames.size(); ++i) {
    if (kTaskNames[i] == name) return static_cast<TaskKind>(i);
  }
  fail(ErrorCode::kInvalidArgument, "unknown task kind: " + std::string(name));
}

bool is_cot(TaskKind t) { return t == TaskKind::kDepthCot || t == TaskKind::kCountCot; }
bool is_direct(TaskKind t) { return t == TaskKind::kDepthDirect || t == TaskKind::kCountDirect; }

std::string sample_to_jsonl(const QASample& s, const Vocabulary& vocab) {
  nlohmann::ordered_json j;
  j["image_id"] = s.image_id;
  j["task"] = task_name(s.task);
  j["prompt"] = sequence_to_json(s.prompt, vocab);
  j["response"] = sequence_to_json(s.response, vocab);
  j["meta"] = s.meta;
  return j.dump();
}

QASample sample_from_jsonl(const std::string& line, const Vocabulary& vocab) {
  QASample s;
  try {
    const auto j = nlohmann::ordered_json::parse(line);
    s.image_id = j.at("image_id").get<std::string>();
    s.task = task_from_name(j.at("task").get<std::string>());
    s.prompt = sequence_from_json(j.at("prompt"), vocab);
    s.response = sequence_from_json(j.at("response"), vocab);
    s.meta = j.at("meta");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("malformed sample: ") + e.what());
  }
  return s;
}

}  // namespace percept
