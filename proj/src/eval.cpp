// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "percept_tok/eval.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "percept_tok/bbox_codec.hpp"
#include "percept_tok/error.hpp"
#include "percept_tok/io.hpp"
#include "percept_tok/losses.hpp"

namespace percept {

namespace {

constexpr std::array<std::string_view, 16> kNumberWords = {
    "zero", "one", "two",    "three",    "four",     "five",    "six",     "seven",
    "eight", "nine", "ten",  "eleven",   "twelve",   "thirteen", "fourteen", "fifteen"};

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void finalize(EvalReport& report) {
  std::sort(report.items.begin(), report.items.end(),
            [](const ItemRecord& a, const ItemRecord& b) { return a.id < b.id; });
  report.total = report.items.size();
  report.correct = report.incorrect = report.skipped = report.inconsistent = 0;
  for (const auto& r : report.items) {
    if (r.unparseable) {
      ++report.skipped;
    } else if (r.correct) {
      ++report.correct;
    } else {
      ++report.incorrect;
    }
    if (r.inconsistent) ++report.inconsistent;
  }
  report.accuracy =
      report.total == 0 ? 0.0 : static_cast<double>(report.correct) / static_cast<double>(report.total);
}

std::unordered_map<std::string, const Response*> index_responses(std::span<const Response> responses) {
  std::unordered_map<std::string, const Response*> by_id;
  for (const auto& r : responses) {
    if (!by_id.emplace(r.id, &r).second) {
      fail(ErrorCode::kInvalidArgument, "duplicate response for item " + r.id);
    }
  }
  return by_id;
}

// The first aux span that opens with DEPTH_START, if any.
std::optional<std::vector<TokenId>> depth_span(const Sequence& answer, const Vocabulary& vocab) {
  for (auto& span : aux_spans(answer)) {
    const auto it = std::find(span.begin(), span.end(), vocab.depth_start());
    const bool has_depth = std::any_of(span.begin(), span.end(), [&](TokenId t) {
      return vocab.is_depth(t) || t == vocab.depth_end();
    });
    if (it != span.end() || has_depth) return std::vector<TokenId>(it == span.end() ? span.begin() : it, span.end());
  }
  return std::nullopt;
}

std::string label_sentence(char label) {
  return std::string("Therefore, point ") + label + " is closest to the camera.";
}

}  // namespace

char extract_label(std::string_view answer, int n_markers) {
  if (n_markers < 1 || n_markers > 26) fail(ErrorCode::kInvalidArgument, "marker count out of range");
  std::optional<char> found;
  for (std::size_t i = 0; i < answer.size(); ++i) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(answer[i])));
    if (c < 'A' || c >= 'A' + n_markers) continue;
    const bool left_ok = i == 0 || !is_word_char(answer[i - 1]);
    const bool right_ok = i + 1 == answer.size() || !is_word_char(answer[i + 1]);
    if (left_ok && right_ok) found = c;
  }
  if (!found) fail(ErrorCode::kUnparseable, "no marker label in answer");
  return *found;
}

int extract_count(std::string_view answer) {
  std::optional<int> found;
  std::size_t i = 0;
  while (i < answer.size()) {
    if (!is_word_char(answer[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < answer.size() && is_word_char(answer[j])) ++j;
    const std::string word = lower(answer.substr(i, j - i));
    if (std::all_of(word.begin(), word.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      if (word.size() <= 9) found = std::stoi(word);
    } else {
      for (std::size_t w = 0; w < kNumberWords.size(); ++w) {
        if (word == kNumberWords[w]) found = static_cast<int>(w);
      }
    }
    i = j;
  }
  if (!found) fail(ErrorCode::kUnparseable, "no count in answer");
  return *found;
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["total"] = total;
  j["correct"] = correct;
  j["incorrect"] = incorrect;
  j["skipped"] = skipped;
  j["accuracy"] = accuracy;
  j["inconsistent"] = inconsistent;
  auto items_json = nlohmann::ordered_json::array();
  for (const auto& r : items) {
    nlohmann::ordered_json ij;
    ij["id"] = r.id;
    ij["predicted"] = r.predicted;
    ij["gt"] = r.gt;
    ij["correct"] = r.correct;
    ij["unparseable"] = r.unparseable;
    ij["inconsistent"] = r.inconsistent;
    items_json.push_back(std::move(ij));
  }
  j["items"] = std::move(items_json);
  return j;
}

std::string EvalReport::to_table() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-28s %7s %7s %9s %7s %8s %12s\n", "suite", "total", "correct",
                "incorrect", "skipped", "accuracy", "inconsistent");
  std::string out = buf;
  std::snprintf(buf, sizeof(buf), "%-28s %7zu %7zu %9zu %7zu %8.4f %12zu\n", suite.c_str(), total,
                correct, incorrect, skipped, accuracy, inconsistent);
  out += buf;
  return out;
}

std::vector<Response> read_responses(const std::string& path, const Vocabulary& vocab) {
  std::vector<Response> out;
  for (const auto& line : io::read_lines(path)) {
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("id").get<std::string>(), sequence_from_json(j.at("answer"), vocab)});
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kInvalidArgument, std::string("malformed response: ") + e.what());
    }
  }
  return out;
}

std::string response_to_jsonl(const Response& r, const Vocabulary& vocab) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["answer"] = sequence_to_json(r.answer, vocab);
  return j.dump();
}

DepthEval relative_depth_accuracy(std::span<const Response> responses,
                                  std::span<const BenchmarkItem> suite, const Codebook& cb,
                                  const Vocabulary& vocab, const DepthEvalOptions& options) {
  const auto by_id = index_responses(responses);
  DepthEval out;
  out.label.suite = "relative_depth.label";
  out.map_consistency.suite = "relative_depth.map";
  for (const auto& item : suite) {
    const std::string gt(1, item.gt_label);
    ItemRecord label{item.id, "", gt};
    ItemRecord map{item.id, "", gt};
    const auto it = by_id.find(item.id);
    if (it == by_id.end()) {
      label.unparseable = map.unparseable = true;
    } else {
      const Sequence& answer = it->second->answer;
      try {
        const char c = extract_label(text_of(answer), static_cast<int>(item.markers.size()));
        label.predicted = std::string(1, c);
        label.correct = c == item.gt_label;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUnparseable) throw;
        label.unparseable = true;
      }
      const auto span = depth_span(answer, vocab);
      if (!span) {
        map.unparseable = true;
      } else {
        try {
          const DepthMap decoded = decode(tokens_to_grid(*span, vocab), cb);
          const char c = closest_label(
              item.markers, marker_disparities(decoded, item.size, item.markers, options.bilinear));
          map.predicted = std::string(1, c);
          map.correct = c == item.gt_label;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kMalformedSequence && e.code() != ErrorCode::kIndexOutOfRange) throw;
          map.unparseable = true;
        }
      }
    }
    out.label.items.push_back(std::move(label));
    out.map_consistency.items.push_back(std::move(map));
  }
  finalize(out.label);
  finalize(out.map_consistency);
  return out;
}

EvalReport counting_accuracy(std::span<const Response> responses, std::span<const CountItem> suite,
                             const Vocabulary& vocab) {
  const auto by_id = index_responses(responses);
  EvalReport report;
  report.suite = "counting";
  for (const auto& item : suite) {
    ItemRecord rec{item.id, "", std::to_string(item.gt_count)};
    const auto it = by_id.find(item.id);
    if (it == by_id.end()) {
      rec.unparseable = true;
      report.items.push_back(std::move(rec));
      continue;
    }
    const Sequence& answer = it->second->answer;
    std::optional<int> count;
    try {
      count = extract_count(text_of(answer));
      rec.predicted = std::to_string(*count);
      rec.correct = *count == item.gt_count;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnparseable) throw;
      rec.unparseable = true;
    }
    std::vector<TokenId> pixels;
    bool other_aux = false;
    for (const auto& span : aux_spans(answer)) {
      for (TokenId t : span) {
        if (vocab.is_pixel(t)) {
          pixels.push_back(t);
        } else {
          other_aux = true;
        }
      }
    }
    if (!pixels.empty() || other_aux) {
      try {
        const auto boxes = tokens_to_boxes(pixels, vocab);
        rec.inconsistent = other_aux || (count && static_cast<std::size_t>(*count) != boxes.size());
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kMalformedBox) throw;
        rec.inconsistent = true;
      }
    }
    report.items.push_back(std::move(rec));
  }
  finalize(report);
  return report;
}

double recon_mse(std::span<const TokenId> pred_tokens, const DepthMap& gt_map, const Codebook& cb,
                 const Vocabulary& vocab) {
  return recon_loss(tokens_to_grid(pred_tokens, vocab), gt_map, cb);
}

std::vector<Response> oracle_depth_responses(std::span<const BenchmarkItem> suite,
                                             std::span<const DepthMap> maps, const Codebook& cb,
                                             const Vocabulary& vocab, bool bilinear) {
  if (maps.size() != suite.size()) fail(ErrorCode::kInvalidArgument, "one depth map per item required");
  std::vector<Response> out;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const CodeGrid grid = encode(maps[i], cb);
    const DepthMap decoded = decode(grid, cb);
    const char label = closest_label(
        suite[i].markers, marker_disparities(decoded, suite[i].size, suite[i].markers, bilinear));
    Response r{suite[i].id, {}};
    append_text(r.answer, "The depth map is");
    append_tokens(r.answer, grid_to_tokens(grid, vocab));
    append_text(r.answer, label_sentence(label));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Response> oracle_count_responses(std::span<const CountItem> suite,
                                             const Vocabulary& vocab) {
  std::vector<Response> out;
  for (const auto& item : suite) {
    Response r{item.id, {}};
    std::vector<BBox> boxes;
    for (const auto& b : item.gt_boxes) boxes.push_back(rescale_box(b, item.size));
    append_text(r.answer, "The bounding boxes are");
    append_tokens(r.answer, boxes_to_tokens(boxes, vocab));
    append_text(r.answer, "The total number of " + plural(item.category) + " is " +
                              std::to_string(item.gt_count) + ".");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace percept
