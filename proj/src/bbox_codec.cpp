// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "percept_tok/bbox_codec.hpp"

#include <algorithm>
#include <cstdint>

#include "json.hpp"
#include "percept_tok/error.hpp"

namespace percept {

namespace {

// floor(num / den + 1/2) in exact integer arithmetic.
int round_half_up(std::int64_t num, std::int64_t den) {
  return static_cast<int>((2 * num + den) / (2 * den));
}

void check_order(const BBox& b, ErrorCode code) {
  if (b.x1 > b.x2 || b.y1 > b.y2) {
    fail(code, "box corners out of order (" + std::to_string(b.x1) + "," +
                   std::to_string(b.y1) + "," + std::to_string(b.x2) + "," +
                   std::to_string(b.y2) + ")");
  }
}

}  // namespace

int to_box_space(int coordinate, int extent) {
  return std::clamp(round_half_up(static_cast<std::int64_t>(coordinate) * kBoxSpace, extent), 0,
                    kBoxSpace - 1);
}

int from_box_space(int coordinate, int extent) {
  return std::clamp(round_half_up(static_cast<std::int64_t>(coordinate) * extent, kBoxSpace), 0,
                    extent - 1);
}

BBox rescale_box(const BBox& box, ImageSize size) {
  if (size.width < 1 || size.height < 1) fail(ErrorCode::kInvalidBox, "image size must be >= 1");
  check_order(box, ErrorCode::kInvalidBox);
  if (box.x1 < 0 || box.y1 < 0 || box.x2 >= size.width || box.y2 >= size.height) {
    fail(ErrorCode::kInvalidBox, "box outside image bounds");
  }
  return {to_box_space(box.x1, size.width), to_box_space(box.y1, size.height),
          to_box_space(box.x2, size.width), to_box_space(box.y2, size.height)};
}

BBox unscale_box(const BBox& box, ImageSize size) {
  check_order(box, ErrorCode::kInvalidBox);
  return {from_box_space(box.x1, size.width), from_box_space(box.y1, size.height),
          from_box_space(box.x2, size.width), from_box_space(box.y2, size.height)};
}

std::vector<TokenId> box_to_tokens(const BBox& box, const Vocabulary& vocab) {
  check_order(box, ErrorCode::kInvalidBox);
  return {vocab.pixel_token(box.x1), vocab.pixel_token(box.y1), vocab.pixel_token(box.x2),
          vocab.pixel_token(box.y2)};
}

BBox tokens_to_box(std::span<const TokenId> seq, const Vocabulary& vocab) {
  if (seq.size() != 4) {
    fail(ErrorCode::kMalformedBox, "box needs 4 tokens, got " + std::to_string(seq.size()));
  }
  for (TokenId t : seq) {
    if (!vocab.is_pixel(t)) fail(ErrorCode::kMalformedBox, "non-PIXEL token in box tuple");
  }
  BBox b{vocab.pixel_coordinate(seq[0]), vocab.pixel_coordinate(seq[1]),
         vocab.pixel_coordinate(seq[2]), vocab.pixel_coordinate(seq[3])};
  check_order(b, ErrorCode::kMalformedBox);
  return b;
}

std::vector<TokenId> boxes_to_tokens(std::span<const BBox> boxes, const Vocabulary& vocab) {
  std::vector<TokenId> out;
  out.reserve(boxes.size() * 4);
  for (const auto& b : boxes) {
    const auto t = box_to_tokens(b, vocab);
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

std::vector<BBox> tokens_to_boxes(std::span<const TokenId> seq, const Vocabulary& vocab) {
  if (seq.size() % 4 != 0) {
    fail(ErrorCode::kMalformedBox, "box token arity " + std::to_string(seq.size()) +
                                       " is not a multiple of 4");
  }
  std::vector<BBox> out;
  for (std::size_t i = 0; i < seq.size(); i += 4) out.push_back(tokens_to_box(seq.subspan(i, 4), vocab));
  return out;
}

std::string annotation_to_jsonl(const Annotation& a) {
  nlohmann::ordered_json j;
  j["image_id"] = a.image_id;
  j["category"] = a.category;
  auto boxes = nlohmann::ordered_json::array();
  for (const auto& b : a.boxes) boxes.push_back({b.x1, b.y1, b.x2, b.y2});
  j["boxes"] = std::move(boxes);
  return j.dump();
}

Annotation annotation_from_jsonl(const std::string& line) {
  Annotation a;
  try {
    const auto j = nlohmann::json::parse(line);
    a.image_id = j.at("image_id").get<std::string>();
    a.category = j.at("category").get<std::string>();
    for (const auto& b : j.at("boxes")) {
      if (b.size() != 4) fail(ErrorCode::kInvalidBox, "annotation box must have 4 coordinates");
      a.boxes.push_back({b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("malformed annotation: ") + e.what());
  }
  return a;
}

}  // namespace percept
