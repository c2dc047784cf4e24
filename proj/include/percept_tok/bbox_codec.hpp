// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "percept_tok/vocab.hpp"

namespace percept {

inline constexpr int kBoxSpace = kPixelPositions;  // 336

/// Axis-aligned box with inclusive integer corners (x1, y1, x2, y2).
struct BBox {
  int x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  bool operator==(const BBox&) const = default;
};

struct ImageSize {
  int width = 1;
  int height = 1;
  bool operator==(const ImageSize&) const = default;
};

/// Scales a box given in original image coordinates into 336-space:
/// round-half-up, then clamp to [0, 335]. Throws InvalidBox when the input
/// is out of bounds or unordered.
BBox rescale_box(const BBox& box, ImageSize size);
/// Inverse scaling back to original coordinates (same rounding rule).
BBox unscale_box(const BBox& box, ImageSize size);

/// Scales a single coordinate along an axis of `extent` pixels into 336-space.
int to_box_space(int coordinate, int extent);
int from_box_space(int coordinate, int extent);

std::vector<TokenId> box_to_tokens(const BBox& box, const Vocabulary& vocab);
/// Exactly 4 PIXEL tokens with x1 <= x2 and y1 <= y2, else MalformedBox.
BBox tokens_to_box(std::span<const TokenId> seq, const Vocabulary& vocab);

/// Consecutive 4-tuples; arity must be a multiple of four.
std::vector<TokenId> boxes_to_tokens(std::span<const BBox> boxes, const Vocabulary& vocab);
std::vector<BBox> tokens_to_boxes(std::span<const TokenId> seq, const Vocabulary& vocab);

/// One line of an annotation JSONL file (boxes in original coordinates).
struct Annotation {
  std::string image_id;
  std::string category;
  std::vector<BBox> boxes;
  bool operator==(const Annotation&) const = default;
};

std::string annotation_to_jsonl(const Annotation& a);
Annotation annotation_from_jsonl(const std::string& line);

}  // namespace percept
