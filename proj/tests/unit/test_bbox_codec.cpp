// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "helpers.hpp"
#include "percept_tok/bbox_codec.hpp"
#include "percept_tok/rng.hpp"

using namespace percept;

namespace {

// Independent rounding oracle in floating point: half-up then clamp.
int scale_oracle(int v, int from, int to) {
  const double exact = static_cast<double>(v) * to / from;
  return std::clamp(static_cast<int>(std::floor(exact + 0.5)), 0, to - 1);
}

BBox random_box(Rng& rng, ImageSize size) {
  int x1 = static_cast<int>(rng.range(0, size.width - 1));
  int x2 = static_cast<int>(rng.range(0, size.width - 1));
  int y1 = static_cast<int>(rng.range(0, size.height - 1));
  int y2 = static_cast<int>(rng.range(0, size.height - 1));
  if (x1 > x2) std::swap(x1, x2);
  if (y1 > y2) std::swap(y1, y2);
  return {x1, y1, x2, y2};
}

}  // namespace

TEST_CASE("rescale examples") {
  CHECK(rescale_box({0, 0, 671, 671}, {672, 672}) == BBox{0, 0, 335, 335});
  CHECK(rescale_box({100, 200, 300, 400}, {672, 672}) == BBox{50, 100, 150, 200});
  CHECK_ERROR(rescale_box({5, 0, 4, 3}, {10, 10}), ErrorCode::kInvalidBox);
  CHECK_ERROR(rescale_box({0, 0, 10, 3}, {10, 10}), ErrorCode::kInvalidBox);
}

TEST_CASE("rescale agrees with a floating-point oracle and round trips within bound") {
  Rng rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const ImageSize size{static_cast<int>(rng.range(1, 2000)), static_cast<int>(rng.range(1, 2000))};
    const BBox b = random_box(rng, size);
    const BBox r = rescale_box(b, size);
    CHECK(r.x1 == scale_oracle(b.x1, size.width, 336));
    CHECK(r.y2 == scale_oracle(b.y2, size.height, 336));
    CHECK(r.x1 <= r.x2);
    CHECK(r.y1 <= r.y2);
    const BBox back = unscale_box(r, size);
    const int bx = (size.width + 335) / 336;
    const int by = (size.height + 335) / 336;
    CHECK(std::abs(back.x1 - b.x1) <= bx);
    CHECK(std::abs(back.x2 - b.x2) <= bx);
    CHECK(std::abs(back.y1 - b.y1) <= by);
    CHECK(std::abs(back.y2 - b.y2) <= by);
  }
}

TEST_CASE("rescale preserves containment up to one pixel") {
  Rng rng(22);
  for (int trial = 0; trial < 1000; ++trial) {
    const ImageSize size{static_cast<int>(rng.range(50, 1500)), static_cast<int>(rng.range(50, 1500))};
    const BBox outer = random_box(rng, size);
    const BBox inner{static_cast<int>(rng.range(outer.x1, outer.x2)), static_cast<int>(rng.range(outer.y1, outer.y2)),
                     outer.x2, outer.y2};
    const BBox a = rescale_box(inner, size);
    const BBox b = rescale_box(outer, size);
    CHECK(a.x1 >= b.x1 - 1);
    CHECK(a.y1 >= b.y1 - 1);
    CHECK(a.x2 <= b.x2 + 1);
    CHECK(a.y2 <= b.y2 + 1);
  }
}

TEST_CASE("box tokens") {
  const auto v = Vocabulary::build(1000);
  const auto t = box_to_tokens({0, 0, 335, 335}, v);
  CHECK(t == std::vector<TokenId>{v.surface_to_id("PIXEL_0"), v.surface_to_id("PIXEL_0"),
                                  v.surface_to_id("PIXEL_335"), v.surface_to_id("PIXEL_335")});
  Rng rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const BBox b = random_box(rng, {336, 336});
    CHECK(tokens_to_box(box_to_tokens(b, v), v) == b);
  }
  for (int a : {0, 335}) {
    for (int b : {0, 335}) {
      const BBox box{std::min(a, b), std::min(a, b), std::max(a, b), std::max(a, b)};
      CHECK(tokens_to_box(box_to_tokens(box, v), v) == box);
    }
  }
  const std::vector<TokenId> bad{v.pixel_token(5), v.pixel_token(5), v.pixel_token(2), v.pixel_token(9)};
  CHECK_ERROR(tokens_to_box(bad, v), ErrorCode::kMalformedBox);
  const std::vector<TokenId> three{v.pixel_token(1), v.pixel_token(1), v.pixel_token(2)};
  CHECK_ERROR(tokens_to_box(three, v), ErrorCode::kMalformedBox);
  const std::vector<TokenId> foreign{v.pixel_token(1), v.depth_token(1), v.pixel_token(2), v.pixel_token(2)};
  CHECK_ERROR(tokens_to_box(foreign, v), ErrorCode::kMalformedBox);
}

TEST_CASE("multi-box sequences") {
  const auto v = Vocabulary::build(10);
  const std::vector<BBox> boxes{{1, 2, 3, 4}, {0, 0, 335, 335}, {7, 7, 7, 7}};
  const auto toks = boxes_to_tokens(boxes, v);
  CHECK(toks.size() == 12);
  CHECK(tokens_to_boxes(toks, v) == boxes);
  CHECK(tokens_to_boxes({}, v).empty());
  std::vector<TokenId> odd(toks.begin(), toks.begin() + 6);
  CHECK_ERROR(tokens_to_boxes(odd, v), ErrorCode::kMalformedBox);
}

TEST_CASE("annotation jsonl") {
  const Annotation a{"img7", "chair", {{1, 2, 30, 40}, {0, 0, 5, 5}}};
  const auto line = annotation_to_jsonl(a);
  CHECK(line == R"({"image_id":"img7","category":"chair","boxes":[[1,2,30,40],[0,0,5,5]]})");
  CHECK(annotation_from_jsonl(line) == a);
  CHECK(annotation_to_jsonl(annotation_from_jsonl(line)) == line);
}
