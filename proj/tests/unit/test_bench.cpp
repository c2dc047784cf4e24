// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "percept_tok/bench.hpp"
#include "percept_tok/datagen.hpp"

using namespace percept;

namespace {

DepthMap horizontal_gradient() {
  DepthMap m(kCanonicalSize, kCanonicalSize);
  for (int y = 0; y < kCanonicalSize; ++y)
    for (int x = 0; x < kCanonicalSize; ++x) m.at(x, y) = static_cast<double>(x) / kCanonicalSize;
  return m;
}

// Brute-force check of every pair against the placement rules.
void verify_pairs(const DepthMap& map, ImageSize size, const MarkerSet& ms, const PlacementParams& p) {
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto& a = ms.markers[i];
    CHECK(a.label == static_cast<char>('A' + i));
    CHECK(a.x >= 0);
    CHECK(a.x < size.width);
    CHECK(a.y >= p.band_lo * size.height - 1e-9);
    CHECK(a.y <= p.band_hi * size.height + 1e-9);
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      const auto& b = ms.markers[j];
      const double da = sample_disparity(map, a.x, a.y, size.width, size.height);
      const double db = sample_disparity(map, b.x, b.y, size.width, size.height);
      CHECK(std::abs(da - db) >= p.delta_depth);
      CHECK(std::hypot(a.x - b.x, a.y - b.y) >= p.delta_xy);
    }
  }
}

}  // namespace

TEST_CASE("marker placement") {
  const auto grad = horizontal_gradient();
  const ImageSize size{640, 480};
  PlacementParams p{3, 0.15, 0.15 * 480, 0.4, 0.6, 10000, false};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto ms = place_markers(grad, size, p, rng);
    REQUIRE(ms.size() == 3);
    verify_pairs(grad, size, ms, p);
    Rng again(seed);
    CHECK(place_markers(grad, size, p, again) == ms);
  }
  const DepthMap flat(kCanonicalSize, kCanonicalSize, 0.5);
  Rng rng(0);
  p.n = 1;
  CHECK(place_markers(flat, size, p, rng).size() == 1);
  p.n = 2;
  p.max_attempts = 200;
  CHECK_ERROR(place_markers(flat, size, p, rng), ErrorCode::kPlacementInfeasible);
  p.n = 6;
  CHECK_ERROR(place_markers(grad, size, p, rng), ErrorCode::kInvalidArgument);
}

TEST_CASE("closest label and separation") {
  MarkerSet ms{{{'A', 10, 10}, {'B', 200, 10}}};
  const std::vector<double> d{0.9, 0.2};
  CHECK(closest_label(ms, d) == 'A');
  const std::vector<double> d2{0.2, 0.9};
  CHECK(closest_label(ms, d2) == 'B');
  const auto grad = horizontal_gradient();
  MarkerSet near{{{'A', 100, 150}, {'B', 110, 150}}};
  CHECK_ERROR(check_separation(grad, {320, 320}, near, 0.15, 10.0), ErrorCode::kDegenerateMarkers);
  MarkerSet far{{{'A', 10, 150}, {'B', 300, 150}}};
  CHECK_NOTHROW(check_separation(grad, {320, 320}, far, 0.15, 10.0));
}

TEST_CASE("benchmark suites") {
  const auto scenes = make_scenes(3, SceneStream::kBenchmark, 30);
  const BenchConfig cfg;
  std::set<char> gts;
  for (int n = 2; n <= 5; ++n) {
    const auto suite = build_benchmark(scenes, n, cfg, 3);
    CHECK(suite.items.size() + suite.skipped == scenes.size());
    for (const auto& item : suite.items) {
      const Scene* sc = nullptr;
      for (const auto& s : scenes) if (s.id == item.image_id) sc = &s;
      REQUIRE(sc != nullptr);
      CHECK(item.size == sc->size);
      REQUIRE(item.markers.size() == static_cast<std::size_t>(n));
      verify_pairs(sc->depth, sc->size, item.markers, placement_params(cfg, sc->size, n));
      // Recompute the unique argmax from scene disparity.
      std::vector<double> d;
      for (const auto& m : item.markers.markers) d.push_back(sample_disparity(sc->depth, m.x, m.y, sc->size.width, sc->size.height));
      const auto best = std::max_element(d.begin(), d.end()) - d.begin();
      CHECK(std::count(d.begin(), d.end(), d[static_cast<std::size_t>(best)]) == 1);
      CHECK(item.gt_label == 'A' + best);
      gts.insert(item.gt_label);
      // Hard variants: no labels or marker counts in the question.
      CHECK(item.question == depth_question(n));
      if (n > 2) {
        CHECK(item.question.find(std::to_string(n)) == std::string::npos);
        CHECK(item.question.find(" A") == std::string::npos);
      }
      const std::string line = bench_item_to_jsonl(item);
      CHECK(bench_item_to_jsonl(bench_item_from_jsonl(line)) == line);
    }
    std::string a, b;
    for (const auto& it : suite.items) a += bench_item_to_jsonl(it) + "\n";
    for (const auto& it : build_benchmark(scenes, n, cfg, 3).items) b += bench_item_to_jsonl(it) + "\n";
    CHECK(a == b);
  }
  CHECK(gts.size() >= 2);
  CHECK_ERROR(build_benchmark({}, 2, cfg, 0), ErrorCode::kInvalidArgument);
  CHECK_ERROR(build_benchmark(scenes, 1, cfg, 0), ErrorCode::kInvalidArgument);
}

TEST_CASE("count suite") {
  const auto scenes = make_scenes(4, SceneStream::kBenchmark, 40);
  const auto suite = build_count_suite(scenes, 4);
  REQUIRE(suite.size() == scenes.size());
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto& item = suite[i];
    CHECK(item.gt_count == static_cast<int>(item.gt_boxes.size()));
    CHECK(item.gt_boxes == scenes[i].boxes_of(item.category));
    CHECK(item.question == count_question(item.category));
    const std::string line = count_item_to_jsonl(item);
    CHECK(count_item_to_jsonl(count_item_from_jsonl(line)) == line);
  }
  CHECK(plural("bed") == "beds");
  CHECK_ERROR(bench_item_from_jsonl("{}"), ErrorCode::kInvalidArgument);
}
