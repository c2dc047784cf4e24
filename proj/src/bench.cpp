// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "percept_tok/bench.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "percept_tok/error.hpp"

namespace percept {

namespace {

// Consecutive rejections after which a partial set is discarded.
constexpr int kRestartAfter = 64;

}  // namespace

PlacementParams placement_params(const BenchConfig& config, ImageSize size, int n) {
  PlacementParams p;
  p.n = n;
  p.delta_depth = config.delta_depth;
  p.delta_xy = config.delta_xy(size);
  p.band_lo = config.band_lo;
  p.band_hi = config.band_hi;
  p.max_attempts = config.max_attempts;
  p.bilinear = config.bilinear;
  return p;
}

MarkerSet place_markers(const DepthMap& canonical, ImageSize size, const PlacementParams& params,
                        Rng& rng) {
  if (!canonical.is_canonical()) fail(ErrorCode::kShapeMismatch, "markers need a canonical depth map");
  if (params.n < 1 || params.n > 5) fail(ErrorCode::kInvalidArgument, "marker count must be in [1,5]");
  if (!(params.band_lo >= 0.0 && params.band_lo <= params.band_hi && params.band_hi <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "band must be a sub-interval of [0,1]");
  }
  const int row_lo = std::clamp(static_cast<int>(std::ceil(params.band_lo * size.height)), 0,
                                size.height - 1);
  const int row_hi = std::clamp(static_cast<int>(std::floor(params.band_hi * size.height)), 0,
                                size.height - 1);
  if (row_lo > row_hi) fail(ErrorCode::kPlacementInfeasible, "band contains no pixel rows");

  std::vector<MarkerPoint> chosen;
  std::vector<double> disp;
  int attempts = 0;
  int streak = 0;
  while (static_cast<int>(chosen.size()) < params.n) {
    if (attempts >= params.max_attempts) {
      fail(ErrorCode::kPlacementInfeasible,
           "could not place " + std::to_string(params.n) + " markers in " +
               std::to_string(params.max_attempts) + " attempts");
    }
    ++attempts;
    const int x = static_cast<int>(rng.range(0, size.width - 1));
    const int y = static_cast<int>(rng.range(row_lo, row_hi));
    const double d = sample_disparity(canonical, x, y, size.width, size.height, params.bilinear);
    bool ok = true;
    for (std::size_t i = 0; i < chosen.size() && ok; ++i) {
      const double dx = x - chosen[i].x;
      const double dy = y - chosen[i].y;
      ok = std::abs(d - disp[i]) >= params.delta_depth &&
           std::sqrt(dx * dx + dy * dy) >= params.delta_xy;
    }
    if (ok) {
      chosen.push_back({static_cast<char>('A' + chosen.size()), x, y});
      disp.push_back(d);
      streak = 0;
    } else if (++streak >= kRestartAfter) {
      chosen.clear();
      disp.clear();
      streak = 0;
    }
  }
  return {std::move(chosen)};
}

std::vector<double> marker_disparities(const DepthMap& canonical, ImageSize size,
                                       const MarkerSet& markers, bool bilinear) {
  std::vector<double> out;
  out.reserve(markers.size());
  for (const auto& m : markers.markers) {
    out.push_back(sample_disparity(canonical, m.x, m.y, size.width, size.height, bilinear));
  }
  return out;
}

char closest_label(const MarkerSet& markers, std::span<const double> disparities) {
  if (markers.markers.empty() || disparities.size() != markers.size()) {
    fail(ErrorCode::kInvalidArgument, "marker/disparity count mismatch");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < disparities.size(); ++i) {
    if (disparities[i] > disparities[best]) best = i;
  }
  return markers.markers[best].label;
}

void check_separation(const DepthMap& canonical, ImageSize size, const MarkerSet& markers,
                      double delta_depth, double delta_xy, bool bilinear) {
  const auto disp = marker_disparities(canonical, size, markers, bilinear);
  for (std::size_t i = 0; i < markers.size(); ++i) {
    for (std::size_t j = i + 1; j < markers.size(); ++j) {
      const double dx = markers.markers[i].x - markers.markers[j].x;
      const double dy = markers.markers[i].y - markers.markers[j].y;
      if (std::abs(disp[i] - disp[j]) < delta_depth || std::sqrt(dx * dx + dy * dy) < delta_xy) {
        fail(ErrorCode::kDegenerateMarkers, std::string("markers ") + markers.markers[i].label +
                                                " and " + markers.markers[j].label +
                                                " violate separation");
      }
    }
  }
}

std::string depth_question(int n) {
  if (n == 2) return "Two points are marked A and B on the image. Which point is closer to the camera?";
  return "Some points are marked on the image. Which marked point is closest to the camera?";
}

BenchmarkSuite build_benchmark(std::span<const Scene> scenes, int n, const BenchConfig& config,
                               std::uint64_t seed) {
  if (scenes.empty()) fail(ErrorCode::kInvalidArgument, "benchmark needs at least one scene");
  if (n < 2 || n > 5) fail(ErrorCode::kInvalidArgument, "benchmark marker count must be in [2,5]");
  BenchmarkSuite suite;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const Scene& scene = scenes[i];
    const DepthMap depth = decode_pgm(encode_pgm(scene.depth));
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(n), i}));
    MarkerSet markers;
    try {
      markers = place_markers(depth, scene.size, placement_params(config, scene.size, n), rng);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kPlacementInfeasible) throw;
      ++suite.skipped;
      continue;
    }
    BenchmarkItem item;
    item.id = scene.id + "_n" + std::to_string(n);
    item.image_id = scene.id;
    item.depth_pgm_path = "depth/" + scene.id + ".pgm";
    item.size = scene.size;
    item.question = depth_question(n);
    item.gt_label = closest_label(markers, marker_disparities(depth, scene.size, markers, config.bilinear));
    item.markers = std::move(markers);
    suite.items.push_back(std::move(item));
  }
  return suite;
}

std::string bench_item_to_jsonl(const BenchmarkItem& item) {
  nlohmann::ordered_json j;
  j["id"] = item.id;
  j["depth_pgm_path"] = item.depth_pgm_path;
  auto ms = nlohmann::ordered_json::array();
  for (const auto& m : item.markers.markers) {
    nlohmann::ordered_json mj;
    mj["label"] = std::string(1, m.label);
    mj["x"] = m.x;
    mj["y"] = m.y;
    ms.push_back(std::move(mj));
  }
  j["markers"] = std::move(ms);
  j["question"] = item.question;
  j["gt_label"] = std::string(1, item.gt_label);
  j["image_id"] = item.image_id;
  j["image_width"] = item.size.width;
  j["image_height"] = item.size.height;
  return j.dump();
}

BenchmarkItem bench_item_from_jsonl(const std::string& line) {
  BenchmarkItem item;
  try {
    const auto j = nlohmann::json::parse(line);
    item.id = j.at("id").get<std::string>();
    item.depth_pgm_path = j.at("depth_pgm_path").get<std::string>();
    for (const auto& m : j.at("markers")) {
      const auto label = m.at("label").get<std::string>();
      if (label.size() != 1) fail(ErrorCode::kInvalidArgument, "marker label must be one letter");
      item.markers.markers.push_back({label[0], m.at("x").get<int>(), m.at("y").get<int>()});
    }
    item.question = j.at("question").get<std::string>();
    const auto gt = j.at("gt_label").get<std::string>();
    if (gt.size() != 1) fail(ErrorCode::kInvalidArgument, "gt_label must be one letter");
    item.gt_label = gt[0];
    item.image_id = j.value("image_id", std::string());
    item.size = {j.value("image_width", kCanonicalSize), j.value("image_height", kCanonicalSize)};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("malformed benchmark item: ") + e.what());
  }
  return item;
}

std::string plural(const std::string& category) {
  if (category.ends_with("s") || category.ends_with("x") || category.ends_with("ch")) {
    return category + "es";
  }
  return category + "s";
}

std::string count_question(const std::string& category) {
  return "How many " + plural(category) + " are in the image?";
}

std::string pick_category(const Scene& scene, Rng& rng) {
  const auto present = scene.categories();
  if (!present.empty() && rng.uniform() < 0.8) return present[rng.below(present.size())];
  const auto& all = scene_categories();
  return all[rng.below(all.size())];
}

std::vector<CountItem> build_count_suite(std::span<const Scene> scenes, std::uint64_t seed) {
  std::vector<CountItem> items;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const Scene& scene = scenes[i];
    Rng rng(derive_seed(seed, {0xc0, i}));
    CountItem item;
    item.category = pick_category(scene, rng);
    item.id = scene.id + "_count";
    item.image_id = scene.id;
    item.size = scene.size;
    item.question = count_question(item.category);
    item.gt_boxes = scene.boxes_of(item.category);
    item.gt_count = static_cast<int>(item.gt_boxes.size());
    items.push_back(std::move(item));
  }
  return items;
}

std::string count_item_to_jsonl(const CountItem& item) {
  nlohmann::ordered_json j;
  j["id"] = item.id;
  j["image_id"] = item.image_id;
  j["category"] = item.category;
  j["question"] = item.question;
  j["gt_count"] = item.gt_count;
  auto boxes = nlohmann::ordered_json::array();
  for (const auto& b : item.gt_boxes) boxes.push_back({b.x1, b.y1, b.x2, b.y2});
  j["boxes"] = std::move(boxes);
  j["image_width"] = item.size.width;
  j["image_height"] = item.size.height;
  return j.dump();
}

CountItem count_item_from_jsonl(const std::string& line) {
  CountItem item;
  try {
    const auto j = nlohmann::json::parse(line);
    item.id = j.at("id").get<std::string>();
    item.image_id = j.value("image_id", std::string());
    item.category = j.at("category").get<std::string>();
    item.question = j.value("question", count_question(item.category));
    item.gt_count = j.at("gt_count").get<int>();
    if (j.contains("boxes")) {
      for (const auto& b : j.at("boxes")) {
        item.gt_boxes.push_back({b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()});
      }
    }
    item.size = {j.value("image_width", kBoxSpace), j.value("image_height", kBoxSpace)};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("malformed count item: ") + e.what());
  }
  return item;
}

}  // namespace percept
