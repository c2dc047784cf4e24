// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Relative-depth benchmark synthesis: markers are rejection-sampled inside a
// mid-height band so that every pair is separated both in disparity and in
// image distance, which makes the closest marker unique.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "percept_tok/bbox_codec.hpp"
#include "percept_tok/depth_codec.hpp"
#include "percept_tok/rng.hpp"
#include "percept_tok/sample.hpp"
#include "percept_tok/scene.hpp"

namespace percept {

struct MarkerSet {
  std::vector<MarkerPoint> markers;
  std::size_t size() const { return markers.size(); }
  bool operator==(const MarkerSet&) const = default;
};

struct BenchConfig {
  double delta_depth = 0.15;
  /// Minimum pairwise pixel distance as a fraction of min(width, height).
  double delta_xy_fraction = 0.15;
  double band_lo = 0.40;
  double band_hi = 0.60;
  int max_attempts = 10000;
  bool bilinear = false;

  double delta_xy(ImageSize size) const {
    return delta_xy_fraction * std::min(size.width, size.height);
  }
};

struct PlacementParams {
  int n = 2;
  double delta_depth = 0.15;
  double delta_xy = 0.0;  // pixels in image coordinates
  double band_lo = 0.40;
  double band_hi = 0.60;
  int max_attempts = 10000;
  bool bilinear = false;
};

PlacementParams placement_params(const BenchConfig& config, ImageSize size, int n);

/// Throws PlacementInfeasible once `max_attempts` candidate points have been
/// rejected without completing a set.
MarkerSet place_markers(const DepthMap& canonical, ImageSize size, const PlacementParams& params,
                        Rng& rng);

/// Disparity of each marker, read from the canonical map.
std::vector<double> marker_disparities(const DepthMap& canonical, ImageSize size,
                                       const MarkerSet& markers, bool bilinear = false);
/// Label of the marker with the largest disparity (first on exact ties).
char closest_label(const MarkerSet& markers, std::span<const double> disparities);

/// Checks pairwise separation; throws DegenerateMarkers on violation.
void check_separation(const DepthMap& canonical, ImageSize size, const MarkerSet& markers,
                      double delta_depth, double delta_xy, bool bilinear = false);

struct BenchmarkItem {
  std::string id;
  std::string image_id;
  std::string depth_pgm_path;
  ImageSize size;
  MarkerSet markers;
  std::string question;
  char gt_label = 'A';
};

std::string depth_question(int n);

struct BenchmarkSuite {
  std::vector<BenchmarkItem> items;
  std::size_t skipped = 0;
};

/// One item per placeable scene, in scene order; scene depth is quantized
/// to 16 bits first so that labels match what the PGM files hold.
BenchmarkSuite build_benchmark(std::span<const Scene> scenes, int n, const BenchConfig& config,
                               std::uint64_t seed);

/// JSONL: {id, depth_pgm_path, markers, question, gt_label, image_id,
/// image_width, image_height}.
std::string bench_item_to_jsonl(const BenchmarkItem& item);
BenchmarkItem bench_item_from_jsonl(const std::string& line);

/// Counting suite item: category question with a ground-truth count.
struct CountItem {
  std::string id;
  std::string image_id;
  std::string category;
  ImageSize size;
  std::string question;
  int gt_count = 0;
  std::vector<BBox> gt_boxes;  // original coordinates
};

std::string count_question(const std::string& category);
std::vector<CountItem> build_count_suite(std::span<const Scene> scenes, std::uint64_t seed);
std::string count_item_to_jsonl(const CountItem& item);
CountItem count_item_from_jsonl(const std::string& line);

/// Picks the category to ask about: usually one present in the scene,
/// sometimes any category (possibly absent, so zero counts occur).
std::string pick_category(const Scene& scene, Rng& rng);
std::string plural(const std::string& category);

}  // namespace percept
