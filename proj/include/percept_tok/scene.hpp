// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Procedural scene oracle: a tilted background disparity ramp (nearer towards
// the bottom of the frame) plus up to 15 raised rectangular "objects", each
// with a category and a ground-truth box in original image coordinates.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "percept_tok/bbox_codec.hpp"
#include "percept_tok/depth_codec.hpp"

namespace percept {

struct SceneObject {
  std::string category;
  BBox box;  // original image coordinates
  double amplitude = 0.0;
};

struct SceneConfig {
  int max_objects = 15;
  /// Minimum raise of an object's plateau over the background ramp.
  double min_amplitude = 0.2;
  double amplitude_spread = 0.15;
  /// Linear fall-off (canonical pixels) around each plateau.
  int feather = 6;
};

struct Scene {
  std::string id;
  std::uint64_t seed = 0;
  ImageSize size;
  /// Canonical 320x320, min-max normalized.
  DepthMap depth;
  /// The background ramp under the same normalization as `depth`.
  DepthMap background;
  std::vector<SceneObject> objects;

  std::vector<std::string> categories() const;
  std::vector<BBox> boxes_of(std::string_view category) const;
};

const std::vector<std::string>& scene_categories();

std::string scene_id(std::uint64_t seed);
Scene make_scene(std::uint64_t seed, const SceneConfig& config = {});

/// Inclusive canonical-grid rectangle covered by an original-coordinate box.
struct CanonicalRect {
  int x0, y0, x1, y1;
};
CanonicalRect canonical_rect(const BBox& box, ImageSize size);

}  // namespace percept
