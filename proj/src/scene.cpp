// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "percept_tok/scene.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <set>

#include "percept_tok/rng.hpp"

namespace percept {

const std::vector<std::string>& scene_categories() {
  static const std::vector<std::string> kCategories = {"bed",  "chair", "table", "lamp",
                                                       "sofa", "plant", "cup",   "book"};
  return kCategories;
}

std::string scene_id(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%016" PRIx64, seed);
  return buf;
}

CanonicalRect canonical_rect(const BBox& box, ImageSize size) {
  auto lo = [](int v, int extent) {
    return std::clamp(static_cast<int>(static_cast<std::int64_t>(v) * kCanonicalSize / extent), 0,
                      kCanonicalSize - 1);
  };
  auto hi = [](int v, int extent) {
    return std::clamp(
        static_cast<int>((static_cast<std::int64_t>(v) + 1) * kCanonicalSize / extent) - 1, 0,
        kCanonicalSize - 1);
  };
  CanonicalRect r{lo(box.x1, size.width), lo(box.y1, size.height), hi(box.x2, size.width),
                  hi(box.y2, size.height)};
  r.x1 = std::max(r.x1, r.x0);
  r.y1 = std::max(r.y1, r.y0);
  return r;
}

std::vector<std::string> Scene::categories() const {
  std::set<std::string> s;
  for (const auto& o : objects) s.insert(o.category);
  return {s.begin(), s.end()};
}

std::vector<BBox> Scene::boxes_of(std::string_view category) const {
  std::vector<BBox> out;
  for (const auto& o : objects) {
    if (o.category == category) out.push_back(o.box);
  }
  return out;
}

Scene make_scene(std::uint64_t seed, const SceneConfig& config) {
  Rng rng(derive_seed(seed, {0x5ce7e}));
  Scene scene;
  scene.seed = seed;
  scene.id = scene_id(seed);
  scene.size = {static_cast<int>(rng.range(320, 1024)), static_cast<int>(rng.range(240, 768))};

  // Raw background stays within a unit range so that normalization can only
  // stretch contrast, never compress it.
  const double offset = rng.uniform(0.0, 0.1);
  const double vertical = rng.uniform(0.15, 0.35);
  const double tilt = rng.uniform(-0.08, 0.08);

  const int count = static_cast<int>(rng.range(0, config.max_objects));
  const auto& cats = scene_categories();
  std::vector<CanonicalRect> rects;
  for (int i = 0; i < count; ++i) {
    SceneObject obj;
    obj.category = cats[rng.below(cats.size())];
    const int w = std::max(2, static_cast<int>(rng.uniform(0.06, 0.3) * scene.size.width));
    const int h = std::max(2, static_cast<int>(rng.uniform(0.06, 0.3) * scene.size.height));
    const int x1 = static_cast<int>(rng.range(0, scene.size.width - w));
    const int y1 = static_cast<int>(rng.range(0, scene.size.height - h));
    obj.box = {x1, y1, x1 + w - 1, y1 + h - 1};
    obj.amplitude = config.min_amplitude + rng.uniform() * config.amplitude_spread;
    rects.push_back(canonical_rect(obj.box, scene.size));
    scene.objects.push_back(std::move(obj));
  }

  DepthMap raw(kCanonicalSize, kCanonicalSize);
  DepthMap bg(kCanonicalSize, kCanonicalSize);
  const double feather = std::max(config.feather, 1);
  for (int y = 0; y < kCanonicalSize; ++y) {
    const double fy = (y + 0.5) / kCanonicalSize;
    for (int x = 0; x < kCanonicalSize; ++x) {
      const double fx = (x + 0.5) / kCanonicalSize;
      const double base = offset + vertical * fy + tilt * (fx - 0.5);
      double raise = 0.0;
      for (std::size_t i = 0; i < rects.size(); ++i) {
        const auto& r = rects[i];
        const int dx = std::max({r.x0 - x, 0, x - r.x1});
        const int dy = std::max({r.y0 - y, 0, y - r.y1});
        const double d = std::max(dx, dy);
        if (d >= feather) continue;
        raise = std::max(raise, scene.objects[i].amplitude * (1.0 - d / feather));
      }
      bg.at(x, y) = base;
      raw.at(x, y) = base + raise;
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(raw.values.begin(), raw.values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  scene.depth = normalize_minmax(raw);
  scene.background = bg;
  for (double& v : scene.background.values) v = range > 0 ? (v - lo) / range : 0.5;
  return scene;
}

}  // namespace percept
