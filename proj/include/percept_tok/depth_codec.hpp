// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Depth maps are tokenized by cutting the canonical 320x320 disparity raster
// into a 10x10 grid of 32x32 patches and replacing each patch with the index
// of its nearest codebook centroid. The codebook is learned with k-means
// (k-means++ seeding, Lloyd iterations) over training patches.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "percept_tok/vocab.hpp"

namespace percept {

inline constexpr int kCanonicalSize = 320;
inline constexpr int kPatchSize = 32;
inline constexpr int kGridSize = kCanonicalSize / kPatchSize;  // 10
inline constexpr int kGridCells = kGridSize * kGridSize;      // 100
inline constexpr int kPatchValues = kPatchSize * kPatchSize;  // 1024

/// Row-major disparity raster; larger values are closer to the camera.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  DepthMap() = default;
  DepthMap(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  bool is_canonical() const { return width == kCanonicalSize && height == kCanonicalSize; }

  bool operator==(const DepthMap&) const = default;
};

/// Per-image min-max to [0,1]; a constant map becomes all 0.5.
DepthMap normalize_minmax(const DepthMap& map);
/// Bilinear resize (pixel-centre aligned).
DepthMap resize_bilinear(const DepthMap& map, int width, int height);
/// Resize to 320x320 (if needed) and min-max normalize.
DepthMap canonicalize(const DepthMap& map);

/// Disparity of a canonical map at a point given in `image_width` x
/// `image_height` coordinates. Nearest neighbour by default.
double sample_disparity(const DepthMap& canonical, double x, double y, int image_width,
                        int image_height, bool bilinear = false);

/// 10x10 code indices, row-major.
struct CodeGrid {
  std::array<int, kGridCells> indices{};
  int at(int row, int col) const { return indices[static_cast<std::size_t>(row * kGridSize + col)]; }
  bool operator==(const CodeGrid&) const = default;
};

/// Flat storage of 32x32 patches.
struct PatchSet {
  std::vector<float> values;
  std::size_t size() const { return values.size() / kPatchValues; }
  std::span<const float> patch(std::size_t i) const {
    return {values.data() + i * kPatchValues, kPatchValues};
  }
  void add(std::span<const float> patch);
};

/// Copies patch (row, col) of a canonical map.
std::array<float, kPatchValues> extract_patch(const DepthMap& canonical, int row, int col);
/// All 100 patches of a canonical map, row-major.
void append_patches(const DepthMap& canonical, PatchSet& out);

struct Codebook {
  int k = 0;
  std::uint64_t seed = 0;
  std::uint64_t trained_on = 0;
  /// k * 1024 centroid values in [0,1].
  std::vector<float> codes;

  std::span<const float> centroid(int i) const {
    return {codes.data() + static_cast<std::size_t>(i) * kPatchValues, kPatchValues};
  }
  bool operator==(const Codebook&) const = default;
};

struct TrainOptions {
  int k = kDepthCodes;
  std::uint64_t seed = 0;
  int max_iters = 50;
  /// Stop once the largest L2 centroid shift drops below this.
  double tol = 1e-4;
  int jobs = 1;
};

struct TrainStats {
  /// Mean squared error per value after each assignment step.
  std::vector<double> objective;
  int iterations = 0;
  int reseeded = 0;
};

/// Throws InsufficientData when there are fewer patches than codes. The
/// Lloyd objective is checked to be non-increasing after every step.
Codebook train_codebook(const PatchSet& patches, const TrainOptions& options,
                        TrainStats* stats = nullptr);

/// Index of the nearest centroid in L2; ties go to the lowest index.
int nearest_code(std::span<const float> patch, const Codebook& cb);

CodeGrid encode(const DepthMap& map, const Codebook& cb, int jobs = 1);
DepthMap decode(const CodeGrid& grid, const Codebook& cb);

/// [DEPTH_START, 100 DEPTH tokens, DEPTH_END].
std::vector<TokenId> grid_to_tokens(const CodeGrid& grid, const Vocabulary& vocab);
CodeGrid tokens_to_grid(std::span<const TokenId> seq, const Vocabulary& vocab);

double mean_squared_error(const DepthMap& a, const DepthMap& b);

/// 16-bit binary PGM (P5, maxval 65535), value = round(disparity * 65535).
DepthMap read_pgm(const std::string& path);
void write_pgm(const std::string& path, const DepthMap& map);
std::string encode_pgm(const DepthMap& map);
DepthMap decode_pgm(const std::string& bytes);

/// `<prefix>.json` header plus `<prefix>.bin` with k*1024 little-endian float32.
void save_codebook(const std::string& json_path, const Codebook& cb);
Codebook load_codebook(const std::string& json_path);

}  // namespace percept
