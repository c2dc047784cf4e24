// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "percept_tok/depth_codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cctype>
#include <cstring>
#include <filesystem>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "percept_tok/error.hpp"
#include "percept_tok/io.hpp"
#include "percept_tok/parallel.hpp"
#include "percept_tok/rng.hpp"

namespace percept {

namespace {

void require_canonical(const DepthMap& map) {
  if (!map.is_canonical()) {
    fail(ErrorCode::kShapeMismatch, "expected 320x320 depth map, got " +
                                        std::to_string(map.width) + "x" +
                                        std::to_string(map.height));
  }
}

// Squared L2 distance, abandoned (returning a value > bound) once the partial
// sum exceeds `bound`. Summation order is row-major, so a completed distance
// is identical to a plain loop.
template <typename P, typename C>
double distance_bounded(const P* patch, const C* code, double bound) {
  double acc = 0.0;
  for (int row = 0; row < kPatchSize; ++row) {
    const P* p = patch + row * kPatchSize;
    const C* c = code + row * kPatchSize;
    for (int i = 0; i < kPatchSize; ++i) {
      const double d = static_cast<double>(p[i]) - static_cast<double>(c[i]);
      acc += d * d;
    }
    if (acc > bound) return acc;
  }
  return acc;
}

// Nearest centroid scanning every code; `hint` is evaluated first to tighten
// the abandonment bound. Ties resolve to the lowest index.
template <typename P, typename C>
std::pair<int, double> nearest(const P* patch, const C* codes, int k, int hint) {
  int best = hint;
  double best_d = distance_bounded(patch, codes + static_cast<std::size_t>(hint) * kPatchValues,
                                   std::numeric_limits<double>::infinity());
  for (int c = 0; c < k; ++c) {
    if (c == hint) continue;
    const double d =
        distance_bounded(patch, codes + static_cast<std::size_t>(c) * kPatchValues, best_d);
    if (d < best_d || (d == best_d && c < best)) {
      best = c;
      best_d = d;
    }
  }
  return {best, best_d};
}

std::string bin_path_for(const std::string& json_path) {
  std::filesystem::path p(json_path);
  p.replace_extension(".bin");
  return p.string();
}

}  // namespace

DepthMap normalize_minmax(const DepthMap& map) {
  DepthMap out = map;
  if (map.values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(map.values.begin(), map.values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) {
    std::fill(out.values.begin(), out.values.end(), 0.5);
    return out;
  }
  const double scale = 1.0 / (hi - lo);
  for (double& v : out.values) v = std::clamp((v - lo) * scale, 0.0, 1.0);
  return out;
}

DepthMap resize_bilinear(const DepthMap& map, int width, int height) {
  if (map.width <= 0 || map.height <= 0 || width <= 0 || height <= 0) {
    fail(ErrorCode::kShapeMismatch, "cannot resize an empty depth map");
  }
  if (map.width == width && map.height == height) return map;
  DepthMap out(width, height);
  const double sx = static_cast<double>(map.width) / width;
  const double sy = static_cast<double>(map.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, map.height - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, map.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, map.width - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, map.width - 1);
      const double wx = fx - x0;
      const double top = map.at(x0, y0) * (1 - wx) + map.at(x1, y0) * wx;
      const double bot = map.at(x0, y1) * (1 - wx) + map.at(x1, y1) * wx;
      out.at(x, y) = top * (1 - wy) + bot * wy;
    }
  }
  return out;
}

DepthMap canonicalize(const DepthMap& map) {
  return normalize_minmax(resize_bilinear(map, kCanonicalSize, kCanonicalSize));
}

double sample_disparity(const DepthMap& canonical, double x, double y, int image_width,
                        int image_height, bool bilinear) {
  require_canonical(canonical);
  if (image_width <= 0 || image_height <= 0) {
    fail(ErrorCode::kInvalidArgument, "image size must be positive");
  }
  const double sx = static_cast<double>(kCanonicalSize) / image_width;
  const double sy = static_cast<double>(kCanonicalSize) / image_height;
  if (!bilinear) {
    const int cx = std::clamp(static_cast<int>(std::floor((x + 0.5) * sx)), 0, kCanonicalSize - 1);
    const int cy = std::clamp(static_cast<int>(std::floor((y + 0.5) * sy)), 0, kCanonicalSize - 1);
    return canonical.at(cx, cy);
  }
  const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, kCanonicalSize - 1.0);
  const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, kCanonicalSize - 1.0);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const int x1 = std::min(x0 + 1, kCanonicalSize - 1);
  const int y1 = std::min(y0 + 1, kCanonicalSize - 1);
  const double wx = fx - x0;
  const double wy = fy - y0;
  const double top = canonical.at(x0, y0) * (1 - wx) + canonical.at(x1, y0) * wx;
  const double bot = canonical.at(x0, y1) * (1 - wx) + canonical.at(x1, y1) * wx;
  return top * (1 - wy) + bot * wy;
}

void PatchSet::add(std::span<const float> patch) {
  if (patch.size() != kPatchValues) fail(ErrorCode::kShapeMismatch, "patch must hold 1024 values");
  values.insert(values.end(), patch.begin(), patch.end());
}

std::array<float, kPatchValues> extract_patch(const DepthMap& canonical, int row, int col) {
  require_canonical(canonical);
  std::array<float, kPatchValues> out{};
  for (int y = 0; y < kPatchSize; ++y) {
    for (int x = 0; x < kPatchSize; ++x) {
      out[static_cast<std::size_t>(y * kPatchSize + x)] =
          static_cast<float>(canonical.at(col * kPatchSize + x, row * kPatchSize + y));
    }
  }
  return out;
}

void append_patches(const DepthMap& canonical, PatchSet& out) {
  for (int r = 0; r < kGridSize; ++r) {
    for (int c = 0; c < kGridSize; ++c) out.add(extract_patch(canonical, r, c));
  }
}

Codebook train_codebook(const PatchSet& patches, const TrainOptions& options,
                        TrainStats* stats) {
  const int k = options.k;
  const std::size_t n = patches.size();
  if (k <= 0 || k > kDepthCodes) fail(ErrorCode::kInvalidArgument, "k must be in [1,128]");
  if (n < static_cast<std::size_t>(k)) {
    fail(ErrorCode::kInsufficientData, "need at least " + std::to_string(k) +
                                           " patches, got " + std::to_string(n));
  }
  for (float v : patches.values) {
    if (!(v >= 0.0f && v <= 1.0f)) fail(ErrorCode::kInvalidArgument, "patch values must be in [0,1]");
  }

  Rng rng(options.seed);
  const float* data = patches.values.data();
  auto patch_ptr = [&](std::size_t i) { return data + i * kPatchValues; };

  // k-means++ seeding.
  std::vector<double> centroids(static_cast<std::size_t>(k) * kPatchValues);
  auto set_centroid = [&](int c, std::size_t from) {
    std::copy(patch_ptr(from), patch_ptr(from) + kPatchValues,
              centroids.begin() + static_cast<std::ptrdiff_t>(c) * kPatchValues);
  };
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  set_centroid(0, static_cast<std::size_t>(rng.below(n)));
  for (int c = 1; c <= k; ++c) {
    const double* latest = centroids.data() + static_cast<std::size_t>(c - 1) * kPatchValues;
    parallel_for(n, options.jobs, [&](std::size_t i) {
      const double d = distance_bounded(patch_ptr(i), latest, d2[i]);
      if (d < d2[i]) d2[i] = d;
    });
    if (c == k) break;
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && acc > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) {
        // Rounding left the target past the running sum; take the last candidate.
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng.below(n));
    }
    set_centroid(c, pick);
  }

  std::vector<int> assign(n, 0);
  std::vector<double> dist(n, 0.0);
  TrainStats local;
  const double denom = static_cast<double>(n) * kPatchValues;
  double previous = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < std::max(options.max_iters, 1); ++iter) {
    parallel_for(n, options.jobs, [&](std::size_t i) {
      auto [best, d] = nearest(patch_ptr(i), centroids.data(), k, assign[i]);
      assign[i] = best;
      dist[i] = d;
    });
    double objective = 0.0;
    for (double d : dist) objective += d;
    objective /= denom;
    local.objective.push_back(objective);
    if (objective > previous * (1.0 + 1e-12) + 1e-300) {
      fail(ErrorCode::kInvalidArgument, "Lloyd objective increased during training");
    }
    previous = objective;
    local.iterations = iter + 1;

    // Update: fixed summation order over patches for reproducibility.
    std::vector<double> sums(centroids.size(), 0.0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      double* s = sums.data() + static_cast<std::size_t>(assign[i]) * kPatchValues;
      const float* p = patch_ptr(i);
      for (int j = 0; j < kPatchValues; ++j) s[j] += p[j];
      ++counts[static_cast<std::size_t>(assign[i])];
    }
    std::vector<char> taken(n, 0);
    double max_shift = 0.0;
    for (int c = 0; c < k; ++c) {
      double* cen = centroids.data() + static_cast<std::size_t>(c) * kPatchValues;
      std::vector<double> next(kPatchValues);
      if (counts[static_cast<std::size_t>(c)] > 0) {
        const double inv = 1.0 / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        const double* s = sums.data() + static_cast<std::size_t>(c) * kPatchValues;
        for (int j = 0; j < kPatchValues; ++j) next[static_cast<std::size_t>(j)] = s[j] * inv;
      } else {
        // Empty cluster: re-seed from the patch farthest from its centroid.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (!taken[i] && dist[i] > far_d) {
            far_d = dist[i];
            far = i;
          }
        }
        taken[far] = 1;
        const float* p = patch_ptr(far);
        for (int j = 0; j < kPatchValues; ++j) next[static_cast<std::size_t>(j)] = p[j];
        ++local.reseeded;
      }
      double shift = 0.0;
      for (int j = 0; j < kPatchValues; ++j) {
        const double d = next[static_cast<std::size_t>(j)] - cen[j];
        shift += d * d;
        cen[j] = next[static_cast<std::size_t>(j)];
      }
      max_shift = std::max(max_shift, std::sqrt(shift));
    }
    if (max_shift < options.tol) break;
  }

  Codebook cb;
  cb.k = k;
  cb.seed = options.seed;
  cb.trained_on = n;
  cb.codes.resize(centroids.size());
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    cb.codes[i] = static_cast<float>(std::clamp(centroids[i], 0.0, 1.0));
  }
  if (stats) *stats = std::move(local);
  return cb;
}

int nearest_code(std::span<const float> patch, const Codebook& cb) {
  if (patch.size() != kPatchValues) fail(ErrorCode::kShapeMismatch, "patch must hold 1024 values");
  return nearest(patch.data(), cb.codes.data(), cb.k, 0).first;
}

CodeGrid encode(const DepthMap& map, const Codebook& cb, int jobs) {
  require_canonical(map);
  if (cb.k <= 0) fail(ErrorCode::kInvalidArgument, "empty codebook");
  CodeGrid grid;
  parallel_for(kGridCells, jobs, [&](std::size_t cell) {
    const int row = static_cast<int>(cell) / kGridSize;
    const int col = static_cast<int>(cell) % kGridSize;
    std::array<double, kPatchValues> patch{};
    for (int y = 0; y < kPatchSize; ++y) {
      for (int x = 0; x < kPatchSize; ++x) {
        patch[static_cast<std::size_t>(y * kPatchSize + x)] =
            map.at(col * kPatchSize + x, row * kPatchSize + y);
      }
    }
    grid.indices[cell] = nearest(patch.data(), cb.codes.data(), cb.k, 0).first;
  });
  return grid;
}

DepthMap decode(const CodeGrid& grid, const Codebook& cb) {
  DepthMap out(kCanonicalSize, kCanonicalSize);
  for (int cell = 0; cell < kGridCells; ++cell) {
    const int idx = grid.indices[static_cast<std::size_t>(cell)];
    if (idx < 0 || idx >= cb.k) {
      fail(ErrorCode::kIndexOutOfRange, "code index " + std::to_string(idx) +
                                            " outside codebook of size " + std::to_string(cb.k));
    }
    const auto code = cb.centroid(idx);
    const int row = cell / kGridSize;
    const int col = cell % kGridSize;
    for (int y = 0; y < kPatchSize; ++y) {
      for (int x = 0; x < kPatchSize; ++x) {
        out.at(col * kPatchSize + x, row * kPatchSize + y) =
            static_cast<double>(code[static_cast<std::size_t>(y * kPatchSize + x)]);
      }
    }
  }
  return out;
}

std::vector<TokenId> grid_to_tokens(const CodeGrid& grid, const Vocabulary& vocab) {
  std::vector<TokenId> seq;
  seq.reserve(kGridCells + 2);
  seq.push_back(vocab.depth_start());
  for (int idx : grid.indices) seq.push_back(vocab.depth_token(idx));
  seq.push_back(vocab.depth_end());
  return seq;
}

CodeGrid tokens_to_grid(std::span<const TokenId> seq, const Vocabulary& vocab) {
  if (seq.size() != kGridCells + 2) {
    fail(ErrorCode::kMalformedSequence,
         "depth span must hold 102 tokens, got " + std::to_string(seq.size()));
  }
  if (seq.front() != vocab.depth_start() || seq.back() != vocab.depth_end()) {
    fail(ErrorCode::kMalformedSequence, "depth span must be wrapped in DEPTH_START/DEPTH_END");
  }
  CodeGrid grid;
  for (std::size_t i = 0; i < kGridCells; ++i) {
    const TokenId t = seq[i + 1];
    if (!vocab.is_depth(t)) {
      fail(ErrorCode::kMalformedSequence, "non-DEPTH token inside depth span at " + std::to_string(i));
    }
    grid.indices[i] = vocab.depth_code(t);
  }
  return grid;
}

double mean_squared_error(const DepthMap& a, const DepthMap& b) {
  if (a.width != b.width || a.height != b.height) {
    fail(ErrorCode::kShapeMismatch, "depth maps differ in shape");
  }
  if (a.values.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.values.size());
}

std::string encode_pgm(const DepthMap& map) {
  std::string out = "P5\n" + std::to_string(map.width) + " " + std::to_string(map.height) +
                    "\n65535\n";
  out.reserve(out.size() + map.values.size() * 2);
  for (double v : map.values) {
    const auto q = static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
    out.push_back(static_cast<char>(q >> 8));
    out.push_back(static_cast<char>(q & 0xff));
  }
  return out;
}

DepthMap decode_pgm(const std::string& bytes) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    for (;;) {
      while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  if (next_token() != "P5") fail(ErrorCode::kIoError, "not a binary PGM (P5)");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token());
    h = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    fail(ErrorCode::kIoError, "malformed PGM header");
  }
  ++pos;  // single whitespace after maxval
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
    fail(ErrorCode::kIoError, "unsupported PGM geometry");
  }
  const std::size_t bpp = maxval > 255 ? 2 : 1;
  const std::size_t need = static_cast<std::size_t>(w) * h * bpp;
  if (bytes.size() < pos + need) fail(ErrorCode::kIoError, "truncated PGM data");
  DepthMap map(w, h);
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    unsigned v = static_cast<unsigned char>(bytes[pos + i * bpp]);
    if (bpp == 2) v = (v << 8) | static_cast<unsigned char>(bytes[pos + i * bpp + 1]);
    map.values[i] = static_cast<double>(v) / maxval;
  }
  return map;
}

DepthMap read_pgm(const std::string& path) { return decode_pgm(io::read_file(path)); }

void write_pgm(const std::string& path, const DepthMap& map) {
  io::write_file_atomic(path, encode_pgm(map));
}

void save_codebook(const std::string& json_path, const Codebook& cb) {
  const std::string bin_path = bin_path_for(json_path);
  nlohmann::ordered_json header;
  header["k"] = cb.k;
  header["patch"] = kPatchSize;
  header["seed"] = cb.seed;
  header["trained_on"] = cb.trained_on;
  header["data"] = std::filesystem::path(bin_path).filename().string();
  std::string blob(cb.codes.size() * 4, '\0');
  for (std::size_t i = 0; i < cb.codes.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(cb.codes[i]);
    for (int b = 0; b < 4; ++b) blob[i * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  io::write_file_atomic(bin_path, blob);
  io::write_file_atomic(json_path, header.dump(1) + "\n");
}

Codebook load_codebook(const std::string& json_path) {
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(io::read_file(json_path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kIoError, json_path + ": " + e.what());
  }
  Codebook cb;
  cb.k = header.at("k").get<int>();
  if (header.at("patch").get<int>() != kPatchSize) {
    fail(ErrorCode::kShapeMismatch, "codebook patch size must be 32");
  }
  cb.seed = header.value("seed", std::uint64_t{0});
  cb.trained_on = header.value("trained_on", std::uint64_t{0});
  std::filesystem::path bin = std::filesystem::path(json_path).parent_path() /
                              header.value("data", std::filesystem::path(bin_path_for(json_path))
                                                       .filename()
                                                       .string());
  const std::string blob = io::read_file(bin.string());
  const std::size_t count = static_cast<std::size_t>(cb.k) * kPatchValues;
  if (blob.size() != count * 4) fail(ErrorCode::kIoError, "codebook data has wrong size");
  cb.codes.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(blob[i * 4 + b])) << (8 * b);
    }
    cb.codes[i] = std::bit_cast<float>(bits);
  }
  return cb;
}

}  // namespace percept
