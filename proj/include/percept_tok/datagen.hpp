// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Training-corpus synthesis: atomic generation, chain-of-thought and direct
// samples for the depth and counting tasks, built from procedural (or
// externally supplied) scenes.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "percept_tok/bench.hpp"
#include "percept_tok/depth_codec.hpp"
#include "percept_tok/sample.hpp"
#include "percept_tok/scene.hpp"
#include "percept_tok/vocab.hpp"

namespace percept {

/// Prompt and answer wording. Placeholders: {labels}, {label}, {category},
/// {plural}, {count}.
struct PromptTemplates {
  std::string version = "v1";
  std::string depth_gen_prompt = "Estimate the depth map of this image.";
  std::string depth_cot_prompt =
      "Points {labels} are marked on the image. Which point is closest to the camera? "
      "Locate the points and estimate the depth map before answering.";
  std::string depth_direct_prompt =
      "Points {labels} are marked on the image. Which point is closest to the camera? "
      "Answer with the label of the point.";
  std::string bbox_gen_prompt = "Output the bounding boxes of every {category} in the image.";
  std::string count_cot_prompt =
      "How many {plural} are in the image? Locate each one before giving the count.";
  std::string count_direct_prompt = "How many {plural} are in the image? Answer with a number.";
  std::string markers_intro = "The marked points are located at";
  std::string depth_intro = "The depth map is";
  std::string depth_answer = "Therefore, point {label} is closest to the camera.";
  std::string depth_direct_answer = "{label}";
  std::string boxes_intro = "The bounding boxes of the {plural} are";
  std::string count_answer = "The total number of {plural} is {count}.";
  std::string count_direct_answer = "{count}";

  static PromptTemplates defaults() { return {}; }
  /// Missing keys keep their defaults; unknown keys are rejected.
  static PromptTemplates from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  static PromptTemplates load(const std::string& path);
};

/// Replaces every {key} in `tpl`.
std::string fill_template(std::string tpl, std::span<const std::pair<std::string, std::string>> values);

/// Marker coordinates in 336-space, emitted as degenerate boxes (x, y, x, y)
/// so every PIXEL run in a response is a sequence of 4-tuples.
std::vector<TokenId> marker_tokens(const MarkerSet& markers, ImageSize size, const Vocabulary& vocab);

QASample synth_depth_gen(const Scene& scene, const Codebook& cb, const Vocabulary& vocab,
                         const PromptTemplates& tpl = {});
/// Throws DegenerateMarkers when two markers violate the separation rule.
QASample synth_depth_cot(const Scene& scene, const MarkerSet& markers, const Codebook& cb,
                         const Vocabulary& vocab, const PromptTemplates& tpl = {},
                         const BenchConfig& bench = {});
QASample synth_depth_direct(const Scene& scene, const MarkerSet& markers, const Vocabulary& vocab,
                            const PromptTemplates& tpl = {}, const BenchConfig& bench = {});

enum class CountMode { kBBoxGen, kCot, kDirect };
QASample synth_count(const Scene& scene, const std::string& category, const Vocabulary& vocab,
                     CountMode mode, const PromptTemplates& tpl = {});

/// The final answer stored with a sample ("A".."E" or a count).
std::string sample_answer(const QASample& s);
/// Recomputes a CoT sample's answer from its auxiliary tokens alone: marker
/// tuples and depth span for depth, box tuples for counting. Returns nullopt
/// for non-CoT tasks.
std::optional<std::string> rederive_answer(const QASample& s, const Codebook& cb, const Vocabulary& vocab,
                                           bool bilinear = false);

struct CorpusConfig {
  std::size_t depth_gen = 20000;
  std::size_t depth_cot_images = 500;
  std::size_t bbox_gen = 5000;
  std::size_t count_cot = 250;
  std::size_t count_direct = 250;
  int min_markers = 2;
  int max_markers = 5;
  /// Fresh marker sets tried per scene until the CoT answer re-derives.
  int placement_retries = 8;
  /// Extra scenes tried for a CoT slot before it is skipped.
  int substitute_scenes = 4;
  BenchConfig bench;
  SceneConfig scene;
  int jobs = 1;
};

struct Corpus {
  std::vector<QASample> samples;  // sorted by image_id, task order kept per image
  std::size_t skipped = 0;
};

/// Scene streams; every stream/index pair has its own derived seed.
enum class SceneStream : std::uint64_t {
  kDepthGen = 1,
  kDepthCot = 2,
  kBBoxGen = 3,
  kCountCot = 4,
  kCountDirect = 5,
  kBenchmark = 6,
  kCodebook = 7,
};
std::uint64_t scene_seed(std::uint64_t seed, SceneStream stream, std::size_t index);
std::vector<Scene> make_scenes(std::uint64_t seed, SceneStream stream, std::size_t count,
                               const SceneConfig& config = {}, int jobs = 1);

/// Codebook training data: `per_map` distinct patches drawn from each map
/// (all 100 when per_map is 0 or >= 100).
PatchSet training_patches(std::span<const DepthMap> maps, int per_map, std::uint64_t seed);

/// depth_gen samples plus one (CoT, direct) pair per CoT image.
Corpus build_depth_corpus(const CorpusConfig& config, const Codebook& cb, const Vocabulary& vocab,
                          const PromptTemplates& tpl, std::uint64_t seed);
/// bbox_gen, count CoT and count direct samples.
Corpus build_count_corpus(const CorpusConfig& config, const Vocabulary& vocab, const PromptTemplates& tpl,
                          std::uint64_t seed);

std::string corpus_to_jsonl(std::span<const QASample> samples, const Vocabulary& vocab);
std::vector<QASample> read_corpus(const std::string& path, const Vocabulary& vocab);

/// Scenes from external data: `<depth_dir>/<image_id>.pgm` plus box
/// annotations (one category per line). Image size comes from the PGM.
std::vector<Scene> load_external_scenes(const std::string& depth_dir, const std::string& annotations_path);

}  // namespace percept
