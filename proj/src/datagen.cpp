// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "percept_tok/datagen.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

#include "percept_tok/error.hpp"
#include "percept_tok/io.hpp"
#include "percept_tok/parallel.hpp"
#include "percept_tok/rng.hpp"

namespace percept {

namespace {

using Fields = std::vector<std::pair<std::string, std::string>>;

std::string labels_phrase(const MarkerSet& markers) {
  std::string out;
  for (std::size_t i = 0; i < markers.size(); ++i) {
    if (i > 0) out += i + 1 == markers.size() ? " and " : ", ";
    out += markers.markers[i].label;
  }
  return out;
}

nlohmann::ordered_json markers_json(const MarkerSet& markers) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& m : markers.markers) {
    nlohmann::ordered_json mj;
    mj["label"] = std::string(1, m.label);
    mj["x"] = m.x;
    mj["y"] = m.y;
    arr.push_back(std::move(mj));
  }
  return arr;
}

char ground_truth_label(const Scene& scene, const MarkerSet& markers, const BenchConfig& bench) {
  check_separation(scene.depth, scene.size, markers, bench.delta_depth, bench.delta_xy(scene.size),
                   bench.bilinear);
  return closest_label(markers, marker_disparities(scene.depth, scene.size, markers, bench.bilinear));
}

using TemplateField = std::pair<std::string_view, std::string PromptTemplates::*>;

std::vector<TemplateField> template_fields() {
  using T = PromptTemplates;
  return {{"version", &T::version},
          {"depth_gen_prompt", &T::depth_gen_prompt},
          {"depth_cot_prompt", &T::depth_cot_prompt},
          {"depth_direct_prompt", &T::depth_direct_prompt},
          {"bbox_gen_prompt", &T::bbox_gen_prompt},
          {"count_cot_prompt", &T::count_cot_prompt},
          {"count_direct_prompt", &T::count_direct_prompt},
          {"markers_intro", &T::markers_intro},
          {"depth_intro", &T::depth_intro},
          {"depth_answer", &T::depth_answer},
          {"depth_direct_answer", &T::depth_direct_answer},
          {"boxes_intro", &T::boxes_intro},
          {"count_answer", &T::count_answer},
          {"count_direct_answer", &T::count_direct_answer}};
}

}  // namespace

PromptTemplates PromptTemplates::from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "templates must be a JSON object");
  PromptTemplates t;
  const auto fields = template_fields();
  for (const auto& [key, value] : j.items()) {
    const auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return f.first == key; });
    if (it == fields.end()) fail(ErrorCode::kInvalidArgument, "unknown template key " + key);
    if (!value.is_string()) fail(ErrorCode::kInvalidArgument, "template " + key + " must be a string");
    t.*(it->second) = value.get<std::string>();
  }
  return t;
}

nlohmann::ordered_json PromptTemplates::to_json() const {
  nlohmann::ordered_json j;
  for (const auto& [key, field] : template_fields()) j[std::string(key)] = this->*field;
  return j;
}

PromptTemplates PromptTemplates::load(const std::string& path) {
  try {
    return from_json(nlohmann::json::parse(io::read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
}

std::string fill_template(std::string tpl, std::span<const std::pair<std::string, std::string>> values) {
  for (const auto& [key, value] : values) {
    const std::string needle = "{" + key + "}";
    for (auto pos = tpl.find(needle); pos != std::string::npos; pos = tpl.find(needle, pos + value.size())) {
      tpl.replace(pos, needle.size(), value);
    }
  }
  return tpl;
}

std::vector<TokenId> marker_tokens(const MarkerSet& markers, ImageSize size, const Vocabulary& vocab) {
  std::vector<TokenId> out;
  for (const auto& m : markers.markers) {
    const int x = to_box_space(m.x, size.width);
    const int y = to_box_space(m.y, size.height);
    const auto t = box_to_tokens({x, y, x, y}, vocab);
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

QASample synth_depth_gen(const Scene& scene, const Codebook& cb, const Vocabulary& vocab,
                         const PromptTemplates& tpl) {
  QASample s;
  s.image_id = scene.id;
  s.task = TaskKind::kDepthGen;
  append_text(s.prompt, tpl.depth_gen_prompt);
  append_tokens(s.response, grid_to_tokens(encode(scene.depth, cb), vocab));
  s.meta["image_width"] = scene.size.width;
  s.meta["image_height"] = scene.size.height;
  return s;
}

QASample synth_depth_cot(const Scene& scene, const MarkerSet& markers, const Codebook& cb,
                         const Vocabulary& vocab, const PromptTemplates& tpl, const BenchConfig& bench) {
  const char label = ground_truth_label(scene, markers, bench);
  const Fields fields = {{"labels", labels_phrase(markers)}, {"label", std::string(1, label)}};
  QASample s;
  s.image_id = scene.id;
  s.task = TaskKind::kDepthCot;
  append_text(s.prompt, fill_template(tpl.depth_cot_prompt, fields));
  append_text(s.response, fill_template(tpl.markers_intro, fields));
  append_tokens(s.response, marker_tokens(markers, scene.size, vocab));
  append_text(s.response, fill_template(tpl.depth_intro, fields));
  append_tokens(s.response, grid_to_tokens(encode(scene.depth, cb), vocab));
  append_text(s.response, fill_template(tpl.depth_answer, fields));
  s.meta["image_width"] = scene.size.width;
  s.meta["image_height"] = scene.size.height;
  s.meta["markers"] = markers_json(markers);
  s.meta["answer"] = std::string(1, label);
  return s;
}

QASample synth_depth_direct(const Scene& scene, const MarkerSet& markers, const Vocabulary&,
                            const PromptTemplates& tpl, const BenchConfig& bench) {
  const char label = ground_truth_label(scene, markers, bench);
  const Fields fields = {{"labels", labels_phrase(markers)}, {"label", std::string(1, label)}};
  QASample s;
  s.image_id = scene.id;
  s.task = TaskKind::kDepthDirect;
  append_text(s.prompt, fill_template(tpl.depth_direct_prompt, fields));
  append_text(s.response, fill_template(tpl.depth_direct_answer, fields));
  s.meta["image_width"] = scene.size.width;
  s.meta["image_height"] = scene.size.height;
  s.meta["markers"] = markers_json(markers);
  s.meta["answer"] = std::string(1, label);
  return s;
}

QASample synth_count(const Scene& scene, const std::string& category, const Vocabulary& vocab,
                     CountMode mode, const PromptTemplates& tpl) {
  std::vector<BBox> boxes;
  for (const auto& b : scene.boxes_of(category)) boxes.push_back(rescale_box(b, scene.size));
  const std::string count = std::to_string(boxes.size());
  const Fields fields = {{"category", category}, {"plural", plural(category)}, {"count", count}};
  QASample s;
  s.image_id = scene.id;
  switch (mode) {
    case CountMode::kBBoxGen:
      s.task = TaskKind::kBBoxGen;
      append_text(s.prompt, fill_template(tpl.bbox_gen_prompt, fields));
      append_tokens(s.response, boxes_to_tokens(boxes, vocab));
      break;
    case CountMode::kCot:
      s.task = TaskKind::kCountCot;
      append_text(s.prompt, fill_template(tpl.count_cot_prompt, fields));
      append_text(s.response, fill_template(tpl.boxes_intro, fields));
      append_tokens(s.response, boxes_to_tokens(boxes, vocab));
      append_text(s.response, fill_template(tpl.count_answer, fields));
      break;
    case CountMode::kDirect:
      s.task = TaskKind::kCountDirect;
      append_text(s.prompt, fill_template(tpl.count_direct_prompt, fields));
      append_text(s.response, fill_template(tpl.count_direct_answer, fields));
      break;
  }
  s.meta["image_width"] = scene.size.width;
  s.meta["image_height"] = scene.size.height;
  s.meta["category"] = category;
  auto boxes_json = nlohmann::ordered_json::array();
  for (const auto& b : boxes) boxes_json.push_back({b.x1, b.y1, b.x2, b.y2});
  s.meta["boxes"] = std::move(boxes_json);
  s.meta["answer"] = count;
  return s;
}

std::string sample_answer(const QASample& s) {
  if (!s.meta.contains("answer")) fail(ErrorCode::kInvalidArgument, "sample has no stored answer");
  return s.meta.at("answer").get<std::string>();
}

std::optional<std::string> rederive_answer(const QASample& s, const Codebook& cb, const Vocabulary& vocab,
                                           bool bilinear) {
  if (!is_cot(s.task)) return std::nullopt;
  std::vector<TokenId> pixels;
  std::optional<CodeGrid> grid;
  for (const auto& span : aux_spans(s.response)) {
    const auto open = std::find(span.begin(), span.end(), vocab.depth_start());
    pixels.insert(pixels.end(), span.begin(), open);
    if (open != span.end()) {
      if (grid) fail(ErrorCode::kMalformedSequence, "more than one depth span");
      grid = tokens_to_grid(std::span<const TokenId>(open, span.end()), vocab);
    }
  }
  const auto boxes = tokens_to_boxes(pixels, vocab);
  if (s.task == TaskKind::kCountCot) {
    if (grid) fail(ErrorCode::kMalformedSequence, "counting sample carries a depth span");
    return std::to_string(boxes.size());
  }
  if (!grid) fail(ErrorCode::kMalformedSequence, "depth sample has no depth span");
  if (boxes.empty()) fail(ErrorCode::kMalformedBox, "depth sample has no marker tuples");
  MarkerSet markers;
  for (const auto& b : boxes) {
    markers.markers.push_back({static_cast<char>('A' + markers.size()), b.x1, b.y1});
  }
  const DepthMap decoded = decode(*grid, cb);
  const auto disp = marker_disparities(decoded, {kBoxSpace, kBoxSpace}, markers, bilinear);
  return std::string(1, closest_label(markers, disp));
}

std::uint64_t scene_seed(std::uint64_t seed, SceneStream stream, std::size_t index) {
  return derive_seed(seed, {static_cast<std::uint64_t>(stream), index});
}

std::vector<Scene> make_scenes(std::uint64_t seed, SceneStream stream, std::size_t count,
                               const SceneConfig& config, int jobs) {
  std::vector<Scene> scenes(count);
  parallel_for(count, jobs, [&](std::size_t i) { scenes[i] = make_scene(scene_seed(seed, stream, i), config); });
  return scenes;
}

PatchSet training_patches(std::span<const DepthMap> maps, int per_map, std::uint64_t seed) {
  PatchSet out;
  std::vector<int> cells(kGridCells);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (!maps[i].is_canonical()) fail(ErrorCode::kShapeMismatch, "training maps must be 320x320");
    for (int c = 0; c < kGridCells; ++c) cells[static_cast<std::size_t>(c)] = c;
    std::size_t take = kGridCells;
    if (per_map > 0 && per_map < kGridCells) {
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(SceneStream::kCodebook), i, 0x9a}));
      rng.shuffle(cells);
      take = static_cast<std::size_t>(per_map);
      std::sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(take));
    }
    for (std::size_t c = 0; c < take; ++c) {
      const auto patch = extract_patch(maps[i], cells[c] / kGridSize, cells[c] % kGridSize);
      out.add(patch);
    }
  }
  return out;
}

namespace {

void finish(Corpus& corpus, std::vector<std::vector<QASample>>& slots) {
  for (auto& slot : slots) {
    for (auto& s : slot) corpus.samples.push_back(std::move(s));
  }
  std::stable_sort(corpus.samples.begin(), corpus.samples.end(),
                   [](const QASample& a, const QASample& b) { return a.image_id < b.image_id; });
}

}  // namespace

Corpus build_depth_corpus(const CorpusConfig& config, const Codebook& cb, const Vocabulary& vocab,
                          const PromptTemplates& tpl, std::uint64_t seed) {
  if (config.min_markers < 2 || config.max_markers > 5 || config.min_markers > config.max_markers) {
    fail(ErrorCode::kInvalidArgument, "marker counts must satisfy 2 <= min <= max <= 5");
  }
  const std::size_t n_gen = config.depth_gen;
  const std::size_t n_cot = config.depth_cot_images;
  std::vector<std::vector<QASample>> slots(n_gen + n_cot);
  std::vector<int> skipped(n_cot, 0);
  parallel_for(n_gen + n_cot, config.jobs, [&](std::size_t i) {
    if (i < n_gen) {
      const Scene scene = make_scene(scene_seed(seed, SceneStream::kDepthGen, i), config.scene);
      slots[i].push_back(synth_depth_gen(scene, cb, vocab, tpl));
      return;
    }
    const std::size_t j = i - n_gen;
    // A slot whose scene admits no usable marker set falls back to fresh
    // substitute scenes, so the corpus keeps its configured image count.
    for (int sub = 0; sub <= config.substitute_scenes; ++sub) {
      const std::uint64_t scene_key =
          sub == 0 ? scene_seed(seed, SceneStream::kDepthCot, j)
                   : derive_seed(seed, {static_cast<std::uint64_t>(SceneStream::kDepthCot), j, 0x5b,
                                        static_cast<std::uint64_t>(sub)});
      const Scene scene = make_scene(scene_key, config.scene);
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(SceneStream::kDepthCot), j, 0x3a,
                                 static_cast<std::uint64_t>(sub)}));
      const int n = static_cast<int>(rng.range(config.min_markers, config.max_markers));
      for (int attempt = 0; attempt < config.placement_retries; ++attempt) {
        MarkerSet markers;
        try {
          markers = place_markers(scene.depth, scene.size, placement_params(config.bench, scene.size, n), rng);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kPlacementInfeasible) throw;
          break;
        }
        QASample cot = synth_depth_cot(scene, markers, cb, vocab, tpl, config.bench);
        // Keep only marker sets whose answer survives quantization, so the
        // response is self-consistent.
        if (rederive_answer(cot, cb, vocab, config.bench.bilinear) != sample_answer(cot)) continue;
        slots[i].push_back(std::move(cot));
        slots[i].push_back(synth_depth_direct(scene, markers, vocab, tpl, config.bench));
        return;
      }
    }
    skipped[j] = 1;
  });
  Corpus corpus;
  for (int s : skipped) corpus.skipped += static_cast<std::size_t>(s);
  finish(corpus, slots);
  return corpus;
}

Corpus build_count_corpus(const CorpusConfig& config, const Vocabulary& vocab, const PromptTemplates& tpl,
                          std::uint64_t seed) {
  struct Job {
    SceneStream stream;
    std::size_t index;
    CountMode mode;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < config.bbox_gen; ++i) jobs.push_back({SceneStream::kBBoxGen, i, CountMode::kBBoxGen});
  for (std::size_t i = 0; i < config.count_cot; ++i) jobs.push_back({SceneStream::kCountCot, i, CountMode::kCot});
  for (std::size_t i = 0; i < config.count_direct; ++i) {
    jobs.push_back({SceneStream::kCountDirect, i, CountMode::kDirect});
  }
  std::vector<std::vector<QASample>> slots(jobs.size());
  parallel_for(jobs.size(), config.jobs, [&](std::size_t i) {
    const Job& job = jobs[i];
    const Scene scene = make_scene(scene_seed(seed, job.stream, job.index), config.scene);
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(job.stream), job.index, 0xca}));
    slots[i].push_back(synth_count(scene, pick_category(scene, rng), vocab, job.mode, tpl));
  });
  Corpus corpus;
  finish(corpus, slots);
  return corpus;
}

std::string corpus_to_jsonl(std::span<const QASample> samples, const Vocabulary& vocab) {
  std::string out;
  for (const auto& s : samples) {
    out += sample_to_jsonl(s, vocab);
    out += '\n';
  }
  return out;
}

std::vector<QASample> read_corpus(const std::string& path, const Vocabulary& vocab) {
  std::vector<QASample> out;
  for (const auto& line : io::read_lines(path)) out.push_back(sample_from_jsonl(line, vocab));
  return out;
}

std::vector<Scene> load_external_scenes(const std::string& depth_dir, const std::string& annotations_path) {
  std::map<std::string, std::vector<Annotation>> by_image;
  for (const auto& line : io::read_lines(annotations_path)) {
    Annotation a = annotation_from_jsonl(line);
    by_image[a.image_id].push_back(std::move(a));
  }
  std::vector<Scene> scenes;
  for (const auto& [image_id, annotations] : by_image) {
    const DepthMap raw = read_pgm((std::filesystem::path(depth_dir) / (image_id + ".pgm")).string());
    Scene scene;
    scene.id = image_id;
    scene.size = {raw.width, raw.height};
    scene.depth = canonicalize(raw);
    scene.background = scene.depth;
    for (const auto& a : annotations) {
      for (const auto& b : a.boxes) {
        rescale_box(b, scene.size);  // validates bounds
        scene.objects.push_back({a.category, b, 0.0});
      }
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

}  // namespace percept
