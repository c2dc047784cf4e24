// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "percept_tok/config.hpp"

#include <algorithm>
#include <initializer_list>

#include "percept_tok/error.hpp"
#include "percept_tok/io.hpp"

namespace percept {

namespace {

void allow_only(const nlohmann::json& j, std::string_view section, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "config section '" + std::string(section) + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      fail(ErrorCode::kInvalidArgument, "unknown config key '" + std::string(section) + key + "'");
    }
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::merge_json(const nlohmann::json& j) {
  try {
    allow_only(j, "", {"seed", "jobs", "base_size", "paths", "codebook", "bench", "curriculum", "losses",
                       "corpus", "grammar"});
    read(j, "seed", seed);
    read(j, "jobs", jobs);
    read(j, "base_size", base_size);
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      allow_only(p, "paths.", {"vocab", "codebook", "templates", "out_dir"});
      read(p, "vocab", paths.vocab);
      read(p, "codebook", paths.codebook);
      read(p, "templates", paths.templates);
      read(p, "out_dir", paths.out_dir);
    }
    if (j.contains("codebook")) {
      const auto& c = j.at("codebook");
      allow_only(c, "codebook.", {"k", "maps", "patches_per_map", "max_iters", "tol"});
      read(c, "k", codebook.k);
      read(c, "maps", codebook.maps);
      read(c, "patches_per_map", codebook.patches_per_map);
      read(c, "max_iters", codebook.max_iters);
      read(c, "tol", codebook.tol);
    }
    if (j.contains("bench")) {
      const auto& b = j.at("bench");
      allow_only(b, "bench.", {"delta_depth", "delta_xy_fraction", "band_lo", "band_hi", "max_attempts",
                               "bilinear", "scenes"});
      read(b, "delta_depth", bench.delta_depth);
      read(b, "delta_xy_fraction", bench.delta_xy_fraction);
      read(b, "band_lo", bench.band_lo);
      read(b, "band_hi", bench.band_hi);
      read(b, "max_attempts", bench.max_attempts);
      read(b, "bilinear", bench.bilinear);
      read(b, "scenes", bench_scenes);
    }
    if (j.contains("curriculum")) {
      const auto& c = j.at("curriculum");
      allow_only(c, "curriculum.", {"tau0", "lambda", "steps"});
      read(c, "tau0", schedule.tau0);
      read(c, "lambda", schedule.lambda);
      read(c, "steps", schedule.steps);
    }
    if (j.contains("losses")) {
      const auto& l = j.at("losses");
      allow_only(l, "losses.", {"epsilon"});
      read(l, "epsilon", epsilon);
    }
    if (j.contains("corpus")) {
      const auto& c = j.at("corpus");
      allow_only(c, "corpus.", {"depth_gen", "depth_cot_images", "bbox_gen", "count_cot", "count_direct",
                                "min_markers", "max_markers", "placement_retries", "substitute_scenes"});
      read(c, "depth_gen", corpus.depth_gen);
      read(c, "depth_cot_images", corpus.depth_cot_images);
      read(c, "bbox_gen", corpus.bbox_gen);
      read(c, "count_cot", corpus.count_cot);
      read(c, "count_direct", corpus.count_direct);
      read(c, "min_markers", corpus.min_markers);
      read(c, "max_markers", corpus.max_markers);
      read(c, "placement_retries", corpus.placement_retries);
      read(c, "substitute_scenes", corpus.substitute_scenes);
    }
    if (j.contains("grammar")) {
      const auto& g = j.at("grammar");
      allow_only(g, "grammar.", {"name", "max_len"});
      read(g, "name", grammar);
      read(g, "max_len", max_len);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad config value: ") + e.what());
  }
  corpus.bench = bench;
  corpus.jobs = jobs;
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["jobs"] = jobs;
  j["base_size"] = base_size;
  j["paths"] = {{"vocab", paths.vocab},
                {"codebook", paths.codebook},
                {"templates", paths.templates},
                {"out_dir", paths.out_dir}};
  j["codebook"] = {{"k", codebook.k},
                   {"maps", codebook.maps},
                   {"patches_per_map", codebook.patches_per_map},
                   {"max_iters", codebook.max_iters},
                   {"tol", codebook.tol}};
  j["bench"] = {{"delta_depth", bench.delta_depth},
                {"delta_xy_fraction", bench.delta_xy_fraction},
                {"band_lo", bench.band_lo},
                {"band_hi", bench.band_hi},
                {"max_attempts", bench.max_attempts},
                {"bilinear", bench.bilinear},
                {"scenes", bench_scenes}};
  j["curriculum"] = {{"tau0", schedule.tau0}, {"lambda", schedule.lambda}, {"steps", schedule.steps}};
  j["losses"] = {{"epsilon", epsilon}};
  j["corpus"] = {{"depth_gen", corpus.depth_gen},
                 {"depth_cot_images", corpus.depth_cot_images},
                 {"bbox_gen", corpus.bbox_gen},
                 {"count_cot", corpus.count_cot},
                 {"count_direct", corpus.count_direct},
                 {"min_markers", corpus.min_markers},
                 {"max_markers", corpus.max_markers},
                 {"placement_retries", corpus.placement_retries},
                 {"substitute_scenes", corpus.substitute_scenes}};
  j["grammar"] = {{"name", grammar}, {"max_len", max_len}};
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  c.merge_json(j);
  return c;
}

void RunConfig::merge_file(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
  merge_json(doc);
}

bool operator==(const RunConfig& a, const RunConfig& b) { return a.to_json() == b.to_json(); }

}  // namespace percept
