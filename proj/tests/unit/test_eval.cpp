// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "helpers.hpp"
#include "percept_tok/datagen.hpp"
#include "percept_tok/eval.hpp"

using namespace percept;

namespace {

Codebook ramp_codebook() {
  // 128 constant patches at levels c/127.
  Codebook cb;
  cb.k = kDepthCodes;
  for (int c = 0; c < cb.k; ++c) cb.codes.insert(cb.codes.end(), kPatchValues, static_cast<float>(c / 127.0));
  return cb;
}

Response text_response(const std::string& id, const std::string& text) {
  Response r;
  r.id = id;
  append_text(r.answer, text);
  return r;
}

}  // namespace

TEST_CASE("label extraction") {
  CHECK(extract_label("Therefore, point D is closest to the camera.", 4) == 'D');
  CHECK(extract_label("B", 2) == 'B');
  CHECK(extract_label("point c", 3) == 'C');
  CHECK(extract_label("A or E", 3) == 'A');  // E exceeds the marker count
  CHECK(extract_label("Answer: B.", 5) == 'B');
  CHECK_ERROR(extract_label("the nearest one", 3), ErrorCode::kUnparseable);
  CHECK_ERROR(extract_label("ABC", 3), ErrorCode::kUnparseable);
  CHECK_ERROR(extract_label("", 2), ErrorCode::kUnparseable);
}

TEST_CASE("count extraction") {
  CHECK(extract_count("There are 7 beds.") == 7);
  CHECK(extract_count("zero") == 0);
  CHECK(extract_count("Fifteen chairs") == 15);
  CHECK(extract_count("3 boxes, so 12 total") == 12);
  CHECK_ERROR(extract_count("several"), ErrorCode::kUnparseable);
  CHECK_ERROR(extract_count(""), ErrorCode::kUnparseable);
}

TEST_CASE("relative depth scoring") {
  const auto vocab = Vocabulary::build(32);
  const auto cb = ramp_codebook();
  BenchmarkItem item;
  item.id = "i0";
  item.size = {320, 320};
  item.markers = {{{'A', 16, 160}, {'B', 300, 160}}};
  item.gt_label = 'B';

  // Depth map increasing to the right: B is closest.
  CodeGrid g;
  for (int r = 0; r < kGridSize; ++r)
    for (int c = 0; c < kGridSize; ++c) g.indices[static_cast<std::size_t>(r * kGridSize + c)] = c * 12;
  Response full;
  full.id = "i0";
  append_text(full.answer, "The depth map is");
  append_tokens(full.answer, grid_to_tokens(g, vocab));
  append_text(full.answer, "Therefore, point A is closest to the camera.");
  const std::vector<BenchmarkItem> suite{item};
  auto res = relative_depth_accuracy(std::vector<Response>{full}, suite, cb, vocab);
  CHECK(res.map_consistency.accuracy == 1.0);
  CHECK(res.label.accuracy == 0.0);
  CHECK(res.label.items[0].predicted == "A");

  auto bare = relative_depth_accuracy(std::vector<Response>{text_response("i0", "B")}, suite, cb, vocab);
  CHECK(bare.label.accuracy == 1.0);
  CHECK(bare.map_consistency.skipped == 1);

  const auto empty = relative_depth_accuracy({}, suite, cb, vocab);
  CHECK(empty.label.accuracy == 0.0);
  CHECK(empty.label.skipped == empty.label.total);

  Response broken = full;
  broken.answer.clear();
  append_tokens(broken.answer, std::vector<TokenId>{vocab.depth_start(), vocab.depth_token(1), vocab.depth_end()});
  const auto bad = relative_depth_accuracy(std::vector<Response>{broken}, suite, cb, vocab);
  CHECK(bad.map_consistency.skipped == 1);
  CHECK(bad.map_consistency.correct + bad.map_consistency.incorrect + bad.map_consistency.skipped == 1);
  CHECK_ERROR(relative_depth_accuracy(std::vector<Response>{full, full}, suite, cb, vocab),
              ErrorCode::kInvalidArgument);
}

TEST_CASE("all-A responses on a two-point suite") {
  const auto vocab = Vocabulary::build(32);
  const auto scenes = make_scenes(5, SceneStream::kBenchmark, 60);
  const auto suite = build_benchmark(scenes, 2, {}, 5).items;
  std::vector<Response> rs;
  for (const auto& it : suite) rs.push_back(text_response(it.id, "A"));
  const auto rep = relative_depth_accuracy(rs, suite, ramp_codebook(), vocab);
  const auto a = std::count_if(suite.begin(), suite.end(), [](const BenchmarkItem& i) { return i.gt_label == 'A'; });
  CHECK(rep.label.accuracy == doctest::Approx(static_cast<double>(a) / suite.size()));
  CHECK(rep.label.correct + rep.label.incorrect + rep.label.skipped == rep.label.total);

  // Order independence.
  auto shuffled = rs;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(relative_depth_accuracy(shuffled, suite, ramp_codebook(), vocab).label.to_json() == rep.label.to_json());
}

TEST_CASE("counting scoring") {
  const auto vocab = Vocabulary::build(32);
  const auto scenes = make_scenes(6, SceneStream::kBenchmark, 50);
  const auto suite = build_count_suite(scenes, 6);
  const auto oracle = oracle_count_responses(suite, vocab);
  const auto rep = counting_accuracy(oracle, suite, vocab);
  CHECK(rep.accuracy == 1.0);
  CHECK(rep.inconsistent == 0);

  std::vector<Response> off;
  for (const auto& it : suite) off.push_back(text_response(it.id, std::to_string(it.gt_count + 1)));
  CHECK(counting_accuracy(off, suite, vocab).accuracy == 0.0);

  CountItem zero;
  zero.id = "z";
  zero.category = "bed";
  const std::vector<CountItem> zs{zero};
  CHECK(counting_accuracy(std::vector<Response>{text_response("z", "0")}, zs, vocab).accuracy == 1.0);

  // Stated count disagrees with the emitted boxes.
  Response lie = text_response("z", "The boxes are");
  append_tokens(lie.answer, std::vector<TokenId>{vocab.pixel_token(1), vocab.pixel_token(2), vocab.pixel_token(3),
                                                 vocab.pixel_token(4)});
  append_text(lie.answer, "so 0.");
  const auto r = counting_accuracy(std::vector<Response>{lie}, zs, vocab);
  CHECK(r.accuracy == 1.0);
  CHECK(r.inconsistent == 1);
  const auto table = r.to_table();
  CHECK(table.find("counting") != std::string::npos);
}

TEST_CASE("reconstruction mse") {
  const auto vocab = Vocabulary::build(32);
  const auto cb = ramp_codebook();
  CodeGrid g;
  for (std::size_t i = 0; i < g.indices.size(); ++i) g.indices[i] = static_cast<int>((i * 7) % 128);
  const DepthMap tiled = decode(g, cb);
  CHECK(recon_mse(grid_to_tokens(encode(tiled, cb), vocab), tiled, cb, vocab) == 0.0);

  Rng rng(2);
  DepthMap gt(kCanonicalSize, kCanonicalSize);
  for (double& v : gt.values) v = rng.uniform();
  const auto toks = grid_to_tokens(g, vocab);
  double acc = 0.0;
  for (int y = 0; y < kCanonicalSize; ++y) {
    for (int x = 0; x < kCanonicalSize; ++x) {
      const int code = g.indices[static_cast<std::size_t>((y / kPatchSize) * kGridSize + x / kPatchSize)];
      const double d = static_cast<double>(static_cast<float>(code / 127.0)) - gt.at(x, y);
      acc += d * d;
    }
  }
  CHECK(std::abs(recon_mse(toks, gt, cb, vocab) - acc / (kCanonicalSize * kCanonicalSize)) <= 1e-12);
  CHECK_ERROR(recon_mse(std::vector<TokenId>{vocab.depth_start()}, gt, cb, vocab), ErrorCode::kMalformedSequence);
}
