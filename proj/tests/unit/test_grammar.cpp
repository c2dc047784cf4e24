// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <sstream>

#include "helpers.hpp"
#include "percept_tok/depth_codec.hpp"
#include "percept_tok/grammar.hpp"

using namespace percept;

namespace {

// Independent structural check of a perception-grammar output.
bool well_formed(const std::vector<TokenId>& seq, const Vocabulary& vocab, TokenId eos) {
  std::size_t i = 0;
  while (i < seq.size()) {
    const TokenId t = seq[i];
    if (t == eos) return i + 1 == seq.size();
    if (t == vocab.depth_start()) {
      if (i + 102 > seq.size()) return false;
      std::vector<TokenId> span(seq.begin() + static_cast<std::ptrdiff_t>(i),
                                seq.begin() + static_cast<std::ptrdiff_t>(i + 102));
      try {
        (void)tokens_to_grid(span, vocab);
      } catch (const Error&) {
        return false;
      }
      i += 102;
    } else if (vocab.is_pixel(t)) {
      std::size_t run = 0;
      while (i < seq.size() && vocab.is_pixel(seq[i])) ++run, ++i;
      if (run % 4 != 0) return false;
    } else if (vocab.is_base(t)) {
      ++i;
    } else {
      return false;  // bare DEPTH or DEPTH_END
    }
  }
  return true;
}

}  // namespace

TEST_CASE("depth span masks") {
  const auto vocab = Vocabulary::build(32);
  const auto g = GrammarAutomaton::builtin("perception", vocab);
  DecodeState s = g.advance(g.start(), vocab.depth_start());
  CHECK(s.in_depth);
  for (int i = 0; i < 100; ++i) {
    const auto& m = g.allowed_mask(s);
    REQUIRE(m.count() == 128);
    for (TokenId t : m.tokens()) CHECK(vocab.is_depth(t));
    s = g.advance(s, vocab.depth_token(i % 128));
    CHECK(s.depth_count == i + 1);
  }
  CHECK(g.allowed_mask(s).tokens() == std::vector<TokenId>{vocab.depth_end()});
  CHECK_ERROR(g.advance(s, vocab.depth_token(0)), ErrorCode::kIllegalToken);
  s = g.advance(s, vocab.depth_end());
  CHECK_FALSE(s.in_depth);
  CHECK(g.accepting(s));
}

TEST_CASE("advance counts and rejects") {
  const auto vocab = Vocabulary::build(32);
  const auto g = GrammarAutomaton::builtin("perception", vocab);
  DecodeState s = g.advance(g.start(), vocab.depth_start());
  for (int i = 0; i < 57; ++i) s = g.advance(s, vocab.depth_token(1));
  REQUIRE(s.depth_count == 57);
  CHECK(g.advance(s, vocab.depth_token(9)).depth_count == 58);

  CHECK_ERROR(g.advance(g.start(), vocab.depth_token(3)), ErrorCode::kIllegalToken);
  CHECK_ERROR(g.advance(g.start(), vocab.depth_end()), ErrorCode::kIllegalToken);

  DecodeState p = g.start();
  for (int i = 0; i < 4; ++i) {
    p = g.advance(p, vocab.pixel_token(10 * i));
    CHECK(p.pixel_phase == (i + 1) % 4);
    if (p.pixel_phase != 0) {
      for (TokenId t : g.allowed_mask(p).tokens()) CHECK(vocab.is_pixel(t));
      CHECK(g.allowed_mask(p).count() == kPixelPositions);
      CHECK_FALSE(g.accepting(p));
    }
  }
  CHECK(g.accepting(p));
  // End-of-sequence ends decoding.
  const DecodeState done = g.advance(p, 0);
  CHECK(g.terminal(done));
  CHECK(g.accepting(done));
  CHECK(g.allowed_mask(done).count() == 0);
}

TEST_CASE("unrestricted grammar allows everything") {
  const auto vocab = Vocabulary::build(32);
  const auto g = GrammarAutomaton::builtin("unrestricted", vocab);
  CHECK(g.allowed_mask(g.start()).count() == vocab.size());
  const DecodeState s = g.advance(g.start(), vocab.depth_token(5));
  CHECK(g.allowed_mask(s).count() == vocab.size());
}

TEST_CASE("built-in grammars are non-blocking") {
  const auto vocab = Vocabulary::build(32);
  for (const auto& name : GrammarAutomaton::builtin_names()) {
    const auto g = GrammarAutomaton::builtin(name, vocab);
    CHECK(g.name() == name);
    for (std::size_t st = 0; st < g.num_states(); ++st) {
      const DecodeState s{static_cast<int>(st), 0, 0, false};
      CHECK(g.distance_to_accept(s) >= 0);
      CHECK(g.distance_to_accept(s) < 1000);
      if (!g.accepting(s)) CHECK(g.allowed_mask(s).count() >= 1);
    }
  }
  const auto span = GrammarAutomaton::builtin("depth_span", vocab);
  CHECK(span.distance_to_accept(span.start()) == 102);
  CHECK_FALSE(span.eos().has_value());
}

TEST_CASE("grammar description errors") {
  const auto vocab = Vocabulary::build(32);
  const auto bad = [&](const char* text) {
    CHECK_ERROR(GrammarAutomaton::compile(nlohmann::json::parse(text), vocab), ErrorCode::kInvalidGrammar);
  };
  bad(R"({"name":"x"})");
  bad(R"({"name":"x","body":{"class":"NOPE"}})");
  bad(R"({"name":"x","body":{"seq":3}})");
  bad(R"({"name":"x","body":{"choice":[]}})");
  bad(R"({"name":"x","body":{"repeat":{"class":"BASE"},"min":3,"max":2}})");
  bad(R"({"name":"x","body":{"wat":1}})");
  bad(R"({"name":"x","eos":999,"body":{"class":"BASE"}})");
  CHECK_ERROR(GrammarAutomaton::builtin("nope", vocab), ErrorCode::kInvalidGrammar);
  // A declared grammar: exactly one box, then end.
  const auto one_box = GrammarAutomaton::compile(
      nlohmann::json::parse(R"({"name":"one_box","eos":null,"body":{"repeat":{"class":"PIXEL"},"min":4,"max":4}})"),
      vocab);
  const std::vector<TokenId> box{vocab.pixel_token(1), vocab.pixel_token(2), vocab.pixel_token(3),
                                 vocab.pixel_token(4)};
  CHECK(one_box.accepts(box));
  CHECK_FALSE(one_box.accepts(std::span(box).first(3)));
}

TEST_CASE("constrained sampling") {
  const auto vocab = Vocabulary::build(32);
  const auto g = GrammarAutomaton::builtin("perception", vocab);
  CodeGrid grid;
  for (int i = 0; i < kGridCells; ++i) grid.indices[static_cast<std::size_t>(i)] = (i * 37) % 128;
  std::vector<TokenId> target{5, 6};
  for (TokenId t : grid_to_tokens(grid, vocab)) target.push_back(t);
  for (int v : {0, 335, 17, 200}) target.push_back(vocab.pixel_token(v));
  target.push_back(9);
  target.push_back(0);

  OracleStream oracle(target);
  CHECK(constrained_sample(oracle, g, {0.0, 1024, 0}) == target);

  // Base-loving stream: once inside a span the mask wins.
  std::vector<TokenId> prefix{3, vocab.depth_start()};
  struct Forced : LogitStream {
    std::vector<TokenId> prefix;
    BaseBiasedStream base;
    Forced(std::vector<TokenId> p, const Vocabulary& v) : prefix(std::move(p)), base(v) {}
    void scores(std::span<const TokenId> h, std::span<double> out) override {
      base.scores(h, out);
      if (h.size() < prefix.size()) out[prefix[h.size()]] = 100.0;
    }
  } forced(prefix, vocab);
  const auto out = constrained_sample(forced, g, {0.0, 200, 0});
  CHECK(g.accepts(out));
  CHECK(well_formed(out, vocab, 0));
  std::size_t depth = 0;
  for (TokenId t : out) depth += vocab.is_depth(t) ? 1 : 0;
  CHECK(depth == 100);

  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    RandomStream a(seed, vocab), b(seed, vocab);
    const SampleOptions opt{seed % 2 == 0 ? 0.0 : 0.7, 192, seed};
    const auto x = constrained_sample(a, g, opt);
    CHECK(x == constrained_sample(b, g, opt));
    CHECK(x.size() <= 192);
    CHECK(g.accepts(x));
    CHECK(well_formed(x, vocab, 0));
  }

  const auto span = GrammarAutomaton::builtin("depth_span", vocab);
  RandomStream r(1, vocab);
  CHECK_ERROR(constrained_sample(r, span, {0.0, 101, 0}), ErrorCode::kMaxLengthExceeded);
  const auto exact = constrained_sample(r, span, {0.0, 102, 0});
  CHECK(exact.size() == 102);
  CHECK_NOTHROW(tokens_to_grid(exact, vocab));
}

TEST_CASE("bottleneck context") {
  const auto vocab = Vocabulary::build(32);
  CodeGrid grid;
  const auto span = grid_to_tokens(grid, vocab);
  std::vector<TokenId> tr{1, 2, 3, 7, 8};
  tr.insert(tr.end(), span.begin(), span.end());
  tr.push_back(9);
  tr.push_back(10);
  std::vector<TokenId> want{1, 2, 3};
  want.insert(want.end(), span.begin(), span.end());
  CHECK(bottleneck_context(tr, 3, vocab) == want);
  const std::vector<TokenId> none{1, 2, 3, 4};
  CHECK_ERROR(bottleneck_context(none, 2, vocab), ErrorCode::kNoAuxSpan);

  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<TokenId> t;
    const std::size_t n = 1 + rng.below(60);
    for (std::size_t i = 0; i < n; ++i) t.push_back(static_cast<TokenId>(rng.below(vocab.size())));
    t.push_back(vocab.pixel_token(0));
    const std::size_t q = rng.below(10);
    const auto out = bottleneck_context(t, q, vocab);
    // Every aux token after the question, in order, and nothing else.
    std::vector<TokenId> aux;
    for (std::size_t i = q; i < t.size(); ++i) if (vocab.is_aux(t[i])) aux.push_back(t[i]);
    REQUIRE(out.size() == std::min(q, t.size()) + aux.size());
    CHECK(std::equal(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(std::min(q, t.size())), t.begin()));
    CHECK(std::equal(aux.begin(), aux.end(), out.end() - static_cast<std::ptrdiff_t>(aux.size())));
  }
}

TEST_CASE("base64") {
  CHECK(base64_encode("") == "");
  CHECK(base64_encode("f") == "Zg==");
  CHECK(base64_encode("fo") == "Zm8=");
  CHECK(base64_encode("foobar") == "Zm9vYmFy");
  Rng rng(1);
  for (int n = 0; n < 40; ++n) {
    std::string s;
    for (int i = 0; i < n; ++i) s.push_back(static_cast<char>(rng.below(256)));
    CHECK(base64_decode(base64_encode(s)) == s);
  }
  CHECK_ERROR(base64_decode("abc"), ErrorCode::kInvalidArgument);
  CHECK_ERROR(base64_decode("a=bc"), ErrorCode::kInvalidArgument);
}

TEST_CASE("mask service protocol") {
  const auto vocab = Vocabulary::build(32);
  const auto g = GrammarAutomaton::builtin("perception", vocab);
  MaskService svc(g);
  bool quit = false;
  const std::string h0 = MaskService::format_hash(MaskService::empty_hash());
  CHECK(h0 == "cbf29ce484222325");
  CHECK(svc.handle_line("START", quit) == "OK " + h0);
  const std::string r1 = svc.handle_line("ADVANCE " + h0 + " " + std::to_string(vocab.depth_start()), quit);
  REQUIRE(r1.rfind("OK ", 0) == 0);
  const std::string h1 = r1.substr(3);
  CHECK(h1 == MaskService::format_hash(MaskService::extend_hash(MaskService::empty_hash(), vocab.depth_start())));
  const std::string m = svc.handle_line("MASK " + h1, quit);
  REQUIRE(m.rfind("OK ", 0) == 0);
  const std::string bytes = base64_decode(m.substr(3));
  CHECK(bytes.size() == (vocab.size() + 7) / 8);
  int allowed = 0;
  for (std::size_t t = 0; t < vocab.size(); ++t) {
    const bool bit = (static_cast<unsigned char>(bytes[t / 8]) >> (t % 8)) & 1U;
    allowed += bit ? 1 : 0;
    if (bit) CHECK(vocab.is_depth(static_cast<TokenId>(t)));
  }
  CHECK(allowed == 128);
  CHECK(svc.handle_line("STATE " + h1, quit).rfind("OK ", 0) == 0);
  CHECK(svc.handle_line("ADVANCE " + h1 + " 5", quit).rfind("ERR IllegalToken ", 0) == 0);
  CHECK(svc.handle_line("MASK 0000000000000000", quit).rfind("ERR InvalidArgument ", 0) == 0);
  CHECK(svc.handle_line("FROB", quit).rfind("ERR ", 0) == 0);
  CHECK_FALSE(quit);

  std::istringstream in("START\n\nMASK " + h0 + "\nQUIT\nSTART\n");
  std::ostringstream out;
  MaskService(g).serve(in, out);
  std::istringstream lines(out.str());
  std::string line;
  std::vector<std::string> got;
  while (std::getline(lines, line)) got.push_back(line);
  REQUIRE(got.size() == 3);
  CHECK(got[0] == "OK " + h0);
  CHECK(base64_decode(got[1].substr(3)) == g.allowed_mask(g.start()).to_bytes());
  CHECK(got[2] == "BYE");
}
