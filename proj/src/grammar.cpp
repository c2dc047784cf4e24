// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "percept_tok/grammar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "percept_tok/error.hpp"
#include "percept_tok/io.hpp"

namespace percept {

std::size_t TokenMask::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<TokenId> TokenMask::tokens() const {
  std::vector<TokenId> out;
  for (std::size_t i = 0; i < size_; ++i) {
    if (test(static_cast<TokenId>(i))) out.push_back(static_cast<TokenId>(i));
  }
  return out;
}

std::string TokenMask::to_bytes() const {
  std::string out((size_ + 7) / 8, '\0');
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<char>((words_[i / 8] >> (8 * (i % 8))) & 0xff);
  }
  return out;
}

namespace {

constexpr int kBaseClass = 0;
constexpr int kEosClass = 1;
constexpr int kMaxRepeat = 4096;
constexpr int kUnreachable = std::numeric_limits<int>::max();

struct Nfa {
  std::vector<std::vector<std::pair<int, int>>> edges;  // (class, target)
  std::vector<std::vector<int>> eps;

  int add() {
    edges.emplace_back();
    eps.emplace_back();
    return static_cast<int>(edges.size()) - 1;
  }
};

struct Frag {
  int start;
  int end;
};

class NfaBuilder {
 public:
  NfaBuilder(Nfa& nfa, const std::vector<std::string>& classes) : nfa_(nfa), classes_(classes) {}

  Frag build(const nlohmann::json& node) {
    if (!node.is_object()) fail(ErrorCode::kInvalidGrammar, "grammar node must be an object");
    if (nfa_.edges.size() > 1'000'000) fail(ErrorCode::kInvalidGrammar, "grammar too large");
    if (node.contains("class")) return build_class(node.at("class"));
    if (node.contains("seq")) return build_seq(node.at("seq"));
    if (node.contains("choice")) return build_choice(node.at("choice"));
    if (node.contains("repeat")) return build_repeat(node);
    fail(ErrorCode::kInvalidGrammar, "unknown grammar node " + node.dump());
  }

 private:
  Frag build_class(const nlohmann::json& name_json) {
    if (!name_json.is_string()) fail(ErrorCode::kInvalidGrammar, "class must be a string");
    const auto name = name_json.get<std::string>();
    const int s = nfa_.add();
    const int e = nfa_.add();
    if (name == "ANY") {
      for (int c = 0; c < static_cast<int>(classes_.size()); ++c) {
        if (c != kEosClass) nfa_.edges[s].push_back({c, e});
      }
      return {s, e};
    }
    const auto it = std::find(classes_.begin(), classes_.end(), name);
    if (it == classes_.end() || it - classes_.begin() == kEosClass) {
      fail(ErrorCode::kInvalidGrammar, "unknown token class " + name);
    }
    nfa_.edges[s].push_back({static_cast<int>(it - classes_.begin()), e});
    return {s, e};
  }

  Frag build_seq(const nlohmann::json& items) {
    if (!items.is_array()) fail(ErrorCode::kInvalidGrammar, "seq must be an array");
    const int s = nfa_.add();
    int cur = s;
    for (const auto& item : items) {
      const Frag f = build(item);
      nfa_.eps[cur].push_back(f.start);
      cur = f.end;
    }
    const int e = nfa_.add();
    nfa_.eps[cur].push_back(e);
    return {s, e};
  }

  Frag build_choice(const nlohmann::json& items) {
    if (!items.is_array() || items.empty()) fail(ErrorCode::kInvalidGrammar, "choice must be a non-empty array");
    const int s = nfa_.add();
    const int e = nfa_.add();
    for (const auto& item : items) {
      const Frag f = build(item);
      nfa_.eps[s].push_back(f.start);
      nfa_.eps[f.end].push_back(e);
    }
    return {s, e};
  }

  Frag build_repeat(const nlohmann::json& node) {
    const int min = node.value("min", 0);
    std::optional<int> max;
    if (node.contains("max") && !node.at("max").is_null()) max = node.at("max").get<int>();
    if (min < 0 || min > kMaxRepeat || (max && (*max < min || *max > kMaxRepeat))) {
      fail(ErrorCode::kInvalidGrammar, "repeat bounds must satisfy 0 <= min <= max <= 4096");
    }
    const auto& body = node.at("repeat");
    const int s = nfa_.add();
    int cur = s;
    for (int i = 0; i < min; ++i) {
      const Frag f = build(body);
      nfa_.eps[cur].push_back(f.start);
      cur = f.end;
    }
    const int e = nfa_.add();
    if (!max) {
      const Frag f = build(body);
      nfa_.eps[cur].push_back(f.start);
      nfa_.eps[f.end].push_back(f.start);
      nfa_.eps[f.end].push_back(e);
    } else {
      for (int i = min; i < *max; ++i) {
        const Frag f = build(body);
        nfa_.eps[cur].push_back(e);
        nfa_.eps[cur].push_back(f.start);
        cur = f.end;
      }
    }
    nfa_.eps[cur].push_back(e);
    return {s, e};
  }

  Nfa& nfa_;
  const std::vector<std::string>& classes_;
};

std::vector<int> closure(const Nfa& nfa, std::vector<int> states) {
  std::vector<bool> seen(nfa.edges.size(), false);
  std::vector<int> stack = states;
  for (int s : states) seen[s] = true;
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (int t : nfa.eps[s]) {
      if (!seen[t]) {
        seen[t] = true;
        states.push_back(t);
        stack.push_back(t);
      }
    }
  }
  std::sort(states.begin(), states.end());
  return states;
}

const nlohmann::json& builtins() {
  static const nlohmann::json doc = [] {
    const nlohmann::json depth_span = {
        {"seq",
         {{{"class", "DEPTH_START"}},
          {{"repeat", {{"class", "DEPTH"}}}, {"min", 100}, {"max", 100}},
          {{"class", "DEPTH_END"}}}}};
    const nlohmann::json tuple = {{"repeat", {{"class", "PIXEL"}}}, {"min", 4}, {"max", 4}};
    nlohmann::json d;
    d["depth_span"] = {{"name", "depth_span"}, {"eos", nullptr}, {"body", depth_span}};
    d["bbox_tuples"] = {{"name", "bbox_tuples"},
                        {"eos", 0},
                        {"body", {{"repeat", tuple}, {"min", 0}, {"max", nullptr}}}};
    d["perception"] = {
        {"name", "perception"},
        {"eos", 0},
        {"body",
         {{"repeat", {{"choice", {{{"class", "BASE"}}, tuple, depth_span}}}},
          {"min", 0},
          {"max", nullptr}}}};
    d["unrestricted"] = {{"name", "unrestricted"},
                         {"eos", 0},
                         {"body", {{"repeat", {{"class", "ANY"}}}, {"min", 0}, {"max", nullptr}}}};
    return d;
  }();
  return doc;
}

}  // namespace

GrammarAutomaton GrammarAutomaton::compile(const nlohmann::json& description, const Vocabulary& vocab) {
  GrammarAutomaton g;
  if (!description.is_object() || !description.contains("body")) {
    fail(ErrorCode::kInvalidGrammar, "grammar description needs a body");
  }
  g.name_ = description.value("name", std::string("grammar"));
  if (!description.contains("eos")) {
    g.eos_ = 0;
  } else if (!description.at("eos").is_null()) {
    g.eos_ = description.at("eos").get<TokenId>();
  }
  if (g.eos_ && *g.eos_ >= vocab.base_size()) fail(ErrorCode::kInvalidGrammar, "eos must be a base token");

  g.class_names_ = {"BASE", "EOS"};
  g.token_class_.assign(vocab.size(), kBaseClass);
  if (g.eos_) g.token_class_[*g.eos_] = kEosClass;
  for (const auto& fam : vocab.families()) {
    if (fam.name == kDelimFamily) {
      for (std::size_t i = 0; i < fam.size(); ++i) {
        g.class_names_.push_back(fam.surface_forms[i]);
        g.token_class_[fam.first + i] = static_cast<std::uint8_t>(g.class_names_.size() - 1);
      }
    } else {
      g.class_names_.push_back(fam.name);
      for (std::size_t i = 0; i < fam.size(); ++i) {
        g.token_class_[fam.first + i] = static_cast<std::uint8_t>(g.class_names_.size() - 1);
      }
    }
  }
  if (g.class_names_.size() > 255) fail(ErrorCode::kInvalidGrammar, "too many token classes");
  const auto class_index = [&](std::string_view n) {
    const auto it = std::find(g.class_names_.begin(), g.class_names_.end(), n);
    return it == g.class_names_.end() ? -1 : static_cast<int>(it - g.class_names_.begin());
  };
  g.depth_class_ = class_index(kDepthFamily);
  g.pixel_class_ = class_index(kPixelFamily);
  g.start_class_ = class_index(kDepthStart);
  g.end_class_ = class_index(kDepthEnd);

  Nfa nfa;
  const Frag root = NfaBuilder(nfa, g.class_names_).build(description.at("body"));
  const int num_classes = static_cast<int>(g.class_names_.size());

  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> sets;
  std::deque<int> queue;
  const auto intern = [&](std::vector<int> set) {
    const auto [it, inserted] = ids.emplace(set, static_cast<int>(sets.size()));
    if (inserted) {
      sets.push_back(std::move(set));
      g.trans_.emplace_back(num_classes, -1);
      queue.push_back(it->second);
    }
    return it->second;
  };
  g.start_ = intern(closure(nfa, {root.start}));
  while (!queue.empty()) {
    const int d = queue.front();
    queue.pop_front();
    for (int c = 0; c < num_classes; ++c) {
      std::vector<int> moved;
      for (int s : sets[d]) {
        for (const auto& [cls, t] : nfa.edges[s]) {
          if (cls == c) moved.push_back(t);
        }
      }
      if (moved.empty()) continue;
      const int target = intern(closure(nfa, std::move(moved)));
      g.trans_[d][c] = target;
    }
  }
  for (const auto& set : sets) {
    g.accept_.push_back(std::binary_search(set.begin(), set.end(), root.end));
  }
  if (g.eos_) {
    int done = -1;
    const std::size_t n = g.trans_.size();
    for (std::size_t d = 0; d < n; ++d) {
      const bool has_out = std::any_of(g.trans_[d].begin(), g.trans_[d].end(), [](int t) { return t >= 0; });
      if (!g.accept_[d] || !has_out) continue;
      if (done < 0) {
        done = static_cast<int>(g.trans_.size());
        g.trans_.emplace_back(num_classes, -1);
        g.accept_.push_back(true);
      }
      g.trans_[d][kEosClass] = done;
    }
  }

  // Shortest distance to acceptance by reverse relaxation; also the
  // non-blocking check.
  const std::size_t n = g.trans_.size();
  g.dist_.assign(n, kUnreachable);
  for (std::size_t d = 0; d < n; ++d) {
    if (g.accept_[d]) g.dist_[d] = 0;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t d = 0; d < n; ++d) {
      for (int t : g.trans_[d]) {
        if (t >= 0 && g.dist_[t] != kUnreachable && g.dist_[t] + 1 < g.dist_[d]) {
          g.dist_[d] = g.dist_[t] + 1;
          changed = true;
        }
      }
    }
  }
  for (std::size_t d = 0; d < n; ++d) {
    if (g.dist_[d] == kUnreachable) {
      fail(ErrorCode::kInvalidGrammar, "grammar " + g.name_ + " has a state that cannot reach acceptance");
    }
  }

  g.masks_.assign(n, TokenMask(vocab.size()));
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t t = 0; t < vocab.size(); ++t) {
      if (g.trans_[d][g.token_class_[t]] >= 0) g.masks_[d].set(static_cast<TokenId>(t));
    }
  }
  return g;
}

GrammarAutomaton GrammarAutomaton::load(const std::string& path, const Vocabulary& vocab) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidGrammar, path + ": " + e.what());
  }
  return compile(doc, vocab);
}

const nlohmann::json& GrammarAutomaton::builtin_description(std::string_view name) {
  const auto& all = builtins();
  const auto it = all.find(std::string(name));
  if (it == all.end()) fail(ErrorCode::kInvalidGrammar, "no built-in grammar " + std::string(name));
  return *it;
}

GrammarAutomaton GrammarAutomaton::builtin(std::string_view name, const Vocabulary& vocab) {
  return compile(builtin_description(name), vocab);
}

std::vector<std::string> GrammarAutomaton::builtin_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : builtins().items()) out.push_back(k);
  return out;
}

bool GrammarAutomaton::terminal(const DecodeState& s) const {
  const auto& row = trans_[s.state];
  return std::none_of(row.begin(), row.end(), [](int t) { return t >= 0; });
}

bool GrammarAutomaton::allows(const DecodeState& s, TokenId t) const {
  return t < token_class_.size() && trans_[s.state][token_class_[t]] >= 0;
}

DecodeState GrammarAutomaton::advance(const DecodeState& s, TokenId t) const {
  if (!allows(s, t)) {
    fail(ErrorCode::kIllegalToken, "token " + std::to_string(t) + " not allowed in state " +
                                       std::to_string(s.state) + " of grammar " + name_);
  }
  const int cls = token_class_[t];
  DecodeState out = s;
  out.state = trans_[s.state][cls];
  if (cls == start_class_) {
    out.in_depth = true;
    out.depth_count = 0;
  } else if (cls == end_class_) {
    out.in_depth = false;
    out.depth_count = 0;
  } else if (cls == depth_class_ && out.in_depth) {
    ++out.depth_count;
  } else if (cls == pixel_class_) {
    out.pixel_phase = (out.pixel_phase + 1) % 4;
  }
  return out;
}

bool GrammarAutomaton::accepts(std::span<const TokenId> seq) const {
  DecodeState s = start();
  for (TokenId t : seq) {
    if (!allows(s, t)) return false;
    s = advance(s, t);
  }
  return accepting(s);
}

void OracleStream::scores(std::span<const TokenId> history, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t i = history.size();
  if (i < target_.size()) {
    if (target_[i] < out.size()) out[target_[i]] = 1.0;
  } else if (fallback_ && *fallback_ < out.size()) {
    out[*fallback_] = 1.0;
  }
}

RandomStream::RandomStream(std::uint64_t seed, const Vocabulary& vocab, double bias_scale) : rng_(seed) {
  bias_.assign(vocab.size(), 0.0);
  const double base_bias = rng_.uniform(-bias_scale, bias_scale);
  for (std::size_t t = 0; t < vocab.base_size(); ++t) bias_[t] = base_bias;
  for (const auto& fam : vocab.families()) {
    for (std::size_t i = 0; i < fam.size(); ++i) {
      // Delimiters get their own draw so spans open at varying rates.
      if (i == 0 || fam.name == kDelimFamily) bias_[fam.first + i] = rng_.uniform(-bias_scale, bias_scale);
      else bias_[fam.first + i] = bias_[fam.first];
    }
  }
}

void RandomStream::scores(std::span<const TokenId>, std::span<double> out) {
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t] = (t < bias_.size() ? bias_[t] : 0.0) + rng_.uniform();
  }
}

void BaseBiasedStream::scores(std::span<const TokenId>, std::span<double> out) {
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = t < base_size_ ? 10.0 : 0.0;
}

std::vector<TokenId> constrained_sample(LogitStream& stream, const GrammarAutomaton& grammar,
                                        const SampleOptions& options) {
  DecodeState state = grammar.start();
  if (static_cast<std::size_t>(grammar.distance_to_accept(state)) > options.max_len) {
    fail(ErrorCode::kMaxLengthExceeded, "grammar " + grammar.name() + " needs at least " +
                                            std::to_string(grammar.distance_to_accept(state)) +
                                            " tokens, max_len is " + std::to_string(options.max_len));
  }
  Rng rng(options.seed);
  const std::size_t v = grammar.vocab_size();
  const std::size_t num_classes = grammar.class_names().size();
  std::vector<double> scores(v);
  std::vector<TokenId> out;
  std::vector<bool> open(num_classes);
  std::vector<TokenId> candidates;
  std::vector<double> weights;
  while (!grammar.terminal(state)) {
    const std::size_t remaining = options.max_len - out.size();
    bool any = false;
    for (std::size_t c = 0; c < num_classes; ++c) {
      const int nxt = grammar.next(state.state, static_cast<int>(c));
      open[c] = remaining > 0 && nxt >= 0 &&
                static_cast<std::size_t>(grammar.distance_to_accept({nxt, 0, 0, false})) + 1 <= remaining;
      any = any || open[c];
    }
    if (!any) break;  // budget exhausted; the budget rule keeps us accepting here

    stream.scores(out, scores);
    candidates.clear();
    for (std::size_t t = 0; t < v; ++t) {
      if (open[static_cast<std::size_t>(grammar.class_of(static_cast<TokenId>(t)))]) {
        candidates.push_back(static_cast<TokenId>(t));
      }
    }
    const auto score_of = [&](TokenId t) {
      const double s = scores[t];
      return std::isnan(s) ? -std::numeric_limits<double>::infinity() : s;
    };
    TokenId pick = candidates.front();
    if (options.temperature <= 0.0) {
      for (TokenId t : candidates) {
        if (score_of(t) > score_of(pick)) pick = t;
      }
    } else {
      double best = -std::numeric_limits<double>::infinity();
      for (TokenId t : candidates) best = std::max(best, score_of(t));
      weights.assign(candidates.size(), 1.0);
      double total = 0.0;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (std::isfinite(best)) weights[i] = std::exp((score_of(candidates[i]) - best) / options.temperature);
        total += weights[i];
      }
      double u = rng.uniform() * total;
      pick = candidates.back();
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (u < weights[i]) {
          pick = candidates[i];
          break;
        }
        u -= weights[i];
      }
    }
    state = grammar.advance(state, pick);
    out.push_back(pick);
  }
  return out;
}

std::vector<TokenId> bottleneck_context(std::span<const TokenId> transcript, std::size_t question_len,
                                        const Vocabulary& vocab) {
  if (std::none_of(transcript.begin(), transcript.end(), [&](TokenId t) { return vocab.is_aux(t); })) {
    fail(ErrorCode::kNoAuxSpan, "transcript has no auxiliary tokens");
  }
  question_len = std::min(question_len, transcript.size());
  std::vector<TokenId> out(transcript.begin(), transcript.begin() + static_cast<std::ptrdiff_t>(question_len));
  for (std::size_t i = question_len; i < transcript.size(); ++i) {
    if (vocab.is_aux(transcript[i])) out.push_back(transcript[i]);
  }
  return out;
}

namespace {
constexpr std::string_view kB64 = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}  // namespace

std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t n = (static_cast<std::uint8_t>(bytes[i]) << 16) |
                            (static_cast<std::uint8_t>(bytes[i + 1]) << 8) |
                            static_cast<std::uint8_t>(bytes[i + 2]);
    out += kB64[(n >> 18) & 63];
    out += kB64[(n >> 12) & 63];
    out += kB64[(n >> 6) & 63];
    out += kB64[n & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    std::uint32_t n = static_cast<std::uint8_t>(bytes[i]) << 16;
    if (rest == 2) n |= static_cast<std::uint8_t>(bytes[i + 1]) << 8;
    out += kB64[(n >> 18) & 63];
    out += kB64[(n >> 12) & 63];
    out += rest == 2 ? kB64[(n >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) fail(ErrorCode::kInvalidArgument, "base64 length must be a multiple of 4");
  std::string out;
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t n = 0;
    int pad = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      const char c = text[i + j];
      std::uint32_t v = 0;
      if (c == '=' && i + 4 == text.size() && j >= 2) {
        ++pad;
      } else {
        const auto pos = kB64.find(c);
        if (pos == std::string_view::npos || pad > 0) fail(ErrorCode::kInvalidArgument, "invalid base64");
        v = static_cast<std::uint32_t>(pos);
      }
      n = (n << 6) | v;
    }
    out += static_cast<char>((n >> 16) & 0xff);
    if (pad < 2) out += static_cast<char>((n >> 8) & 0xff);
    if (pad < 1) out += static_cast<char>(n & 0xff);
  }
  return out;
}

std::uint64_t MaskService::empty_hash() { return 0xcbf29ce484222325ULL; }

std::uint64_t MaskService::extend_hash(std::uint64_t h, TokenId t) {
  for (int i = 0; i < 4; ++i) {
    h ^= (t >> (8 * i)) & 0xffU;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string MaskService::format_hash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string MaskService::handle_line(std::string_view line, bool& quit) {
  std::istringstream in{std::string(line)};
  std::string cmd;
  in >> cmd;
  const auto lookup = [&]() -> std::pair<std::uint64_t, DecodeState> {
    std::string h;
    if (!(in >> h) || h.size() != 16 || h.find_first_not_of("0123456789abcdef") != std::string::npos) {
      fail(ErrorCode::kInvalidArgument, "expected a 16-digit hex state hash");
    }
    const std::uint64_t key = std::stoull(h, nullptr, 16);
    const auto it = states_.find(key);
    if (it == states_.end()) fail(ErrorCode::kInvalidArgument, "unknown state hash " + h);
    return {key, it->second};
  };
  try {
    if (cmd == "START") {
      states_[empty_hash()] = grammar_.start();
      return "OK " + format_hash(empty_hash());
    }
    if (cmd == "ADVANCE") {
      const auto [key, state] = lookup();
      long long token = -1;
      if (!(in >> token) || token < 0 || token > std::numeric_limits<TokenId>::max()) {
        fail(ErrorCode::kInvalidArgument, "expected a token id");
      }
      const DecodeState next = grammar_.advance(state, static_cast<TokenId>(token));
      const std::uint64_t h = extend_hash(key, static_cast<TokenId>(token));
      states_[h] = next;
      return "OK " + format_hash(h);
    }
    if (cmd == "MASK") {
      const auto [key, state] = lookup();
      return "OK " + base64_encode(grammar_.allowed_mask(state).to_bytes());
    }
    if (cmd == "STATE") {
      const auto [key, state] = lookup();
      return "OK " + std::to_string(state.state) + " " + std::to_string(state.depth_count) + " " +
             std::to_string(state.pixel_phase) + " " + (grammar_.accepting(state) ? "1" : "0");
    }
    if (cmd == "QUIT") {
      quit = true;
      return "BYE";
    }
    fail(ErrorCode::kInvalidArgument, "unknown command '" + cmd + "'");
  } catch (const Error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    return "ERR " + std::string(e.name()) + " " + msg;
  }
}

void MaskService::serve(std::istream& in, std::ostream& out) {
  std::string line;
  bool quit = false;
  while (!quit && std::getline(in, line)) {
    if (line.empty()) continue;
    out << handle_line(line, quit) << '\n' << std::flush;
  }
}

}  // namespace percept
