// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Finite-state constrained decoding over the expanded vocabulary.
//
// A grammar is a regular expression over token classes, written as JSON:
//
//   {"name": "...", "eos": 0 | null, "body": <node>}
//   node := {"class": "BASE"} | {"seq": [node...]} | {"choice": [node...]}
//         | {"repeat": node, "min": k, "max": k | null}
//
// Classes are BASE (every base id except EOS), ANY (everything except EOS),
// one class per auxiliary family (DEPTH, PIXEL, ...), and one class per
// member of the DELIM family (DEPTH_START, DEPTH_END). The body compiles to
// a deterministic automaton by subset construction. When `eos` names a base
// id, that token is allowed in every accepting state that still has
// outgoing transitions and ends the sequence.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "percept_tok/rng.hpp"
#include "percept_tok/vocab.hpp"

namespace percept {

class TokenMask {
 public:
  TokenMask() = default;
  explicit TokenMask(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const { return size_; }
  bool test(TokenId t) const { return t < size_ && (words_[t / 64] >> (t % 64)) & 1U; }
  void set(TokenId t) { words_[t / 64] |= std::uint64_t{1} << (t % 64); }
  std::size_t count() const;
  std::vector<TokenId> tokens() const;
  /// Little-endian bit order: token i is bit (i % 8) of byte i / 8.
  std::string to_bytes() const;
  bool operator==(const TokenMask&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct DecodeState {
  int state = 0;
  int depth_count = 0;  // DEPTH tokens since the last DEPTH_START
  int pixel_phase = 0;  // PIXEL tokens emitted, mod 4
  bool in_depth = false;
  bool operator==(const DecodeState&) const = default;
};

class GrammarAutomaton {
 public:
  static GrammarAutomaton compile(const nlohmann::json& description, const Vocabulary& vocab);
  static GrammarAutomaton load(const std::string& path, const Vocabulary& vocab);
  /// depth_span, bbox_tuples, perception, unrestricted.
  static GrammarAutomaton builtin(std::string_view name, const Vocabulary& vocab);
  static const nlohmann::json& builtin_description(std::string_view name);
  static std::vector<std::string> builtin_names();

  const std::string& name() const { return name_; }
  std::optional<TokenId> eos() const { return eos_; }
  std::size_t num_states() const { return trans_.size(); }
  std::size_t vocab_size() const { return token_class_.size(); }
  const std::vector<std::string>& class_names() const { return class_names_; }
  int class_of(TokenId t) const { return token_class_.at(t); }

  DecodeState start() const { return {start_, 0, 0, false}; }
  bool accepting(const DecodeState& s) const { return accept_[s.state]; }
  /// No outgoing transitions: decoding stops here.
  bool terminal(const DecodeState& s) const;
  /// Fewest tokens from `s` to an accepting state.
  int distance_to_accept(const DecodeState& s) const { return dist_[s.state]; }

  const TokenMask& allowed_mask(const DecodeState& s) const { return masks_[s.state]; }
  bool allows(const DecodeState& s, TokenId t) const;
  /// Throws IllegalToken when `t` is not allowed in `s`.
  DecodeState advance(const DecodeState& s, TokenId t) const;
  /// True if the whole sequence is legal and ends in an accepting state.
  bool accepts(std::span<const TokenId> seq) const;

  /// Successor state id for a class, or -1.
  int next(int state, int cls) const { return trans_[state][cls]; }

 private:
  std::string name_;
  std::optional<TokenId> eos_;
  std::vector<std::string> class_names_;
  std::vector<std::uint8_t> token_class_;
  int depth_class_ = -1;
  int pixel_class_ = -1;
  int start_class_ = -1;
  int end_class_ = -1;
  int start_ = 0;
  std::vector<std::vector<int>> trans_;
  std::vector<bool> accept_;
  std::vector<int> dist_;
  std::vector<TokenMask> masks_;
};

/// Source of per-step scores over V'.
class LogitStream {
 public:
  virtual ~LogitStream() = default;
  /// Writes one score per token of V' given the tokens emitted so far.
  virtual void scores(std::span<const TokenId> history, std::span<double> out) = 0;
};

/// Scores the next token of a fixed target sequence 1 and everything else 0;
/// after the target is exhausted, `fallback` (if any) is scored highest.
class OracleStream : public LogitStream {
 public:
  explicit OracleStream(std::vector<TokenId> target, std::optional<TokenId> fallback = std::nullopt)
      : target_(std::move(target)), fallback_(fallback) {}
  void scores(std::span<const TokenId> history, std::span<double> out) override;

 private:
  std::vector<TokenId> target_;
  std::optional<TokenId> fallback_;
};

/// Pseudo-random scores: per-token uniform noise plus a per-family bias drawn
/// once per stream, so different seeds favour different token families.
class RandomStream : public LogitStream {
 public:
  RandomStream(std::uint64_t seed, const Vocabulary& vocab, double bias_scale = 4.0);
  void scores(std::span<const TokenId> history, std::span<double> out) override;

 private:
  Rng rng_;
  std::vector<double> bias_;
};

/// Always scores base tokens far above everything else.
class BaseBiasedStream : public LogitStream {
 public:
  explicit BaseBiasedStream(const Vocabulary& vocab) : base_size_(vocab.base_size()) {}
  void scores(std::span<const TokenId> history, std::span<double> out) override;

 private:
  std::size_t base_size_;
};

struct SampleOptions {
  double temperature = 0.0;
  std::size_t max_len = 1024;
  std::uint64_t seed = 0;
};

/// Masked argmax (temperature 0, ties to the lowest id) or masked softmax
/// sampling. Tokens whose successor cannot reach an accepting state within
/// the remaining budget are masked too, so the output is always accepted
/// and never longer than max_len. Throws MaxLengthExceeded when the start
/// state cannot reach acceptance within max_len.
std::vector<TokenId> constrained_sample(LogitStream& stream, const GrammarAutomaton& grammar,
                                        const SampleOptions& options = {});

/// Keeps the first `question_len` tokens and every auxiliary token after
/// them, in order. Throws NoAuxSpan when the transcript has no aux tokens.
std::vector<TokenId> bottleneck_context(std::span<const TokenId> transcript,
                                        std::size_t question_len, const Vocabulary& vocab);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

/// Line protocol for external decoders:
///   START                       -> OK <hash>
///   ADVANCE <hash> <token-id>   -> OK <hash>
///   MASK <hash>                 -> OK <base64 bitset>
///   STATE <hash>                -> OK <state> <depth_count> <pixel_phase> <accepting>
///   QUIT                        -> BYE
/// Failures reply "ERR <ErrorName> <message>". A hash identifies a token
/// history (FNV-1a chained over token ids) from START.
class MaskService {
 public:
  explicit MaskService(const GrammarAutomaton& grammar) : grammar_(grammar) {}
  /// Returns the reply line (without newline); sets `quit` on QUIT.
  std::string handle_line(std::string_view line, bool& quit);
  /// Reads requests until QUIT or EOF.
  void serve(std::istream& in, std::ostream& out);

  static std::uint64_t empty_hash();
  static std::uint64_t extend_hash(std::uint64_t h, TokenId t);
  static std::string format_hash(std::uint64_t h);

 private:
  const GrammarAutomaton& grammar_;
  std::unordered_map<std::uint64_t, DecodeState> states_;
};

}  // namespace percept
