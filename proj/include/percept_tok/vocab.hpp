// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace percept {

using TokenId = std::uint32_t;

inline constexpr int kDepthCodes = 128;
inline constexpr int kPixelPositions = 336;
inline constexpr std::string_view kDepthFamily = "DEPTH";
inline constexpr std::string_view kPixelFamily = "PIXEL";
inline constexpr std::string_view kDelimFamily = "DELIM";
inline constexpr std::string_view kDepthStart = "DEPTH_START";
inline constexpr std::string_view kDepthEnd = "DEPTH_END";

/// A contiguous block of auxiliary tokens sharing a role.
struct AuxFamily {
  std::string name;
  TokenId first = 0;
  std::vector<std::string> surface_forms;

  std::size_t size() const { return surface_forms.size(); }
  bool contains(TokenId id) const {
    return id >= first && id < first + surface_forms.size();
  }
};

/// Expanded vocabulary: `base_size` opaque base tokens followed by the
/// auxiliary families in registration order. Immutable after construction.
class Vocabulary {
 public:
  /// Base tokens, then DEPTH_0..127, DEPTH_START, DEPTH_END, PIXEL_0..335.
  static Vocabulary build(std::uint32_t base_size);

  /// Ids are assigned in document order. Validates the required families.
  static Vocabulary from_json(const nlohmann::json& doc);
  nlohmann::ordered_json to_json() const;

  static Vocabulary load(const std::string& path);
  void save(const std::string& path) const;

  std::uint32_t base_size() const { return base_size_; }
  std::size_t size() const { return size_; }
  const std::vector<AuxFamily>& families() const { return families_; }
  const AuxFamily& family(std::string_view name) const;

  bool is_base(TokenId id) const { return id < base_size_; }
  bool is_aux(TokenId id) const { return id >= base_size_ && id < size_; }
  /// Family holding `id`, or nullptr for base tokens.
  const AuxFamily* family_of(TokenId id) const;

  /// Base tokens render as "<base:N>".
  std::string id_to_surface(TokenId id) const;
  /// Throws UnknownToken for unregistered forms.
  TokenId surface_to_id(std::string_view form) const;
  std::optional<TokenId> find(std::string_view form) const;
  /// True when `form` names an auxiliary token.
  bool is_aux_surface(std::string_view form) const;

  TokenId depth_token(int code) const;
  TokenId pixel_token(int coordinate) const;
  TokenId depth_start() const { return depth_start_; }
  TokenId depth_end() const { return depth_end_; }

  bool is_depth(TokenId id) const { return families_[depth_].contains(id); }
  bool is_pixel(TokenId id) const { return families_[pixel_].contains(id); }
  int depth_code(TokenId id) const;
  int pixel_coordinate(TokenId id) const;

 private:
  Vocabulary() = default;
  void index();

  std::uint32_t base_size_ = 0;
  std::size_t size_ = 0;
  std::vector<AuxFamily> families_;
  std::unordered_map<std::string, TokenId> by_surface_;
  std::size_t depth_ = 0;
  std::size_t pixel_ = 0;
  TokenId depth_start_ = 0;
  TokenId depth_end_ = 0;
};

/// The bijection M from specialist code indices to DEPTH tokens. Fixed at
/// vocabulary build time as the identity on code indices.
class SpecialistMapping {
 public:
  static SpecialistMapping identity(const Vocabulary& vocab);
  /// Arbitrary bijection onto the DEPTH family; validated.
  static SpecialistMapping from_codes(const Vocabulary& vocab,
                                      std::vector<int> code_to_depth_index);

  std::size_t size() const { return to_token_.size(); }
  TokenId to_aux(int code) const;
  int to_code(TokenId token) const;

 private:
  std::vector<TokenId> to_token_;
  std::unordered_map<TokenId, int> to_code_;
};

}  // namespace percept
