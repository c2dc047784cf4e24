// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "percept_tok/vocab.hpp"

#include <algorithm>
#include <charconv>

#include "percept_tok/error.hpp"
#include "percept_tok/io.hpp"

namespace percept {

namespace {

constexpr std::string_view kBasePrefix = "<base:";

std::vector<std::string> numbered(std::string_view prefix, int count) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(std::string(prefix) + std::to_string(i));
  return out;
}

}  // namespace

Vocabulary Vocabulary::build(std::uint32_t base_size) {
  if (base_size == 0) fail(ErrorCode::kInvalidArgument, "base_size must be >= 1");
  Vocabulary v;
  v.base_size_ = base_size;
  v.families_.push_back({std::string(kDepthFamily), 0, numbered("DEPTH_", kDepthCodes)});
  v.families_.push_back(
      {std::string(kDelimFamily), 0, {std::string(kDepthStart), std::string(kDepthEnd)}});
  v.families_.push_back({std::string(kPixelFamily), 0, numbered("PIXEL_", kPixelPositions)});
  v.index();
  return v;
}

Vocabulary Vocabulary::from_json(const nlohmann::json& doc) {
  Vocabulary v;
  try {
    v.base_size_ = doc.at("base_size").get<std::uint32_t>();
    for (const auto& fam : doc.at("families")) {
      v.families_.push_back({fam.at("name").get<std::string>(), 0,
                             fam.at("surface_forms").get<std::vector<std::string>>()});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("malformed vocabulary: ") + e.what());
  }
  if (v.base_size_ == 0) fail(ErrorCode::kInvalidArgument, "base_size must be >= 1");
  v.index();
  return v;
}

void Vocabulary::index() {
  by_surface_.clear();
  TokenId next = base_size_;
  for (auto& fam : families_) {
    fam.first = next;
    for (const auto& form : fam.surface_forms) {
      if (form.starts_with(kBasePrefix)) {
        fail(ErrorCode::kInvalidArgument, "reserved surface form: " + form);
      }
      if (!by_surface_.emplace(form, next).second) {
        fail(ErrorCode::kInvalidArgument, "duplicate surface form: " + form);
      }
      ++next;
    }
  }
  size_ = next;

  auto find_family = [&](std::string_view name) {
    auto it = std::find_if(families_.begin(), families_.end(),
                           [&](const AuxFamily& f) { return f.name == name; });
    if (it == families_.end()) {
      fail(ErrorCode::kInvalidArgument, "missing family " + std::string(name));
    }
    return static_cast<std::size_t>(it - families_.begin());
  };
  depth_ = find_family(kDepthFamily);
  pixel_ = find_family(kPixelFamily);
  find_family(kDelimFamily);
  if (families_[depth_].size() != kDepthCodes) {
    fail(ErrorCode::kInvalidArgument, "DEPTH family must have 128 members");
  }
  if (families_[pixel_].size() != kPixelPositions) {
    fail(ErrorCode::kInvalidArgument, "PIXEL family must have 336 members");
  }
  for (int i = 0; i < kDepthCodes; ++i) {
    if (families_[depth_].surface_forms[i] != "DEPTH_" + std::to_string(i)) {
      fail(ErrorCode::kInvalidArgument, "DEPTH family out of order at " + std::to_string(i));
    }
  }
  for (int i = 0; i < kPixelPositions; ++i) {
    if (families_[pixel_].surface_forms[i] != "PIXEL_" + std::to_string(i)) {
      fail(ErrorCode::kInvalidArgument, "PIXEL family out of order at " + std::to_string(i));
    }
  }
  auto start = find(kDepthStart);
  auto end = find(kDepthEnd);
  const auto& delim = family(kDelimFamily);
  if (!start || !end || !delim.contains(*start) || !delim.contains(*end)) {
    fail(ErrorCode::kInvalidArgument, "DELIM family must hold DEPTH_START and DEPTH_END");
  }
  depth_start_ = *start;
  depth_end_ = *end;
}

nlohmann::ordered_json Vocabulary::to_json() const {
  nlohmann::ordered_json doc;
  doc["base_size"] = base_size_;
  auto fams = nlohmann::ordered_json::array();
  for (const auto& fam : families_) {
    nlohmann::ordered_json f;
    f["name"] = fam.name;
    f["surface_forms"] = fam.surface_forms;
    fams.push_back(std::move(f));
  }
  doc["families"] = std::move(fams);
  return doc;
}

Vocabulary Vocabulary::load(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
  return from_json(doc);
}

void Vocabulary::save(const std::string& path) const {
  io::write_file_atomic(path, to_json().dump(1) + "\n");
}

const AuxFamily& Vocabulary::family(std::string_view name) const {
  for (const auto& f : families_) {
    if (f.name == name) return f;
  }
  fail(ErrorCode::kInvalidArgument, "no family " + std::string(name));
}

const AuxFamily* Vocabulary::family_of(TokenId id) const {
  if (id < base_size_) return nullptr;
  for (const auto& f : families_) {
    if (f.contains(id)) return &f;
  }
  return nullptr;
}

std::string Vocabulary::id_to_surface(TokenId id) const {
  if (id < base_size_) return std::string(kBasePrefix) + std::to_string(id) + ">";
  if (const AuxFamily* f = family_of(id)) return f->surface_forms[id - f->first];
  fail(ErrorCode::kUnknownToken, "token id out of range: " + std::to_string(id));
}

std::optional<TokenId> Vocabulary::find(std::string_view form) const {
  if (form.starts_with(kBasePrefix) && form.ends_with(">")) {
    const auto digits = form.substr(kBasePrefix.size(), form.size() - kBasePrefix.size() - 1);
    TokenId id = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty() &&
        id < base_size_) {
      return id;
    }
    return std::nullopt;
  }
  auto it = by_surface_.find(std::string(form));
  if (it == by_surface_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::surface_to_id(std::string_view form) const {
  if (auto id = find(form)) return *id;
  fail(ErrorCode::kUnknownToken, "unregistered surface form: " + std::string(form));
}

bool Vocabulary::is_aux_surface(std::string_view form) const {
  return by_surface_.contains(std::string(form));
}

TokenId Vocabulary::depth_token(int code) const {
  if (code < 0 || code >= kDepthCodes) {
    fail(ErrorCode::kIndexOutOfRange, "depth code out of range: " + std::to_string(code));
  }
  return families_[depth_].first + static_cast<TokenId>(code);
}

TokenId Vocabulary::pixel_token(int coordinate) const {
  if (coordinate < 0 || coordinate >= kPixelPositions) {
    fail(ErrorCode::kIndexOutOfRange, "pixel coordinate out of range: " + std::to_string(coordinate));
  }
  return families_[pixel_].first + static_cast<TokenId>(coordinate);
}

int Vocabulary::depth_code(TokenId id) const {
  if (!is_depth(id)) fail(ErrorCode::kMalformedSequence, "not a DEPTH token");
  return static_cast<int>(id - families_[depth_].first);
}

int Vocabulary::pixel_coordinate(TokenId id) const {
  if (!is_pixel(id)) fail(ErrorCode::kMalformedBox, "not a PIXEL token");
  return static_cast<int>(id - families_[pixel_].first);
}

SpecialistMapping SpecialistMapping::identity(const Vocabulary& vocab) {
  std::vector<int> codes(kDepthCodes);
  for (int i = 0; i < kDepthCodes; ++i) codes[i] = i;
  return from_codes(vocab, std::move(codes));
}

SpecialistMapping SpecialistMapping::from_codes(const Vocabulary& vocab,
                                                std::vector<int> code_to_depth_index) {
  if (code_to_depth_index.size() != kDepthCodes) {
    fail(ErrorCode::kSupportMismatch, "mapping must cover all 128 specialist codes");
  }
  SpecialistMapping m;
  for (std::size_t code = 0; code < code_to_depth_index.size(); ++code) {
    const TokenId tok = vocab.depth_token(code_to_depth_index[code]);
    if (!m.to_code_.emplace(tok, static_cast<int>(code)).second) {
      fail(ErrorCode::kSupportMismatch, "mapping is not injective");
    }
    m.to_token_.push_back(tok);
  }
  return m;
}

TokenId SpecialistMapping::to_aux(int code) const {
  if (code < 0 || static_cast<std::size_t>(code) >= to_token_.size()) {
    fail(ErrorCode::kIndexOutOfRange, "specialist code out of range");
  }
  return to_token_[static_cast<std::size_t>(code)];
}

int SpecialistMapping::to_code(TokenId token) const {
  auto it = to_code_.find(token);
  if (it == to_code_.end()) fail(ErrorCode::kSupportMismatch, "token outside mapping range");
  return it->second;
}

}  // namespace percept
