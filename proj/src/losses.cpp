// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "percept_tok/losses.hpp"

#include <cmath>

#include "percept_tok/error.hpp"

namespace percept {

Distribution Distribution::one_hot(std::size_t size, std::size_t index) {
  Distribution d;
  d.probs.assign(size, 0.0);
  d.probs.at(index) = 1.0;
  return d;
}

Distribution Distribution::uniform(std::size_t size) {
  Distribution d;
  d.probs.assign(size, 1.0 / static_cast<double>(size));
  return d;
}

void Distribution::validate() const {
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) fail(ErrorCode::kInvalidArgument, "probabilities must be finite and >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) fail(ErrorCode::kInvalidArgument, "probabilities must sum to 1");
}

double entropy(const Distribution& q) {
  double h = 0.0;
  for (double p : q.probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double distill_loss(const Distribution& q, const Distribution& p, const SpecialistMapping& mapping,
                    double epsilon) {
  if (q.size() != mapping.size()) {
    fail(ErrorCode::kSupportMismatch, "q must cover the mapping's specialist codes");
  }
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (mapping.to_aux(static_cast<int>(i)) >= p.size()) {
      fail(ErrorCode::kSupportMismatch, "p does not cover the mapped tokens");
    }
  }
  q.validate();
  p.validate();
  double loss = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q.probs[i] == 0.0) continue;
    const TokenId t = mapping.to_aux(static_cast<int>(i));
    loss -= q.probs[i] * std::log(std::max(p.probs[t], epsilon));
  }
  return loss;
}

DepthMap soft_decode(std::span<const Distribution> steps, const Codebook& cb) {
  if (steps.size() != kGridCells) {
    fail(ErrorCode::kBadArity, "soft decode needs 100 distributions, got " + std::to_string(steps.size()));
  }
  DepthMap out(kCanonicalSize, kCanonicalSize);
  for (int cell = 0; cell < kGridCells; ++cell) {
    const auto& dist = steps[static_cast<std::size_t>(cell)];
    if (dist.size() != static_cast<std::size_t>(cb.k)) {
      fail(ErrorCode::kBadArity, "distribution size must equal the codebook size");
    }
    std::array<double, kPatchValues> slot{};
    for (int c = 0; c < cb.k; ++c) {
      const double w = dist.probs[static_cast<std::size_t>(c)];
      if (w == 0.0) continue;
      const auto code = cb.centroid(c);
      for (int j = 0; j < kPatchValues; ++j) {
        slot[static_cast<std::size_t>(j)] += w * static_cast<double>(code[static_cast<std::size_t>(j)]);
      }
    }
    const int row = cell / kGridSize;
    const int col = cell % kGridSize;
    for (int y = 0; y < kPatchSize; ++y) {
      for (int x = 0; x < kPatchSize; ++x) {
        out.at(col * kPatchSize + x, row * kPatchSize + y) = slot[static_cast<std::size_t>(y * kPatchSize + x)];
      }
    }
  }
  return out;
}

double recon_loss(std::span<const Distribution> steps, const DepthMap& target, const Codebook& cb) {
  if (!target.is_canonical()) fail(ErrorCode::kShapeMismatch, "target must be 320x320");
  return mean_squared_error(soft_decode(steps, cb), target);
}

double recon_loss(const CodeGrid& grid, const DepthMap& target, const Codebook& cb) {
  if (!target.is_canonical()) fail(ErrorCode::kShapeMismatch, "target must be 320x320");
  return mean_squared_error(decode(grid, cb), target);
}

std::array<double, kGridCells> recon_loss_per_slot(std::span<const Distribution> steps,
                                                    const DepthMap& target, const Codebook& cb) {
  if (!target.is_canonical()) fail(ErrorCode::kShapeMismatch, "target must be 320x320");
  const DepthMap pred = soft_decode(steps, cb);
  std::array<double, kGridCells> out{};
  for (int cell = 0; cell < kGridCells; ++cell) {
    const int row = cell / kGridSize;
    const int col = cell % kGridSize;
    double acc = 0.0;
    for (int y = 0; y < kPatchSize; ++y) {
      for (int x = 0; x < kPatchSize; ++x) {
        const double d = pred.at(col * kPatchSize + x, row * kPatchSize + y) -
                         target.at(col * kPatchSize + x, row * kPatchSize + y);
        acc += d * d;
      }
    }
    out[static_cast<std::size_t>(cell)] = acc;
  }
  return out;
}

}  // namespace percept
