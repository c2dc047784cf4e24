// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <vector>

#include "percept_tok/depth_codec.hpp"
#include "percept_tok/vocab.hpp"

namespace percept {

/// Floor applied before taking log of a probability.
inline constexpr double kLogEpsilon = 1e-12;

/// Non-negative weights summing to 1 (within 1e-9) over a declared support.
struct Distribution {
  std::vector<double> probs;

  static Distribution one_hot(std::size_t size, std::size_t index);
  static Distribution uniform(std::size_t size);
  /// Throws InvalidArgument if negative, non-finite or not normalized.
  void validate() const;
  std::size_t size() const { return probs.size(); }
};

double entropy(const Distribution& q);

/// Cross-entropy of the specialist distribution `q` (over specialist codes)
/// against the model distribution `p` (over the expanded vocabulary),
/// pulled back through the fixed mapping:  -sum_i q_i log p_{M(i)}.
double distill_loss(const Distribution& q, const Distribution& p, const SpecialistMapping& mapping,
                    double epsilon = kLogEpsilon);

/// Probability-weighted average of centroid patches per grid slot; `steps`
/// holds 100 distributions over the codebook's codes.
DepthMap soft_decode(std::span<const Distribution> steps, const Codebook& cb);

/// Full-map mean squared error between the (soft) reconstruction and target.
double recon_loss(std::span<const Distribution> steps, const DepthMap& target, const Codebook& cb);
double recon_loss(const CodeGrid& grid, const DepthMap& target, const Codebook& cb);

/// Per-slot squared error ||g(t) - f||^2 summed over each 32x32 patch.
std::array<double, kGridCells> recon_loss_per_slot(std::span<const Distribution> steps,
                                                    const DepthMap& target, const Codebook& cb);

}  // namespace percept
