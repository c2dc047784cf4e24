// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Task-difficulty scheduling. Two schedulers are offered:
//  * softmax: p(d_t, s) = exp(-d_t / tau(s)) / sum_i exp(-d_i / tau(s)),
//    tau(s) = tau0 / (1 + lambda * s / S);
//  * epoch_mix: a linear per-epoch ramp from atomic-only data to mostly
//    multitask data.
// Note that with a decreasing tau the literal softmax concentrates on the
// smallest difficulty; `invert_difficulty` flips the sign of d_t.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "percept_tok/rng.hpp"
#include "percept_tok/sample.hpp"

namespace percept {

struct TaskSpec {
  std::string name;
  double difficulty = 1.0;
};

struct Schedule {
  double tau0 = 1.0;
  double lambda = 0.0;
  std::uint64_t steps = 1;  // S
};

double temperature(const Schedule& sched, double step);

std::vector<double> task_probs(std::span<const TaskSpec> tasks, const Schedule& sched, double step,
                               bool invert_difficulty = false);

/// Categorical draw from task_probs; returns the task index.
std::size_t sample_task(std::span<const TaskSpec> tasks, const Schedule& sched, double step,
                        Rng& rng, bool invert_difficulty = false);

/// Throws InvalidArgument unless difficulties are strictly increasing.
void validate_curriculum(std::span<const TaskSpec> tasks);

struct EpochMix {
  std::uint64_t atomic = 0;
  std::uint64_t multitask = 0;
  bool operator==(const EpochMix&) const = default;
};

/// Epoch 1 carries `atomic_start` atomic samples; the atomic count falls
/// linearly (rounded half-up) to `atomic_end` at the last epoch. Every epoch
/// totals `total_per_epoch`.
std::vector<EpochMix> epoch_mix_plan(std::uint64_t total_per_epoch, int epochs,
                                     std::uint64_t atomic_start, std::uint64_t atomic_end);

/// Shuffles image ids once, then emits each image's CoT sample immediately
/// followed by its direct-labeling sample. Throws MissingPair if an image
/// lacks either one.
std::vector<QASample> multitask_interleave(std::span<const QASample> samples, Rng& rng);

/// Sample order for one epoch: `mix.atomic` draws from the atomic pool
/// (without replacement, cycling a fresh shuffle when exhausted) and
/// `mix.multitask` consecutive items of the interleaved stream (repeated as
/// needed). Multitask pairs stay adjacent; units are randomly interleaved.
struct EpochItem {
  bool atomic = true;
  std::size_t index = 0;
  bool operator==(const EpochItem&) const = default;
};
std::vector<EpochItem> assemble_epoch(const EpochMix& mix, std::size_t atomic_pool,
                                      std::size_t multitask_stream, Rng& rng);

struct CurriculumConfig {
  Schedule schedule;
  std::vector<TaskSpec> tasks;
  std::string mode = "softmax";  // or "epoch_mix"
  std::uint64_t seed = 0;
  bool invert_difficulty = false;

  static CurriculumConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

/// Stateful softmax sampler over one training stream.
class CurriculumSampler {
 public:
  explicit CurriculumSampler(CurriculumConfig config);
  /// Task index for training step `step`.
  std::size_t next(std::uint64_t step);
  const CurriculumConfig& config() const { return config_; }

 private:
  CurriculumConfig config_;
  Rng rng_;
};

}  // namespace percept
