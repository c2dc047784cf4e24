// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include "percept_tok/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "percept_tok/error.hpp"

namespace percept {

double temperature(const Schedule& sched, double step) {
  if (!(sched.tau0 > 0.0)) fail(ErrorCode::kInvalidArgument, "tau0 must be positive");
  if (sched.lambda < 0.0) fail(ErrorCode::kInvalidArgument, "lambda must be non-negative");
  if (sched.steps == 0) fail(ErrorCode::kInvalidArgument, "total steps must be >= 1");
  return sched.tau0 / (1.0 + sched.lambda * step / static_cast<double>(sched.steps));
}

std::vector<double> task_probs(std::span<const TaskSpec> tasks, const Schedule& sched, double step,
                               bool invert_difficulty) {
  if (tasks.empty()) fail(ErrorCode::kInvalidArgument, "at least one task is required");
  const double tau = temperature(sched, step);
  if (!(tau > 0.0)) fail(ErrorCode::kInvalidArgument, "temperature must stay positive");
  std::vector<double> logits(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const double d = invert_difficulty ? -tasks[i].difficulty : tasks[i].difficulty;
    logits[i] = -d / tau;
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& l : logits) {
    l = std::exp(l - peak);
    total += l;
  }
  for (double& l : logits) l /= total;
  return logits;
}

std::size_t sample_task(std::span<const TaskSpec> tasks, const Schedule& sched, double step,
                        Rng& rng, bool invert_difficulty) {
  const auto probs = task_probs(tasks, sched, step, invert_difficulty);
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = i;
    acc += probs[i];
    if (u < acc) return i;
  }
  return last_positive;
}

void validate_curriculum(std::span<const TaskSpec> tasks) {
  for (std::size_t i = 1; i < tasks.size(); ++i) {
    if (!(tasks[i - 1].difficulty < tasks[i].difficulty)) {
      fail(ErrorCode::kInvalidArgument, "task difficulties must be strictly increasing");
    }
  }
  for (const auto& t : tasks) {
    if (!(t.difficulty > 0.0)) fail(ErrorCode::kInvalidArgument, "difficulty must be positive");
  }
}

std::vector<EpochMix> epoch_mix_plan(std::uint64_t total_per_epoch, int epochs,
                                     std::uint64_t atomic_start, std::uint64_t atomic_end) {
  if (epochs < 2) fail(ErrorCode::kInvalidPlan, "an epoch plan needs at least two epochs");
  if (atomic_end > total_per_epoch || atomic_start > total_per_epoch) {
    fail(ErrorCode::kInvalidPlan, "atomic counts cannot exceed the per-epoch total");
  }
  if (atomic_end > atomic_start) {
    fail(ErrorCode::kInvalidPlan, "atomic count must not increase across epochs");
  }
  const std::uint64_t drop = atomic_start - atomic_end;
  const auto span = static_cast<std::uint64_t>(epochs - 1);
  std::vector<EpochMix> plan;
  plan.reserve(static_cast<std::size_t>(epochs));
  for (std::uint64_t e = 0; e < static_cast<std::uint64_t>(epochs); ++e) {
    const std::uint64_t removed = (2 * drop * e + span) / (2 * span);
    const std::uint64_t atomic = atomic_start - removed;
    plan.push_back({atomic, total_per_epoch - atomic});
  }
  return plan;
}

std::vector<QASample> multitask_interleave(std::span<const QASample> samples, Rng& rng) {
  struct Pair {
    std::optional<std::size_t> cot;
    std::optional<std::size_t> direct;
  };
  std::vector<std::string> order;
  std::map<std::string, Pair> pairs;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    auto [it, inserted] = pairs.try_emplace(s.image_id);
    if (inserted) order.push_back(s.image_id);
    auto& slot = is_cot(s.task) ? it->second.cot : it->second.direct;
    if (!is_cot(s.task) && !is_direct(s.task)) {
      fail(ErrorCode::kInvalidArgument, "multitask stream accepts only CoT and direct samples");
    }
    if (slot) fail(ErrorCode::kMissingPair, "image " + s.image_id + " has duplicate samples");
    slot = i;
  }
  for (const auto& id : order) {
    const auto& p = pairs.at(id);
    if (!p.cot || !p.direct) fail(ErrorCode::kMissingPair, "image " + id + " lacks a CoT/direct pair");
  }
  rng.shuffle(order);
  std::vector<QASample> stream;
  stream.reserve(order.size() * 2);
  for (const auto& id : order) {
    const auto& p = pairs.at(id);
    stream.push_back(samples[*p.cot]);
    stream.push_back(samples[*p.direct]);
  }
  return stream;
}

std::vector<EpochItem> assemble_epoch(const EpochMix& mix, std::size_t atomic_pool,
                                      std::size_t multitask_stream, Rng& rng) {
  if (mix.atomic > 0 && atomic_pool == 0) fail(ErrorCode::kInvalidPlan, "empty atomic pool");
  if (mix.multitask > 0 && multitask_stream == 0) {
    fail(ErrorCode::kInvalidPlan, "empty multitask stream");
  }
  if (mix.multitask % 2 != 0 || multitask_stream % 2 != 0) {
    fail(ErrorCode::kInvalidPlan, "multitask counts must cover whole CoT/direct pairs");
  }
  std::vector<std::size_t> atomic;
  std::vector<std::size_t> pool(atomic_pool);
  while (atomic.size() < mix.atomic) {
    for (std::size_t i = 0; i < atomic_pool; ++i) pool[i] = i;
    rng.shuffle(pool);
    for (std::size_t i = 0; i < atomic_pool && atomic.size() < mix.atomic; ++i) atomic.push_back(pool[i]);
  }
  // Units: atomic singletons (tag 0) and multitask pairs (tag 1).
  std::vector<char> units(atomic.size(), 0);
  units.insert(units.end(), mix.multitask / 2, 1);
  rng.shuffle(units);
  std::vector<EpochItem> out;
  out.reserve(mix.atomic + mix.multitask);
  std::size_t next_atomic = 0;
  std::size_t next_multi = 0;
  for (char u : units) {
    if (u == 0) {
      out.push_back({true, atomic[next_atomic++]});
    } else {
      for (int k = 0; k < 2; ++k) out.push_back({false, (next_multi++) % multitask_stream});
    }
  }
  return out;
}

CurriculumConfig CurriculumConfig::from_json(const nlohmann::json& j) {
  CurriculumConfig c;
  try {
    c.schedule.tau0 = j.value("tau0", 1.0);
    c.schedule.lambda = j.value("lambda", 0.0);
    c.schedule.steps = j.value("steps", std::uint64_t{1});
    c.mode = j.value("mode", std::string("softmax"));
    c.seed = j.value("seed", std::uint64_t{0});
    c.invert_difficulty = j.value("invert_difficulty", false);
    if (j.contains("tasks")) {
      std::size_t rank = 1;
      for (const auto& t : j.at("tasks")) {
        TaskSpec spec;
        spec.name = t.at("name").get<std::string>();
        spec.difficulty = t.contains("difficulty") ? t.at("difficulty").get<double>()
                                                   : static_cast<double>(rank);
        c.tasks.push_back(std::move(spec));
        ++rank;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("malformed curriculum config: ") + e.what());
  }
  if (c.mode != "softmax" && c.mode != "epoch_mix") {
    fail(ErrorCode::kInvalidArgument, "mode must be softmax or epoch_mix");
  }
  validate_curriculum(c.tasks);
  temperature(c.schedule, 0.0);
  return c;
}

nlohmann::ordered_json CurriculumConfig::to_json() const {
  nlohmann::ordered_json j;
  j["tau0"] = schedule.tau0;
  j["lambda"] = schedule.lambda;
  j["steps"] = schedule.steps;
  auto ts = nlohmann::ordered_json::array();
  for (const auto& t : tasks) ts.push_back({{"name", t.name}, {"difficulty", t.difficulty}});
  j["tasks"] = std::move(ts);
  j["mode"] = mode;
  j["seed"] = seed;
  j["invert_difficulty"] = invert_difficulty;
  return j;
}

CurriculumSampler::CurriculumSampler(CurriculumConfig config)
    : config_(std::move(config)), rng_(config_.seed) {
  if (config_.tasks.empty()) fail(ErrorCode::kInvalidArgument, "sampler needs at least one task");
}

std::size_t CurriculumSampler::next(std::uint64_t step) {
  const auto s = std::min(step, config_.schedule.steps);
  return sample_task(config_.tasks, config_.schedule, static_cast<double>(s), rng_,
                     config_.invert_difficulty);
}

}  // namespace percept
