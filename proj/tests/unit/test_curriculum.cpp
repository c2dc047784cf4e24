// Copyright 2026 The percept-tok Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <set>
#include <numeric>

#include "helpers.hpp"
#include "percept_tok/curriculum.hpp"

using namespace percept;

namespace {

std::vector<TaskSpec> tasks_of(std::initializer_list<double> ds) {
  std::vector<TaskSpec> out;
  for (double d : ds) out.push_back({"t" + std::to_string(out.size()), d});
  return out;
}

// Direct softmax of -d/tau, without any stabilization.
std::vector<double> softmax_oracle(const std::vector<double>& d, double tau) {
  std::vector<double> e;
  double z = 0.0;
  for (double x : d) {
    e.push_back(std::exp(-x / tau));
    z += e.back();
  }
  for (double& x : e) x /= z;
  return e;
}

QASample sample(const std::string& id, TaskKind k) {
  QASample s;
  s.image_id = id;
  s.task = k;
  return s;
}

}  // namespace

TEST_CASE("temperature") {
  CHECK(temperature({1.0, 0.0, 100}, 37) == 1.0);
  CHECK(temperature({1.0, 1.0, 100}, 100) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(temperature({2.0, 3.0, 100}, 50) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK_ERROR(temperature({0.0, 1.0, 10}, 0), ErrorCode::kInvalidArgument);
  double prev = temperature({1.0, 2.0, 1000}, 0);
  for (int s = 1; s <= 1000; ++s) {
    const double t = temperature({1.0, 2.0, 1000}, s);
    CHECK(t < prev);
    prev = t;
  }
}

TEST_CASE("task probabilities") {
  const auto eq = task_probs(tasks_of({2.0, 2.0, 2.0}), {1.0, 0.0, 1}, 0);
  for (double p : eq) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-15));

  const auto p = task_probs(tasks_of({1.0, 2.0}), {1.0, 0.0, 1}, 0);
  CHECK(std::abs(p[0] - 0.731059) < 1e-6);
  CHECK(std::abs(p[1] - 0.268941) < 1e-6);

  // tau -> 1e-6 at s = S with a huge lambda.
  const auto cold = task_probs(tasks_of({1.0, 2.0, 3.0}), {1.0, 1e6 - 1, 100}, 100);
  CHECK(cold[0] == doctest::Approx(1.0));
  CHECK(cold[1] == 0.0);
  CHECK(cold[2] == 0.0);

  const std::vector<double> ds{0.5, 1.0, 2.5, 4.0};
  const Schedule sched{1.5, 2.0, 1000};
  for (int s = 0; s <= 1000; s += 10) {
    const auto got = task_probs(tasks_of({0.5, 1.0, 2.5, 4.0}), sched, s);
    const auto want = softmax_oracle(ds, temperature(sched, s));
    CHECK(std::abs(std::accumulate(got.begin(), got.end(), 0.0) - 1.0) <= 1e-12);
    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-12);
    // Literal formula: easier tasks are never less likely.
    for (std::size_t i = 1; i < ds.size(); ++i) CHECK(got[i] <= got[i - 1]);
    const auto inv = task_probs(tasks_of({0.5, 1.0, 2.5, 4.0}), sched, s, true);
    for (std::size_t i = 1; i < ds.size(); ++i) CHECK(inv[i] >= inv[i - 1]);
  }
}

TEST_CASE("sampling") {
  const auto single = tasks_of({3.0});
  Rng rng(0);
  for (int i = 0; i < 100; ++i) CHECK(sample_task(single, {1.0, 0.0, 1}, 0, rng) == 0);

  const auto two = tasks_of({1.0, 2.0});
  Rng r2(0);
  int first = 0;
  for (int i = 0; i < 100000; ++i) first += sample_task(two, {1.0, 0.0, 1}, 0, r2) == 0 ? 1 : 0;
  CHECK(std::abs(first / 100000.0 - 0.731059) <= 0.01);

  const auto three = tasks_of({1.0, 2.0, 3.0});
  Rng r3(1);
  const Schedule frozen{1e-3, 0.0, 1};
  for (int i = 0; i < 10000; ++i) CHECK(sample_task(three, frozen, 0, r3) == 0);
}

TEST_CASE("curriculum validation and config") {
  CHECK_ERROR(validate_curriculum(tasks_of({1.0, 1.0})), ErrorCode::kInvalidArgument);
  CHECK_ERROR(validate_curriculum(tasks_of({2.0, 1.0})), ErrorCode::kInvalidArgument);
  const auto c = CurriculumConfig::from_json(nlohmann::json::parse(
      R"({"tau0":2,"lambda":1,"steps":10,"tasks":[{"name":"depth_gen"},{"name":"depth_cot"}],"mode":"softmax","seed":5})"));
  CHECK(c.tasks[0].difficulty == 1.0);
  CHECK(c.tasks[1].difficulty == 2.0);
  CHECK(CurriculumConfig::from_json(c.to_json()).to_json() == c.to_json());
  CHECK_ERROR(CurriculumConfig::from_json(nlohmann::json::parse(R"({"mode":"random"})")),
              ErrorCode::kInvalidArgument);
  CurriculumSampler a(c), b(c);
  for (std::uint64_t s = 0; s < 200; ++s) CHECK(a.next(s) == b.next(s));
}

TEST_CASE("epoch mix plan") {
  const auto plan = epoch_mix_plan(20000, 10, 20000, 2000);
  REQUIRE(plan.size() == 10);
  CHECK(plan[0] == EpochMix{20000, 0});
  CHECK(plan[1] == EpochMix{18000, 2000});
  CHECK(plan[9] == EpochMix{2000, 18000});
  for (std::size_t e = 0; e < plan.size(); ++e) {
    CHECK(plan[e].atomic + plan[e].multitask == 20000);
    CHECK(plan[e].atomic == 20000 - 2000 * e);
  }
  const auto two = epoch_mix_plan(20000, 2, 20000, 2000);
  CHECK(two == std::vector<EpochMix>{{20000, 0}, {2000, 18000}});
  // Every plan keeps totals and is monotone, including uneven ramps.
  for (int epochs = 2; epochs <= 13; ++epochs) {
    for (std::uint64_t end : {0ULL, 1ULL, 7ULL, 333ULL, 999ULL}) {
      const auto p = epoch_mix_plan(1000, epochs, 1000, end);
      CHECK(p.front().atomic == 1000);
      CHECK(p.back().atomic == end);
      for (std::size_t e = 0; e < p.size(); ++e) {
        CHECK(p[e].atomic + p[e].multitask == 1000);
        if (e > 0) CHECK(p[e].multitask >= p[e - 1].multitask);
      }
    }
  }
  CHECK_ERROR(epoch_mix_plan(100, 1, 100, 10), ErrorCode::kInvalidPlan);
  CHECK_ERROR(epoch_mix_plan(100, 5, 100, 200), ErrorCode::kInvalidPlan);
}

TEST_CASE("multitask interleave") {
  std::vector<QASample> in;
  for (const char* id : {"a", "b", "c"}) {
    in.push_back(sample(id, TaskKind::kDepthDirect));
    in.push_back(sample(id, TaskKind::kDepthCot));
  }
  Rng r1(9), r2(9);
  const auto out = multitask_interleave(in, r1);
  REQUIRE(out.size() == 6);
  std::multiset<std::pair<std::string, int>> a, b;
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(out[2 * k].image_id == out[2 * k + 1].image_id);
    CHECK(out[2 * k].task == TaskKind::kDepthCot);
    CHECK(out[2 * k + 1].task == TaskKind::kDepthDirect);
  }
  for (const auto& s : in) a.insert({s.image_id, static_cast<int>(s.task)});
  for (const auto& s : out) b.insert({s.image_id, static_cast<int>(s.task)});
  CHECK(a == b);
  const auto again = multitask_interleave(in, r2);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(again[i].image_id == out[i].image_id);

  in.pop_back();
  Rng r3(9);
  CHECK_ERROR(multitask_interleave(in, r3), ErrorCode::kMissingPair);
}

TEST_CASE("epoch assembly keeps pairs adjacent") {
  Rng rng(4);
  const auto items = assemble_epoch({10, 6}, 7, 4, rng);
  REQUIRE(items.size() == 16);
  std::size_t atomic = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].atomic) {
      ++atomic;
      CHECK(items[i].index < 7);
      continue;
    }
    // A multitask unit starts at an even stream index and is followed by its partner.
    REQUIRE(i + 1 < items.size());
    CHECK(items[i].index % 2 == 0);
    CHECK_FALSE(items[i + 1].atomic);
    CHECK(items[i + 1].index == items[i].index + 1);
    ++i;
  }
  CHECK(atomic == 10);
}
