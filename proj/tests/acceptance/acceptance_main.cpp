// Copyright 2026 The csskit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite: one criterion per entry, one pass/fail line each.
// Every tolerance is pinned in code next to the check it gates.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "acceptance_criteria.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Entry {
  const char* id;
  const char* name;
  double time_budget_sec;  // 0 = no budget
  std::function<acceptance::Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  for (int i = 1; i < argc; ++i) {
    if (std::strncmp(argv[i], "--only=", 7) == 0) only = argv[i] + 7;
  }

  acceptance::Context ctx;
  const std::vector<Entry> entries = {
      {"A1", "stft-round-trip", 1.0, [&] { return acceptance::stft_round_trip(ctx); }},
      {"A2", "gradient-suite", 60.0, [&] { return acceptance::gradient_suite(ctx); }},
      {"A3", "channel-permutation-invariance", 30.0,
       [&] { return acceptance::channel_permutation_invariance(ctx); }},
      {"A4", "loss-oracle-equivalence", 10.0,
       [&] { return acceptance::loss_oracle_equivalence(ctx); }},
      {"A5", "mvdr", 30.0, [&] { return acceptance::mvdr_criteria(ctx); }},
      {"A6", "segmentation-rules", 5.0, [&] { return acceptance::segmentation_rules(ctx); }},
      {"A7", "stage1-training-effect", 900.0,
       [&] { return acceptance::stage1_training_effect(ctx); }},
      {"A8", "stage2-direction-of-effect", 900.0,
       [&] { return acceptance::stage2_direction_of_effect(ctx); }},
      {"A9", "css-end-to-end", 120.0, [&] { return acceptance::css_end_to_end(ctx); }},
      {"A10", "determinism-rerun", 0.0, [&] { return acceptance::determinism_rerun(ctx); }},
  };

  int failures = 0;
  for (const auto& entry : entries) {
    if (!only.empty() && only != entry.id) continue;
    const auto t0 = Clock::now();
    acceptance::Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    bool pass = outcome.pass;
    std::string detail = outcome.detail;
    if (pass && entry.time_budget_sec > 0.0 && elapsed > entry.time_budget_sec) {
      pass = false;
      detail += " [over time budget]";
    }
    std::printf("[%s] %-4s %-34s %6.1fs  %s\n", pass ? "PASS" : "FAIL", entry.id,
                entry.name, elapsed, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
