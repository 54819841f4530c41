// Copyright 2026 the qadmm-sim authors. All Rights Reserved.
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
// =============================================================================
//
// Minimal end-to-end use of the library: generate a small sparse-regression
// instance, solve it centralized for F*, then run the compressed asynchronous
// protocol and its uncompressed baseline and compare bits spent to reach a
// target accuracy.

#include <cstdio>

#include "qadmm/bench.hpp"
#include "qadmm/config.hpp"

int main() {
  qadmm::ExperimentConfig cfg;
  cfg.problem = "lasso";
  cfg.dim = 60;
  cfg.nodes = 8;
  cfg.rows_per_node = 30;
  cfg.rho = 200.0;
  cfg.theta = 0.1;
  cfg.q = 3;
  cfg.tau = 3;
  cfg.iterations = 400;
  cfg.trials = 1;
  cfg.seed = 2026;
  cfg.bits_target = 1e-8;
  cfg.accuracy_target = 1e-10;
  cfg.validate();

  const qadmm::TrialResult trial = qadmm::run_trial(cfg, 0);
  std::printf("F* = %.12g (reference solver: %zu iterations)\n", trial.reference.objective,
              trial.reference.iterations);

  const auto report = [&](const char* name, const std::vector<qadmm::MetricsRow>& rows) {
    const qadmm::MetricsRow& last = rows.back();
    std::printf("%-9s %4zu rounds, final consensus gap %.3e, %.0f bits per dimension\n", name,
                rows.size(), last.z_accuracy, last.normalized_bits);
  };
  report("quantized", trial.qadmm_rows);
  report("baseline", trial.baseline_rows);

  const std::vector<qadmm::TrialResult> trials{trial};
  const qadmm::BitsSummary s = qadmm::summarize_bits(trials, cfg.bits_target);
  if (s.qadmm_reached == 1 && s.baseline_reached == 1) {
    std::printf("bits to reach %.1e: %.0f vs %.0f per dimension -> %.1f%% reduction\n",
                cfg.bits_target, s.qadmm_mean_bits, s.baseline_mean_bits, s.reduction_percent);
  }
  return 0;
}
