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

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qadmm/bench.hpp"
#include "qadmm/config.hpp"
#include "qadmm/problems.hpp"
#include "qadmm/selftest.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Overrides {
  std::string output_dir;
  std::string compressor;
  int q = -1;
  int tau = -1;
  long long trials = -1;
  long long iterations = -1;
  long long seed = -1;
  bool has_seed = false;
};

qadmm::ExperimentConfig load_config(const std::string& path, const Overrides& ov) {
  qadmm::ExperimentConfig cfg = qadmm::parse_config(read_file(path));
  if (!ov.output_dir.empty()) cfg.output_dir = ov.output_dir;
  if (!ov.compressor.empty()) cfg.compressor = ov.compressor;
  if (ov.q >= 0) cfg.q = ov.q;
  if (ov.tau >= 0) cfg.tau = ov.tau;
  if (ov.trials >= 0) cfg.trials = static_cast<std::size_t>(ov.trials);
  if (ov.iterations >= 0) cfg.iterations = static_cast<std::size_t>(ov.iterations);
  if (ov.has_seed) cfg.seed = static_cast<std::uint64_t>(ov.seed);
  cfg.validate();
  return cfg;
}

int cmd_run(const std::string& config_path, const Overrides& ov) {
  const qadmm::ExperimentConfig cfg = load_config(config_path, ov);
  const qadmm::BitsSummary summary = qadmm::run_experiment(cfg);
  std::cout << "wrote " << cfg.trials << " trial file(s) and aggregate.csv to " << cfg.output_dir
            << "\n";
  std::cout << "bits-to-target threshold " << cfg.bits_target << ": qadmm reached "
            << summary.qadmm_reached << "/" << (summary.trials - summary.trials_aborted)
            << ", baseline reached " << summary.baseline_reached << "/"
            << (summary.trials - summary.trials_aborted) << "\n";
  if (summary.qadmm_reached > 0 && summary.baseline_reached > 0) {
    std::cout << "mean normalized bits to target: qadmm " << summary.qadmm_mean_bits
              << ", baseline " << summary.baseline_mean_bits << " (reduction "
              << summary.reduction_percent << "%)\n";
  }
  if (summary.trials_aborted > 0) {
    std::cerr << summary.trials_aborted << " trial(s) aborted: reference solver did not converge\n";
    return 1;
  }
  return 0;
}

int cmd_fstar(const std::string& config_path, const Overrides& ov, long long trial_index) {
  const qadmm::ExperimentConfig cfg = load_config(config_path, ov);
  const std::uint64_t trial_seed =
      qadmm::derive_seed(cfg.seed, static_cast<std::uint64_t>(trial_index));
  const qadmm::TrialProblem prob = qadmm::build_trial_problem(cfg, trial_seed);
  const qadmm::ReferenceSolution& ref = prob.reference;

  std::size_t nnz = 0;
  for (double v : ref.minimizer.data) {
    if (v != 0.0) ++nnz;
  }
  std::cout.precision(17);
  std::cout << "problem:        " << cfg.problem << " (dim " << cfg.dim << ", " << cfg.nodes
            << " nodes x " << cfg.rows_per_node << " rows)\n";
  std::cout << "trial:          " << trial_index << " (seed " << trial_seed << ")\n";
  std::cout << "F*:             " << ref.objective << "\n";
  std::cout << "iterations:     " << ref.iterations << "\n";
  std::cout << "converged:      " << (ref.converged ? "yes" : "no") << "\n";
  std::cout << "nonzeros in x*: " << nnz << " of " << ref.minimizer.size() << "\n";
  if (cfg.problem == "lasso") {
    // Re-generate the data to evaluate the first-order optimality residual.
    qadmm::SyntheticLassoSpec spec;
    spec.dim = cfg.dim;
    spec.nodes = cfg.nodes;
    spec.rows_per_node = cfg.rows_per_node;
    spec.sparsity = cfg.sparsity;
    spec.noise_std = cfg.noise_std;
    spec.seed = trial_seed;
    const qadmm::LassoInstance inst = qadmm::generate_lasso(spec);
    const double residual = qadmm::lasso_optimality_residual(inst.a_blocks, inst.b_blocks,
                                                             cfg.theta, ref.minimizer);
    std::cout << "optimality residual (subgradient conditions): " << residual << "\n";
  }
  return ref.converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic simulator of quantized asynchronous consensus ADMM"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config_path;
  long long trial_index = 0;

  CLI::App* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("-c,--config", config_path, "config file (flat JSON, schema v1)")->required();
  run->add_option("-o,--output", ov.output_dir, "output directory (overrides config)");
  run->add_option("--compressor", ov.compressor,
                  "compressor override: stochastic-maxnorm | identity");
  run->add_option("--q", ov.q, "bits per scalar override");
  run->add_option("--tau", ov.tau, "max staleness override");
  run->add_option("--trials", ov.trials, "trial count override");
  run->add_option("--iterations", ov.iterations, "iteration budget override");
  run->add_option("--seed", ov.seed, "master seed override")->each([&ov](const std::string&) {
    ov.has_seed = true;
  });

  CLI::App* fstar = app.add_subcommand("fstar", "print the centralized reference optimum");
  fstar->add_option("-c,--config", config_path, "config file (flat JSON, schema v1)")->required();
  fstar->add_option("--trial", trial_index, "trial index whose data to solve (default 0)");
  fstar->add_option("--seed", ov.seed, "master seed override")->each([&ov](const std::string&) {
    ov.has_seed = true;
  });

  CLI::App* selftest = app.add_subcommand("selftest", "run the built-in property checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, ov);
    if (fstar->parsed()) return cmd_fstar(config_path, ov, trial_index);
    if (selftest->parsed()) {
      const int failures = qadmm::run_selftest(std::cout);
      std::cout << (failures == 0 ? "selftest: all checks passed\n"
                                  : "selftest: " + std::to_string(failures) + " check(s) failed\n");
      return failures == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
