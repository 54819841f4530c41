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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qadmm/config.hpp"
#include "qadmm/engine.hpp"
#include "qadmm/problems.hpp"

namespace qadmm {

/// One iteration's measurements for one run of one trial.
struct MetricsRow {
  std::string run;          // "qadmm" (configured compressor) or "baseline" (identity)
  std::size_t trial = 0;
  std::uint32_t iteration = 0;
  double lagrangian = 0.0;  // scaled augmented Lagrangian on true variables
  double accuracy = 0.0;    // |lagrangian - F*| / F*
  double z_accuracy = 0.0;  // |objective(z) - F*| / F*
  std::uint64_t uplink_bits = 0;
  std::uint64_t downlink_bits = 0;
  double normalized_bits = 0.0;  // (uplink + downlink) / dim
  std::size_t active_count = 0;
};

/// Normalized objective gap |L - F*| / F*; the reference value must be
/// positive (it is for all generated instances: a sum of squared residuals
/// or log-losses).
inline double accuracy(double lagrangian, double f_star) {
  if (!(f_star > 0.0)) {
    throw std::invalid_argument("accuracy: F* must be positive, got " + std::to_string(f_star));
  }
  return std::fabs(lagrangian - f_star) / f_star;
}

/// Scaled augmented Lagrangian
///   sum_i f_i(x_i) + theta*||z||_1 + (rho/2) * sum_i ||x_i - z + u_i||^2
/// evaluated on the true node variables and the server's z, exactly as
/// written (no constant correction subtracted). Call at end of round.
inline double evaluate_lagrangian(const System& sys) {
  const Vector& z = sys.server().z;
  double f_sum = 0.0;
  double penalty = 0.0;
  for (const NodeState& node : sys.nodes()) {
    f_sum += node.problem->value(node.x);
    for (std::size_t m = 0; m < z.size(); ++m) {
      const double d = node.x[m] - z[m] + node.u[m];
      penalty += d * d;
    }
  }
  return f_sum + sys.server().regularizer.value(z) + 0.5 * sys.config().rho * penalty;
}

/// Everything one trial needs: the per-node solvers, the global objective
/// F(.) including the consensus regularizer, and the centralized reference.
struct TrialProblem {
  std::vector<std::shared_ptr<LocalObjective>> locals;
  std::function<double(const Vector&)> global_objective;
  ReferenceSolution reference;
};

/// Builds the trial's data and reference solution from its derived seed.
inline TrialProblem build_trial_problem(const ExperimentConfig& cfg, std::uint64_t trial_seed) {
  TrialProblem out;
  if (cfg.problem == "lasso") {
    SyntheticLassoSpec spec;
    spec.dim = cfg.dim;
    spec.nodes = cfg.nodes;
    spec.rows_per_node = cfg.rows_per_node;
    spec.sparsity = cfg.sparsity;
    spec.noise_std = cfg.noise_std;
    spec.seed = trial_seed;
    auto inst = std::make_shared<LassoInstance>(generate_lasso(spec));
    for (auto& local : make_lasso_locals(*inst, cfg.rho)) out.locals.push_back(std::move(local));
    const double theta = cfg.theta;
    out.global_objective = [inst, theta](const Vector& v) {
      return lasso_objective(inst->a_blocks, inst->b_blocks, theta, v);
    };
    out.reference = reference_optimum(inst->a_blocks, inst->b_blocks, theta);
  } else {
    SyntheticLogisticSpec spec;
    spec.dim = cfg.dim;
    spec.nodes = cfg.nodes;
    spec.rows_per_node = cfg.rows_per_node;
    spec.l2_reg = cfg.l2_reg;
    spec.label_noise_std = cfg.label_noise_std;
    spec.seed = trial_seed;
    auto objectives = std::make_shared<std::vector<std::shared_ptr<LogisticLocal>>>(
        generate_logistic(spec));
    for (const auto& f : *objectives) {
      out.locals.push_back(std::make_shared<SmoothLocal>(f, cfg.gd_steps, cfg.gd_step_size));
    }
    out.global_objective = [objectives](const Vector& v) {
      double s = 0.0;
      for (const auto& f : *objectives) s += f->value(v);
      return s;
    };
    out.reference = smooth_reference_optimum(*objectives);
  }
  return out;
}

/// One simulated run (a System driven for the configured budget), returning
/// a row per executed round. Stops early once min(accuracy, z_accuracy)
/// reaches cfg.accuracy_target, if that target is enabled.
inline std::vector<MetricsRow> run_recorded(const ExperimentConfig& cfg, const TrialProblem& prob,
                                            const std::string& run_label, std::size_t trial_index,
                                            std::uint64_t trial_seed, bool identity_override) {
  EngineConfig engine_cfg = cfg.engine_config();
  if (identity_override) {
    engine_cfg.compressor.kind = CompressorKind::identity;
  }
  System sys(prob.locals, engine_cfg, trial_seed);
  const double f_star = prob.reference.objective;
  const double inv_dim = 1.0 / static_cast<double>(cfg.dim);

  std::vector<MetricsRow> rows;
  rows.reserve(cfg.iterations);
  for (std::size_t r = 0; r < cfg.iterations; ++r) {
    const RoundRecord rec = sys.run_round();
    MetricsRow row;
    row.run = run_label;
    row.trial = trial_index;
    row.iteration = rec.iteration;
    row.lagrangian = evaluate_lagrangian(sys);
    row.accuracy = accuracy(row.lagrangian, f_star);
    row.z_accuracy = accuracy(prob.global_objective(sys.server().z), f_star);
    row.uplink_bits = rec.uplink_bits;
    row.downlink_bits = rec.downlink_bits;
    row.normalized_bits = static_cast<double>(rec.uplink_bits + rec.downlink_bits) * inv_dim;
    row.active_count = rec.active_count;
    rows.push_back(std::move(row));
    if (cfg.accuracy_target > 0.0 &&
        std::min(rows.back().accuracy, rows.back().z_accuracy) <= cfg.accuracy_target) {
      break;
    }
  }
  return rows;
}

/// A full trial: data + reference, then the configured-compressor run and
/// the identity baseline on the same data, same seed, same oracle schedule.
struct TrialResult {
  std::size_t trial = 0;
  bool aborted = false;  // reference solver failed to converge
  ReferenceSolution reference;
  std::vector<MetricsRow> qadmm_rows;
  std::vector<MetricsRow> baseline_rows;
};

inline TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial_index) {
  TrialResult result;
  result.trial = trial_index;
  const std::uint64_t trial_seed = derive_seed(cfg.seed, trial_index);
  TrialProblem prob = build_trial_problem(cfg, trial_seed);
  result.reference = prob.reference;
  if (!prob.reference.converged) {
    result.aborted = true;
    return result;
  }
  result.qadmm_rows = run_recorded(cfg, prob, "qadmm", trial_index, trial_seed,
                                   /*identity_override=*/false);
  result.baseline_rows = run_recorded(cfg, prob, "baseline", trial_index, trial_seed,
                                      /*identity_override=*/true);
  return result;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void append_row(std::string& out, const MetricsRow& row) {
  out += row.run;
  out += ',';
  out += std::to_string(row.trial);
  out += ',';
  out += std::to_string(row.iteration);
  out += ',';
  out += fmt_double(row.lagrangian);
  out += ',';
  out += fmt_double(row.accuracy);
  out += ',';
  out += fmt_double(row.z_accuracy);
  out += ',';
  out += std::to_string(row.uplink_bits);
  out += ',';
  out += std::to_string(row.downlink_bits);
  out += ',';
  out += fmt_double(row.normalized_bits);
  out += ',';
  out += std::to_string(row.active_count);
  out += '\n';
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + path.string());
  f << content;
  if (!f) throw std::runtime_error("failed writing output file " + path.string());
}

/// First row at or below the threshold on min(accuracy, z_accuracy), or
/// nullptr if the run never reached it.
inline const MetricsRow* first_reaching(const std::vector<MetricsRow>& rows, double threshold) {
  for (const MetricsRow& row : rows) {
    if (std::min(row.accuracy, row.z_accuracy) <= threshold) return &row;
  }
  return nullptr;
}

}  // namespace detail

constexpr const char* kCsvHeader =
    "run,trial,iteration,lagrangian,accuracy,z_accuracy,uplink_bits,downlink_bits,"
    "normalized_bits,active_count\n";

/// Communication cost comparison at the bits_target threshold, over trials
/// where both runs reached it.
struct BitsSummary {
  std::size_t trials = 0;
  std::size_t trials_aborted = 0;
  std::size_t qadmm_reached = 0;
  std::size_t baseline_reached = 0;
  double qadmm_mean_bits = std::numeric_limits<double>::quiet_NaN();
  double baseline_mean_bits = std::numeric_limits<double>::quiet_NaN();
  double reduction_percent = std::numeric_limits<double>::quiet_NaN();
};

inline BitsSummary summarize_bits(const std::vector<TrialResult>& trials, double threshold) {
  BitsSummary s;
  s.trials = trials.size();
  double q_sum = 0.0;
  double b_sum = 0.0;
  std::size_t both = 0;
  for (const TrialResult& t : trials) {
    if (t.aborted) {
      ++s.trials_aborted;
      continue;
    }
    const MetricsRow* q = detail::first_reaching(t.qadmm_rows, threshold);
    const MetricsRow* b = detail::first_reaching(t.baseline_rows, threshold);
    if (q != nullptr) ++s.qadmm_reached;
    if (b != nullptr) ++s.baseline_reached;
    if (q != nullptr && b != nullptr) {
      q_sum += q->normalized_bits;
      b_sum += b->normalized_bits;
      ++both;
    }
  }
  if (both > 0) {
    s.qadmm_mean_bits = q_sum / static_cast<double>(both);
    s.baseline_mean_bits = b_sum / static_cast<double>(both);
    s.reduction_percent = 100.0 * (1.0 - s.qadmm_mean_bits / s.baseline_mean_bits);
  }
  return s;
}

/// Runs all trials, writes trial_<k>.csv per trial, aggregate.csv with
/// per-iteration means across trials plus a bits-to-target footer, and a
/// config.json echo of the exact configuration. Output is byte-stable for
/// equal configs. Returns the bits summary.
inline BitsSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::filesystem::path out_dir(cfg.output_dir);
  std::filesystem::create_directories(out_dir);

  std::vector<TrialResult> results;
  results.reserve(cfg.trials);
  for (std::size_t k = 0; k < cfg.trials; ++k) {
    results.push_back(run_trial(cfg, k));

    const TrialResult& t = results.back();
    std::string csv;
    if (t.aborted) {
      csv += "# trial " + std::to_string(k) +
             " aborted: reference solver did not converge within its iteration cap (best value " +
             detail::fmt_double(t.reference.objective) + " after " +
             std::to_string(t.reference.iterations) + " iterations)\n";
      csv += kCsvHeader;
    } else {
      csv += "# f_star=" + detail::fmt_double(t.reference.objective) +
             " reference_iterations=" + std::to_string(t.reference.iterations) + "\n";
      csv += kCsvHeader;
      for (const MetricsRow& row : t.qadmm_rows) detail::append_row(csv, row);
      for (const MetricsRow& row : t.baseline_rows) detail::append_row(csv, row);
    }
    detail::write_text_file(out_dir / ("trial_" + std::to_string(k) + ".csv"), csv);
  }

  // Aggregate: per-iteration means over the trials that have data at that
  // iteration (means of per-trial values).
  std::string agg;
  agg += "run,iteration,mean_lagrangian,mean_accuracy,mean_z_accuracy,mean_normalized_bits,"
         "trials\n";
  const auto rows_of = [&](const TrialResult& t, bool baseline) -> const std::vector<MetricsRow>& {
    return baseline ? t.baseline_rows : t.qadmm_rows;
  };
  for (int baseline = 0; baseline < 2; ++baseline) {
    std::size_t longest = 0;
    for (const TrialResult& t : results) {
      if (!t.aborted) longest = std::max(longest, rows_of(t, baseline != 0).size());
    }
    for (std::size_t r = 0; r < longest; ++r) {
      double l_sum = 0.0;
      double acc_sum = 0.0;
      double z_sum = 0.0;
      double bits_sum = 0.0;
      std::size_t count = 0;
      for (const TrialResult& t : results) {
        const auto& rows = rows_of(t, baseline != 0);
        if (t.aborted || r >= rows.size()) continue;
        l_sum += rows[r].lagrangian;
        acc_sum += rows[r].accuracy;
        z_sum += rows[r].z_accuracy;
        bits_sum += rows[r].normalized_bits;
        ++count;
      }
      if (count == 0) continue;
      const double inv = 1.0 / static_cast<double>(count);
      agg += baseline ? "baseline," : "qadmm,";
      agg += std::to_string(r) + ',' + detail::fmt_double(l_sum * inv) + ',' +
             detail::fmt_double(acc_sum * inv) + ',' + detail::fmt_double(z_sum * inv) + ',' +
             detail::fmt_double(bits_sum * inv) + ',' + std::to_string(count) + '\n';
    }
  }

  const BitsSummary summary = summarize_bits(results, cfg.bits_target);
  agg += "# bits_to_target threshold=" + detail::fmt_double(cfg.bits_target) +
         " metric=min(accuracy,z_accuracy)\n";
  agg += "# run=qadmm reached=" + std::to_string(summary.qadmm_reached) + "/" +
         std::to_string(summary.trials - summary.trials_aborted) +
         " mean_normalized_bits_to_target=" + detail::fmt_double(summary.qadmm_mean_bits) + "\n";
  agg += "# run=baseline reached=" + std::to_string(summary.baseline_reached) + "/" +
         std::to_string(summary.trials - summary.trials_aborted) +
         " mean_normalized_bits_to_target=" + detail::fmt_double(summary.baseline_mean_bits) + "\n";
  agg += "# reduction_percent=" + detail::fmt_double(summary.reduction_percent) + "\n";
  detail::write_text_file(out_dir / "aggregate.csv", agg);

  detail::write_text_file(out_dir / "config.json", serialize_config(cfg));
  return summary;
}

}  // namespace qadmm
