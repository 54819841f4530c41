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

#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qadmm/linalg.hpp"
#include "qadmm/rng.hpp"

namespace qadmm {

/// Diagnostics filled by inexact primal solvers.
struct SolveDiag {
  int step_size_halvings = 0;  // divergence-guard activations
};

/// A node's local objective f_i together with the solver for the augmented
/// subproblem  argmin_x f_i(x) + (rho/2) * ||x - z_hat + u||^2.
class LocalObjective {
 public:
  virtual ~LocalObjective() = default;
  virtual std::size_t dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  /// Returns the subproblem minimizer (exact or inexact per plugin).
  /// warm_start is the node's previous iterate; exact solvers may ignore it.
  virtual Vector primal_update(const Vector& z_hat, const Vector& u, double rho,
                               const Vector& warm_start, SolveDiag* diag) const = 0;
};

/// Least-squares local objective f_i(x) = ||A x - b||^2 (no 1/2 factor).
/// The subproblem is solved exactly through the normal equations
/// (2 A^T A + rho I) x = 2 A^T b + rho (z_hat - u), with the SPD factor
/// cached at construction: A is static and only the right-hand side changes
/// between rounds, so each solve is two triangular substitutions.
class LassoLocal final : public LocalObjective {
 public:
  LassoLocal(Matrix a, Vector b, double rho)
      : a_(std::move(a)), b_(std::move(b)), rho_(rho), factor_(make_system(a_, rho)),
        atb2_(a_.multiply_transpose(b_)) {
    if (b_.size() != a_.rows) {
      throw std::invalid_argument("LassoLocal: b length " + std::to_string(b_.size()) +
                                  " does not match row count " + std::to_string(a_.rows));
    }
    if (rho <= 0.0) throw std::invalid_argument("LassoLocal: rho must be positive");
    atb2_ *= 2.0;
  }

  std::size_t dim() const override { return a_.cols; }

  double value(const Vector& x) const override {
    const Vector r = a_.multiply(x) - b_;
    return squared_norm(r);
  }

  Vector primal_update(const Vector& z_hat, const Vector& u, double rho, const Vector&,
                       SolveDiag*) const override {
    if (rho != rho_) {
      throw std::logic_error("LassoLocal: cached factorization was built for rho = " +
                             std::to_string(rho_) + ", called with rho = " + std::to_string(rho));
    }
    Vector rhs = atb2_;
    for (std::size_t m = 0; m < rhs.size(); ++m) rhs[m] += rho * (z_hat[m] - u[m]);
    return factor_.solve(rhs);
  }

  const Matrix& a() const noexcept { return a_; }
  const Vector& b() const noexcept { return b_; }
  double rho() const noexcept { return rho_; }

 private:
  static CholeskyFactor make_system(const Matrix& a, double rho) {
    Matrix g = a.gram();
    for (auto& v : g.data) v *= 2.0;
    for (std::size_t m = 0; m < g.cols; ++m) g(m, m) += rho;
    return CholeskyFactor(g);
  }

  Matrix a_;
  Vector b_;
  double rho_;
  CholeskyFactor factor_;
  Vector atb2_;  // 2 A^T b
};

/// h(z) = theta * ||z||_1; theta = 0 degenerates to no regularization.
struct L1Regularizer {
  double theta = 0.0;

  explicit L1Regularizer(double t = 0.0) : theta(t) {
    if (theta < 0.0) throw std::invalid_argument("L1Regularizer: theta must be >= 0");
  }

  double value(const Vector& z) const {
    double s = 0.0;
    for (double v : z.data) s += std::fabs(v);
    return theta * s;
  }

  /// argmin_z theta*||z||_1 + (scale/2)*||z - v||^2 = shrink(v, theta/scale).
  Vector prox(const Vector& v, double scale) const {
    return soft_threshold(v, theta / scale);
  }
};

/// A differentiable convex function with a known curvature bound (an upper
/// bound on the Hessian's largest eigenvalue), for inexact local solvers and
/// centralized gradient-method references.
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;
  virtual std::size_t dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual double curvature_bound() const = 0;
};

/// l2-regularized logistic loss over labeled rows:
///   f(x) = sum_j log(1 + exp(-y_j * a_j^T x)) + l2 * ||x||^2.
class LogisticLocal final : public SmoothObjective {
 public:
  LogisticLocal(Matrix a, std::vector<double> labels, double l2)
      : a_(std::move(a)), labels_(std::move(labels)), l2_(l2) {
    if (labels_.size() != a_.rows) {
      throw std::invalid_argument("LogisticLocal: label count " + std::to_string(labels_.size()) +
                                  " does not match row count " + std::to_string(a_.rows));
    }
    if (l2_ < 0.0) throw std::invalid_argument("LogisticLocal: l2 must be >= 0");
    // Per-row logistic curvature is at most 1/4, so the Hessian is bounded
    // by (1/4) A^T A + 2*l2 I.
    curvature_ = 0.25 * power_iteration_lambda_max(a_.gram()) + 2.0 * l2_;
  }

  std::size_t dim() const override { return a_.cols; }

  double value(const Vector& x) const override {
    const Vector margins = a_.multiply(x);
    double s = 0.0;
    for (std::size_t j = 0; j < margins.size(); ++j) {
      const double t = -labels_[j] * margins[j];
      // log(1 + e^t), computed without overflow for large |t|.
      s += (t > 0.0) ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    }
    return s + l2_ * squared_norm(x);
  }

  Vector gradient(const Vector& x) const override {
    const Vector margins = a_.multiply(x);
    Vector weights(margins.size());
    for (std::size_t j = 0; j < margins.size(); ++j) {
      const double t = -labels_[j] * margins[j];
      const double sigma = 1.0 / (1.0 + std::exp(-t));  // d/dt log(1+e^t)
      weights[j] = -labels_[j] * sigma;
    }
    Vector g = a_.multiply_transpose(weights);
    for (std::size_t m = 0; m < g.size(); ++m) g[m] += 2.0 * l2_ * x[m];
    return g;
  }

  double curvature_bound() const override { return curvature_; }

 private:
  Matrix a_;
  std::vector<double> labels_;
  double l2_;
  double curvature_ = 0.0;
};

/// Subproblem objective f(x) + (rho/2)*||x - z_hat + u||^2 and its gradient.
inline double augmented_value(const SmoothObjective& f, const Vector& x, const Vector& z_hat,
                              const Vector& u, double rho) {
  double penalty = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    const double d = x[m] - z_hat[m] + u[m];
    penalty += d * d;
  }
  return f.value(x) + 0.5 * rho * penalty;
}

inline Vector augmented_gradient(const SmoothObjective& f, const Vector& x, const Vector& z_hat,
                                 const Vector& u, double rho) {
  Vector g = f.gradient(x);
  for (std::size_t m = 0; m < x.size(); ++m) g[m] += rho * (x[m] - z_hat[m] + u[m]);
  return g;
}

/// Inexact local plugin: the subproblem is attacked with a fixed number of
/// plain gradient-descent steps from the warm start, not solved to
/// optimality. A divergence guard halves the step size after 3 consecutive
/// objective increases. If the final iterate somehow ends up above the warm
/// start's objective, the best iterate seen is returned instead, so the
/// solver never moves uphill overall.
class SmoothLocal final : public LocalObjective {
 public:
  SmoothLocal(std::shared_ptr<const SmoothObjective> f, int steps, double step_size)
      : f_(std::move(f)), steps_(steps), step_size_(step_size) {
    if (!f_) throw std::invalid_argument("SmoothLocal: null objective");
    if (steps_ < 1) throw std::invalid_argument("SmoothLocal: step count must be >= 1");
    if (step_size_ <= 0.0) throw std::invalid_argument("SmoothLocal: step size must be positive");
  }

  std::size_t dim() const override { return f_->dim(); }
  double value(const Vector& x) const override { return f_->value(x); }
  const SmoothObjective& objective() const noexcept { return *f_; }
  int steps() const noexcept { return steps_; }
  double step_size() const noexcept { return step_size_; }

  Vector primal_update(const Vector& z_hat, const Vector& u, double rho, const Vector& warm_start,
                       SolveDiag* diag) const override {
    double eta = step_size_;
    Vector x = warm_start;
    double current = augmented_value(*f_, x, z_hat, u, rho);
    const double start_value = current;
    Vector best = x;
    double best_value = current;
    int rising = 0;
    for (int k = 0; k < steps_; ++k) {
      const Vector g = augmented_gradient(*f_, x, z_hat, u, rho);
      for (std::size_t m = 0; m < x.size(); ++m) x[m] -= eta * g[m];
      const double next = augmented_value(*f_, x, z_hat, u, rho);
      if (next > current) {
        if (++rising >= 3) {
          eta *= 0.5;
          rising = 0;
          if (diag != nullptr) ++diag->step_size_halvings;
        }
      } else {
        rising = 0;
      }
      if (next < best_value) {
        best_value = next;
        best = x;
      }
      current = next;
    }
    return (current <= start_value) ? x : best;
  }

 private:
  std::shared_ptr<const SmoothObjective> f_;
  int steps_;
  double step_size_;
};

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

/// Parameters of the synthetic sparse-regression instance: N blocks of an
/// H x M design with standard-normal entries, measurements generated from a
/// ground-truth vector with floor(sparsity * M) nonzero standard-normal
/// entries plus Normal(0, noise_std^2) observation noise.
struct SyntheticLassoSpec {
  std::size_t dim = 200;            // M
  std::size_t nodes = 16;           // N
  std::size_t rows_per_node = 100;  // H
  double sparsity = 0.2;
  double noise_std = 0.1;
  std::uint64_t seed = 0;

  void validate() const {
    if (dim < 1 || nodes < 1 || rows_per_node < 1) {
      throw std::invalid_argument("SyntheticLassoSpec: all dimensions must be >= 1");
    }
    if (sparsity < 0.0 || sparsity > 1.0) {
      throw std::invalid_argument("SyntheticLassoSpec: sparsity must lie in [0, 1]");
    }
    if (noise_std < 0.0) {
      throw std::invalid_argument("SyntheticLassoSpec: noise_std must be >= 0");
    }
  }
};

/// Generated instance: per-node design blocks and measurements, plus the
/// ground-truth vector the measurements were synthesized from.
struct LassoInstance {
  std::vector<Matrix> a_blocks;
  std::vector<Vector> b_blocks;
  Vector ground_truth;
};

/// Deterministically generates the synthetic instance from spec.seed. Draw
/// order is fixed (support positions, support values, then per node the
/// design block in row-major order followed by the noise vector), each from
/// its own named substream, so the data is bit-reproducible.
inline LassoInstance generate_lasso(const SyntheticLassoSpec& spec) {
  spec.validate();
  LassoInstance inst;

  // Ground truth: floor(sparsity * M) distinct positions, uniformly without
  // replacement via a partial Fisher-Yates pass, then standard-normal values.
  const std::size_t nnz = static_cast<std::size_t>(spec.sparsity * static_cast<double>(spec.dim));
  inst.ground_truth = Vector(spec.dim, 0.0);
  RngStream support_rng(spec.seed, "lasso/support");
  std::vector<std::size_t> positions(spec.dim);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  for (std::size_t j = 0; j < nnz; ++j) {
    const std::size_t k = j + static_cast<std::size_t>(support_rng.below(spec.dim - j));
    std::swap(positions[j], positions[k]);
  }
  RngStream value_rng(spec.seed, "lasso/values");
  for (std::size_t j = 0; j < nnz; ++j) {
    inst.ground_truth[positions[j]] = value_rng.gaussian(0.0, 1.0);
  }

  inst.a_blocks.reserve(spec.nodes);
  inst.b_blocks.reserve(spec.nodes);
  for (std::size_t i = 0; i < spec.nodes; ++i) {
    RngStream a_rng(spec.seed, "lasso/A/" + std::to_string(i));
    Matrix a(spec.rows_per_node, spec.dim);
    for (double& entry : a.data) entry = a_rng.gaussian(0.0, 1.0);
    RngStream noise_rng(spec.seed, "lasso/noise/" + std::to_string(i));
    Vector b = a.multiply(inst.ground_truth);
    for (std::size_t r = 0; r < b.size(); ++r) b[r] += noise_rng.gaussian(0.0, spec.noise_std);
    inst.a_blocks.push_back(std::move(a));
    inst.b_blocks.push_back(std::move(b));
  }
  return inst;
}

/// Builds the per-node exact solvers for a generated instance at a given rho.
inline std::vector<std::shared_ptr<LassoLocal>> make_lasso_locals(const LassoInstance& inst,
                                                                  double rho) {
  std::vector<std::shared_ptr<LassoLocal>> out;
  out.reserve(inst.a_blocks.size());
  for (std::size_t i = 0; i < inst.a_blocks.size(); ++i) {
    out.push_back(std::make_shared<LassoLocal>(inst.a_blocks[i], inst.b_blocks[i], rho));
  }
  return out;
}

/// Global objective sum_i ||A_i x - b_i||^2 + theta * ||x||_1, evaluated in
/// residual form (no Gram-matrix cancellation, so it stays accurate near the
/// optimum).
inline double lasso_objective(const std::vector<Matrix>& a_blocks,
                              const std::vector<Vector>& b_blocks, double theta, const Vector& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < a_blocks.size(); ++i) {
    const Vector r = a_blocks[i].multiply(x) - b_blocks[i];
    s += squared_norm(r);
  }
  double l1 = 0.0;
  for (double v : x.data) l1 += std::fabs(v);
  return s + theta * l1;
}

/// Result of a centralized reference solve.
struct ReferenceSolution {
  double objective = 0.0;
  Vector minimizer;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Worst violation of the first-order optimality conditions of the global
/// l1-regularized least-squares objective at x: for nonzero coordinates
/// |grad(m) + theta*sign(x(m))|, for zero coordinates max(0, |grad(m)| - theta),
/// where grad is the gradient of the smooth part. Zero at an exact optimum.
inline double lasso_optimality_residual(const std::vector<Matrix>& a_blocks,
                                        const std::vector<Vector>& b_blocks, double theta,
                                        const Vector& x) {
  Vector grad(x.size(), 0.0);
  for (std::size_t i = 0; i < a_blocks.size(); ++i) {
    const Vector r = a_blocks[i].multiply(x) - b_blocks[i];
    const Vector g = a_blocks[i].multiply_transpose(r);
    for (std::size_t m = 0; m < grad.size(); ++m) grad[m] += 2.0 * g[m];
  }
  double worst = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    double viol;
    if (x[m] > 0.0) {
      viol = std::fabs(grad[m] + theta);
    } else if (x[m] < 0.0) {
      viol = std::fabs(grad[m] - theta);
    } else {
      viol = std::fabs(grad[m]) - theta;
      if (viol < 0.0) viol = 0.0;
    }
    if (viol > worst) worst = viol;
  }
  return worst;
}

/// Centralized high-precision solve of the global l1-regularized
/// least-squares problem by accelerated proximal gradient descent with
/// function-value restarts. Runs until the relative objective change stays
/// at or below 1e-14 for 50 consecutive iterations; hitting the iteration
/// cap instead returns converged = false with the best value found.
inline ReferenceSolution reference_optimum(const std::vector<Matrix>& a_blocks,
                                           const std::vector<Vector>& b_blocks, double theta,
                                           std::size_t max_iterations = 1000000) {
  if (a_blocks.empty() || a_blocks.size() != b_blocks.size()) {
    throw std::invalid_argument("reference_optimum: block lists empty or mismatched");
  }
  const std::size_t dim = a_blocks[0].cols;
  Matrix gram(dim, dim);
  Vector atb(dim, 0.0);
  for (std::size_t i = 0; i < a_blocks.size(); ++i) {
    if (a_blocks[i].cols != dim) {
      throw std::invalid_argument("reference_optimum: inconsistent block widths");
    }
    const Matrix g = a_blocks[i].gram();
    for (std::size_t k = 0; k < gram.data.size(); ++k) gram.data[k] += g.data[k];
    const Vector v = a_blocks[i].multiply_transpose(b_blocks[i]);
    for (std::size_t m = 0; m < dim; ++m) atb[m] += v[m];
  }
  // Smooth part sum ||A_i x - b_i||^2 has gradient 2(gram*x - atb) and
  // Lipschitz constant 2*lambda_max(gram); tiny headroom keeps the step valid
  // against power-iteration underestimation.
  const double lipschitz = 2.0 * power_iteration_lambda_max(gram) * (1.0 + 1e-6);
  if (!(lipschitz > 0.0)) {
    throw std::invalid_argument("reference_optimum: zero design matrix");
  }

  Vector x(dim, 0.0);
  Vector y = x;
  double t = 1.0;
  double fx = lasso_objective(a_blocks, b_blocks, theta, x);
  double f_prev = fx;
  int stall = 0;
  ReferenceSolution out;

  for (std::size_t k = 1; k <= max_iterations; ++k) {
    Vector grad = gram.multiply(y);
    for (std::size_t m = 0; m < dim; ++m) grad[m] = 2.0 * (grad[m] - atb[m]);
    Vector step = y;
    for (std::size_t m = 0; m < dim; ++m) step[m] -= grad[m] / lipschitz;
    Vector x_next = soft_threshold(step, theta / lipschitz);
    double f_next = lasso_objective(a_blocks, b_blocks, theta, x_next);

    if (f_next > fx) {
      // Momentum overshoot: restart from the last accepted iterate.
      y = x;
      t = 1.0;
      grad = gram.multiply(y);
      for (std::size_t m = 0; m < dim; ++m) grad[m] = 2.0 * (grad[m] - atb[m]);
      step = y;
      for (std::size_t m = 0; m < dim; ++m) step[m] -= grad[m] / lipschitz;
      x_next = soft_threshold(step, theta / lipschitz);
      f_next = lasso_objective(a_blocks, b_blocks, theta, x_next);
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_next;
    const double momentum = (t - 1.0) / t_next;
    for (std::size_t m = 0; m < dim; ++m) y[m] += momentum * (x_next[m] - x[m]);
    t = t_next;
    x = x_next;
    fx = f_next;
    out.iterations = k;

    const double rel_change = std::fabs(fx - f_prev) / std::max(1.0, std::fabs(fx));
    stall = (rel_change <= 1e-14) ? stall + 1 : 0;
    f_prev = fx;
    if (stall >= 50) {
      out.converged = true;
      break;
    }
  }
  out.objective = fx;
  out.minimizer = x;
  return out;
}

/// Parameters of the synthetic classification instance for the smooth
/// (inexact-solver) path.
struct SyntheticLogisticSpec {
  std::size_t dim = 30;
  std::size_t nodes = 8;
  std::size_t rows_per_node = 40;
  double l2_reg = 0.1;
  double label_noise_std = 0.1;
  std::uint64_t seed = 0;

  void validate() const {
    if (dim < 1 || nodes < 1 || rows_per_node < 1) {
      throw std::invalid_argument("SyntheticLogisticSpec: all dimensions must be >= 1");
    }
    if (l2_reg < 0.0 || label_noise_std < 0.0) {
      throw std::invalid_argument("SyntheticLogisticSpec: l2_reg and label_noise_std must be >= 0");
    }
  }
};

/// Deterministically generates per-node logistic objectives: rows scaled by
/// 1/sqrt(M) so curvature stays O(rows_per_node/4), labels from a hidden
/// weight vector with additive margin noise.
inline std::vector<std::shared_ptr<LogisticLocal>> generate_logistic(
    const SyntheticLogisticSpec& spec) {
  spec.validate();
  RngStream w_rng(spec.seed, "logit/w");
  const Vector hidden = sample_gaussian(w_rng, spec.dim, 0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.dim));

  std::vector<std::shared_ptr<LogisticLocal>> out;
  out.reserve(spec.nodes);
  for (std::size_t i = 0; i < spec.nodes; ++i) {
    RngStream a_rng(spec.seed, "logit/A/" + std::to_string(i));
    Matrix a(spec.rows_per_node, spec.dim);
    for (double& entry : a.data) entry = a_rng.gaussian(0.0, scale);
    RngStream noise_rng(spec.seed, "logit/noise/" + std::to_string(i));
    std::vector<double> labels(spec.rows_per_node);
    const Vector margins = a.multiply(hidden);
    for (std::size_t j = 0; j < spec.rows_per_node; ++j) {
      const double noisy = margins[j] + noise_rng.gaussian(0.0, spec.label_noise_std);
      labels[j] = (noisy < 0.0) ? -1.0 : 1.0;
    }
    out.push_back(std::make_shared<LogisticLocal>(std::move(a), std::move(labels), spec.l2_reg));
  }
  return out;
}

/// Centralized high-precision minimizer of sum_i f_i(x) for smooth convex
/// f_i, by accelerated gradient descent with function-value restarts. Stops
/// when the gradient max-norm falls to `gradient_tolerance` (or on objective
/// stall), else reports converged = false at the cap.
inline ReferenceSolution smooth_reference_optimum(
    const std::vector<std::shared_ptr<LogisticLocal>>& objectives,
    double gradient_tolerance = 1e-11, std::size_t max_iterations = 1000000) {
  if (objectives.empty()) {
    throw std::invalid_argument("smooth_reference_optimum: no objectives");
  }
  const std::size_t dim = objectives[0]->dim();
  double lipschitz = 0.0;
  for (const auto& f : objectives) {
    if (f->dim() != dim) {
      throw std::invalid_argument("smooth_reference_optimum: inconsistent dimensions");
    }
    lipschitz += f->curvature_bound();
  }
  lipschitz *= 1.0 + 1e-6;

  const auto total_value = [&](const Vector& x) {
    double s = 0.0;
    for (const auto& f : objectives) s += f->value(x);
    return s;
  };
  const auto total_gradient = [&](const Vector& x) {
    Vector g(dim, 0.0);
    for (const auto& f : objectives) g += f->gradient(x);
    return g;
  };

  Vector x(dim, 0.0);
  Vector y = x;
  double t = 1.0;
  double fx = total_value(x);
  double f_prev = fx;
  int stall = 0;
  ReferenceSolution out;

  for (std::size_t k = 1; k <= max_iterations; ++k) {
    Vector x_next = y;
    const Vector grad_y = total_gradient(y);
    for (std::size_t m = 0; m < dim; ++m) x_next[m] -= grad_y[m] / lipschitz;
    double f_next = total_value(x_next);
    if (f_next > fx) {
      y = x;
      t = 1.0;
      x_next = y;
      const Vector grad_r = total_gradient(y);
      for (std::size_t m = 0; m < dim; ++m) x_next[m] -= grad_r[m] / lipschitz;
      f_next = total_value(x_next);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_next;
    const double momentum = (t - 1.0) / t_next;
    for (std::size_t m = 0; m < dim; ++m) y[m] += momentum * (x_next[m] - x[m]);
    t = t_next;
    x = x_next;
    fx = f_next;
    out.iterations = k;

    const double rel_change = std::fabs(fx - f_prev) / std::max(1.0, std::fabs(fx));
    stall = (rel_change <= 1e-15) ? stall + 1 : 0;
    f_prev = fx;
    if (max_norm(total_gradient(x)) <= gradient_tolerance || stall >= 80) {
      out.converged = true;
      break;
    }
  }
  out.objective = fx;
  out.minimizer = x;
  return out;
}

}  // namespace qadmm
