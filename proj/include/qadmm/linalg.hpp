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
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "qadmm/rng.hpp"

namespace qadmm {

/// Dense column vector of doubles. Thin wrapper over std::vector with the
/// arithmetic the solvers need; all binary ops check length agreement.
struct Vector {
  std::vector<double> data;

  Vector() = default;
  explicit Vector(std::size_t n, double value = 0.0) : data(n, value) {}

  std::size_t size() const noexcept { return data.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  const double& operator[](std::size_t i) const { return data[i]; }

  Vector& operator+=(const Vector& other) {
    check_same_size(other, "operator+=");
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += other.data[i];
    return *this;
  }

  Vector& operator-=(const Vector& other) {
    check_same_size(other, "operator-=");
    for (std::size_t i = 0; i < data.size(); ++i) data[i] -= other.data[i];
    return *this;
  }

  Vector& operator*=(double scalar) {
    for (double& x : data) x *= scalar;
    return *this;
  }

  void check_same_size(const Vector& other, const char* op) const {
    if (data.size() != other.data.size()) {
      throw std::invalid_argument(std::string("Vector::") + op + ": length mismatch (" +
                                  std::to_string(data.size()) + " vs " +
                                  std::to_string(other.data.size()) + ")");
    }
  }
};

inline Vector operator+(Vector lhs, const Vector& rhs) { lhs += rhs; return lhs; }
inline Vector operator-(Vector lhs, const Vector& rhs) { lhs -= rhs; return lhs; }
inline Vector operator*(double scalar, Vector v) { v *= scalar; return v; }

inline double dot(const Vector& a, const Vector& b) {
  a.check_same_size(b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(const Vector& v) { return dot(v, v); }

inline double norm(const Vector& v) { return std::sqrt(squared_norm(v)); }

/// Largest absolute entry; 0 for the empty vector.
inline double max_norm(const Vector& v) {
  double m = 0.0;
  for (double x : v.data) {
    const double a = std::fabs(x);
    if (a > m) m = a;
  }
  return m;
}

/// Elementwise shrink toward zero: sign(v) * max(|v| - kappa, 0).
/// This is the proximal map of kappa * l1-norm; kappa must be >= 0.
inline Vector soft_threshold(const Vector& v, double kappa) {
  if (kappa < 0.0) throw std::invalid_argument("soft_threshold: kappa must be >= 0");
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = v[i];
    if (x > kappa) {
      out[i] = x - kappa;
    } else if (x < -kappa) {
      out[i] = x + kappa;
    } else {
      out[i] = 0.0;
    }
  }
  return out;
}

/// Vector of n independent Normal(mean, stddev^2) draws, one RNG word each,
/// filled in index order.
inline Vector sample_gaussian(RngStream& rng, std::size_t n, double mean, double stddev) {
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = rng.gaussian(mean, stddev);
  return out;
}

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major, rows * cols entries

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double value = 0.0) : rows(r), cols(c), data(r * c, value) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  /// A * x
  Vector multiply(const Vector& x) const {
    if (x.size() != cols) {
      throw std::invalid_argument("Matrix::multiply: vector length " + std::to_string(x.size()) +
                                  " does not match cols " + std::to_string(cols));
    }
    Vector out(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* row = data.data() + r * cols;
      double s = 0.0;
      for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
      out[r] = s;
    }
    return out;
  }

  /// A^T * y
  Vector multiply_transpose(const Vector& y) const {
    if (y.size() != rows) {
      throw std::invalid_argument("Matrix::multiply_transpose: vector length " +
                                  std::to_string(y.size()) + " does not match rows " +
                                  std::to_string(rows));
    }
    Vector out(cols);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* row = data.data() + r * cols;
      const double yr = y[r];
      for (std::size_t c = 0; c < cols; ++c) out[c] += row[c] * yr;
    }
    return out;
  }

  /// A^T * A (cols x cols, symmetric).
  Matrix gram() const {
    Matrix g(cols, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* row = data.data() + r * cols;
      for (std::size_t i = 0; i < cols; ++i) {
        const double ri = row[i];
        if (ri == 0.0) continue;
        double* grow = g.data.data() + i * cols;
        for (std::size_t j = 0; j < cols; ++j) grow[j] += ri * row[j];
      }
    }
    return g;
  }
};

/// Lower-triangular Cholesky factor L with G = L L^T, for symmetric positive
/// definite G. Only the lower triangle of the input is read. Factor once,
/// solve many times.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const Matrix& g) : n_(g.rows), lower_(g.rows * g.rows, 0.0) {
    if (g.rows != g.cols) {
      throw std::invalid_argument("CholeskyFactor: matrix must be square");
    }
    for (std::size_t j = 0; j < n_; ++j) {
      double diag = g(j, j);
      for (std::size_t k = 0; k < j; ++k) diag -= lower_[j * n_ + k] * lower_[j * n_ + k];
      if (!(diag > 0.0)) {
        throw std::domain_error("CholeskyFactor: non-positive pivot " + std::to_string(diag) +
                                " at index " + std::to_string(j) +
                                "; matrix is not positive definite");
      }
      const double ljj = std::sqrt(diag);
      lower_[j * n_ + j] = ljj;
      for (std::size_t i = j + 1; i < n_; ++i) {
        double s = g(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= lower_[i * n_ + k] * lower_[j * n_ + k];
        lower_[i * n_ + j] = s / ljj;
      }
    }
  }

  std::size_t size() const noexcept { return n_; }

  /// Solves G x = rhs by forward then backward substitution.
  Vector solve(const Vector& rhs) const {
    if (rhs.size() != n_) {
      throw std::invalid_argument("CholeskyFactor::solve: rhs length " +
                                  std::to_string(rhs.size()) + " does not match dimension " +
                                  std::to_string(n_));
    }
    Vector y(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = rhs[i];
      for (std::size_t k = 0; k < i; ++k) s -= lower_[i * n_ + k] * y[k];
      y[i] = s / lower_[i * n_ + i];
    }
    Vector x(n_);
    for (std::size_t ii = n_; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t k = ii + 1; k < n_; ++k) s -= lower_[k * n_ + ii] * x[k];
      x[ii] = s / lower_[ii * n_ + ii];
    }
    return x;
  }

 private:
  std::size_t n_;
  std::vector<double> lower_;  // row-major, strictly the lower triangle used
};

/// One-shot SPD solve; prefer CholeskyFactor when solving repeatedly.
inline Vector spd_solve(const Matrix& g, const Vector& rhs) {
  return CholeskyFactor(g).solve(rhs);
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration from a
/// fixed deterministic start; used to pick gradient step sizes.
inline double power_iteration_lambda_max(const Matrix& g, std::size_t iterations = 300) {
  if (g.rows != g.cols) throw std::invalid_argument("power_iteration_lambda_max: matrix must be square");
  if (g.rows == 0) return 0.0;
  Vector v(g.rows, 1.0);
  double lambda = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    Vector w = g.multiply(v);
    const double wn = norm(w);
    if (wn == 0.0) return 0.0;
    w *= 1.0 / wn;
    lambda = dot(w, g.multiply(w));
    v = w;
  }
  return lambda;
}

}  // namespace qadmm
