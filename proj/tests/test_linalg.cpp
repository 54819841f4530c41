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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "qadmm/linalg.hpp"
#include "qadmm/rng.hpp"

namespace {

using qadmm::CholeskyFactor;
using qadmm::Matrix;
using qadmm::RngStream;
using qadmm::Vector;

Vector random_vector(RngStream& rng, std::size_t n) {
  return qadmm::sample_gaussian(rng, n, 0.0, 1.0);
}

}  // namespace

TEST_CASE("vector arithmetic is elementwise and length-checked") {
  Vector a(3);
  a[0] = 1.0; a[1] = -2.0; a[2] = 3.0;
  Vector b(3);
  b[0] = 0.5; b[1] = 0.5; b[2] = -1.0;

  const Vector sum = a + b;
  CHECK(sum[0] == 1.5);
  CHECK(sum[1] == -1.5);
  CHECK(sum[2] == 2.0);

  const Vector diff = a - b;
  CHECK(diff[0] == 0.5);
  CHECK(diff[1] == -2.5);
  CHECK(diff[2] == 4.0);

  const Vector scaled = 2.0 * a;
  CHECK(scaled[0] == 2.0);
  CHECK(scaled[2] == 6.0);

  Vector wrong(2);
  CHECK_THROWS_AS(a + wrong, std::invalid_argument);
  CHECK_THROWS_AS(a -= wrong, std::invalid_argument);
  CHECK_THROWS_AS(qadmm::dot(a, wrong), std::invalid_argument);
}

TEST_CASE("norms agree with their definitions") {
  Vector v(4);
  v[0] = 3.0; v[1] = -4.0; v[2] = 0.0; v[3] = 0.5;
  CHECK(qadmm::dot(v, v) == 9.0 + 16.0 + 0.25);
  CHECK(qadmm::squared_norm(v) == qadmm::dot(v, v));
  CHECK_THAT(qadmm::norm(v), Catch::Matchers::WithinRel(std::sqrt(25.25), 1e-15));
}

TEST_CASE("max_norm matches a brute-force scan and handles the empty vector") {
  CHECK(qadmm::max_norm(Vector()) == 0.0);
  CHECK(qadmm::max_norm(Vector(5, 0.0)) == 0.0);

  RngStream rng(31, "maxnorm");
  for (int rep = 0; rep < 50; ++rep) {
    const Vector v = random_vector(rng, 17);
    double expected = 0.0;
    for (double x : v.data) expected = std::max(expected, std::fabs(x));
    CHECK(qadmm::max_norm(v) == expected);
  }
}

TEST_CASE("soft_threshold matches its closed form") {
  Vector v(5);
  v[0] = 3.0; v[1] = -3.0; v[2] = 0.5; v[3] = -0.5; v[4] = 1.0;
  const Vector out = qadmm::soft_threshold(v, 1.0);
  CHECK(out[0] == 2.0);
  CHECK(out[1] == -2.0);
  CHECK(out[2] == 0.0);
  CHECK(out[3] == 0.0);
  CHECK(out[4] == 0.0);

  CHECK_THROWS_AS(qadmm::soft_threshold(v, -0.1), std::invalid_argument);

  // kappa = 0 is the identity.
  const Vector same = qadmm::soft_threshold(v, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(same[i] == v[i]);
}

TEST_CASE("soft_threshold minimizes the scalar shrinkage objective") {
  // For each coordinate independently, shrink(v, kappa) must minimize
  // kappa*|z| + (1/2)(z - v)^2. Compare against a fine grid search.
  const auto objective = [](double z, double v, double kappa) {
    return kappa * std::fabs(z) + 0.5 * (z - v) * (z - v);
  };
  RngStream rng(32, "prox-grid");
  for (int rep = 0; rep < 20; ++rep) {
    const double v = rng.gaussian(0.0, 2.0);
    const double kappa = std::fabs(rng.gaussian(0.0, 1.0));
    Vector in(1, v);
    const double z_star = qadmm::soft_threshold(in, kappa)[0];
    const double f_star = objective(z_star, v, kappa);
    const double lo = -std::fabs(v) - 1.0;
    const double hi = std::fabs(v) + 1.0;
    for (int g = 0; g <= 4000; ++g) {
      const double z = lo + (hi - lo) * g / 4000.0;
      REQUIRE(f_star <= objective(z, v, kappa) + 1e-12);
    }
  }
}

TEST_CASE("matrix products match hand computations") {
  // A = [[1, 2, 3], [4, 5, 6]]
  Matrix a(2, 3);
  a(0, 0) = 1; a(0, 1) = 2; a(0, 2) = 3;
  a(1, 0) = 4; a(1, 1) = 5; a(1, 2) = 6;

  Vector x(3);
  x[0] = 1.0; x[1] = 0.0; x[2] = -1.0;
  const Vector ax = a.multiply(x);
  REQUIRE(ax.size() == 2);
  CHECK(ax[0] == -2.0);
  CHECK(ax[1] == -2.0);

  Vector y(2);
  y[0] = 1.0; y[1] = 2.0;
  const Vector aty = a.multiply_transpose(y);
  REQUIRE(aty.size() == 3);
  CHECK(aty[0] == 9.0);
  CHECK(aty[1] == 12.0);
  CHECK(aty[2] == 15.0);

  const Matrix g = a.gram();
  REQUIRE(g.rows == 3);
  REQUIRE(g.cols == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      double expected = 0.0;
      for (std::size_t r = 0; r < 2; ++r) expected += a(r, i) * a(r, j);
      CHECK(g(i, j) == expected);
      CHECK(g(i, j) == g(j, i));
    }
  }

  CHECK_THROWS_AS(a.multiply(y), std::invalid_argument);
  CHECK_THROWS_AS(a.multiply_transpose(x), std::invalid_argument);

  const Matrix eye = Matrix::identity(3);
  const Vector same = eye.multiply(x);
  for (std::size_t i = 0; i < 3; ++i) CHECK(same[i] == x[i]);
}

TEST_CASE("cholesky solve leaves a tiny residual on random SPD systems") {
  RngStream rng(33, "chol");
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 12;
    Matrix b(n + 3, n);
    for (double& e : b.data) e = rng.gaussian(0.0, 1.0);
    Matrix g = b.gram();
    for (std::size_t i = 0; i < n; ++i) g(i, i) += 1.0;  // safely SPD

    const Vector rhs = random_vector(rng, n);
    const CholeskyFactor factor(g);
    REQUIRE(factor.size() == n);
    const Vector x = factor.solve(rhs);
    const Vector residual = g.multiply(x) - rhs;
    CHECK(qadmm::norm(residual) <= 1e-10 * std::max(1.0, qadmm::norm(rhs)));
  }
}

TEST_CASE("cholesky rejects indefinite and malformed input with a located error") {
  Matrix bad(2, 2);
  bad(0, 0) = 1.0; bad(1, 1) = -1.0;
  try {
    CholeskyFactor factor(bad);
    FAIL("expected domain_error");
  } catch (const std::domain_error& e) {
    // The failing pivot index must be named so callers can diagnose which
    // coordinate broke positive definiteness.
    CHECK(std::string(e.what()).find("index 1") != std::string::npos);
  }

  Matrix rect(2, 3);
  CHECK_THROWS_AS(CholeskyFactor(rect), std::invalid_argument);

  Matrix ok(2, 2);
  ok(0, 0) = 4.0; ok(0, 1) = 2.0; ok(1, 0) = 2.0; ok(1, 1) = 3.0;
  const CholeskyFactor factor(ok);
  Vector wrong(3);
  CHECK_THROWS_AS(factor.solve(wrong), std::invalid_argument);
}

TEST_CASE("spd_solve reproduces a hand-solved 2x2 system") {
  Matrix g(2, 2);
  g(0, 0) = 4.0; g(0, 1) = 2.0; g(1, 0) = 2.0; g(1, 1) = 3.0;
  Vector rhs(2);
  rhs[0] = 2.0; rhs[1] = 5.0;
  // det = 8; x = (1/8) * [3*2 - 2*5, -2*2 + 4*5] = [-0.5, 2].
  const Vector x = qadmm::spd_solve(g, rhs);
  CHECK_THAT(x[0], Catch::Matchers::WithinAbs(-0.5, 1e-14));
  CHECK_THAT(x[1], Catch::Matchers::WithinAbs(2.0, 1e-14));
}

TEST_CASE("power iteration finds the dominant eigenvalue") {
  Matrix d(3, 3);
  d(0, 0) = 5.0; d(1, 1) = 2.0; d(2, 2) = 1.0;
  CHECK_THAT(qadmm::power_iteration_lambda_max(d), Catch::Matchers::WithinRel(5.0, 1e-9));

  CHECK_THAT(qadmm::power_iteration_lambda_max(Matrix::identity(4)),
             Catch::Matchers::WithinRel(1.0, 1e-12));
  CHECK(qadmm::power_iteration_lambda_max(Matrix(3, 3)) == 0.0);
  CHECK_THROWS_AS(qadmm::power_iteration_lambda_max(Matrix(2, 3)), std::invalid_argument);
}
