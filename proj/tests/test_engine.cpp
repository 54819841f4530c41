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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "qadmm/engine.hpp"
#include "qadmm/problems.hpp"
#include "qadmm/rng.hpp"
#include "support/reference_admm.hpp"
#include "support/test_objectives.hpp"

namespace {

using qadmm::AsyncOracle;
using qadmm::CompressorConfig;
using qadmm::CompressorKind;
using qadmm::EngineConfig;
using qadmm::RngStream;
using qadmm::System;
using qadmm::Vector;
using qadmm_test::PinnedObjective;
using qadmm_test::QuadraticLocal;
using qadmm_test::ZeroObjective;

CompressorConfig stochastic_cfg(int q) {
  CompressorConfig cfg;
  cfg.kind = CompressorKind::stochastic_maxnorm;
  cfg.bits_per_scalar = q;
  return cfg;
}

CompressorConfig identity_cfg() {
  CompressorConfig cfg;
  cfg.kind = CompressorKind::identity;
  return cfg;
}

bool is_sorted_unique(const std::vector<std::uint16_t>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] <= v[i - 1]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("the fixed-split oracle marks half the nodes slow and hits its mean rate") {
  AsyncOracle oracle(AsyncOracle::Mode::fixed_split, 0.1, 0.8, 16, RngStream(3, "oracle"));
  std::size_t n_slow = 0;
  for (bool s : oracle.slow_split()) n_slow += s ? 1 : 0;
  CHECK(n_slow == 8);

  // E|draw| = 8*0.1 + 8*0.8 = 7.2. Per-call sd is sqrt(2.0), so the mean of
  // 1e4 calls concentrates to about +/-0.014; 0.15 is a very safe band.
  constexpr int kCalls = 10000;
  double total = 0.0;
  for (int c = 0; c < kCalls; ++c) {
    const auto drawn = oracle.draw();
    REQUIRE(is_sorted_unique(drawn));
    for (std::uint16_t i : drawn) REQUIRE(i < 16);
    total += static_cast<double>(drawn.size());
  }
  CHECK_THAT(total / kCalls, Catch::Matchers::WithinAbs(7.2, 0.15));
}

TEST_CASE("the per-call oracle redraws group membership each round") {
  AsyncOracle oracle(AsyncOracle::Mode::per_call_bernoulli, 0.1, 0.8, 16, RngStream(4, "oracle"));
  // Every node is slow or fast with probability 1/2 per call, so the mean
  // draw size is 16 * (0.1 + 0.8)/2 = 7.2 here too.
  constexpr int kCalls = 10000;
  double total = 0.0;
  for (int c = 0; c < kCalls; ++c) total += static_cast<double>(oracle.draw().size());
  CHECK_THAT(total / kCalls, Catch::Matchers::WithinAbs(7.2, 0.15));
}

TEST_CASE("certain selection returns every node and impossible selection none") {
  AsyncOracle all(AsyncOracle::Mode::fixed_split, 1.0, 1.0, 9, RngStream(5, "oracle"));
  for (int c = 0; c < 20; ++c) REQUIRE(all.draw().size() == 9);

  AsyncOracle none(AsyncOracle::Mode::fixed_split, 0.0, 0.0, 9, RngStream(6, "oracle"));
  for (int c = 0; c < 20; ++c) REQUIRE(none.draw().empty());
}

TEST_CASE("oracle construction validates probabilities and node count") {
  CHECK_THROWS_AS(AsyncOracle(AsyncOracle::Mode::fixed_split, -0.1, 0.5, 4, RngStream(1, "o")),
                  std::invalid_argument);
  CHECK_THROWS_AS(AsyncOracle(AsyncOracle::Mode::fixed_split, 0.1, 1.5, 4, RngStream(1, "o")),
                  std::invalid_argument);
  CHECK_THROWS_AS(AsyncOracle(AsyncOracle::Mode::fixed_split, 0.1, 0.5, 0, RngStream(1, "o")),
                  std::invalid_argument);
}

TEST_CASE("the scheduler bounds staleness and never starves a node") {
  constexpr std::size_t kNodes = 16;
  constexpr int kTau = 3;
  AsyncOracle oracle(AsyncOracle::Mode::fixed_split, 0.1, 0.8, kNodes, RngStream(7, "oracle"));
  std::vector<int> staleness(kNodes, 0);
  std::vector<std::uint16_t> active;
  for (std::uint16_t i = 0; i < kNodes; ++i) active.push_back(i);  // start synchronous
  std::vector<long> last_active(kNodes, 0);

  for (long r = 1; r <= 2000; ++r) {
    active = qadmm::scheduler_step(active, staleness, oracle, kTau, 1);
    REQUIRE(is_sorted_unique(active));
    REQUIRE(!active.empty());
    for (std::size_t i = 0; i < kNodes; ++i) {
      REQUIRE(staleness[i] >= 0);
      REQUIRE(staleness[i] <= kTau - 1);
    }
    // Anyone at the forcing threshold must be in the set.
    for (std::size_t i = 0; i < kNodes; ++i) {
      if (staleness[i] == kTau - 1) {
        REQUIRE(std::binary_search(active.begin(), active.end(), static_cast<std::uint16_t>(i)));
      }
    }
    for (std::uint16_t i : active) {
      REQUIRE(r - last_active[i] <= kTau);  // no update ever older than tau
      last_active[i] = r;
    }
  }
  // After the loop no node has been silent longer than tau rounds.
  for (std::size_t i = 0; i < kNodes; ++i) REQUIRE(2000 - last_active[i] <= kTau);
}

TEST_CASE("tau of one degenerates to a synchronous schedule") {
  constexpr std::size_t kNodes = 6;
  AsyncOracle oracle(AsyncOracle::Mode::fixed_split, 0.05, 0.2, kNodes, RngStream(8, "oracle"));
  std::vector<int> staleness(kNodes, 0);
  std::vector<std::uint16_t> active;
  for (std::uint16_t i = 0; i < kNodes; ++i) active.push_back(i);
  for (int r = 0; r < 50; ++r) {
    active = qadmm::scheduler_step(active, staleness, oracle, 1, 1);
    REQUIRE(active.size() == kNodes);  // everyone, every round
  }
}

TEST_CASE("the barrier tops the set up to min_active") {
  constexpr std::size_t kNodes = 8;
  AsyncOracle oracle(AsyncOracle::Mode::fixed_split, 0.05, 0.05, kNodes, RngStream(9, "oracle"));
  std::vector<int> staleness(kNodes, 0);
  std::vector<std::uint16_t> active;
  for (std::uint16_t i = 0; i < kNodes; ++i) active.push_back(i);
  for (int r = 0; r < 50; ++r) {
    active = qadmm::scheduler_step(active, staleness, oracle, 100, 4);
    REQUIRE(active.size() >= 4);
  }
}

TEST_CASE("a hopeless oracle cannot satisfy the barrier and says so") {
  constexpr std::size_t kNodes = 4;
  AsyncOracle oracle(AsyncOracle::Mode::fixed_split, 0.0, 0.0, kNodes, RngStream(10, "oracle"));
  std::vector<int> staleness(kNodes, 0);
  const std::vector<std::uint16_t> active;  // nobody ran last round
  CHECK_THROWS_AS(qadmm::scheduler_step(active, staleness, oracle, 1000000, 1),
                  std::runtime_error);
}

TEST_CASE("system construction validates its inputs") {
  EngineConfig cfg;
  cfg.compressor = identity_cfg();

  SECTION("no nodes") {
    CHECK_THROWS_AS(System({}, cfg, 1), std::invalid_argument);
  }
  SECTION("mismatched dimensions") {
    std::vector<std::shared_ptr<qadmm::LocalObjective>> probs;
    probs.push_back(std::make_shared<ZeroObjective>(3));
    probs.push_back(std::make_shared<ZeroObjective>(4));
    CHECK_THROWS_AS(System(std::move(probs), cfg, 1), std::invalid_argument);
  }
  SECTION("bad parameters") {
    std::vector<std::shared_ptr<qadmm::LocalObjective>> probs;
    probs.push_back(std::make_shared<ZeroObjective>(3));
    EngineConfig bad = cfg;
    bad.rho = 0.0;
    CHECK_THROWS_AS(System(probs, bad, 1), std::invalid_argument);
    bad = cfg;
    bad.tau = 0;
    CHECK_THROWS_AS(System(probs, bad, 1), std::invalid_argument);
    bad = cfg;
    bad.min_active = 2;  // only one node
    CHECK_THROWS_AS(System(probs, bad, 1), std::invalid_argument);
    bad = cfg;
    bad.compressor.bits_per_scalar = 1;
    bad.compressor.kind = CompressorKind::stochastic_maxnorm;
    CHECK_THROWS_AS(System(probs, bad, 1), std::invalid_argument);
  }
}

TEST_CASE("one synchronous round accumulates the dual exactly") {
  // Pinned iterates make every quantity hand-computable. After round 0 with
  // z_hat = 0: x = v, u = 0 + (v - 0) = v.
  Vector v(3);
  v[0] = 1e-5; v[1] = 0.5e-5; v[2] = -1.5e-5;
  std::vector<std::shared_ptr<qadmm::LocalObjective>> probs = {
      std::make_shared<PinnedObjective>(v), std::make_shared<PinnedObjective>(v)};

  EngineConfig cfg;
  cfg.rho = 4.0;
  cfg.theta = 1e-4;
  cfg.tau = 1;
  cfg.min_active = 1;
  cfg.compressor = identity_cfg();
  System sys(std::move(probs), cfg, 77);

  sys.run_round();
  for (const auto& node : sys.nodes()) {
    for (std::size_t m = 0; m < 3; ++m) {
      REQUIRE(node.x[m] == v[m]);
      REQUIRE(node.u[m] == v[m]);
      // Lossless uplinks: the server's estimates equal the true states.
      REQUIRE(node.x_channel.mirror[m] == v[m]);
      REQUIRE(node.u_channel.mirror[m] == v[m]);
    }
  }

  // Server: mean of (x_i + u_i) = 2v; threshold theta/(rho*N) = 1e-4/8.
  const double kappa = 1e-4 / (4.0 * 2.0);
  CHECK(kappa == 1.25e-5);
  const Vector& z = sys.server().z;
  CHECK(z[0] == 2.0 * v[0] - kappa);   // above threshold, shrunk
  CHECK(z[1] == 0.0);                  // 1e-5 < kappa: clipped to exactly zero
  CHECK(z[2] == 2.0 * v[2] + kappa);   // negative side
}

TEST_CASE("a synchronous lossless run reproduces the textbook iteration") {
  // Two quadratic nodes, hand-rolled reference loop with the same update
  // expressions; every state must match bit for bit across 20 rounds.
  Vector c0(2); c0[0] = 1.0; c0[1] = -0.5;
  Vector c1(2); c1[0] = -2.0; c1[1] = 1.5;
  std::vector<std::shared_ptr<qadmm::LocalObjective>> probs = {
      std::make_shared<QuadraticLocal>(c0), std::make_shared<QuadraticLocal>(c1)};

  EngineConfig cfg;
  cfg.rho = 2.0;
  cfg.theta = 0.3;
  cfg.tau = 1;
  cfg.min_active = 1;
  cfg.compressor = identity_cfg();
  System sys(std::move(probs), cfg, 123);

  const Vector centers[2] = {c0, c1};
  Vector x[2] = {Vector(2, 0.0), Vector(2, 0.0)};
  Vector u[2] = {Vector(2, 0.0), Vector(2, 0.0)};
  Vector z(2, 0.0);

  for (int r = 0; r < 20; ++r) {
    const Vector z_hat = z;  // one-round broadcast lag
    for (int i = 0; i < 2; ++i) {
      for (std::size_t m = 0; m < 2; ++m) {
        x[i][m] = (2.0 * centers[i][m] + cfg.rho * (z_hat[m] - u[i][m])) / (2.0 + cfg.rho);
      }
      for (std::size_t m = 0; m < 2; ++m) u[i][m] += x[i][m] - z_hat[m];
    }
    Vector mean(2, 0.0);
    for (int i = 0; i < 2; ++i) {
      for (std::size_t m = 0; m < 2; ++m) mean[m] += x[i][m] + u[i][m];
    }
    const double inv_n = 1.0 / 2.0;
    for (std::size_t m = 0; m < 2; ++m) mean[m] *= inv_n;
    z = qadmm::soft_threshold(mean, cfg.theta / (cfg.rho * 2.0));

    sys.run_round();
    for (int i = 0; i < 2; ++i) {
      for (std::size_t m = 0; m < 2; ++m) {
        REQUIRE(sys.nodes()[i].x[m] == x[i][m]);
        REQUIRE(sys.nodes()[i].u[m] == u[i][m]);
      }
    }
    for (std::size_t m = 0; m < 2; ++m) REQUIRE(sys.server().z[m] == z[m]);
  }
}

TEST_CASE("an asynchronous lossless run matches the channel-free reference loop") {
  // Same randomness, independent code path for scheduling and updates; with
  // lossless links the two must agree bit for bit, states and active sets.
  const qadmm::SyntheticLassoSpec spec{/*dim=*/10, /*nodes=*/4, /*rows_per_node=*/8,
                                       /*sparsity=*/0.2, /*noise_std=*/0.1, /*seed=*/5};
  const qadmm::LassoInstance inst = qadmm::generate_lasso(spec);
  const double rho = 50.0;

  EngineConfig cfg;
  cfg.rho = rho;
  cfg.theta = 0.1;
  cfg.tau = 3;
  cfg.min_active = 1;
  cfg.compressor = identity_cfg();

  std::vector<std::shared_ptr<qadmm::LocalObjective>> engine_probs;
  std::vector<std::shared_ptr<qadmm::LocalObjective>> ref_probs;
  for (const auto& local : qadmm::make_lasso_locals(inst, rho)) engine_probs.push_back(local);
  for (const auto& local : qadmm::make_lasso_locals(inst, rho)) ref_probs.push_back(local);

  const std::uint64_t run_seed = 31;
  System sys(std::move(engine_probs), cfg, run_seed);
  qadmm_test::ReferenceAdmmConfig ref_cfg;
  ref_cfg.rho = rho;
  ref_cfg.theta = cfg.theta;
  ref_cfg.tau = cfg.tau;
  ref_cfg.min_active = cfg.min_active;
  ref_cfg.p_slow = cfg.oracle.p_slow;
  ref_cfg.p_fast = cfg.oracle.p_fast;
  qadmm_test::ReferenceAdmm ref(std::move(ref_probs), ref_cfg, run_seed);

  for (int r = 0; r < 200; ++r) {
    REQUIRE(sys.active_set() == ref.active());
    sys.run_round();
    ref.run_round();
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t m = 0; m < spec.dim; ++m) {
        REQUIRE(sys.nodes()[i].x[m] == ref.x()[i][m]);
        REQUIRE(sys.nodes()[i].u[m] == ref.u()[i][m]);
      }
    }
    for (std::size_t m = 0; m < spec.dim; ++m) {
      REQUIRE(sys.server().z[m] == ref.z()[m]);
    }
  }
}

TEST_CASE("inactive nodes are perfectly frozen") {
  const qadmm::SyntheticLassoSpec spec{/*dim=*/6, /*nodes=*/5, /*rows_per_node=*/4,
                                       /*sparsity=*/0.3, /*noise_std=*/0.1, /*seed=*/6};
  const qadmm::LassoInstance inst = qadmm::generate_lasso(spec);

  EngineConfig cfg;
  cfg.rho = 20.0;
  cfg.theta = 0.05;
  cfg.tau = 4;
  cfg.min_active = 1;
  cfg.compressor = stochastic_cfg(3);

  std::vector<std::shared_ptr<qadmm::LocalObjective>> probs;
  for (const auto& local : qadmm::make_lasso_locals(inst, cfg.rho)) probs.push_back(local);
  System sys(std::move(probs), cfg, 9);

  int frozen_checks = 0;
  for (int r = 0; r < 120; ++r) {
    const auto active = sys.active_set();
    std::vector<std::size_t> idle;
    for (std::size_t i = 0; i < 5; ++i) {
      if (!std::binary_search(active.begin(), active.end(), static_cast<std::uint16_t>(i))) {
        idle.push_back(i);
      }
    }
    std::vector<Vector> x_before, u_before, xm_before, um_before;
    for (std::size_t i : idle) {
      x_before.push_back(sys.nodes()[i].x);
      u_before.push_back(sys.nodes()[i].u);
      xm_before.push_back(sys.nodes()[i].x_channel.mirror);
      um_before.push_back(sys.nodes()[i].u_channel.mirror);
    }
    sys.run_round();
    for (std::size_t k = 0; k < idle.size(); ++k) {
      const auto& node = sys.nodes()[idle[k]];
      for (std::size_t m = 0; m < spec.dim; ++m) {
        REQUIRE(node.x[m] == x_before[k][m]);
        REQUIRE(node.u[m] == u_before[k][m]);
        REQUIRE(node.x_channel.mirror[m] == xm_before[k][m]);
        REQUIRE(node.u_channel.mirror[m] == um_before[k][m]);
      }
      ++frozen_checks;
    }
  }
  // The asynchronous schedule must actually have produced idle nodes.
  CHECK(frozen_checks > 50);
}

TEST_CASE("the engine maintains staleness and activity bounds under quantization") {
  const qadmm::SyntheticLassoSpec spec{/*dim=*/8, /*nodes=*/6, /*rows_per_node=*/5,
                                       /*sparsity=*/0.25, /*noise_std=*/0.1, /*seed=*/7};
  const qadmm::LassoInstance inst = qadmm::generate_lasso(spec);

  EngineConfig cfg;
  cfg.rho = 30.0;
  cfg.theta = 0.05;
  cfg.tau = 3;
  cfg.min_active = 2;
  cfg.compressor = stochastic_cfg(3);

  std::vector<std::shared_ptr<qadmm::LocalObjective>> probs;
  for (const auto& local : qadmm::make_lasso_locals(inst, cfg.rho)) probs.push_back(local);
  System sys(std::move(probs), cfg, 10);

  for (int r = 0; r < 400; ++r) {
    const auto rec = sys.run_round();
    REQUIRE(rec.active_count >= 2);
    for (int d : sys.server().staleness) {
      REQUIRE(d >= 0);
      REQUIRE(d <= cfg.tau - 1);
    }
    // Every committed quantized exchange stayed within its error bound.
    REQUIRE(rec.max_ef_gap_ratio <= 1.0 + 1e-12);
  }
  for (const auto& node : sys.nodes()) {
    REQUIRE(static_cast<long>(sys.round()) - node.last_active_round <=
            static_cast<long>(cfg.tau));
  }
}

TEST_CASE("identical seeds replay identical runs") {
  const qadmm::SyntheticLassoSpec spec{/*dim=*/8, /*nodes=*/4, /*rows_per_node=*/6,
                                       /*sparsity=*/0.25, /*noise_std=*/0.1, /*seed=*/8};
  const qadmm::LassoInstance inst = qadmm::generate_lasso(spec);

  EngineConfig cfg;
  cfg.rho = 25.0;
  cfg.theta = 0.05;
  cfg.tau = 3;
  cfg.min_active = 1;
  cfg.compressor = stochastic_cfg(3);

  std::vector<std::shared_ptr<qadmm::LocalObjective>> probs_a, probs_b;
  for (const auto& local : qadmm::make_lasso_locals(inst, cfg.rho)) probs_a.push_back(local);
  for (const auto& local : qadmm::make_lasso_locals(inst, cfg.rho)) probs_b.push_back(local);
  System a(std::move(probs_a), cfg, 55);
  System b(std::move(probs_b), cfg, 55);

  for (int r = 0; r < 50; ++r) {
    const auto ra = a.run_round();
    const auto rb = b.run_round();
    REQUIRE(ra.active_count == rb.active_count);
    REQUIRE(ra.uplink_bits == rb.uplink_bits);
    REQUIRE(ra.downlink_bits == rb.downlink_bits);
    for (std::size_t m = 0; m < spec.dim; ++m) {
      REQUIRE(a.server().z[m] == b.server().z[m]);
    }
  }
}

TEST_CASE("zero local objectives collapse to pure consensus") {
  // f = 0 makes the primal step x = z_hat - u exactly; after round 0 (z_hat
  // = 0, u = 0) everything stays at zero and all later messages are 1-bit
  // flags.
  std::vector<std::shared_ptr<qadmm::LocalObjective>> probs = {
      std::make_shared<ZeroObjective>(4), std::make_shared<ZeroObjective>(4),
      std::make_shared<ZeroObjective>(4)};
  EngineConfig cfg;
  cfg.rho = 1.0;
  cfg.theta = 0.2;
  cfg.tau = 1;
  cfg.min_active = 1;
  cfg.compressor = stochastic_cfg(3);
  System sys(std::move(probs), cfg, 12);

  const std::uint64_t init_up = sys.ledger().uplink_bits;
  const std::uint64_t init_down = sys.ledger().downlink_bits;
  for (int r = 0; r < 5; ++r) sys.run_round();
  for (const auto& node : sys.nodes()) {
    for (std::size_t m = 0; m < 4; ++m) {
      REQUIRE(node.x[m] == 0.0);
      REQUIRE(node.u[m] == 0.0);
    }
  }
  for (std::size_t m = 0; m < 4; ++m) REQUIRE(sys.server().z[m] == 0.0);
  // 5 rounds x 3 nodes x 2 uplink flags; 5 downlink flags but only 4
  // committed (the newest broadcast is still pending).
  CHECK(sys.ledger().uplink_bits == init_up + 5 * 3 * 2);
  CHECK(sys.ledger().downlink_bits == init_down + 5);
}

TEST_CASE("initialization charges every channel at full precision") {
  std::vector<std::shared_ptr<qadmm::LocalObjective>> probs = {
      std::make_shared<ZeroObjective>(10), std::make_shared<ZeroObjective>(10)};
  EngineConfig cfg;
  cfg.compressor = stochastic_cfg(3);
  cfg.compressor.full_precision_bits = 32;
  System sys(std::move(probs), cfg, 13);
  // Two nodes x two uplink channels, one downlink channel, 1 + 10*32 bits
  // each.
  CHECK(sys.ledger().uplink_bits == 4 * (1 + 10 * 32));
  CHECK(sys.ledger().downlink_bits == 1 * (1 + 10 * 32));
}
