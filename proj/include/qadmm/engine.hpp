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
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qadmm/eflink.hpp"
#include "qadmm/linalg.hpp"
#include "qadmm/problems.hpp"
#include "qadmm/quantize.hpp"
#include "qadmm/rng.hpp"

namespace qadmm {

/// Activity oracle: each call returns the subset of nodes that would have an
/// update ready this round, before any staleness forcing. Two modes:
///  - fixed_split: at construction the nodes are split uniformly at random
///    into a slow half (floor(N/2) nodes, selection probability p_slow) and a
///    fast half (p_fast); each call draws one Bernoulli per node.
///  - per_call_bernoulli: group membership is redrawn on every call (one
///    uniform for the group, one for selection, per node, in index order).
/// Deterministic given the stream state; nodes are returned in ascending id
/// order.
class AsyncOracle {
 public:
  enum class Mode { fixed_split, per_call_bernoulli };

  AsyncOracle(Mode mode, double p_slow, double p_fast, std::size_t n, RngStream rng)
      : mode_(mode), p_slow_(p_slow), p_fast_(p_fast), n_(n), rng_(std::move(rng)),
        slow_(n, false) {
    if (p_slow < 0.0 || p_slow > 1.0 || p_fast < 0.0 || p_fast > 1.0) {
      throw std::invalid_argument("AsyncOracle: selection probabilities must lie in [0, 1]");
    }
    if (n == 0) throw std::invalid_argument("AsyncOracle: need at least one node");
    if (mode_ == Mode::fixed_split) {
      // Uniform split without replacement: partial Fisher-Yates marking the
      // first floor(n/2) slots of a shuffled index list as slow.
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      const std::size_t n_slow = n / 2;
      for (std::size_t j = 0; j < n_slow; ++j) {
        const std::size_t k = j + static_cast<std::size_t>(rng_.below(n - j));
        std::swap(order[j], order[k]);
        slow_[order[j]] = true;
      }
    }
  }

  std::size_t node_count() const noexcept { return n_; }
  const std::vector<bool>& slow_split() const noexcept { return slow_; }

  std::vector<std::uint16_t> draw() {
    std::vector<std::uint16_t> out;
    for (std::size_t i = 0; i < n_; ++i) {
      bool is_slow;
      if (mode_ == Mode::fixed_split) {
        is_slow = slow_[i];
      } else {
        is_slow = rng_.uniform() < 0.5;
      }
      const double p = is_slow ? p_slow_ : p_fast_;
      if (rng_.uniform() < p) out.push_back(static_cast<std::uint16_t>(i));
    }
    return out;
  }

 private:
  Mode mode_;
  double p_slow_;
  double p_fast_;
  std::size_t n_;
  RngStream rng_;
  std::vector<bool> slow_;
};

/// Computes the next active set and advances the staleness counters.
/// `staleness[i]` counts rounds since node i was last active. Order of
/// effects: the oracle is drawn first, then counters are reset (members of
/// `current_active`) or incremented (everyone else), and finally every node
/// whose counter reached tau - 1 is forced into the result; the result is
/// topped up with redraws until it holds at least max(min_active, 1) nodes.
/// Consequences: counters never exceed tau - 1, no node's update ever grows
/// older than tau rounds, and tau = 1 forces every node every round.
inline std::vector<std::uint16_t> scheduler_step(const std::vector<std::uint16_t>& current_active,
                                                 std::vector<int>& staleness, AsyncOracle& oracle,
                                                 int tau, int min_active) {
  if (tau < 1) throw std::invalid_argument("scheduler_step: tau must be >= 1");
  const std::size_t n = staleness.size();
  std::vector<char> active_now(n, 0);
  for (std::uint16_t i : current_active) active_now[i] = 1;

  std::set<std::uint16_t> next;
  for (std::uint16_t i : oracle.draw()) next.insert(i);

  for (std::size_t i = 0; i < n; ++i) {
    staleness[i] = active_now[i] ? 0 : staleness[i] + 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (staleness[i] == tau - 1) next.insert(static_cast<std::uint16_t>(i));
  }

  const std::size_t barrier = static_cast<std::size_t>(std::max(min_active, 1));
  int redraws = 0;
  while (next.size() < barrier) {
    if (++redraws > 100000) {
      throw std::runtime_error(
          "scheduler_step: oracle failed to fill the partial barrier after 100000 redraws "
          "(selection probabilities too small for min_active = " +
          std::to_string(min_active) + ")");
    }
    for (std::uint16_t i : oracle.draw()) next.insert(i);
  }
  return {next.begin(), next.end()};
}

/// Per-node protocol state: the true iterates plus the two uplink channels
/// whose mirrors are the server's estimates of x and u. Inactive rounds
/// leave x, u, and both mirrors untouched.
struct NodeState {
  std::uint16_t id = 0;
  Vector x;
  Vector u;
  EfChannel x_channel;
  EfChannel u_channel;
  std::shared_ptr<LocalObjective> problem;
  long last_active_round = -1;
};

/// Server-side state. Node estimates x_hat/u_hat live in the node channels'
/// mirrors (in this in-process simulation one channel object stands for both
/// endpoints, so sender/receiver bit-identity holds by construction). The
/// downlink z_channel's mirror is the z_hat every node reads.
struct ServerState {
  Vector z;
  EfChannel z_channel;
  std::vector<int> staleness;               // d_i, rounds since last active
  std::vector<std::uint16_t> active_set;    // A_r for the upcoming round
  double rho = 0.0;
  L1Regularizer regularizer;
};

struct OracleConfig {
  AsyncOracle::Mode mode = AsyncOracle::Mode::fixed_split;
  double p_slow = 0.1;
  double p_fast = 0.8;
};

struct EngineConfig {
  double rho = 500.0;
  double theta = 0.1;
  int tau = 1;        // max staleness; 1 = synchronous
  int min_active = 1; // partial barrier P
  CompressorConfig compressor;
  OracleConfig oracle;
};

/// What one round reports back to the harness.
struct RoundRecord {
  std::uint32_t iteration = 0;
  std::size_t active_count = 0;
  std::uint64_t uplink_bits = 0;    // cumulative, including initialization
  std::uint64_t downlink_bits = 0;  // cumulative, including initialization
  /// Max over this round's committed exchanges of
  /// ||mirror - truth||_max / (message norm / S); lossless exchanges
  /// contribute 0 when exact and +inf if they ever disagree bitwise.
  double max_ef_gap_ratio = 0.0;
  int step_size_halvings = 0;
};

/// The full protocol simulation: N nodes, one server, compressed links, and
/// the bounded-delay partial-barrier scheduler, advanced in deterministic
/// rounds.
///
/// Round structure (run_round): commit the pending downlink at all nodes;
/// primal then dual updates at active nodes; compress-and-commit each active
/// node's x and u uplinks; draw the next active set and advance staleness
/// counters; server consensus update from the mirrors; prepare (but do not
/// commit) the new downlink. The downlink therefore reaches nodes at the
/// start of the next round, exactly one broadcast per round.
class System {
 public:
  System(std::vector<std::shared_ptr<LocalObjective>> problems, EngineConfig cfg,
         std::uint64_t run_seed)
      : cfg_(cfg),
        oracle_(cfg.oracle.mode, cfg.oracle.p_slow, cfg.oracle.p_fast, problems.size(),
                RngStream(run_seed, "oracle")) {
    if (problems.empty()) throw std::invalid_argument("System: need at least one node");
    if (problems.size() > 0xFFFE) throw std::invalid_argument("System: too many nodes");
    if (cfg.rho <= 0.0) throw std::invalid_argument("System: rho must be positive");
    if (cfg.tau < 1) throw std::invalid_argument("System: tau must be >= 1");
    if (cfg.min_active < 1 || static_cast<std::size_t>(cfg.min_active) > problems.size()) {
      throw std::invalid_argument("System: min_active must lie in [1, node count]");
    }
    cfg.compressor.validate();

    const std::size_t n = problems.size();
    const std::size_t dim = problems[0]->dim();
    nodes_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (problems[i]->dim() != dim) {
        throw std::invalid_argument("System: node " + std::to_string(i) +
                                    " dimension does not match node 0");
      }
      NodeState node;
      node.id = static_cast<std::uint16_t>(i);
      node.x = Vector(dim, 0.0);
      node.u = Vector(dim, 0.0);
      node.problem = std::move(problems[i]);
      node.x_channel = EfChannel(TensorId::x, node.id, cfg.compressor, Direction::uplink, &ledger_,
                                 RngStream(run_seed, "chan/x/" + std::to_string(i)));
      node.u_channel = EfChannel(TensorId::u, node.id, cfg.compressor, Direction::uplink, &ledger_,
                                 RngStream(run_seed, "chan/u/" + std::to_string(i)));
      nodes_.push_back(std::move(node));
    }
    server_.rho = cfg.rho;
    server_.regularizer = L1Regularizer(cfg.theta);
    server_.staleness.assign(n, 0);
    server_.z_channel = EfChannel(TensorId::z, kServerSender, cfg.compressor, Direction::downlink,
                                  &ledger_, RngStream(run_seed, "chan/z"));
    initialize();
  }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t dim() const noexcept { return nodes_[0].x.size(); }
  const std::vector<NodeState>& nodes() const noexcept { return nodes_; }
  const ServerState& server() const noexcept { return server_; }
  const BitLedger& ledger() const noexcept { return ledger_; }
  std::uint32_t round() const noexcept { return round_; }
  const std::vector<std::uint16_t>& active_set() const noexcept { return server_.active_set; }
  const EngineConfig& config() const noexcept { return cfg_; }

  /// Executes one full round and returns its record. Deterministic given the
  /// construction seed.
  RoundRecord run_round() {
    RoundRecord rec;
    rec.iteration = round_;

    // 1. Downlink from the previous round reaches every node (the z_channel
    //    mirror is the z_hat all nodes share). The server's z has not moved
    //    since the message was prepared, so the mirror gap after commit is
    //    this message's compression error alone.
    if (pending_downlink_.has_value()) {
      server_.z_channel.commit(*pending_downlink_);
      track_gap(rec, server_.z_channel.mirror, server_.z, *pending_downlink_);
      pending_downlink_.reset();
    }
    const Vector& z_hat = server_.z_channel.mirror;

    // 2. Active nodes: primal update, dual update, then compress-and-commit
    //    both uplinks. One channel object per tensor serves both endpoints,
    //    so a single commit realizes the sender+receiver mirror update.
    rec.active_count = server_.active_set.size();
    for (std::uint16_t i : server_.active_set) {
      NodeState& node = nodes_[i];
      SolveDiag diag;
      node.x = node.problem->primal_update(z_hat, node.u, cfg_.rho, node.x, &diag);
      rec.step_size_halvings += diag.step_size_halvings;
      for (std::size_t m = 0; m < node.u.size(); ++m) node.u[m] += node.x[m] - z_hat[m];

      const QuantizedMessage mx = node.x_channel.prepare_send(node.x, round_);
      node.x_channel.commit(mx);
      track_gap(rec, node.x_channel.mirror, node.x, mx);
      const QuantizedMessage mu = node.u_channel.prepare_send(node.u, round_);
      node.u_channel.commit(mu);
      track_gap(rec, node.u_channel.mirror, node.u, mu);
      node.last_active_round = round_;
    }

    // 3. Next active set is drawn before the server update; staleness
    //    counters advance against the round just executed.
    std::vector<std::uint16_t> next_active =
        scheduler_step(server_.active_set, server_.staleness, oracle_, cfg_.tau, cfg_.min_active);

    // 4. Server consensus from the mirrored estimates.
    server_.z = consensus_from_mirrors();

    // 5. New downlink is prepared now and committed at the top of the next
    //    round (broadcast latency of one round).
    pending_downlink_ = server_.z_channel.prepare_send(server_.z, round_);

    server_.active_set = std::move(next_active);
    rec.uplink_bits = ledger_.uplink_bits;
    rec.downlink_bits = ledger_.downlink_bits;
    ++round_;
    return rec;
  }

 private:
  /// Full-precision initialization exchange: x(0) = u(0) = 0 at every node,
  /// z(0) from a consensus update over those values; every channel's mirror
  /// is charged at full_precision_bits per scalar.
  void initialize() {
    for (NodeState& node : nodes_) {
      node.x_channel.init_full_precision(node.x);
      node.u_channel.init_full_precision(node.u);
    }
    server_.z = consensus_from_mirrors();
    server_.z_channel.init_full_precision(server_.z);

    // First active set: an oracle draw plus any nodes already at the forcing
    // threshold (with fresh counters that is all of them when tau = 1),
    // topped up to the partial barrier. No staleness bookkeeping yet.
    std::set<std::uint16_t> first;
    for (std::uint16_t i : oracle_.draw()) first.insert(i);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (server_.staleness[i] == cfg_.tau - 1) first.insert(static_cast<std::uint16_t>(i));
    }
    const std::size_t barrier = static_cast<std::size_t>(std::max(cfg_.min_active, 1));
    int redraws = 0;
    while (first.size() < barrier) {
      if (++redraws > 100000) {
        throw std::runtime_error("System: oracle failed to fill the initial active set");
      }
      for (std::uint16_t i : oracle_.draw()) first.insert(i);
    }
    server_.active_set.assign(first.begin(), first.end());
  }

  Vector consensus_from_mirrors() const {
    const std::size_t dim = nodes_[0].x.size();
    Vector mean(dim, 0.0);
    for (const NodeState& node : nodes_) {
      for (std::size_t m = 0; m < dim; ++m) {
        mean[m] += node.x_channel.mirror[m] + node.u_channel.mirror[m];
      }
    }
    const double inv_n = 1.0 / static_cast<double>(nodes_.size());
    for (std::size_t m = 0; m < dim; ++m) mean[m] *= inv_n;
    return server_.regularizer.prox(mean, server_.rho * static_cast<double>(nodes_.size()));
  }

  /// Ratio of the post-commit mirror gap to the single-exchange error bound
  /// norm/S of the message just applied. Lossless messages (identity or
  /// zero_flag) must leave no gap at all and count as +inf if they do.
  static void track_gap(RoundRecord& rec, const Vector& mirror, const Vector& truth,
                        const QuantizedMessage& msg) {
    double gap = 0.0;
    for (std::size_t m = 0; m < mirror.size(); ++m) {
      const double d = std::fabs(mirror[m] - truth[m]);
      if (d > gap) gap = d;
    }
    double ratio;
    if (msg.zero_flag || msg.kind == CompressorKind::identity) {
      ratio = (gap == 0.0) ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      const double s_levels = static_cast<double>((1 << (msg.bits_per_scalar - 1)) - 1);
      ratio = gap / (msg.norm / s_levels);
    }
    if (ratio > rec.max_ef_gap_ratio) rec.max_ef_gap_ratio = ratio;
  }

  EngineConfig cfg_;
  BitLedger ledger_;
  std::vector<NodeState> nodes_;
  ServerState server_;
  AsyncOracle oracle_;
  std::optional<QuantizedMessage> pending_downlink_;
  std::uint32_t round_ = 0;
};

}  // namespace qadmm
