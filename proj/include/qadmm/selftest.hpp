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
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "qadmm/bench.hpp"
#include "qadmm/config.hpp"
#include "qadmm/engine.hpp"
#include "qadmm/problems.hpp"
#include "qadmm/quantize.hpp"
#include "qadmm/rng.hpp"

namespace qadmm {

/// Compact built-in property checks, one PASS/FAIL line each. Returns the
/// number of failed checks (0 = all good). Kept fast (a few seconds); the
/// full test suite is far more thorough.
inline int run_selftest(std::ostream& os) {
  int failures = 0;
  const auto check = [&](const std::string& name, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    os << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) os << ": " << detail;
    os << "\n";
    if (!ok) ++failures;
    return ok;
  };

  check("rng determinism", [](std::string& detail) {
    RngStream a(42, "selftest");
    RngStream b(42, "selftest");
    for (int i = 0; i < 10000; ++i) {
      if (a.next_u64() != b.next_u64()) {
        detail = "streams diverged at draw " + std::to_string(i);
        return false;
      }
    }
    detail = "10000 identical draws";
    return true;
  });

  check("normal quantile symmetry and median", [](std::string& detail) {
    const double median = normal_quantile(0.5);
    const double sym = normal_quantile(0.975) + normal_quantile(0.025);
    detail = "quantile(0.5) = " + std::to_string(median);
    return std::fabs(median) < 1e-15 && std::fabs(sym) < 1e-13;
  });

  check("codec roundtrip and message size", [](std::string& detail) {
    RngStream rng(7, "selftest/codec");
    CompressorConfig cfg;
    cfg.bits_per_scalar = 3;
    Vector v(200);
    for (auto& e : v.data) e = rng.gaussian(0.0, 1.0);
    const QuantizedMessage msg = compress(cfg, v, rng);
    if (message_bits(msg) != 665) {
      detail = "message_bits = " + std::to_string(message_bits(msg)) + ", expected 665";
      return false;
    }
    const auto bytes = encode_message(msg);
    const QuantizedMessage back = decode_message(bytes, msg.length);
    const Vector d1 = decompress(msg);
    const Vector d2 = decompress(back);
    for (std::size_t m = 0; m < d1.size(); ++m) {
      if (d1[m] != d2[m]) {
        detail = "decoded values differ at element " + std::to_string(m);
        return false;
      }
    }
    detail = "200-element message, 665 bits, bit-exact through the codec";
    return true;
  });

  check("quantizer unbiasedness (Monte Carlo)", [](std::string& detail) {
    RngStream data_rng(11, "selftest/data");
    RngStream draw_rng(13, "selftest/draws");
    CompressorConfig cfg;
    cfg.bits_per_scalar = 3;
    Vector v(8);
    for (auto& e : v.data) e = data_rng.gaussian(0.0, 1.0);
    const int n = 20000;
    Vector mean(8, 0.0);
    for (int k = 0; k < n; ++k) {
      const Vector dec = decompress(compress(cfg, v, draw_rng));
      for (std::size_t m = 0; m < v.size(); ++m) mean[m] += dec[m];
    }
    const double nrm = max_norm(v);
    for (std::size_t m = 0; m < v.size(); ++m) {
      mean[m] /= n;
      // 5-sigma band on the two-point rounding distribution.
      const double w = std::fabs(v[m]) / nrm * 3.0;
      const double t = w - std::floor(w);
      const double se = (nrm / 3.0) * std::sqrt(t * (1.0 - t) / n);
      if (std::fabs(mean[m] - v[m]) > 5.0 * se + 1e-12 * nrm) {
        detail = "element " + std::to_string(m) + " off by " + std::to_string(mean[m] - v[m]);
        return false;
      }
    }
    detail = std::to_string(n) + " draws within 5 standard errors";
    return true;
  });

  check("error-feedback single-step bound", [](std::string& detail) {
    BitLedger ledger;
    CompressorConfig cfg;
    cfg.bits_per_scalar = 3;
    EfChannel ch(TensorId::x, 0, cfg, Direction::uplink, &ledger, RngStream(3, "selftest/ef"));
    ch.init_full_precision(Vector(4, 0.0));
    RngStream walk(5, "selftest/walk");
    Vector y(4, 0.0);
    for (int r = 0; r < 200; ++r) {
      for (auto& e : y.data) e += walk.gaussian(0.0, 0.1);
      const QuantizedMessage msg = ch.prepare_send(y, static_cast<std::uint32_t>(r));
      ch.commit(msg);
      double gap = 0.0;
      for (std::size_t m = 0; m < y.size(); ++m) {
        gap = std::max(gap, std::fabs(ch.mirror[m] - y[m]));
      }
      const double bound = msg.zero_flag ? 0.0 : msg.norm / 3.0;
      if (gap > bound * (1.0 + 1e-12)) {
        detail = "round " + std::to_string(r) + ": gap " + std::to_string(gap) + " exceeds " +
                 std::to_string(bound);
        return false;
      }
    }
    detail = "200 rounds, mirror gap never exceeded a single compression step";
    return true;
  });

  check("scheduler staleness bound", [](std::string& detail) {
    AsyncOracle oracle(AsyncOracle::Mode::fixed_split, 0.1, 0.8, 16, RngStream(9, "selftest/oracle"));
    std::vector<int> staleness(16, 0);
    std::vector<std::uint16_t> active;
    for (std::uint16_t i = 0; i < 16; ++i) active.push_back(i);
    const int tau = 3;
    for (int r = 0; r < 2000; ++r) {
      active = scheduler_step(active, staleness, oracle, tau, 1);
      for (int d : staleness) {
        if (d > tau - 1) {
          detail = "staleness counter reached " + std::to_string(d);
          return false;
        }
      }
      if (active.empty()) {
        detail = "empty active set";
        return false;
      }
    }
    detail = "2000 rounds, counters stayed below tau";
    return true;
  });

  check("identity run determinism", [](std::string& detail) {
    ExperimentConfig cfg;
    cfg.problem = "lasso";
    cfg.dim = 12;
    cfg.nodes = 4;
    cfg.rows_per_node = 8;
    cfg.rho = 50.0;
    cfg.theta = 0.05;
    cfg.tau = 2;
    cfg.iterations = 40;
    cfg.trials = 1;
    cfg.seed = 77;
    const TrialResult a = run_trial(cfg, 0);
    const TrialResult b = run_trial(cfg, 0);
    if (a.qadmm_rows.size() != b.qadmm_rows.size()) {
      detail = "row counts differ";
      return false;
    }
    for (std::size_t r = 0; r < a.qadmm_rows.size(); ++r) {
      if (a.qadmm_rows[r].lagrangian != b.qadmm_rows[r].lagrangian ||
          a.qadmm_rows[r].uplink_bits != b.qadmm_rows[r].uplink_bits) {
        detail = "trajectories diverged at iteration " + std::to_string(r);
        return false;
      }
    }
    detail = "two identical trials, bit-identical metrics";
    return true;
  });

  check("config round-trip", [](std::string& detail) {
    ExperimentConfig cfg;
    cfg.problem = "lasso";
    cfg.dim = 20;
    cfg.nodes = 4;
    cfg.rows_per_node = 10;
    cfg.theta = 0.25;
    cfg.tau = 3;
    cfg.seed = 123456789;
    const ExperimentConfig back = parse_config(serialize_config(cfg));
    detail = "serialize -> parse preserved every field";
    return back == cfg;
  });

  return failures;
}

}  // namespace qadmm
