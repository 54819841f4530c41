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

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qadmm/engine.hpp"
#include "qadmm/quantize.hpp"

namespace qadmm {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full experiment description. Parsed from a flat JSON document (schema
/// version 1); every key except the problem identity and its dimensions has
/// a documented default. See parse_config for the schema.
struct ExperimentConfig {
  int config_version = 1;
  std::string problem;  // "lasso" | "logistic"

  // Problem dimensions (required).
  std::size_t dim = 0;            // M
  std::size_t nodes = 0;          // N
  std::size_t rows_per_node = 0;  // H

  // Data generation.
  double sparsity = 0.2;          // lasso ground-truth density
  double noise_std = 0.1;         // lasso observation noise (std deviation)
  double l2_reg = 0.1;            // logistic l2 strength
  double label_noise_std = 0.1;   // logistic margin noise
  int gd_steps = 10;              // logistic inexact-solver step count K
  double gd_step_size = 0.05;     // logistic inexact-solver step size

  // Protocol parameters.
  double rho = 500.0;
  double theta = 0.1;  // consensus l1 weight (defaults to 0 for logistic)
  std::string compressor = "stochastic-maxnorm";  // | "identity"
  int q = 3;
  int full_precision_bits = 32;
  int tau = 1;
  int min_active = 1;
  std::string oracle = "fixed-split";  // | "per-call-bernoulli"
  double p_slow = 0.1;
  double p_fast = 0.8;

  // Harness parameters.
  std::size_t iterations = 500;
  double accuracy_target = 0.0;  // early stop when min(accuracy, z_accuracy) <= target; 0 = off
  double bits_target = 1e-10;    // threshold for the bits-to-target summary
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;

  CompressorKind compressor_kind() const {
    return (compressor == "identity") ? CompressorKind::identity
                                      : CompressorKind::stochastic_maxnorm;
  }

  CompressorConfig compressor_config() const {
    CompressorConfig c;
    c.kind = compressor_kind();
    c.bits_per_scalar = q;
    c.full_precision_bits = full_precision_bits;
    return c;
  }

  EngineConfig engine_config() const {
    EngineConfig e;
    e.rho = rho;
    e.theta = theta;
    e.tau = tau;
    e.min_active = min_active;
    e.compressor = compressor_config();
    e.oracle.mode = (oracle == "per-call-bernoulli") ? AsyncOracle::Mode::per_call_bernoulli
                                                     : AsyncOracle::Mode::fixed_split;
    e.oracle.p_slow = p_slow;
    e.oracle.p_fast = p_fast;
    return e;
  }

  void validate() const {
    const auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
    if (config_version != 1) fail("key 'config_version': only version 1 is supported");
    if (problem != "lasso" && problem != "logistic") {
      fail("key 'problem': must be \"lasso\" or \"logistic\", got \"" + problem + "\"");
    }
    if (dim < 1) fail("key 'dim': must be >= 1");
    if (nodes < 1 || nodes > 0xFFFE) fail("key 'nodes': must lie in [1, 65534]");
    if (rows_per_node < 1) fail("key 'rows_per_node': must be >= 1");
    if (sparsity < 0.0 || sparsity > 1.0) fail("key 'sparsity': must lie in [0, 1]");
    if (noise_std < 0.0) fail("key 'noise_std': must be >= 0");
    if (l2_reg < 0.0) fail("key 'l2_reg': must be >= 0");
    if (label_noise_std < 0.0) fail("key 'label_noise_std': must be >= 0");
    if (gd_steps < 1) fail("key 'gd_steps': must be >= 1");
    if (gd_step_size <= 0.0) fail("key 'gd_step_size': must be > 0");
    if (rho <= 0.0) fail("key 'rho': must be > 0");
    if (theta < 0.0) fail("key 'theta': must be >= 0");
    if (problem == "logistic" && theta != 0.0) {
      fail("key 'theta': must be 0 for the logistic problem (its reference optimum is unregularized)");
    }
    if (compressor != "stochastic-maxnorm" && compressor != "identity") {
      fail("key 'compressor': must be \"stochastic-maxnorm\" or \"identity\", got \"" + compressor +
           "\"");
    }
    if (q < 2 || q > 24) {
      fail("key 'q': must lie in [2, 24] (q = 1 leaves zero quantization levels)");
    }
    if (full_precision_bits < 1 || full_precision_bits > 64) {
      fail("key 'full_precision_bits': must lie in [1, 64]");
    }
    if (tau < 1) fail("key 'tau': must be >= 1");
    if (min_active < 1 || static_cast<std::size_t>(min_active) > nodes) {
      fail("key 'min_active': must lie in [1, nodes]");
    }
    if (oracle != "fixed-split" && oracle != "per-call-bernoulli") {
      fail("key 'oracle': must be \"fixed-split\" or \"per-call-bernoulli\", got \"" + oracle +
           "\"");
    }
    if (p_slow < 0.0 || p_slow > 1.0) fail("key 'p_slow': must lie in [0, 1]");
    if (p_fast < 0.0 || p_fast > 1.0) fail("key 'p_fast': must lie in [0, 1]");
    if (iterations < 1) fail("key 'iterations': must be >= 1");
    if (accuracy_target < 0.0) fail("key 'accuracy_target': must be >= 0");
    if (!(bits_target > 0.0)) fail("key 'bits_target': must be > 0");
    if (trials < 1) fail("key 'trials': must be >= 1");
    if (output_dir.empty()) fail("key 'output_dir': must not be empty");
  }
};

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline double take_number(ordered_json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ConfigError(std::string("config: key '") + key + "': expected a number");
  const double v = it->get<double>();
  j.erase(it);
  return v;
}

inline std::int64_t take_integer(ordered_json& j, const char* key, std::int64_t fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer() && !it->is_number_unsigned()) {
    throw ConfigError(std::string("config: key '") + key + "': expected an integer");
  }
  const std::int64_t v = it->get<std::int64_t>();
  j.erase(it);
  return v;
}

inline std::uint64_t take_u64(ordered_json& j, const char* key, std::uint64_t fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
    throw ConfigError(std::string("config: key '") + key + "': expected a non-negative integer");
  }
  const std::uint64_t v = it->get<std::uint64_t>();
  j.erase(it);
  return v;
}

inline std::string take_string(ordered_json& j, const char* key, const std::string& fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_string()) throw ConfigError(std::string("config: key '") + key + "': expected a string");
  std::string v = it->get<std::string>();
  j.erase(it);
  return v;
}

inline std::size_t take_count(ordered_json& j, const char* key, std::int64_t fallback,
                              bool required = false) {
  if (required && j.find(key) == j.end()) {
    throw ConfigError(std::string("config: missing required key '") + key + "'");
  }
  const std::int64_t v = take_integer(j, key, fallback);
  if (v < 0) throw ConfigError(std::string("config: key '") + key + "': must be >= 0");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

/// Parses a flat JSON config document (schema version 1). Required keys:
/// problem, dim, nodes, rows_per_node. Everything else defaults as in
/// ExperimentConfig (theta defaults to 0 when problem = "logistic").
/// Unknown keys, wrong types, and out-of-range values are rejected with the
/// offending key named.
inline ExperimentConfig parse_config(const std::string& text) {
  detail::ordered_json j;
  try {
    j = detail::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: malformed document: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top-level value must be an object");

  ExperimentConfig cfg;
  cfg.config_version = static_cast<int>(detail::take_integer(j, "config_version", 1));
  if (j.find("problem") == j.end()) throw ConfigError("config: missing required key 'problem'");
  cfg.problem = detail::take_string(j, "problem", "");
  cfg.dim = detail::take_count(j, "dim", 0, /*required=*/true);
  cfg.nodes = detail::take_count(j, "nodes", 0, /*required=*/true);
  cfg.rows_per_node = detail::take_count(j, "rows_per_node", 0, /*required=*/true);

  cfg.sparsity = detail::take_number(j, "sparsity", cfg.sparsity);
  cfg.noise_std = detail::take_number(j, "noise_std", cfg.noise_std);
  cfg.l2_reg = detail::take_number(j, "l2_reg", cfg.l2_reg);
  cfg.label_noise_std = detail::take_number(j, "label_noise_std", cfg.label_noise_std);
  cfg.gd_steps = static_cast<int>(detail::take_integer(j, "gd_steps", cfg.gd_steps));
  cfg.gd_step_size = detail::take_number(j, "gd_step_size", cfg.gd_step_size);

  cfg.rho = detail::take_number(j, "rho", cfg.rho);
  cfg.theta = detail::take_number(j, "theta", cfg.problem == "logistic" ? 0.0 : cfg.theta);
  cfg.compressor = detail::take_string(j, "compressor", cfg.compressor);
  cfg.q = static_cast<int>(detail::take_integer(j, "q", cfg.q));
  cfg.full_precision_bits =
      static_cast<int>(detail::take_integer(j, "full_precision_bits", cfg.full_precision_bits));
  cfg.tau = static_cast<int>(detail::take_integer(j, "tau", cfg.tau));
  cfg.min_active = static_cast<int>(detail::take_integer(j, "min_active", cfg.min_active));
  cfg.oracle = detail::take_string(j, "oracle", cfg.oracle);
  cfg.p_slow = detail::take_number(j, "p_slow", cfg.p_slow);
  cfg.p_fast = detail::take_number(j, "p_fast", cfg.p_fast);

  cfg.iterations = detail::take_count(j, "iterations", static_cast<std::int64_t>(cfg.iterations));
  cfg.accuracy_target = detail::take_number(j, "accuracy_target", cfg.accuracy_target);
  cfg.bits_target = detail::take_number(j, "bits_target", cfg.bits_target);
  cfg.trials = detail::take_count(j, "trials", static_cast<std::int64_t>(cfg.trials));
  cfg.seed = detail::take_u64(j, "seed", cfg.seed);
  cfg.output_dir = detail::take_string(j, "output_dir", cfg.output_dir);

  if (!j.empty()) {
    throw ConfigError("config: unknown key '" + j.begin().key() + "'");
  }
  cfg.validate();
  return cfg;
}

/// Serializes a config with every key explicit, in schema order. The output
/// parses back (parse_config) to an equal config.
inline std::string serialize_config(const ExperimentConfig& cfg) {
  detail::ordered_json j;
  j["config_version"] = cfg.config_version;
  j["problem"] = cfg.problem;
  j["dim"] = cfg.dim;
  j["nodes"] = cfg.nodes;
  j["rows_per_node"] = cfg.rows_per_node;
  j["sparsity"] = cfg.sparsity;
  j["noise_std"] = cfg.noise_std;
  j["l2_reg"] = cfg.l2_reg;
  j["label_noise_std"] = cfg.label_noise_std;
  j["gd_steps"] = cfg.gd_steps;
  j["gd_step_size"] = cfg.gd_step_size;
  j["rho"] = cfg.rho;
  j["theta"] = cfg.theta;
  j["compressor"] = cfg.compressor;
  j["q"] = cfg.q;
  j["full_precision_bits"] = cfg.full_precision_bits;
  j["tau"] = cfg.tau;
  j["min_active"] = cfg.min_active;
  j["oracle"] = cfg.oracle;
  j["p_slow"] = cfg.p_slow;
  j["p_fast"] = cfg.p_fast;
  j["iterations"] = cfg.iterations;
  j["accuracy_target"] = cfg.accuracy_target;
  j["bits_target"] = cfg.bits_target;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  return j.dump(2) + "\n";
}

}  // namespace qadmm
