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
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "qadmm/linalg.hpp"
#include "qadmm/rng.hpp"

namespace qadmm {

enum class CompressorKind : std::uint8_t {
  stochastic_maxnorm = 0,  // randomized multi-level quantizer, unbiased
  identity = 1,            // lossless full-precision baseline
};

enum class TensorId : std::uint8_t { x = 0, u = 1, z = 2 };

/// sender_id value that marks the server as the message origin.
constexpr std::uint16_t kServerSender = 0xFFFF;

/// Static description of a compressor. For the stochastic kind,
/// bits_per_scalar = q encodes each element as 1 sign bit plus q-1 level bits
/// for an integer level in [0, S] with S = 2^(q-1) - 1 grid intervals on
/// [0, 1]. full_precision_bits is the per-scalar width charged for identity
/// (uncompressed) traffic and for the full-precision initialization round.
struct CompressorConfig {
  CompressorKind kind = CompressorKind::stochastic_maxnorm;
  int bits_per_scalar = 3;
  int full_precision_bits = 32;

  /// Number of quantization intervals S = 2^(q-1) - 1.
  int levels() const noexcept { return (1 << (bits_per_scalar - 1)) - 1; }

  void validate() const {
    if (kind == CompressorKind::stochastic_maxnorm) {
      if (bits_per_scalar < 2 || bits_per_scalar > 24) {
        throw std::invalid_argument(
            "CompressorConfig: bits_per_scalar must be in [2, 24]; got " +
            std::to_string(bits_per_scalar) + " (q = 1 leaves zero quantization levels)");
      }
    }
    if (full_precision_bits < 1 || full_precision_bits > 64) {
      throw std::invalid_argument("CompressorConfig: full_precision_bits must be in [1, 64]");
    }
  }
};

/// One compressed tensor transmission.
///
/// Serialized layout (version-stable, used by golden-file tests):
///   [1 byte kind/flags][4 bytes iteration][2 bytes sender]
///   [1 byte tensor_id][8 bytes norm][packed codes]
/// All multi-byte fields little-endian. The flags byte holds: bit 0 = kind
/// (0 stochastic, 1 identity), bit 1 = zero_flag, bits 2..6 = bits_per_scalar
/// (0 for identity), bit 7 reserved as 0. The element count is not carried on
/// the wire; both endpoints know the tensor dimension.
///
/// Packed codes, stochastic kind: element m occupies bits [m*q, (m+1)*q) of
/// the code stream, least-significant bit of byte m*q/8 first. Within an
/// element, bit 0 is the sign (1 = negative) and bits 1..q-1 the level,
/// least-significant first. Pad bits in the final byte are zero. Identity
/// kind: 8-byte little-endian doubles, element order. zero_flag messages
/// carry no codes and decode to the zero vector.
struct QuantizedMessage {
  CompressorKind kind = CompressorKind::stochastic_maxnorm;
  bool zero_flag = false;
  std::uint8_t bits_per_scalar = 0;     // q; 0 for identity kind
  int full_precision_bits = 32;         // accounting width for identity kind
  TensorId tensor_id = TensorId::x;
  std::uint16_t sender_id = 0;
  std::uint32_t iteration = 0;
  std::uint32_t length = 0;             // element count M
  double norm = 0.0;                    // max-norm of the compressed input
  std::vector<std::uint8_t> codes;
};

/// Cumulative bit counters, split by direction. Incremented once per message
/// by its accounted payload size (zero_flag bit + norm bits + code bits;
/// framing headers excluded). Single-owner; not safe for concurrent use.
struct BitLedger {
  std::uint64_t uplink_bits = 0;
  std::uint64_t downlink_bits = 0;

  std::uint64_t total() const noexcept { return uplink_bits + downlink_bits; }
};

enum class Direction { uplink, downlink };

/// Accounted size of a message in bits: stochastic kind charges
/// 1 (zero flag) + 64 (norm) + M*q when not zero-flagged; identity charges
/// 1 + M*full_precision_bits; any zero-flagged message charges exactly 1.
inline std::uint64_t message_bits(const QuantizedMessage& msg) {
  if (msg.zero_flag) return 1;
  if (msg.kind == CompressorKind::identity) {
    return 1 + static_cast<std::uint64_t>(msg.length) * static_cast<std::uint64_t>(msg.full_precision_bits);
  }
  return 1 + 64 + static_cast<std::uint64_t>(msg.length) * static_cast<std::uint64_t>(msg.bits_per_scalar);
}

namespace detail {

inline void set_code_bits(std::vector<std::uint8_t>& buf, std::size_t bit_offset,
                          std::uint32_t value, int width) {
  for (int b = 0; b < width; ++b) {
    if (value & (1u << b)) {
      buf[(bit_offset + b) / 8] |= static_cast<std::uint8_t>(1u << ((bit_offset + b) % 8));
    }
  }
}

inline std::uint32_t get_code_bits(const std::vector<std::uint8_t>& buf, std::size_t bit_offset,
                                   int width) {
  std::uint32_t value = 0;
  for (int b = 0; b < width; ++b) {
    if (buf[(bit_offset + b) / 8] & (1u << ((bit_offset + b) % 8))) value |= 1u << b;
  }
  return value;
}

}  // namespace detail

/// Compresses `delta` under `cfg`. Stochastic kind: each element's magnitude
/// is normalized by the max-norm to w in [0, 1], assigned grid interval
/// p = min(floor(w*S), S-1), and rounded up to level p+1 with probability
/// w*S - p (else down to p), which makes the decoded value an unbiased
/// estimate of the element. One uniform draw is consumed per element, always.
/// Identity kind stores every element verbatim and consumes no randomness.
/// An exactly-zero input produces a zero_flag message for either kind.
inline QuantizedMessage compress(const CompressorConfig& cfg, const Vector& delta, RngStream& rng) {
  cfg.validate();
  QuantizedMessage msg;
  msg.kind = cfg.kind;
  msg.full_precision_bits = cfg.full_precision_bits;
  msg.length = static_cast<std::uint32_t>(delta.size());

  const double nrm = max_norm(delta);
  if (nrm == 0.0) {
    msg.zero_flag = true;
    msg.bits_per_scalar =
        (cfg.kind == CompressorKind::stochastic_maxnorm) ? static_cast<std::uint8_t>(cfg.bits_per_scalar) : 0;
    return msg;
  }
  msg.norm = nrm;

  if (cfg.kind == CompressorKind::identity) {
    msg.codes.resize(delta.size() * 8);
    for (std::size_t m = 0; m < delta.size(); ++m) {
      std::uint64_t word;
      std::memcpy(&word, &delta[m], 8);
      for (int b = 0; b < 8; ++b) {
        msg.codes[m * 8 + b] = static_cast<std::uint8_t>(word >> (8 * b));
      }
    }
    return msg;
  }

  const int q = cfg.bits_per_scalar;
  const int s_levels = cfg.levels();
  msg.bits_per_scalar = static_cast<std::uint8_t>(q);
  msg.codes.assign((delta.size() * static_cast<std::size_t>(q) + 7) / 8, 0);
  for (std::size_t m = 0; m < delta.size(); ++m) {
    const double x = delta[m];
    const bool negative = x < 0.0;  // sign(0) encodes as +
    const double w = std::fabs(x) / nrm;
    const double ws = w * s_levels;
    int p = static_cast<int>(ws);
    if (p > s_levels - 1) p = s_levels - 1;
    const double t = ws - p;
    const std::uint32_t level = (rng.uniform() < t) ? static_cast<std::uint32_t>(p + 1)
                                                    : static_cast<std::uint32_t>(p);
    const std::uint32_t code = (negative ? 1u : 0u) | (level << 1);
    detail::set_code_bits(msg.codes, m * static_cast<std::size_t>(q), code, q);
  }
  return msg;
}

/// Reconstructs the transmitted vector: zero_flag messages decode to zeros,
/// identity messages verbatim, stochastic messages to
/// norm * sign(m) * (level(m)/S) per element.
inline Vector decompress(const QuantizedMessage& msg) {
  Vector out(msg.length, 0.0);
  if (msg.zero_flag) return out;

  if (msg.kind == CompressorKind::identity) {
    if (msg.codes.size() != static_cast<std::size_t>(msg.length) * 8) {
      throw std::runtime_error("decompress: identity payload holds " +
                               std::to_string(msg.codes.size()) + " bytes, expected " +
                               std::to_string(static_cast<std::size_t>(msg.length) * 8));
    }
    for (std::uint32_t m = 0; m < msg.length; ++m) {
      std::uint64_t word = 0;
      for (int b = 0; b < 8; ++b) {
        word |= static_cast<std::uint64_t>(msg.codes[m * 8 + b]) << (8 * b);
      }
      std::memcpy(&out[m], &word, 8);
    }
    return out;
  }

  const int q = msg.bits_per_scalar;
  if (q < 2 || q > 24) {
    throw std::runtime_error("decompress: stochastic message has invalid bits_per_scalar " +
                             std::to_string(q));
  }
  const std::size_t need = (static_cast<std::size_t>(msg.length) * q + 7) / 8;
  if (msg.codes.size() != need) {
    throw std::runtime_error("decompress: code buffer holds " + std::to_string(msg.codes.size()) +
                             " bytes, expected " + std::to_string(need) + " for " +
                             std::to_string(msg.length) + " elements");
  }
  const double s_levels = static_cast<double>((1 << (q - 1)) - 1);
  for (std::uint32_t m = 0; m < msg.length; ++m) {
    const std::uint32_t code = detail::get_code_bits(msg.codes, static_cast<std::size_t>(m) * q, q);
    const std::uint32_t level = code >> 1;
    double value = msg.norm * (static_cast<double>(level) / s_levels);
    if (code & 1u) value = -value;
    out[m] = value;
  }
  return out;
}

/// Serializes a message to the documented byte layout.
inline std::vector<std::uint8_t> encode_message(const QuantizedMessage& msg) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + msg.codes.size());
  std::uint8_t flags = static_cast<std::uint8_t>(msg.kind) & 1u;
  if (msg.zero_flag) flags |= 2u;
  flags |= static_cast<std::uint8_t>((msg.bits_per_scalar & 0x1Fu) << 2);
  out.push_back(flags);
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(msg.iteration >> (8 * b)));
  for (int b = 0; b < 2; ++b) out.push_back(static_cast<std::uint8_t>(msg.sender_id >> (8 * b)));
  out.push_back(static_cast<std::uint8_t>(msg.tensor_id));
  std::uint64_t norm_bits;
  std::memcpy(&norm_bits, &msg.norm, 8);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(norm_bits >> (8 * b)));
  out.insert(out.end(), msg.codes.begin(), msg.codes.end());
  return out;
}

/// Parses the documented byte layout back into a message. The element count
/// is not on the wire; callers pass the dimension they expect, and any
/// mismatch with the payload (including nonzero pad bits in the final code
/// byte) is a decode failure.
inline QuantizedMessage decode_message(const std::vector<std::uint8_t>& bytes, std::uint32_t length,
                                       int full_precision_bits = 32) {
  constexpr std::size_t kHeader = 16;
  if (bytes.size() < kHeader) {
    throw std::runtime_error("decode_message: truncated header (" + std::to_string(bytes.size()) +
                             " bytes)");
  }
  QuantizedMessage msg;
  const std::uint8_t flags = bytes[0];
  msg.kind = static_cast<CompressorKind>(flags & 1u);
  msg.zero_flag = (flags & 2u) != 0;
  msg.bits_per_scalar = static_cast<std::uint8_t>((flags >> 2) & 0x1Fu);
  msg.full_precision_bits = full_precision_bits;
  msg.iteration = 0;
  for (int b = 0; b < 4; ++b) msg.iteration |= static_cast<std::uint32_t>(bytes[1 + b]) << (8 * b);
  msg.sender_id = 0;
  for (int b = 0; b < 2; ++b) msg.sender_id |= static_cast<std::uint16_t>(bytes[5 + b] << (8 * b));
  msg.tensor_id = static_cast<TensorId>(bytes[7]);
  std::uint64_t norm_bits = 0;
  for (int b = 0; b < 8; ++b) norm_bits |= static_cast<std::uint64_t>(bytes[8 + b]) << (8 * b);
  std::memcpy(&msg.norm, &norm_bits, 8);
  msg.length = length;
  msg.codes.assign(bytes.begin() + kHeader, bytes.end());

  if (msg.zero_flag) {
    if (!msg.codes.empty()) {
      throw std::runtime_error("decode_message: zero-flag message carries a payload");
    }
    return msg;
  }
  if (msg.kind == CompressorKind::identity) {
    if (msg.codes.size() != static_cast<std::size_t>(length) * 8) {
      throw std::runtime_error("decode_message: identity payload is " +
                               std::to_string(msg.codes.size()) + " bytes, expected " +
                               std::to_string(static_cast<std::size_t>(length) * 8));
    }
    return msg;
  }
  const int q = msg.bits_per_scalar;
  if (q < 2 || q > 24) {
    throw std::runtime_error("decode_message: invalid bits_per_scalar " + std::to_string(q));
  }
  const std::size_t total_bits = static_cast<std::size_t>(length) * q;
  if (msg.codes.size() != (total_bits + 7) / 8) {
    throw std::runtime_error("decode_message: code buffer is " + std::to_string(msg.codes.size()) +
                             " bytes, inconsistent with " + std::to_string(length) +
                             " elements at " + std::to_string(q) + " bits each");
  }
  for (std::size_t bit = total_bits; bit < msg.codes.size() * 8; ++bit) {
    if (msg.codes[bit / 8] & (1u << (bit % 8))) {
      throw std::runtime_error("decode_message: nonzero pad bit " + std::to_string(bit) +
                               " in final code byte");
    }
  }
  return msg;
}

}  // namespace qadmm
