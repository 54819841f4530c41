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

#include "qadmm/linalg.hpp"
#include "qadmm/quantize.hpp"
#include "qadmm/rng.hpp"

namespace qadmm {

/// Error-feedback compressed link for one tensor. The channel keeps a mirror
/// ŷ of the transmitted iterate that is identical at sender and receiver
/// (both apply the same decoded message), and each send carries the
/// difference y_new − ŷ. Because ŷ absorbs decoded updates, that difference
/// equals (current change) + (previous round's compression error): errors
/// telescope, so the mirror is never more than one compression step away
/// from the truth.
///
/// Two-phase use: prepare_send() builds (and charges) the message without
/// touching the mirror; commit() applies it. In the simulator one channel
/// object stands for both endpoints, so a single commit updates "both"
/// mirrors; bit-identity across separately held endpoints is preserved
/// whenever each applies the same message value.
///
/// Compressor kinds behave differently on the wire:
///  - stochastic: the message carries the quantized difference and commit
///    advances the mirror by the decoded difference.
///  - identity: the message carries the new iterate verbatim and commit
///    replaces the mirror with it. A lossless channel must keep the mirror
///    bit-identical to the sender's iterate, and adding a rounded difference
///    cannot guarantee that in floating point; transmitting the iterate
///    itself can. Accounting is unchanged (1 + M * full_precision_bits).
/// In both kinds, an unchanged iterate (y_new bitwise equal to the mirror)
/// sends a 1-bit zero_flag message and commit leaves the mirror alone.
struct EfChannel {
  Vector mirror;
  TensorId tensor_id = TensorId::x;
  std::uint16_t sender_id = 0;
  CompressorConfig compressor;
  Direction direction = Direction::uplink;
  BitLedger* ledger = nullptr;
  RngStream rng;

  EfChannel() = default;

  EfChannel(TensorId tensor, std::uint16_t sender, CompressorConfig cfg, Direction dir,
            BitLedger* bits, RngStream stream)
      : tensor_id(tensor), sender_id(sender), compressor(cfg), direction(dir), ledger(bits),
        rng(std::move(stream)) {}

  /// Sets the mirror by a full-precision transfer (the initialization
  /// exchange) and charges 1 + n * full_precision_bits to the ledger.
  void init_full_precision(const Vector& y0) {
    mirror = y0;
    charge(1 + static_cast<std::uint64_t>(y0.size()) *
                   static_cast<std::uint64_t>(compressor.full_precision_bits));
  }

  /// Compresses y_new − mirror (see class comment for the identity kind),
  /// stamps addressing fields, and charges the ledger. The mirror is not
  /// modified; call commit() with the returned message to advance it.
  QuantizedMessage prepare_send(const Vector& y_new, std::uint32_t iteration) {
    if (y_new.size() != mirror.size()) {
      throw std::invalid_argument("EfChannel::prepare_send: iterate length " +
                                  std::to_string(y_new.size()) + " does not match mirror length " +
                                  std::to_string(mirror.size()));
    }
    QuantizedMessage msg;
    const Vector delta = y_new - mirror;
    if (max_norm(delta) == 0.0) {
      // Unchanged iterate: 1-bit flag regardless of compressor kind.
      msg.kind = compressor.kind;
      msg.zero_flag = true;
      msg.bits_per_scalar = (compressor.kind == CompressorKind::stochastic_maxnorm)
                                ? static_cast<std::uint8_t>(compressor.bits_per_scalar)
                                : 0;
      msg.full_precision_bits = compressor.full_precision_bits;
      msg.length = static_cast<std::uint32_t>(y_new.size());
    } else if (compressor.kind == CompressorKind::identity) {
      msg = compress(compressor, y_new, rng);
    } else {
      msg = compress(compressor, delta, rng);
    }
    msg.tensor_id = tensor_id;
    msg.sender_id = sender_id;
    msg.iteration = iteration;
    charge(message_bits(msg));
    return msg;
  }

  /// Applies a message to the mirror and returns the new mirror. zero_flag
  /// leaves it unchanged; identity replaces it; stochastic adds the decoded
  /// difference.
  const Vector& commit(const QuantizedMessage& msg) {
    if (msg.length != mirror.size()) {
      throw std::invalid_argument("EfChannel::commit: message length " +
                                  std::to_string(msg.length) + " does not match mirror length " +
                                  std::to_string(mirror.size()));
    }
    if (msg.zero_flag) return mirror;
    if (msg.kind == CompressorKind::identity) {
      mirror = decompress(msg);
    } else {
      mirror += decompress(msg);
    }
    return mirror;
  }

 private:
  void charge(std::uint64_t bits) {
    if (ledger == nullptr) return;
    if (direction == Direction::uplink) {
      ledger->uplink_bits += bits;
    } else {
      ledger->downlink_bits += bits;
    }
  }
};

}  // namespace qadmm
