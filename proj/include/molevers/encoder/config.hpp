//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_ENCODER_CONFIG_HPP_
#define MOLEVERS_ENCODER_CONFIG_HPP_

#include <cstddef>

#include "json.hpp"

#include "molevers/chemio/molecule.hpp"

namespace molevers::encoder {

/// Token ids 0..8 are the atom elements; the mask token follows them. The
/// molecule-level readout token has its own embedding vector.
inline constexpr std::size_t kMaskToken = chemio::kNumElements;
inline constexpr std::size_t kNumAtomClasses = chemio::kNumElements;

struct EncoderConfig {
  std::size_t n_layers = 4;
  std::size_t embed_dim = 64;
  std::size_t ffn_dim = 256;
  std::size_t n_heads = 4;
  std::size_t vocab_size = kNumAtomClasses + 1;
  std::size_t n_dist_kernels = 16;
  std::size_t max_atoms = 128;
  std::size_t aux_targets = 3;

  std::size_t head_dim() const { return embed_dim / n_heads; }

  /// Desk-scale defaults.
  static EncoderConfig desk() { return {}; }
  /// 15 layers, 512 features, 2048 feed-forward, 64 heads.
  static EncoderConfig paper_scale();

  friend bool operator==(const EncoderConfig &,
                         const EncoderConfig &) = default;
};

/// Throws std::invalid_argument on a violated invariant.
void validate(const EncoderConfig &cfg);

void to_json(nlohmann::json &j, const EncoderConfig &cfg);
/// Strict: unknown keys are rejected, missing keys keep their defaults.
void from_json(const nlohmann::json &j, EncoderConfig &cfg);

}  // namespace molevers::encoder

#endif  // MOLEVERS_ENCODER_CONFIG_HPP_
