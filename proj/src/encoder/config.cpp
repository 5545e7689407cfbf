//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/encoder/config.hpp"

#include <stdexcept>
#include <string>

namespace molevers::encoder {

EncoderConfig EncoderConfig::paper_scale() {
  EncoderConfig cfg;
  cfg.n_layers = 15;
  cfg.embed_dim = 512;
  cfg.ffn_dim = 2048;
  cfg.n_heads = 64;
  return cfg;
}

void validate(const EncoderConfig &cfg) {
  const auto positive = [](std::size_t v, const char *name) {
    if (v < 1) {
      throw std::invalid_argument(std::string("encoder.") + name
                                  + " must be >= 1");
    }
  };
  positive(cfg.n_layers, "n_layers");
  positive(cfg.embed_dim, "embed_dim");
  positive(cfg.ffn_dim, "ffn_dim");
  positive(cfg.n_heads, "n_heads");
  positive(cfg.n_dist_kernels, "n_dist_kernels");
  positive(cfg.max_atoms, "max_atoms");
  positive(cfg.aux_targets, "aux_targets");
  if (cfg.embed_dim % cfg.n_heads != 0) {
    throw std::invalid_argument("encoder.embed_dim ("
                                + std::to_string(cfg.embed_dim)
                                + ") must be divisible by n_heads ("
                                + std::to_string(cfg.n_heads) + ")");
  }
  if (cfg.vocab_size < kNumAtomClasses + 1) {
    throw std::invalid_argument("encoder.vocab_size must cover the "
                                + std::to_string(kNumAtomClasses)
                                + " atom classes plus the mask token");
  }
}

void to_json(nlohmann::json &j, const EncoderConfig &cfg) {
  j = nlohmann::json {
    { "n_layers", cfg.n_layers },
    { "embed_dim", cfg.embed_dim },
    { "ffn_dim", cfg.ffn_dim },
    { "n_heads", cfg.n_heads },
    { "vocab_size", cfg.vocab_size },
    { "n_dist_kernels", cfg.n_dist_kernels },
    { "max_atoms", cfg.max_atoms },
    { "aux_targets", cfg.aux_targets },
  };
}

void from_json(const nlohmann::json &j, EncoderConfig &cfg) {
  if (!j.is_object()) {
    throw std::invalid_argument("encoder config must be an object");
  }
  for (const auto &[key, value]: j.items()) {
    std::size_t *field = nullptr;
    if (key == "n_layers") {
      field = &cfg.n_layers;
    } else if (key == "embed_dim") {
      field = &cfg.embed_dim;
    } else if (key == "ffn_dim") {
      field = &cfg.ffn_dim;
    } else if (key == "n_heads") {
      field = &cfg.n_heads;
    } else if (key == "vocab_size") {
      field = &cfg.vocab_size;
    } else if (key == "n_dist_kernels") {
      field = &cfg.n_dist_kernels;
    } else if (key == "max_atoms") {
      field = &cfg.max_atoms;
    } else if (key == "aux_targets") {
      field = &cfg.aux_targets;
    } else {
      throw std::invalid_argument("unknown key '" + key
                                  + "' in encoder config");
    }
    if (!value.is_number_integer() || value.get<long long>() < 0) {
      throw std::invalid_argument("encoder." + key
                                  + " must be a non-negative integer");
    }
    *field = value.get<std::size_t>();
  }
}

}  // namespace molevers::encoder
