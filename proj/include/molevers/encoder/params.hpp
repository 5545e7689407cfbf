//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_ENCODER_PARAMS_HPP_
#define MOLEVERS_ENCODER_PARAMS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "molevers/diffcore/tape.hpp"
#include "molevers/encoder/config.hpp"

namespace molevers::encoder {

template <typename T>
using ParamSet = std::map<std::string, diffcore::Array<T>>;

enum class ParamGroup {
  kEmbedding,
  kPrimaryEncoder,
  kDenoiseEncoder,
  kAggregator,
  kSigmaEmbed,
  kMapHead,
  kDenoiseHead,
  kAuxHead,
  kDownstreamHead,
};

/// Parameters that exist only for the stage-1 denoising branch and are
/// discarded afterwards.
bool is_denoising_branch(ParamGroup group);

enum class ParamInit {
  kNormal,   // N(0, 1)
  kXavier,   // uniform, +-sqrt(6 / (fan_in + fan_out))
  kZero,
  kOne,
  kKernelMeans,  // evenly spaced on [0, 12] angstrom
  kHeadOutput,   // zero, or Xavier when InitOptions::zero_head_outputs is off
  kPairBias,     // Xavier bound scaled by kPairBiasInitScale
};

inline constexpr double kPairBiasInitScale = 16.0;

struct ParamSpec {
  std::string name;
  diffcore::Shape shape;
  ParamInit init;
  ParamGroup group;
};

/// Every parameter of the model in a fixed order.
std::vector<ParamSpec> param_specs(const EncoderConfig &cfg);

/// Group from the name prefix; throws std::invalid_argument if unknown.
ParamGroup group_of(const std::string &name);

struct InitOptions {
  /// Zero the last layer of every head (identity denoising at init).
  bool zero_head_outputs = true;
};

ParamSet<float> init_params(const EncoderConfig &cfg, std::uint64_t seed,
                            InitOptions options = {});

template <typename T, typename U>
ParamSet<T> cast_params(const ParamSet<U> &params) {
  ParamSet<T> out;
  for (const auto &[name, arr]: params) {
    out.emplace(name, arr.template cast<T>());
  }
  return out;
}

/// Copy of `params` without the denoising-branch entries.
template <typename T>
ParamSet<T> without_denoising_branch(const ParamSet<T> &params) {
  ParamSet<T> out;
  for (const auto &[name, arr]: params) {
    if (!is_denoising_branch(group_of(name))) {
      out.emplace(name, arr);
    }
  }
  return out;
}

/// FNV-1a over names, shapes and raw bytes of the selected groups.
std::uint64_t checksum(const ParamSet<float> &params,
                       bool denoising_branch_only);

/// Throws diffcore::ShapeMismatch when a present parameter has the wrong
/// shape or an unknown name. Missing parameters are allowed.
void check_shapes(const EncoderConfig &cfg, const ParamSet<float> &params);

}  // namespace molevers::encoder

#endif  // MOLEVERS_ENCODER_PARAMS_HPP_
