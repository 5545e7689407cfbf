//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_TRAINING_CONFIG_HPP_
#define MOLEVERS_TRAINING_CONFIG_HPP_

#include <cstddef>
#include <cstdint>

#include "json.hpp"

namespace molevers::training {

struct TrainConfig {
  double lr = 1e-4;
  /// Stage-1 optimizer steps.
  std::size_t steps = 2000;
  /// Stage-2 and finetuning epochs.
  std::size_t epochs = 50;
  std::size_t batch_size = 8;
  double poly_decay_power = 1.0;

  double alpha_x = 1.0;
  double alpha_p = 1.0;
  double alpha_d = 1.0;
  double beta_rank = 1.0;

  double mask_ratio = 0.15;
  double max_sigma = 10.0;
  bool dynamic_sigma = true;
  /// Off: a single encoder serves both stage-1 tasks.
  bool branching = true;
  bool use_aggregator = true;

  std::uint64_t seed = 0;

  /// 1M steps, batch 32.
  static TrainConfig paper_scale();

  friend bool operator==(const TrainConfig &, const TrainConfig &) = default;
};

/// Throws std::invalid_argument on a violated invariant.
void validate(const TrainConfig &cfg);

void to_json(nlohmann::json &j, const TrainConfig &cfg);
/// Strict: unknown keys are rejected, missing keys keep their defaults.
void from_json(const nlohmann::json &j, TrainConfig &cfg);

}  // namespace molevers::training

#endif  // MOLEVERS_TRAINING_CONFIG_HPP_
