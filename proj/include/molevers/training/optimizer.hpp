//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_TRAINING_OPTIMIZER_HPP_
#define MOLEVERS_TRAINING_OPTIMIZER_HPP_

#include <cstddef>
#include <map>
#include <string>

#include "molevers/encoder/params.hpp"

namespace molevers::training {

/// lr * (1 - step / total)^power, clamped at zero.
double lr_schedule(std::size_t step, std::size_t total, double lr,
                   double power);

struct AdamSlot {
  diffcore::Array<float> m;
  diffcore::Array<float> v;
  std::size_t t = 0;
};

using AdamState = std::map<std::string, AdamSlot>;

struct Adam {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  /// One bias-corrected update of every parameter that has a gradient.
  /// Parameters without a gradient entry are left untouched, moments
  /// included.
  void step(encoder::ParamSet<float> &params,
            const encoder::ParamSet<double> &grads, double lr,
            AdamState &state) const;
};

}  // namespace molevers::training

#endif  // MOLEVERS_TRAINING_OPTIMIZER_HPP_
