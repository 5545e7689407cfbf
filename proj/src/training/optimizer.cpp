//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/training/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace molevers::training {

double lr_schedule(std::size_t step, std::size_t total, double lr,
                   double power) {
  if (total == 0) {
    return 0.0;
  }
  const double frac =
      1.0 - static_cast<double>(step) / static_cast<double>(total);
  return lr * std::pow(std::max(0.0, frac), power);
}

void Adam::step(encoder::ParamSet<float> &params,
                const encoder::ParamSet<double> &grads, double lr,
                AdamState &state) const {
  for (const auto &[name, g]: grads) {
    auto it = params.find(name);
    if (it == params.end()) {
      continue;
    }
    diffcore::Array<float> &w = it->second;
    AdamSlot &slot = state[name];
    if (slot.m.shape != w.shape) {
      slot.m = diffcore::Array<float>(w.shape);
      slot.v = diffcore::Array<float>(w.shape);
      slot.t = 0;
    }
    ++slot.t;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(slot.t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(slot.t));
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double m = beta1 * slot.m[i] + (1.0 - beta1) * g[i];
      const double v = beta2 * slot.v[i] + (1.0 - beta2) * g[i] * g[i];
      slot.m[i] = static_cast<float>(m);
      slot.v[i] = static_cast<float>(v);
      w[i] -= static_cast<float>(lr * (m / c1) / (std::sqrt(v / c2) + eps));
    }
  }
}

}  // namespace molevers::training
