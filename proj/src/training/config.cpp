//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/training/config.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace molevers::training {

TrainConfig TrainConfig::paper_scale() {
  TrainConfig cfg;
  cfg.steps = 1000000;
  cfg.batch_size = 32;
  return cfg;
}

void validate(const TrainConfig &cfg) {
  if (!(cfg.lr > 0.0) || !std::isfinite(cfg.lr)) {
    throw std::invalid_argument("lr must be positive");
  }
  if (cfg.batch_size < 1) {
    throw std::invalid_argument("batch_size must be >= 1");
  }
  for (double w: { cfg.alpha_x, cfg.alpha_p, cfg.alpha_d, cfg.beta_rank,
                   cfg.poly_decay_power }) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument(
          "loss weights and poly_decay_power must be non-negative");
    }
  }
  if (!(cfg.mask_ratio > 0.0 && cfg.mask_ratio < 1.0)) {
    throw std::invalid_argument("mask_ratio must lie in (0, 1)");
  }
  if (!(cfg.max_sigma > 0.0) || !std::isfinite(cfg.max_sigma)) {
    throw std::invalid_argument("max_sigma must be positive");
  }
}

void to_json(nlohmann::json &j, const TrainConfig &cfg) {
  j = nlohmann::json {
    { "lr", cfg.lr },
    { "steps", cfg.steps },
    { "epochs", cfg.epochs },
    { "batch_size", cfg.batch_size },
    { "poly_decay_power", cfg.poly_decay_power },
    { "alpha_x", cfg.alpha_x },
    { "alpha_p", cfg.alpha_p },
    { "alpha_d", cfg.alpha_d },
    { "beta_rank", cfg.beta_rank },
    { "mask_ratio", cfg.mask_ratio },
    { "max_sigma", cfg.max_sigma },
    { "dynamic_sigma", cfg.dynamic_sigma },
    { "branching", cfg.branching },
    { "use_aggregator", cfg.use_aggregator },
    { "seed", cfg.seed },
  };
}

namespace {
double number(const std::string &key, const nlohmann::json &v) {
  if (!v.is_number()) {
    throw std::invalid_argument(key + " must be a number");
  }
  return v.get<double>();
}

std::size_t count(const std::string &key, const nlohmann::json &v) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw std::invalid_argument(key + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

bool flag(const std::string &key, const nlohmann::json &v) {
  if (!v.is_boolean()) {
    throw std::invalid_argument(key + " must be true or false");
  }
  return v.get<bool>();
}
}  // namespace

void from_json(const nlohmann::json &j, TrainConfig &cfg) {
  if (!j.is_object()) {
    throw std::invalid_argument("training config must be an object");
  }
  for (const auto &[key, v]: j.items()) {
    if (key == "lr") {
      cfg.lr = number(key, v);
    } else if (key == "steps") {
      cfg.steps = count(key, v);
    } else if (key == "epochs") {
      cfg.epochs = count(key, v);
    } else if (key == "batch_size") {
      cfg.batch_size = count(key, v);
    } else if (key == "poly_decay_power") {
      cfg.poly_decay_power = number(key, v);
    } else if (key == "alpha_x") {
      cfg.alpha_x = number(key, v);
    } else if (key == "alpha_p") {
      cfg.alpha_p = number(key, v);
    } else if (key == "alpha_d") {
      cfg.alpha_d = number(key, v);
    } else if (key == "beta_rank") {
      cfg.beta_rank = number(key, v);
    } else if (key == "mask_ratio") {
      cfg.mask_ratio = number(key, v);
    } else if (key == "max_sigma") {
      cfg.max_sigma = number(key, v);
    } else if (key == "dynamic_sigma") {
      cfg.dynamic_sigma = flag(key, v);
    } else if (key == "branching") {
      cfg.branching = flag(key, v);
    } else if (key == "use_aggregator") {
      cfg.use_aggregator = flag(key, v);
    } else if (key == "seed") {
      cfg.seed = v.is_number_unsigned() ? v.get<std::uint64_t>()
                                        : count(key, v);
    } else {
      throw std::invalid_argument("unknown key '" + key
                                  + "' in training config");
    }
  }
}

}  // namespace molevers::training
