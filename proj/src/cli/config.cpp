//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <stdexcept>

#include "molevers/cli/cli.hpp"
#include "molevers/util/io.hpp"

namespace molevers::cli {

namespace {
void reject_unknown(const nlohmann::json &j, std::initializer_list<const char *> keys,
                    const std::string &where) {
  if (!j.is_object()) {
    throw std::invalid_argument(where + " must be an object");
  }
  for (const auto &[key, v]: j.items()) {
    bool known = false;
    for (const char *k: keys) {
      known = known || key == k;
    }
    if (!known) {
      throw std::invalid_argument("unknown key '" + key + "' in " + where);
    }
  }
}

bool boolean(const nlohmann::json &j, const std::string &key) {
  if (!j.is_boolean()) {
    throw std::invalid_argument("'" + key + "' must be a boolean");
  }
  return j.get<bool>();
}

void apply_train(const nlohmann::json &j, training::TrainConfig &cfg) {
  from_json(j, cfg);
  training::validate(cfg);
}
}  // namespace

RunConfig parse_run_config(const nlohmann::json &j,
                           const std::filesystem::path &base_dir) {
  reject_unknown(j,
                 { "encoder", "seed", "paper_scale", "strip_hydrogens",
                   "synthesize_coords", "pretrain1", "pretrain2", "finetune",
                   "eval" },
                 "run config");
  RunConfig cfg;
  if (j.contains("paper_scale")) {
    cfg.paper_scale = boolean(j["paper_scale"], "paper_scale");
  }
  if (cfg.paper_scale) {
    cfg.encoder = encoder::EncoderConfig::paper_scale();
    cfg.pretrain1.train = training::TrainConfig::paper_scale();
  }
  if (j.contains("encoder")) {
    from_json(j["encoder"], cfg.encoder);
  }
  encoder::validate(cfg.encoder);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) {
      throw std::invalid_argument("'seed' must be a non-negative integer");
    }
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("strip_hydrogens")) {
    cfg.strip_hydrogens = boolean(j["strip_hydrogens"], "strip_hydrogens");
  }
  if (j.contains("synthesize_coords")) {
    cfg.synthesize_coords = boolean(j["synthesize_coords"], "synthesize_coords");
  }

  if (j.contains("pretrain1")) {
    const auto &s = j["pretrain1"];
    reject_unknown(s, { "data", "train" }, "pretrain1");
    if (s.contains("data")) {
      if (!s["data"].is_string()) {
        throw std::invalid_argument("'pretrain1.data' must be a path string");
      }
      std::filesystem::path p = s["data"].get<std::string>();
      if (p.is_relative()) {
        p = base_dir / p;
      }
      if (!std::filesystem::exists(p)) {
        throw IoError("pretrain1.data: no such file '" + p.string() + "'");
      }
      cfg.pretrain1.data = p;
    }
    if (s.contains("train")) {
      apply_train(s["train"], cfg.pretrain1.train);
    }
  }
  if (j.contains("pretrain2")) {
    const auto &s = j["pretrain2"];
    reject_unknown(s, { "train" }, "pretrain2");
    if (s.contains("train")) {
      apply_train(s["train"], cfg.pretrain2);
    }
  }
  if (j.contains("finetune")) {
    const auto &s = j["finetune"];
    reject_unknown(s, { "train", "use_pairs", "gate", "gate_threshold" }, "finetune");
    if (s.contains("train")) {
      apply_train(s["train"], cfg.finetune.train);
    }
    if (s.contains("use_pairs")) {
      cfg.finetune.use_pairs = boolean(s["use_pairs"], "finetune.use_pairs");
    }
    if (s.contains("gate")) {
      cfg.finetune.gate = boolean(s["gate"], "finetune.gate");
    }
    if (s.contains("gate_threshold")) {
      if (!s["gate_threshold"].is_number()) {
        throw std::invalid_argument("'finetune.gate_threshold' must be a number");
      }
      cfg.finetune.gate_threshold = s["gate_threshold"].get<double>();
    }
  }
  if (j.contains("eval")) {
    const auto &s = j["eval"];
    reject_unknown(s, { "n_splits" }, "eval");
    if (s.contains("n_splits")) {
      if (!s["n_splits"].is_number_unsigned() || s["n_splits"].get<std::size_t>() == 0) {
        throw std::invalid_argument("'eval.n_splits' must be a positive integer");
      }
      cfg.eval.n_splits = s["n_splits"].get<std::size_t>();
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path &path) {
  const std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw std::invalid_argument("config '" + path.string() + "': " + e.what());
  }
  return parse_run_config(j, path.parent_path());
}

}  // namespace molevers::cli
