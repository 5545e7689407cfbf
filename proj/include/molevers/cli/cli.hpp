//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_CLI_CLI_HPP_
#define MOLEVERS_CLI_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "molevers/encoder/config.hpp"
#include "molevers/training/config.hpp"

namespace molevers::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kFormat = 2,
  kIo = 3,
  kNumeric = 4,
  kShape = 5,
};

struct Stage1Section {
  /// XYZ frames, one SMILES per line (.smi), or a property CSV.
  std::optional<std::filesystem::path> data;
  training::TrainConfig train;
};

struct FinetuneSection {
  training::TrainConfig train;
  /// Off: pairs are never used (the plain regression variant).
  bool use_pairs = true;
  /// Off: pairs are used whenever given, without checking their quality.
  bool gate = true;
  double gate_threshold = 0.4;
};

struct EvalSection {
  std::size_t n_splits = 3;
};

/// One JSON document with a section per command. Relative paths resolve
/// against the config file's directory. Unknown keys are rejected.
struct RunConfig {
  encoder::EncoderConfig encoder;
  std::optional<std::uint64_t> seed;
  bool paper_scale = false;
  bool strip_hydrogens = true;
  /// Molecules without coordinates get deterministic helix coordinates.
  bool synthesize_coords = true;
  Stage1Section pretrain1;
  training::TrainConfig pretrain2;
  FinetuneSection finetune;
  EvalSection eval;
};

RunConfig parse_run_config(const nlohmann::json &j,
                           const std::filesystem::path &base_dir = {});
RunConfig load_run_config(const std::filesystem::path &path);

/// Runs one command. `args` excludes the program name. Returns an ExitCode.
int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err);

}  // namespace molevers::cli

#endif  // MOLEVERS_CLI_CLI_HPP_
