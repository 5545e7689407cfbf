//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_TRAINING_CHECKPOINT_HPP_
#define MOLEVERS_TRAINING_CHECKPOINT_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "molevers/encoder/config.hpp"
#include "molevers/encoder/params.hpp"

namespace molevers::training {

/// Per-target z-score statistics (population standard deviation).
struct NormStats {
  std::vector<double> mean;
  std::vector<double> std;

  bool empty() const { return mean.empty(); }
  friend bool operator==(const NormStats &, const NormStats &) = default;
};

class CheckpointFormatError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Single-file archive:
///   8 bytes   magic "MVCKPT01"
///   8 bytes   manifest length L, little-endian
///   L bytes   manifest JSON (format_version, encoder, stage, params index
///             with name/shape/offset, aux_norm, reg_norm, meta)
///   rest      raw little-endian f32 data, in index order
struct Checkpoint {
  encoder::EncoderConfig encoder;
  encoder::ParamSet<float> params;
  NormStats aux_norm;
  NormStats reg_norm;
  std::string stage;
  nlohmann::json meta = nlohmann::json::object();
};

std::string serialize_checkpoint(const Checkpoint &ckpt);
/// Throws CheckpointFormatError for a damaged archive and
/// diffcore::ShapeMismatch when a parameter disagrees with the stored config.
Checkpoint parse_checkpoint(std::string_view bytes);

void write_checkpoint(const std::filesystem::path &path,
                      const Checkpoint &ckpt);
Checkpoint read_checkpoint(const std::filesystem::path &path);

}  // namespace molevers::training

#endif  // MOLEVERS_TRAINING_CHECKPOINT_HPP_
