//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_TRAINING_LOOPS_HPP_
#define MOLEVERS_TRAINING_LOOPS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "molevers/chemio/molecule.hpp"
#include "molevers/encoder/params.hpp"
#include "molevers/training/checkpoint.hpp"
#include "molevers/training/config.hpp"
#include "molevers/training/optimizer.hpp"

namespace molevers::training {

class NonFiniteLoss: public std::runtime_error {
public:
  NonFiniteLoss(std::string stage, std::size_t step, double sigma);

  std::size_t step() const { return step_; }
  double sigma() const { return sigma_; }

private:
  std::size_t step_;
  double sigma_;
};

class DegenerateStd: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class UnresolvablePairSmiles: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct TrainState {
  encoder::EncoderConfig encoder;
  encoder::ParamSet<float> params;
  AdamState adam;
  std::size_t step = 0;
  NormStats aux_norm;
  NormStats reg_norm;
};

TrainState init_state(const encoder::EncoderConfig &cfg, std::uint64_t seed,
                      encoder::InitOptions options = {});
TrainState state_from_checkpoint(const Checkpoint &ckpt);
Checkpoint to_checkpoint(const TrainState &state, std::string stage);

/// Receives one JSON object per logged step or epoch.
using MetricsSink = std::function<void(const nlohmann::json &)>;

struct Stage1Losses {
  double total = 0.0;
  double map = 0.0;
  double x = 0.0;
  double p = 0.0;
  double d = 0.0;
  double map_accuracy = 0.0;
};

/// Indices of the molecules used at a stage-1 step.
std::vector<std::size_t> stage1_batch(std::size_t n_molecules,
                                      const TrainConfig &cfg,
                                      std::size_t step);

/// One Adam step on the batch for state.step; losses are batch means.
/// Throws NonFiniteLoss naming the step and the offending sigma.
Stage1Losses stage1_step(TrainState &state,
                         const std::vector<chemio::Molecule> &data,
                         const TrainConfig &cfg);

/// Runs stage 1 from state.step up to cfg.steps and returns the final
/// step's losses.
Stage1Losses pretrain_stage1(TrainState &state,
                             const std::vector<chemio::Molecule> &data,
                             const TrainConfig &cfg,
                             const MetricsSink &sink = {});

/// Mean and population standard deviation per column of a row-major
/// (rows x k) table. Throws DegenerateStd below 1e-12.
NormStats fit_norm(const std::vector<double> &values, std::size_t k);

/// Drops the denoising branch, fits aux_norm on `targets` (rows x k,
/// row-major) and trains the primary encoder with the auxiliary head.
/// Returns the mean loss of each epoch.
std::vector<double> pretrain_stage2(TrainState &state,
                                    const std::vector<chemio::Molecule> &mols,
                                    const std::vector<double> &targets,
                                    const TrainConfig &cfg,
                                    const MetricsSink &sink = {});

struct FinetuneData {
  std::vector<chemio::Molecule> train;
  std::vector<double> values;
  std::vector<chemio::PairRankRecord> pairs;
  /// Extra molecules pair SMILES may refer to (for example the test split).
  std::vector<chemio::Molecule> pair_pool;
  /// Gate decision; off means the pairs are ignored entirely.
  bool use_pairs = false;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double loss = 0.0;
  double reg_loss = 0.0;
  double rank_loss = 0.0;
};

/// Fits reg_norm on the training values, drops the denoising branch and
/// trains the downstream head with the primary encoder. Returns one entry
/// per epoch; the state keeps the last-epoch model.
std::vector<EpochMetrics> finetune(TrainState &state, const FinetuneData &data,
                                   const TrainConfig &cfg,
                                   const MetricsSink &sink = {});

/// Downstream predictions in raw target units.
std::vector<double> predict(const TrainState &state,
                            const std::vector<chemio::Molecule> &mols);

/// Auxiliary-head predictions in raw target units, row-major (rows x k).
std::vector<double> predict_aux(const TrainState &state,
                                const std::vector<chemio::Molecule> &mols);

}  // namespace molevers::training

#endif  // MOLEVERS_TRAINING_LOOPS_HPP_
