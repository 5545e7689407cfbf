//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_TRAINING_LOSSES_HPP_
#define MOLEVERS_TRAINING_LOSSES_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "molevers/chemio/molecule.hpp"
#include "molevers/corruption/corruption.hpp"
#include "molevers/encoder/model.hpp"

namespace molevers::training {

using encoder::Binder;
using encoder::Var;

struct Stage1Options {
  double alpha_x = 1.0;
  double alpha_p = 1.0;
  double alpha_d = 1.0;
  bool branching = true;
  bool use_aggregator = true;
};

template <typename T>
struct Stage1Terms {
  Var<T> total;
  Var<T> map;  // mean cross-entropy over masked positions
  Var<T> x;    // MSE(eps_hat, eps1)
  Var<T> p;    // smooth-L1 over coordinates
  Var<T> d;    // smooth-L1 over off-diagonal distances
  Var<T> p_hat;  // denoised coordinates, (N, 3)
  std::size_t correct = 0;  // argmax hits at masked positions
  std::size_t masked = 0;
};

/// Stage-1 objective of one corrupted molecule.
template <typename T>
Stage1Terms<T> stage1_terms(Binder<T> &p, const corruption::CorruptedBatch &b,
                            const Stage1Options &opt);

/// Ids and clean distances of a molecule with coordinates.
struct PreparedMolecule {
  std::vector<std::size_t> ids;
  diffcore::Array<double> dist;
};

/// Throws corruption::MissingCoordinates without coordinates.
PreparedMolecule prepare(const chemio::Molecule &mol);

/// Mean squared error of the auxiliary head against z-scored targets.
template <typename T>
Var<T> aux_loss(Binder<T> &p, const PreparedMolecule &mol,
                std::span<const double> z_targets);

/// Squared error of the downstream head against a z-scored target.
template <typename T>
Var<T> regression_loss(Binder<T> &p, const PreparedMolecule &mol,
                       double z_target);

/// Ranking logit s(m2) - s(m1).
template <typename T>
Var<T> pair_logit(Binder<T> &p, const PreparedMolecule &m1,
                  const PreparedMolecule &m2);

/// Binary cross-entropy of sigmoid(logit) against label, in the stable
/// softplus(l) - label * l form.
template <typename T>
Var<T> rank_bce(Var<T> logit, int label);

}  // namespace molevers::training

#endif  // MOLEVERS_TRAINING_LOSSES_HPP_
