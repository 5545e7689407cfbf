//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_EVALBENCH_SYNTHETIC_HPP_
#define MOLEVERS_EVALBENCH_SYNTHETIC_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "molevers/chemio/molecule.hpp"
#include "molevers/util/rng.hpp"

namespace molevers::evalbench {

/// Linear functional of element counts plus a multiple of the mean pairwise
/// distance. Molecules without coordinates get helix coordinates first.
struct SyntheticProperty {
  std::array<double, chemio::kNumElements> weights = { 0.1, 1.0, -0.8, 0.6, 1.4,
                                                      0.9, 1.7, 2.0, 2.4 };
  double distance_weight = 0.5;

  double operator()(const chemio::Molecule &mol) const;
};

double mean_pair_distance(const chemio::Molecule &mol);

/// Random acyclic or single-ring SMILES over C, N, O, S and the halogens
/// with `n_heavy` atoms. Halogens are only placed at chain ends and
/// branches only hang off carbon.
std::string random_smiles(Rng &rng, std::size_t n_heavy);

struct SyntheticSuiteConfig {
  std::size_t n_assays = 22;
  std::size_t molecules_per_assay = 50;
  std::size_t min_atoms = 6;
  std::size_t max_atoms = 16;
  /// Spread of per-assay weight perturbations around the base property.
  double weight_jitter = 0.2;
  double label_noise = 0.05;
  SyntheticProperty base;
  std::uint64_t seed = 0;
};

/// Distinct random molecules with helix coordinates, sorted by SMILES.
std::vector<chemio::Molecule> random_corpus(std::size_t n, std::size_t min_atoms,
                                            std::size_t max_atoms,
                                            std::uint64_t seed);

/// Assays named "assay00".."assayNN", each with its own molecules and a
/// jittered copy of the base property plus Gaussian label noise.
std::vector<chemio::LabeledSet> synthetic_suite(const SyntheticSuiteConfig &cfg);

/// Three auxiliary targets per molecule (row-major): the base property, the
/// hetero-atom count and the mean pair distance.
std::vector<double> synthetic_aux_targets(const std::vector<chemio::Molecule> &mols,
                                          const SyntheticProperty &base = {});

}  // namespace molevers::evalbench

#endif  // MOLEVERS_EVALBENCH_SYNTHETIC_HPP_
