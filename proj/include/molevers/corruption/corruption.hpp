//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_CORRUPTION_CORRUPTION_HPP_
#define MOLEVERS_CORRUPTION_CORRUPTION_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "molevers/chemio/molecule.hpp"
#include "molevers/diffcore/tape.hpp"
#include "molevers/util/rng.hpp"

namespace molevers::corruption {

class NonPositiveA: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class EmptyMolecule: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class MissingCoordinates: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// sigma ~ U[0, a).
double sample_sigma(Rng &rng, double a);

/// max(1, round(r * n)), capped at n.
std::size_t mask_count(std::size_t n_atoms, double ratio);

/// Sorted positions drawn uniformly without replacement. Positions index
/// atoms; the readout token is never a candidate.
std::vector<std::size_t> mask_atoms(const chemio::Molecule &mol, double ratio,
                                    Rng &rng);

struct Noise {
  std::vector<double> eps1;     // one scalar per atom
  chemio::Coords eps2;          // per coordinate component
  chemio::Coords noisy_coords;  // P + eps2
  diffcore::Array<double> noisy_dist;
};

Noise add_noise(const chemio::Molecule &mol, double sigma, Rng &rng);

struct CorruptionConfig {
  double mask_ratio = 0.15;
  double max_sigma = 10.0;
  /// Off: every molecule uses sigma = max_sigma.
  bool dynamic_sigma = true;
};

/// One stage-1 training instance.
struct CorruptedBatch {
  std::vector<std::size_t> mask_idx;
  std::vector<std::size_t> clean_atoms;  // element ids at mask_idx
  std::vector<std::size_t> atom_ids;     // unmasked token ids
  std::vector<std::size_t> masked_ids;   // token ids with the mask applied
  double sigma = 0.0;
  std::vector<double> eps1;
  chemio::Coords eps2;
  chemio::Coords clean_coords;
  diffcore::Array<double> clean_dist;
  chemio::Coords noisy_coords;
  diffcore::Array<double> noisy_dist;
};

/// Deterministic in (seed, step, mol_index): the stream is derived from
/// those three values alone. sigma is drawn first, then the mask, then the
/// noise.
CorruptedBatch corrupt(const chemio::Molecule &mol,
                       const CorruptionConfig &cfg, std::uint64_t seed,
                       std::uint64_t step, std::uint64_t mol_index);

}  // namespace molevers::corruption

#endif  // MOLEVERS_CORRUPTION_CORRUPTION_HPP_
