//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/corruption/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "molevers/encoder/model.hpp"

namespace molevers::corruption {

double sample_sigma(Rng &rng, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw NonPositiveA("max sigma must be a positive finite number, got "
                       + std::to_string(a));
  }
  std::uniform_real_distribution<double> uni(0.0, a);
  double s = uni(rng);
  // Some standard libraries can round up to the upper bound.
  while (s >= a) {
    s = uni(rng);
  }
  return s;
}

std::size_t mask_count(std::size_t n_atoms, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("mask ratio must lie in (0, 1), got "
                                + std::to_string(ratio));
  }
  const auto k = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(n_atoms)));
  return std::min(n_atoms, std::max<std::size_t>(1, k));
}

std::vector<std::size_t> mask_atoms(const chemio::Molecule &mol, double ratio,
                                    Rng &rng) {
  const std::size_t n = mol.n_atoms();
  if (n == 0) {
    throw EmptyMolecule("cannot mask a molecule without atoms");
  }
  const std::size_t k = mask_count(n, ratio);
  std::vector<std::size_t> pos(n);
  std::iota(pos.begin(), pos.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pos[i], pos[pick(rng)]);
  }
  pos.resize(k);
  std::sort(pos.begin(), pos.end());
  return pos;
}

Noise add_noise(const chemio::Molecule &mol, double sigma, Rng &rng) {
  if (!mol.coords) {
    throw MissingCoordinates("molecule '" + mol.smiles
                             + "' has no coordinates");
  }
  const std::size_t n = mol.n_atoms();
  std::normal_distribution<double> normal(0.0, 1.0);
  Noise out;
  out.eps1.resize(n);
  for (double &e: out.eps1) {
    e = sigma * normal(rng);
  }
  out.eps2.resize(n);
  out.noisy_coords = *mol.coords;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < 3; ++a) {
      out.eps2[i][a] = sigma * normal(rng);
      out.noisy_coords[i][a] += out.eps2[i][a];
    }
  }
  out.noisy_dist = encoder::pair_distance(out.noisy_coords);
  return out;
}

CorruptedBatch corrupt(const chemio::Molecule &mol,
                       const CorruptionConfig &cfg, std::uint64_t seed,
                       std::uint64_t step, std::uint64_t mol_index) {
  Rng rng(derive_seed(seed, { step, mol_index }));
  CorruptedBatch b;
  b.sigma = cfg.dynamic_sigma ? sample_sigma(rng, cfg.max_sigma)
                              : cfg.max_sigma;
  if (!cfg.dynamic_sigma && !(cfg.max_sigma >= 0.0)) {
    throw NonPositiveA("static sigma must be non-negative");
  }
  b.mask_idx = mask_atoms(mol, cfg.mask_ratio, rng);
  b.atom_ids = encoder::token_ids(mol);
  b.masked_ids = encoder::token_ids(mol, b.mask_idx);
  for (std::size_t i: b.mask_idx) {
    b.clean_atoms.push_back(b.atom_ids[i]);
  }
  Noise noise = add_noise(mol, b.sigma, rng);
  b.eps1 = std::move(noise.eps1);
  b.eps2 = std::move(noise.eps2);
  b.clean_coords = *mol.coords;
  b.clean_dist = encoder::pair_distance(b.clean_coords);
  b.noisy_coords = std::move(noise.noisy_coords);
  b.noisy_dist = std::move(noise.noisy_dist);
  return b;
}

}  // namespace molevers::corruption
