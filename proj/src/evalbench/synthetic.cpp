//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/evalbench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "molevers/chemio/smiles.hpp"

namespace molevers::evalbench {

namespace {
const char *const kChainAtoms[] = { "C", "C", "C", "C", "C", "N", "O", "S" };
const char *const kEndAtoms[] = { "C", "N", "O", "F", "Cl", "Br", "I" };

template <std::size_t N>
const char *pick_from(Rng &rng, const char *const (&table)[N]) {
  std::uniform_int_distribution<std::size_t> d(0, N - 1);
  return table[d(rng)];
}

std::string two_digit(std::size_t i) {
  return (i < 10 ? "0" : "") + std::to_string(i);
}
}  // namespace

double mean_pair_distance(const chemio::Molecule &mol) {
  const chemio::Coords c = mol.has_coords()
                               ? *mol.coords
                               : chemio::helix_coordinates(mol.n_atoms(), mol.smiles);
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double dx = c[i][0] - c[j][0];
      const double dy = c[i][1] - c[j][1];
      const double dz = c[i][2] - c[j][2];
      total += std::sqrt(dx * dx + dy * dy + dz * dz);
      ++pairs;
    }
  }
  return pairs ? total / static_cast<double>(pairs) : 0.0;
}

double SyntheticProperty::operator()(const chemio::Molecule &mol) const {
  const auto counts = chemio::element_counts(mol);
  double y = 0.0;
  for (int e = 0; e < chemio::kNumElements; ++e) {
    y += weights[e] * counts[e];
  }
  return y + distance_weight * mean_pair_distance(mol);
}

std::string random_smiles(Rng &rng, std::size_t n_heavy) {
  if (n_heavy == 0) {
    throw std::invalid_argument("random_smiles: needs at least one atom");
  }
  std::bernoulli_distribution ring(0.3);
  std::bernoulli_distribution branch(0.25);
  std::string out;
  std::size_t left = n_heavy;
  if (n_heavy >= 7 && ring(rng)) {
    out = "C1CCCCC1";
    left -= 6;
  }
  while (left > 0) {
    if (left == 1) {
      out += pick_from(rng, kEndAtoms);
      break;
    }
    const char *atom = pick_from(rng, kChainAtoms);
    out += atom;
    --left;
    if (left >= 2 && atom[0] == 'C' && branch(rng)) {
      out += "(";
      out += pick_from(rng, kEndAtoms);
      out += ")";
      --left;
    }
  }
  return out;
}

std::vector<chemio::Molecule> random_corpus(std::size_t n, std::size_t min_atoms,
                                            std::size_t max_atoms,
                                            std::uint64_t seed) {
  if (min_atoms == 0 || min_atoms > max_atoms) {
    throw std::invalid_argument("random_corpus: bad atom range");
  }
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> size(min_atoms, max_atoms);
  std::set<std::string> seen;
  std::size_t attempts = 0;
  while (seen.size() < n) {
    if (++attempts > 100 * n + 1000) {
      throw std::invalid_argument("random_corpus: cannot draw enough distinct molecules");
    }
    seen.insert(random_smiles(rng, size(rng)));
  }
  std::vector<chemio::Molecule> out;
  out.reserve(n);
  for (const std::string &s: seen) {
    out.push_back(chemio::with_synthesized_coords(chemio::parse_smiles(s)));
  }
  return out;
}

std::vector<chemio::LabeledSet> synthetic_suite(const SyntheticSuiteConfig &cfg) {
  std::vector<chemio::LabeledSet> suite;
  for (std::size_t a = 0; a < cfg.n_assays; ++a) {
    const std::uint64_t s = derive_seed(cfg.seed, { fnv1a("assay"), a });
    chemio::LabeledSet set;
    set.assay_id = "assay" + two_digit(a);
    set.molecules = random_corpus(cfg.molecules_per_assay, cfg.min_atoms,
                                  cfg.max_atoms, s);
    Rng rng(derive_seed(s, { 1 }));
    std::normal_distribution<double> normal(0.0, 1.0);
    SyntheticProperty prop = cfg.base;
    for (double &w: prop.weights) {
      w += cfg.weight_jitter * normal(rng);
    }
    for (const auto &mol: set.molecules) {
      set.values.push_back(prop(mol) + cfg.label_noise * normal(rng));
    }
    suite.push_back(std::move(set));
  }
  return suite;
}

std::vector<double> synthetic_aux_targets(const std::vector<chemio::Molecule> &mols,
                                          const SyntheticProperty &base) {
  std::vector<double> out;
  out.reserve(3 * mols.size());
  for (const auto &mol: mols) {
    const auto counts = chemio::element_counts(mol);
    int hetero = 0;
    for (int e = 2; e < chemio::kNumElements; ++e) {
      hetero += counts[e];
    }
    out.push_back(base(mol));
    out.push_back(hetero);
    out.push_back(mean_pair_distance(mol));
  }
  return out;
}

}  // namespace molevers::evalbench
