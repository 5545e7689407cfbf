//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/ranklab/ranklab.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "molevers/util/rng.hpp"

namespace molevers::ranklab {
using chemio::Element;
using chemio::Molecule;

MissingTruth::MissingTruth(const std::string &smiles)
    : std::invalid_argument("no truth value for SMILES '" + smiles + "'"),
      smiles_(smiles) { }

namespace {
double heavy_atom_count(const Molecule &m) {
  return static_cast<double>(
      std::count_if(m.atoms.begin(), m.atoms.end(),
                    [](Element e) { return e != Element::kH; }));
}

double hetero_fraction(const Molecule &m) {
  const double heavy = heavy_atom_count(m);
  if (heavy == 0.0) {
    return 0.0;
  }
  const auto hetero = std::count_if(m.atoms.begin(), m.atoms.end(), [](Element e) {
    return e != Element::kH && e != Element::kC;
  });
  return static_cast<double>(hetero) / heavy;
}

// Crude additive lipophilicity stand-in: carbons and halogens raise it,
// N and O lower it.
double synthetic_logp_proxy(const Molecule &m) {
  static const double contrib[chemio::kNumElements] = {
    0.0,   // H
    0.5,   // C
    -0.9,  // N
    -0.7,  // O
    0.4,   // F
    0.6,   // S
    0.9,   // Cl
    1.1,   // Br
    1.3,   // I
  };
  double v = 0.0;
  for (Element e: m.atoms) {
    v += contrib[chemio::element_id(e)];
  }
  return v;
}
}  // namespace

const std::vector<std::string> &descriptor_names() {
  static const std::vector<std::string> names = {
    "heavy_atom_count", "hetero_fraction", "synthetic_logp_proxy"
  };
  return names;
}

Descriptor descriptor(std::string_view name) {
  if (name == "heavy_atom_count") {
    return heavy_atom_count;
  }
  if (name == "hetero_fraction") {
    return hetero_fraction;
  }
  if (name == "synthetic_logp_proxy") {
    return synthetic_logp_proxy;
  }
  throw UnknownDescriptor("unknown descriptor '" + std::string(name) + "'");
}

std::vector<IndexPair> generate_all_pairs(const std::vector<Molecule> &mols,
                                          std::size_t cap,
                                          std::uint64_t seed) {
  const std::size_t n = mols.size();
  if (n < 2) {
    throw TooFewMolecules("pair generation needs at least 2 molecules, got "
                          + std::to_string(n));
  }
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  std::vector<std::uint64_t> picks;
  if (total <= cap) {
    picks.resize(total);
    for (std::uint64_t k = 0; k < total; ++k) {
      picks[k] = k;
    }
  } else {
    // Floyd's sampling of `cap` distinct pair indices.
    Rng rng(seed);
    std::unordered_set<std::uint64_t> chosen;
    for (std::uint64_t j = total - cap; j < total; ++j) {
      std::uniform_int_distribution<std::uint64_t> dist(0, j);
      const std::uint64_t t = dist(rng);
      chosen.insert(chosen.count(t) ? j : t);
    }
    picks.assign(chosen.begin(), chosen.end());
  }

  std::vector<IndexPair> out;
  out.reserve(picks.size());
  std::sort(picks.begin(), picks.end());
  std::size_t i = 0;
  std::uint64_t row_start = 0;
  for (std::uint64_t k: picks) {
    while (k >= row_start + (n - 1 - i)) {
      row_start += n - 1 - i;
      ++i;
    }
    const std::size_t j = i + 1 + static_cast<std::size_t>(k - row_start);
    if (mols[j].smiles < mols[i].smiles) {
      out.push_back({ j, i });
    } else {
      out.push_back({ i, j });
    }
  }
  std::sort(out.begin(), out.end(), [&](const IndexPair &a, const IndexPair &b) {
    const auto &a1 = mols[a.first].smiles;
    const auto &b1 = mols[b.first].smiles;
    if (a1 != b1) {
      return a1 < b1;
    }
    const auto &a2 = mols[a.second].smiles;
    const auto &b2 = mols[b.second].smiles;
    if (a2 != b2) {
      return a2 < b2;
    }
    return std::make_pair(a.first, a.second) < std::make_pair(b.first, b.second);
  });
  return out;
}

MockRankProvider::MockRankProvider(Descriptor descriptor, double flip_prob,
                                   std::uint64_t seed)
    : descriptor_(std::move(descriptor)), flip_prob_(flip_prob), seed_(seed) {
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) {
    throw std::invalid_argument("flip probability must lie in [0, 1]");
  }
}

std::vector<chemio::PairRankRecord> MockRankProvider::label(
    const std::vector<Molecule> &mols,
    const std::vector<IndexPair> &pairs) const {
  Rng rng(seed_);
  std::bernoulli_distribution flip(flip_prob_);
  std::vector<chemio::PairRankRecord> out;
  out.reserve(pairs.size());
  for (const IndexPair &p: pairs) {
    const Molecule &a = mols.at(p.first);
    const Molecule &b = mols.at(p.second);
    int label = descriptor_(a) > descriptor_(b) ? 0 : 1;
    if (flip(rng)) {
      label = 1 - label;
    }
    out.push_back({ a.smiles, b.smiles, label });
  }
  return out;
}

RankQuality pairwise_tau(const std::vector<chemio::PairRankRecord> &records,
                         const std::map<std::string, double> &truth) {
  RankQuality q;
  q.n_pairs = records.size();
  std::size_t correct = 0;
  std::size_t concordant = 0;
  std::size_t discordant = 0;
  for (const auto &r: records) {
    auto a = truth.find(r.smiles1);
    if (a == truth.end()) {
      throw MissingTruth(r.smiles1);
    }
    auto b = truth.find(r.smiles2);
    if (b == truth.end()) {
      throw MissingTruth(r.smiles2);
    }
    const int expected = a->second > b->second ? 0 : 1;
    correct += r.label == expected;
    if (a->second != b->second) {
      (r.label == expected ? concordant : discordant) += 1;
    }
  }
  if (!records.empty()) {
    q.accuracy = static_cast<double>(correct) / static_cast<double>(records.size());
  }
  const std::size_t decided = concordant + discordant;
  if (decided > 0) {
    q.tau = (static_cast<double>(concordant) - static_cast<double>(discordant))
            / static_cast<double>(decided);
  }
  q.abs_tau = std::abs(q.tau);
  return q;
}

RankQuality pairwise_tau(const std::vector<chemio::PairRankRecord> &records,
                         const chemio::LabeledSet &truth) {
  std::map<std::string, double> values;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    values.emplace(truth.molecules[i].smiles, truth.values[i]);
  }
  return pairwise_tau(records, values);
}

bool gate(const RankQuality &quality, double threshold) {
  return quality.abs_tau > threshold;
}

}  // namespace molevers::ranklab
