//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_RANKLAB_RANKLAB_HPP_
#define MOLEVERS_RANKLAB_RANKLAB_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "molevers/chemio/molecule.hpp"

namespace molevers::ranklab {

class MissingTruth: public std::invalid_argument {
public:
  explicit MissingTruth(const std::string &smiles);
  const std::string &smiles() const { return smiles_; }

private:
  std::string smiles_;
};

class TooFewMolecules: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class UnknownDescriptor: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct RankQuality {
  std::size_t n_pairs = 0;
  double accuracy = 0.0;
  double tau = 0.0;
  double abs_tau = 0.0;
};

/// Scalar property used to order molecules.
using Descriptor = std::function<double(const chemio::Molecule &)>;

/// heavy_atom_count, hetero_fraction, synthetic_logp_proxy.
const std::vector<std::string> &descriptor_names();
/// Throws UnknownDescriptor.
Descriptor descriptor(std::string_view name);

/// Indices into a molecule list; smiles(first) <= smiles(second).
struct IndexPair {
  std::size_t first = 0;
  std::size_t second = 0;

  friend bool operator==(const IndexPair &, const IndexPair &) = default;
};

inline constexpr std::size_t kDefaultPairCap = 10000;

/// Every unordered pair when there are at most `cap`, otherwise a uniform
/// sample of `cap` distinct pairs drawn with `seed`. Pairs are oriented and
/// sorted by SMILES. Throws TooFewMolecules below two molecules.
std::vector<IndexPair> generate_all_pairs(
    const std::vector<chemio::Molecule> &mols, std::size_t cap,
    std::uint64_t seed);

/// Source of pairwise labels: label 0 iff the first molecule's property
/// exceeds the second's.
class RankProvider {
public:
  virtual ~RankProvider() = default;
  virtual std::vector<chemio::PairRankRecord> label(
      const std::vector<chemio::Molecule> &mols,
      const std::vector<IndexPair> &pairs) const = 0;
};

/// Labels from a descriptor, each flipped independently with probability q.
class MockRankProvider: public RankProvider {
public:
  MockRankProvider(Descriptor descriptor, double flip_prob, std::uint64_t seed);

  std::vector<chemio::PairRankRecord> label(
      const std::vector<chemio::Molecule> &mols,
      const std::vector<IndexPair> &pairs) const override;

private:
  Descriptor descriptor_;
  double flip_prob_;
  std::uint64_t seed_;
};

/// Agreement of pair labels with truth values keyed by SMILES. Pairs whose
/// truth values tie count toward accuracy (expected label 1) but not tau.
/// Throws MissingTruth.
RankQuality pairwise_tau(const std::vector<chemio::PairRankRecord> &records,
                         const std::map<std::string, double> &truth);
RankQuality pairwise_tau(const std::vector<chemio::PairRankRecord> &records,
                         const chemio::LabeledSet &truth);

inline constexpr double kGateThreshold = 0.4;

/// True iff abs_tau > threshold.
bool gate(const RankQuality &quality, double threshold = kGateThreshold);

}  // namespace molevers::ranklab

#endif  // MOLEVERS_RANKLAB_RANKLAB_HPP_
