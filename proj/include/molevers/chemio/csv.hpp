//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_CHEMIO_CSV_HPP_
#define MOLEVERS_CHEMIO_CSV_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "molevers/chemio/molecule.hpp"

namespace molevers::chemio {

// CSV dialect shared by every loader: ',' separator, no quoting, lines
// starting with '#' and blank lines are skipped, fields are whitespace-trimmed.

/// A property file with K >= 1 value columns. values is row-major (n x K).
struct PropertyTable {
  std::vector<std::string> columns;
  std::vector<Molecule> molecules;
  std::vector<double> values;

  std::size_t rows() const { return molecules.size(); }
  std::size_t targets() const { return columns.size(); }
  double value(std::size_t row, std::size_t k) const {
    return values[row * columns.size() + k];
  }

  /// One LabeledSet per value column; assay_id is the column name.
  std::vector<LabeledSet> labeled_sets() const;
};

/// Parses "smiles,value" or "smiles,v1,...,vK".
PropertyTable load_property_csv(std::string_view text);

/// Convenience wrapper: single-column property file as a LabeledSet.
LabeledSet load_labeled_csv(std::string_view text, std::string assay_id);

/// Parses "smiles1,smiles2,prediction" lines. An optional header line with
/// exactly those names is skipped.
std::vector<PairRankRecord> load_pair_csv(std::string_view text);

/// Inverse of load_pair_csv for canonical input (no header, '\n' endings).
std::string serialize_pair_csv(const std::vector<PairRankRecord> &records);

std::string serialize_property_csv(const LabeledSet &set);

}  // namespace molevers::chemio

#endif  // MOLEVERS_CHEMIO_CSV_HPP_
