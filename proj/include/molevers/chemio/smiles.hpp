//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_CHEMIO_SMILES_HPP_
#define MOLEVERS_CHEMIO_SMILES_HPP_

#include <cstddef>
#include <string_view>
#include <vector>

#include "molevers/chemio/molecule.hpp"

namespace molevers::chemio {

struct SmilesBond {
  std::size_t begin;
  std::size_t end;
  char order;  // one of '-', '=', '#', ':'

  friend bool operator==(const SmilesBond &, const SmilesBond &) = default;
};

struct SmilesAtom {
  Element element;
  bool aromatic = false;
  bool bracket = false;
  int hydrogens = 0;  // bracket H count; implicit H are not derived
  int charge = 0;
};

struct SmilesGraph {
  std::vector<SmilesAtom> atoms;
  std::vector<SmilesBond> bonds;
};

/// Parses the supported SMILES subset: organic-subset symbols (C N O F S Cl
/// Br I), aromatic c n o s, bracket atoms with H count and charge, bonds
/// - = # :, branches and ring closures (single digits and %nn).
/// Stereo marks, isotopes, wildcards and '.' are rejected.
SmilesGraph parse_smiles_graph(std::string_view text);

/// Atoms of parse_smiles_graph in parse order; the bond list is dropped.
Molecule parse_smiles(std::string_view text);

}  // namespace molevers::chemio

#endif  // MOLEVERS_CHEMIO_SMILES_HPP_
