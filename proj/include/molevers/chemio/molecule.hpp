//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_CHEMIO_MOLECULE_HPP_
#define MOLEVERS_CHEMIO_MOLECULE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace molevers::chemio {

/// Atom vocabulary. The numeric value is the token id used by the encoder.
enum class Element: std::uint8_t {
  kH = 0,
  kC,
  kN,
  kO,
  kF,
  kS,
  kCl,
  kBr,
  kI,
};

inline constexpr int kNumElements = 9;

std::string_view element_symbol(Element e);
std::optional<Element> element_from_symbol(std::string_view symbol);

constexpr int element_id(Element e) {
  return static_cast<int>(e);
}

using Vec3 = std::array<double, 3>;
using Coords = std::vector<Vec3>;

struct Molecule {
  std::vector<Element> atoms;
  std::optional<Coords> coords;
  std::string smiles;

  std::size_t n_atoms() const { return atoms.size(); }
  bool has_coords() const { return coords.has_value(); }
};

/// Throws std::invalid_argument if any Molecule invariant is violated.
void validate(const Molecule &mol);

/// Per-element atom counts, indexed by element id.
std::array<int, kNumElements> element_counts(const Molecule &mol);

struct LabeledSet {
  std::vector<Molecule> molecules;
  std::vector<double> values;
  std::string assay_id;

  std::size_t size() const { return molecules.size(); }
};

struct PairRankRecord {
  std::string smiles1;
  std::string smiles2;
  int label = 1;  // 0 iff property(smiles1) > property(smiles2)

  friend bool operator==(const PairRankRecord &,
                         const PairRankRecord &) = default;
};

enum class FormatErrorKind {
  kEmptyInput,
  kUnknownElement,
  kUnmatchedRingClosure,
  kUnbalancedParenthesis,
  kInvalidSyntax,
  kCountMismatch,
  kBadNumber,
  kMissingHeader,
  kNonFiniteValue,
  kBadLabel,
  kParseError,
};

std::string_view to_string(FormatErrorKind kind);

/// Every chemio parse failure. `line` is 1-based (0 when the input is a single
/// SMILES string); `column` is the 0-based character index inside that line or
/// string, or npos when it does not apply.
class FormatError: public std::runtime_error {
public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  FormatError(FormatErrorKind kind, std::string detail, std::size_t line = 0,
              std::size_t column = npos);

  FormatErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string &detail() const { return detail_; }

private:
  FormatErrorKind kind_;
  std::string detail_;
  std::size_t line_;
  std::size_t column_;
};

/// Deterministic stand-in coordinates: atoms placed along a helix whose phase
/// and per-atom jitter are seeded by a hash of the SMILES string.
Coords helix_coordinates(std::size_t n_atoms, std::string_view smiles);

/// Returns the molecule with helix coordinates attached if it has none.
Molecule with_synthesized_coords(Molecule mol);

/// Drops hydrogen atoms (and their coordinate rows). A molecule made only of
/// hydrogens is returned unchanged so that n_atoms stays >= 1.
Molecule strip_hydrogens(Molecule mol);

}  // namespace molevers::chemio

#endif  // MOLEVERS_CHEMIO_MOLECULE_HPP_
