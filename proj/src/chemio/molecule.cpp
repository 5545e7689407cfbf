//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/chemio/molecule.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "molevers/util/rng.hpp"

namespace molevers::chemio {
namespace {
constexpr std::array<std::string_view, kNumElements> kSymbols = {
  "H", "C", "N", "O", "F", "S", "Cl", "Br", "I",
};

std::string compose_message(FormatErrorKind kind, const std::string &detail,
                            std::size_t line, std::size_t column) {
  std::string msg(to_string(kind));
  if (line != 0) {
    msg += " at line " + std::to_string(line);
  }
  if (column != FormatError::npos) {
    msg += line != 0 ? ", column " : " at index ";
    msg += std::to_string(column);
  }
  if (!detail.empty()) {
    msg += ": " + detail;
  }
  return msg;
}

// Portable [0, 1) draw; std distributions are implementation-defined.
double unit_draw(std::uint64_t &state) {
  state = splitmix64(state);
  return static_cast<double>(state >> 11) * 0x1.0p-53;
}
}  // namespace

std::string_view element_symbol(Element e) {
  return kSymbols[static_cast<std::size_t>(e)];
}

std::optional<Element> element_from_symbol(std::string_view symbol) {
  for (std::size_t i = 0; i < kSymbols.size(); ++i) {
    if (kSymbols[i] == symbol) {
      return static_cast<Element>(i);
    }
  }
  return std::nullopt;
}

void validate(const Molecule &mol) {
  if (mol.atoms.empty()) {
    throw std::invalid_argument("molecule has no atoms");
  }
  for (Element e: mol.atoms) {
    if (static_cast<int>(e) >= kNumElements) {
      throw std::invalid_argument("atom id outside the vocabulary");
    }
  }
  if (mol.coords) {
    if (mol.coords->size() != mol.atoms.size()) {
      throw std::invalid_argument(
          "coordinate rows (" + std::to_string(mol.coords->size())
          + ") differ from atom count (" + std::to_string(mol.atoms.size())
          + ")");
    }
    for (const auto &p: *mol.coords) {
      for (double x: p) {
        if (!std::isfinite(x)) {
          throw std::invalid_argument("non-finite coordinate");
        }
      }
    }
  }
}

std::array<int, kNumElements> element_counts(const Molecule &mol) {
  std::array<int, kNumElements> counts {};
  for (Element e: mol.atoms) {
    ++counts[static_cast<std::size_t>(e)];
  }
  return counts;
}

std::string_view to_string(FormatErrorKind kind) {
  switch (kind) {
  case FormatErrorKind::kEmptyInput:
    return "EmptyInput";
  case FormatErrorKind::kUnknownElement:
    return "UnknownElement";
  case FormatErrorKind::kUnmatchedRingClosure:
    return "UnmatchedRingClosure";
  case FormatErrorKind::kUnbalancedParenthesis:
    return "UnbalancedParenthesis";
  case FormatErrorKind::kInvalidSyntax:
    return "InvalidSyntax";
  case FormatErrorKind::kCountMismatch:
    return "CountMismatch";
  case FormatErrorKind::kBadNumber:
    return "BadNumber";
  case FormatErrorKind::kMissingHeader:
    return "MissingHeader";
  case FormatErrorKind::kNonFiniteValue:
    return "NonFiniteValue";
  case FormatErrorKind::kBadLabel:
    return "BadLabel";
  case FormatErrorKind::kParseError:
    return "ParseError";
  }
  return "Unknown";
}

FormatError::FormatError(FormatErrorKind kind, std::string detail,
                         std::size_t line, std::size_t column)
    : std::runtime_error(compose_message(kind, detail, line, column)),
      kind_(kind), detail_(std::move(detail)), line_(line), column_(column) { }

Coords helix_coordinates(std::size_t n_atoms, std::string_view smiles) {
  constexpr double kRadius = 1.5;
  constexpr double kPitch = 1.5;  // axial rise per full turn, angstrom
  constexpr double kStep = 100.0 * std::numbers::pi / 180.0;
  constexpr double kJitter = 0.15;

  std::uint64_t state = fnv1a(smiles);
  const double phase = 2.0 * std::numbers::pi * unit_draw(state);

  Coords coords(n_atoms);
  for (std::size_t k = 0; k < n_atoms; ++k) {
    const double angle = phase + kStep * static_cast<double>(k);
    const double rise = kPitch * kStep * static_cast<double>(k)
                        / (2.0 * std::numbers::pi);
    coords[k] = {
      kRadius * std::cos(angle) + kJitter * (2.0 * unit_draw(state) - 1.0),
      kRadius * std::sin(angle) + kJitter * (2.0 * unit_draw(state) - 1.0),
      rise + kJitter * (2.0 * unit_draw(state) - 1.0),
    };
  }
  return coords;
}

Molecule with_synthesized_coords(Molecule mol) {
  if (!mol.coords) {
    mol.coords = helix_coordinates(mol.n_atoms(), mol.smiles);
  }
  return mol;
}

Molecule strip_hydrogens(Molecule mol) {
  Molecule out;
  out.smiles = mol.smiles;
  if (mol.coords) {
    out.coords.emplace();
  }
  for (std::size_t i = 0; i < mol.atoms.size(); ++i) {
    if (mol.atoms[i] == Element::kH) {
      continue;
    }
    out.atoms.push_back(mol.atoms[i]);
    if (mol.coords) {
      out.coords->push_back((*mol.coords)[i]);
    }
  }
  if (out.atoms.empty()) {
    return mol;
  }
  return out;
}

}  // namespace molevers::chemio
