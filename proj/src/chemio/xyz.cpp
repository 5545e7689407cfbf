//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/chemio/xyz.hpp"

#include <cstdio>
#include <string>

#include "text_util.hpp"

namespace molevers::chemio {
namespace {
using internal::parse_double;
using internal::parse_integer;
using internal::split_lines;
using internal::split_whitespace;
using internal::trim;

// Parses one frame starting at lines[first]; returns the index one past it.
std::size_t read_frame(const std::vector<std::string_view> &lines,
                       std::size_t first, Molecule &mol) {
  const std::size_t count_line = first + 1;
  auto count = parse_integer(trim(lines[first]));
  if (!count) {
    throw FormatError(FormatErrorKind::kBadNumber,
                      "first line must hold the atom count", count_line);
  }
  if (*count < 1) {
    throw FormatError(FormatErrorKind::kCountMismatch,
                      "atom count must be at least 1", count_line);
  }

  const auto n = static_cast<std::size_t>(*count);
  std::size_t next = first + 2;  // skip the comment line
  mol.atoms.clear();
  mol.coords.emplace();
  mol.coords->reserve(n);
  for (std::size_t k = 0; k < n; ++k, ++next) {
    if (next >= lines.size() || trim(lines[next]).empty()) {
      throw FormatError(FormatErrorKind::kCountMismatch,
                        "header declares " + std::to_string(n)
                            + " atoms but only " + std::to_string(k)
                            + " atom lines follow",
                        count_line);
    }
    const auto fields = split_whitespace(lines[next]);
    if (fields.size() < 4) {
      throw FormatError(FormatErrorKind::kBadNumber,
                        "expected 'Symbol x y z'", next + 1);
    }
    auto e = element_from_symbol(fields[0]);
    if (!e) {
      throw FormatError(FormatErrorKind::kUnknownElement,
                        "'" + std::string(fields[0])
                            + "' is not a supported element",
                        next + 1, 0);
    }
    Vec3 p;
    for (std::size_t d = 0; d < 3; ++d) {
      auto v = parse_double(fields[d + 1]);
      if (!v || !std::isfinite(*v)) {
        throw FormatError(FormatErrorKind::kBadNumber,
                          "bad coordinate '" + std::string(fields[d + 1])
                              + "'",
                          next + 1);
      }
      p[d] = *v;
    }
    mol.atoms.push_back(*e);
    mol.coords->push_back(p);
  }
  return next;
}

std::size_t skip_blank(const std::vector<std::string_view> &lines,
                       std::size_t i) {
  while (i < lines.size() && trim(lines[i]).empty()) {
    ++i;
  }
  return i;
}
}  // namespace

Molecule read_xyz(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || trim(text).empty()) {
    throw FormatError(FormatErrorKind::kEmptyInput, "empty XYZ input");
  }
  Molecule mol;
  std::size_t next = read_frame(lines, 0, mol);
  next = skip_blank(lines, next);
  if (next != lines.size()) {
    throw FormatError(FormatErrorKind::kCountMismatch,
                      "more atom lines than the declared count", next + 1);
  }
  return mol;
}

std::vector<Molecule> read_xyz_frames(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<Molecule> frames;
  std::size_t i = skip_blank(lines, 0);
  while (i < lines.size()) {
    Molecule mol;
    i = skip_blank(lines, read_frame(lines, i, mol));
    frames.push_back(std::move(mol));
  }
  if (frames.empty()) {
    throw FormatError(FormatErrorKind::kEmptyInput, "empty XYZ input");
  }
  return frames;
}

std::string write_xyz(const Molecule &mol, std::string_view comment) {
  std::string out = std::to_string(mol.n_atoms()) + "\n";
  out += comment;
  out += "\n";
  char buf[128];
  for (std::size_t i = 0; i < mol.n_atoms(); ++i) {
    const Vec3 p = mol.coords ? (*mol.coords)[i] : Vec3 { 0, 0, 0 };
    std::snprintf(buf, sizeof(buf), " %.17g %.17g %.17g\n", p[0], p[1], p[2]);
    out += element_symbol(mol.atoms[i]);
    out += buf;
  }
  return out;
}

}  // namespace molevers::chemio
