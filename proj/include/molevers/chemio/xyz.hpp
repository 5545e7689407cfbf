//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_CHEMIO_XYZ_HPP_
#define MOLEVERS_CHEMIO_XYZ_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "molevers/chemio/molecule.hpp"

namespace molevers::chemio {

/// Reads a single-frame XYZ block. Trailing blank lines are ignored.
Molecule read_xyz(std::string_view text);

/// Reads concatenated XYZ frames.
std::vector<Molecule> read_xyz_frames(std::string_view text);

/// Debug writer; coordinates are printed with 17 significant digits.
std::string write_xyz(const Molecule &mol, std::string_view comment = "");

}  // namespace molevers::chemio

#endif  // MOLEVERS_CHEMIO_XYZ_HPP_
