//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "molevers/chemio/molecule.hpp"
#include "molevers/chemio/smiles.hpp"

namespace molevers::chemio {
namespace {
FormatError capture(std::string_view text) {
  try {
    parse_smiles(text);
  } catch (const FormatError &e) {
    return e;
  }
  ADD_FAILURE() << "no error for '" << text << "'";
  return FormatError(FormatErrorKind::kParseError, "none");
}

TEST(Smiles, SingleAtom) {
  SmilesGraph g = parse_smiles_graph("C");
  ASSERT_EQ(g.atoms.size(), 1);
  EXPECT_EQ(g.atoms[0].element, Element::kC);
  EXPECT_TRUE(g.bonds.empty());
}

TEST(Smiles, LinearChain) {
  SmilesGraph g = parse_smiles_graph("CCO");
  ASSERT_EQ(g.atoms.size(), 3);
  EXPECT_EQ(g.atoms[2].element, Element::kO);
  ASSERT_EQ(g.bonds.size(), 2);
  EXPECT_EQ(g.bonds[0], (SmilesBond { 0, 1, '-' }));
  EXPECT_EQ(g.bonds[1], (SmilesBond { 1, 2, '-' }));
}

TEST(Smiles, BenzeneRingClosure) {
  SmilesGraph g = parse_smiles_graph("c1ccccc1");
  ASSERT_EQ(g.atoms.size(), 6);
  for (const auto &a: g.atoms) {
    EXPECT_EQ(a.element, Element::kC);
    EXPECT_TRUE(a.aromatic);
  }
  ASSERT_EQ(g.bonds.size(), 6);
  bool closure = false;
  for (const auto &b: g.bonds) {
    EXPECT_EQ(b.order, ':');
    closure = closure || (b.begin == 0 && b.end == 5)
              || (b.begin == 5 && b.end == 0);
  }
  EXPECT_TRUE(closure);
}

TEST(Smiles, BranchesAndBondOrders) {
  SmilesGraph g = parse_smiles_graph("CC(=O)O");
  ASSERT_EQ(g.atoms.size(), 4);
  ASSERT_EQ(g.bonds.size(), 3);
  EXPECT_EQ(g.bonds[1], (SmilesBond { 1, 2, '=' }));
  EXPECT_EQ(g.bonds[2], (SmilesBond { 1, 3, '-' }));

  g = parse_smiles_graph("CC#N");
  EXPECT_EQ(g.bonds[1].order, '#');
}

TEST(Smiles, TwoLetterHalogens) {
  Molecule m = parse_smiles("ClCBr");
  ASSERT_EQ(m.n_atoms(), 3);
  EXPECT_EQ(m.atoms[0], Element::kCl);
  EXPECT_EQ(m.atoms[2], Element::kBr);
  EXPECT_EQ(m.smiles, "ClCBr");
  EXPECT_FALSE(m.has_coords());
}

TEST(Smiles, BracketAtoms) {
  SmilesGraph g = parse_smiles_graph("[NH4+]");
  ASSERT_EQ(g.atoms.size(), 1);
  EXPECT_EQ(g.atoms[0].hydrogens, 4);
  EXPECT_EQ(g.atoms[0].charge, 1);

  g = parse_smiles_graph("[O-]C");
  EXPECT_EQ(g.atoms[0].charge, -1);
  g = parse_smiles_graph("[N+2]");
  EXPECT_EQ(g.atoms[0].charge, 2);
}

TEST(Smiles, ExplicitHydrogenIsKept) {
  Molecule m = parse_smiles("[H]C([H])([H])[H]");
  ASSERT_EQ(m.n_atoms(), 5);
  EXPECT_EQ(m.atoms[0], Element::kH);
  EXPECT_EQ(m.atoms[1], Element::kC);
}

TEST(Smiles, TwoDigitRingClosure) {
  SmilesGraph g = parse_smiles_graph("C%12CCC%12");
  EXPECT_EQ(g.atoms.size(), 4);
  EXPECT_EQ(g.bonds.size(), 4);
}

TEST(Smiles, Errors) {
  FormatError e = capture("C1CC");
  EXPECT_EQ(e.kind(), FormatErrorKind::kUnmatchedRingClosure);
  EXPECT_EQ(e.column(), 1);

  e = capture("");
  EXPECT_EQ(e.kind(), FormatErrorKind::kEmptyInput);

  e = capture("CC(C");
  EXPECT_EQ(e.kind(), FormatErrorKind::kUnbalancedParenthesis);
  EXPECT_EQ(e.column(), 2);

  e = capture("CC)C");
  EXPECT_EQ(e.kind(), FormatErrorKind::kUnbalancedParenthesis);
  EXPECT_EQ(e.column(), 2);

  e = capture("CXC");
  EXPECT_EQ(e.kind(), FormatErrorKind::kUnknownElement);
  EXPECT_EQ(e.column(), 1);

  e = capture("C[Na+]");
  EXPECT_EQ(e.kind(), FormatErrorKind::kUnknownElement);

  EXPECT_EQ(capture("C/C=C/C").kind(), FormatErrorKind::kInvalidSyntax);
  EXPECT_EQ(capture("C[C@H](O)N").kind(), FormatErrorKind::kInvalidSyntax);
  EXPECT_EQ(capture("[13C]").kind(), FormatErrorKind::kInvalidSyntax);
  EXPECT_EQ(capture("C.C").kind(), FormatErrorKind::kInvalidSyntax);
}

TEST(Smiles, ErrorMessageNamesIndex) {
  FormatError e = capture("C1CC");
  EXPECT_NE(std::string(e.what()).find("index 1"), std::string::npos)
      << e.what();
}

TEST(Smiles, Deterministic) {
  const std::string s = "CCOC(=O)C1CCN(CC1)C(=O)c1ccc(Cl)cc1";
  Molecule a = parse_smiles(s);
  Molecule b = parse_smiles(s);
  EXPECT_EQ(a.atoms, b.atoms);
}

TEST(Smiles, HeavyAtomCountsMatchReference) {
  std::ifstream in(std::string(MOLEVERS_TEST_DATA_DIR) + "/heavy_atoms.csv");
  ASSERT_TRUE(in.good());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("smiles,", 0) == 0) {
      continue;
    }
    std::stringstream ss(line);
    std::string smiles;
    std::string heavy;
    std::string bonds;
    std::getline(ss, smiles, ',');
    std::getline(ss, heavy, ',');
    std::getline(ss, bonds, ',');

    SmilesGraph g = parse_smiles_graph(smiles);
    int n_heavy = 0;
    for (const auto &a: g.atoms) {
      n_heavy += a.element != Element::kH;
    }
    EXPECT_EQ(n_heavy, std::stoi(heavy)) << smiles;
    EXPECT_EQ(static_cast<int>(g.bonds.size()), std::stoi(bonds)) << smiles;
    ++rows;
  }
  EXPECT_EQ(rows, 20);
}

TEST(Molecule, StripHydrogens) {
  Molecule m = parse_smiles("[H]OC");
  m.coords = Coords { { 0, 0, 0 }, { 1, 0, 0 }, { 2, 0, 0 } };
  Molecule s = strip_hydrogens(m);
  ASSERT_EQ(s.n_atoms(), 2);
  EXPECT_EQ(s.atoms[0], Element::kO);
  EXPECT_EQ((*s.coords)[0][0], 1.0);
}

TEST(Molecule, HelixCoordinatesAreDeterministicAndDistinct) {
  Coords a = helix_coordinates(12, "CCCCCCCCCCCC");
  Coords b = helix_coordinates(12, "CCCCCCCCCCCC");
  EXPECT_EQ(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double dx = a[i][0] - a[j][0];
      const double dy = a[i][1] - a[j][1];
      const double dz = a[i][2] - a[j][2];
      EXPECT_GT(dx * dx + dy * dy + dz * dz, 0.25);
    }
  }
  EXPECT_NE(helix_coordinates(12, "CCCCCCCCCCCO"), a);
}

TEST(Molecule, ValidateRejectsCoordCountMismatch) {
  Molecule m = parse_smiles("CC");
  m.coords = Coords { { 0, 0, 0 } };
  EXPECT_THROW(validate(m), std::invalid_argument);
}

}  // namespace
}  // namespace molevers::chemio
