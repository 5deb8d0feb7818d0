//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/smiles.h"

#include <algorithm>
#include <string>

#include <gtest/gtest.h>

#include "sscreen/augment.h"
#include "sscreen/canonical.h"
#include "support/molgen.h"

namespace sscreen {
namespace {
Molecule parse_ok(std::string_view text) {
  auto result = parse_smiles(text);
  EXPECT_TRUE(result.ok()) << text << ": "
                           << (result.ok() ? "" : result.error().format());
  return std::move(result).value();
}

void expect_error(std::string_view text, DiagnosticKind kind,
                  std::size_t position) {
  auto result = parse_smiles(text);
  ASSERT_FALSE(result.ok()) << text;
  EXPECT_EQ(result.error().kind, kind)
      << text << ": " << result.error().format();
  EXPECT_EQ(result.error().position, position)
      << text << ": " << result.error().format();
}

int count_ring_closures(std::string_view smiles) {
  auto tokens = lex_smiles(smiles);
  return static_cast<int>(std::count_if(
             tokens.value().begin(), tokens.value().end(),
             [](const Token &t) { return t.kind == TokenKind::kRingClosure; }))
         / 2;
}

TEST(ParseSmilesTest, FigureOneExample) {
  const Molecule mol = parse_ok("N(c1)ccc1N");
  ASSERT_EQ(mol.size(), 6);
  EXPECT_EQ(mol.num_bonds(), 6);

  const char *elements[] = { "N", "C", "C", "C", "C", "N" };
  int aromatic = 0;
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(mol.atom(i).element, elements[i]);
    aromatic += mol.atom(i).aromatic ? 1 : 0;
  }
  EXPECT_EQ(aromatic, 4);

  // Branch restores N as the attachment point; ring 1 joins atoms 1 and 4.
  EXPECT_GE(mol.find_bond(0, 1), 0);
  EXPECT_GE(mol.find_bond(0, 2), 0);
  const int ring = mol.find_bond(1, 4);
  ASSERT_GE(ring, 0);
  EXPECT_EQ(mol.bond(ring).order, BondOrder::kAromatic);
  EXPECT_EQ(mol.bond(mol.find_bond(0, 1)).order, BondOrder::kSingle);
  EXPECT_EQ(mol.bond(mol.find_bond(4, 5)).order, BondOrder::kSingle);
}

TEST(ParseSmilesTest, SmallMolecules) {
  const Molecule methane = parse_ok("C");
  EXPECT_EQ(methane.size(), 1);
  EXPECT_EQ(methane.num_bonds(), 0);

  const Molecule triangle = parse_ok("C1CC1");
  EXPECT_EQ(triangle.size(), 3);
  EXPECT_EQ(triangle.num_bonds(), 3);
  EXPECT_GE(triangle.find_bond(0, 2), 0);

  const Molecule sodium = parse_ok("[Na+]");
  ASSERT_EQ(sodium.size(), 1);
  EXPECT_EQ(sodium.atom(0).element, "Na");
  EXPECT_EQ(sodium.atom(0).charge, 1);
  EXPECT_TRUE(sodium.atom(0).bracket);
}

TEST(ParseSmilesTest, BracketAtoms) {
  const Molecule m = parse_ok("[13CH4]");
  EXPECT_EQ(m.atom(0).isotope, 13);
  EXPECT_EQ(m.atom(0).explicit_h, 4);

  EXPECT_EQ(parse_ok("[O-2]").atom(0).charge, -2);
  EXPECT_EQ(parse_ok("[O--]").atom(0).charge, -2);
  EXPECT_EQ(parse_ok("[Fe+++]").atom(0).charge, 3);
  EXPECT_EQ(parse_ok("[nH]1cccc1").atom(0).explicit_h, 1);
  EXPECT_TRUE(parse_ok("[nH]1cccc1").atom(0).aromatic);
  EXPECT_EQ(parse_ok("[C]").atom(0).explicit_h, 0);
  EXPECT_EQ(parse_ok("[Cs+]").atom(0).element, "Cs");
  EXPECT_EQ(parse_ok("[*]").atom(0).element, "*");

  // Chirality is parsed and dropped.
  const Molecule chiral = parse_ok("[C@@H](F)(Cl)Br");
  EXPECT_EQ(chiral.size(), 4);
  EXPECT_EQ(chiral.atom(0).explicit_h, 1);
}

TEST(ParseSmilesTest, BondsAndRings) {
  const Molecule stereo = parse_ok("F/C=C\\F");
  EXPECT_EQ(stereo.bond(0).order, BondOrder::kSingle);
  EXPECT_EQ(stereo.bond(1).order, BondOrder::kDouble);
  EXPECT_EQ(stereo.bond(2).order, BondOrder::kSingle);

  const Molecule benzene = parse_ok("c1ccccc1");
  for (const Bond &b: benzene.bonds()) {
    EXPECT_EQ(b.order, BondOrder::kAromatic);
  }

  const Molecule biphenyl = parse_ok("c1ccccc1-c1ccccc1");
  EXPECT_EQ(biphenyl.bond(biphenyl.find_bond(5, 6)).order, BondOrder::kSingle);

  const Molecule big_label = parse_ok("C%10CC%10");
  EXPECT_EQ(big_label.num_bonds(), 3);

  const Molecule closer_bond = parse_ok("C1CCC=1");
  EXPECT_EQ(closer_bond.bond(closer_bond.find_bond(0, 3)).order,
            BondOrder::kDouble);
  const Molecule both_ends = parse_ok("C=1CCC=1");
  EXPECT_EQ(both_ends.bond(both_ends.find_bond(0, 3)).order, BondOrder::kDouble);

  // Label reuse after closing.
  const Molecule reuse = parse_ok("C1CC1C1CC1");
  EXPECT_EQ(reuse.num_bonds(), 7);

  const Molecule ws = parse_ok("  CCO\n");
  EXPECT_EQ(ws.size(), 3);
}

TEST(ParseSmilesTest, Diagnostics) {
  expect_error("C(C", DiagnosticKind::kUnclosedBranch, 1);
  expect_error("", DiagnosticKind::kEmptyInput, 0);
  expect_error(" \t ", DiagnosticKind::kEmptyInput, 0);
  expect_error("CC.O", DiagnosticKind::kMultiFragment, 2);
  expect_error("C1CC", DiagnosticKind::kUnclosedRing, 1);
  expect_error("C[NH", DiagnosticKind::kUnclosedBracket, 1);
  expect_error("C1C1", DiagnosticKind::kBondConflict, 3);
  expect_error("C11", DiagnosticKind::kBondConflict, 2);
  expect_error("C=1CC-1", DiagnosticKind::kBondConflict, 6);
  expect_error("CQ", DiagnosticKind::kUnexpectedChar, 1);
  expect_error("C=", DiagnosticKind::kUnexpectedChar, 2);
  expect_error(")C", DiagnosticKind::kUnexpectedChar, 0);
  expect_error("(C)", DiagnosticKind::kUnexpectedChar, 0);
  expect_error("C()", DiagnosticKind::kUnexpectedChar, 2);
  expect_error("C((C))", DiagnosticKind::kUnexpectedChar, 2);
  expect_error("C=(O)", DiagnosticKind::kUnexpectedChar, 2);
  expect_error("C(=)C", DiagnosticKind::kUnexpectedChar, 3);
  expect_error("C==C", DiagnosticKind::kUnexpectedChar, 2);
  expect_error("C(1)", DiagnosticKind::kUnexpectedChar, 2);
  expect_error("C(C)1CC1", DiagnosticKind::kUnexpectedChar, 4);
  expect_error("[Xx]", DiagnosticKind::kUnexpectedChar, 1);
  expect_error("[se]", DiagnosticKind::kUnexpectedChar, 2);
  expect_error("[0C]", DiagnosticKind::kUnexpectedChar, 1);
  expect_error("[C:1]", DiagnosticKind::kUnexpectedChar, 2);
  expect_error("C%1", DiagnosticKind::kUnexpectedChar, 3);
  expect_error("C%a1", DiagnosticKind::kUnexpectedChar, 2);
  expect_error("  CC X", DiagnosticKind::kUnexpectedChar, 4);
  expect_error("H", DiagnosticKind::kUnexpectedChar, 0);
  expect_error("=C", DiagnosticKind::kUnexpectedChar, 0);
  expect_error("1CC1", DiagnosticKind::kUnexpectedChar, 0);
}

TEST(ParseSmilesTest, ParserIsTotalOnArbitraryBytes) {
  Rng rng(7);
  const std::string alphabet = "CNOScnos()[]=#-:/\\123%+-@H.Bl*r0 \x01\xff";
  for (int trial = 0; trial < 20000; ++trial) {
    std::string text;
    const int len = static_cast<int>(rng() % 16);
    for (int i = 0; i < len; ++i) {
      text += (rng() % 8 == 0) ? static_cast<char>(rng() % 256)
                               : alphabet[rng() % alphabet.size()];
    }
    auto result = parse_smiles(text);
    if (!result.ok()) {
      EXPECT_LE(result.error().position, text.size()) << text;
    } else {
      EXPECT_GE(result.value().size(), 1);
      EXPECT_TRUE(result.value().is_connected());
    }
  }
}

TEST(WriteSmilesTest, NaturalWalks) {
  EXPECT_EQ(write_smiles(parse_ok("C1CC1"), natural_walk(parse_ok("C1CC1"))),
            "C1CC1");
  const Molecule na = parse_ok("[Na+]");
  EXPECT_EQ(write_smiles(na, natural_walk(na)), "[Na+]");
  const Molecule bare = parse_ok("[C]");
  EXPECT_EQ(write_smiles(bare, natural_walk(bare)), "[C]");
  const Molecule iso = parse_ok("[13CH4]");
  EXPECT_EQ(write_smiles(iso, natural_walk(iso)), "[13CH4]");
  const Molecule biphenyl = parse_ok("c1ccccc1-c1ccccc1");
  EXPECT_EQ(write_smiles(biphenyl, natural_walk(biphenyl)),
            "c1ccccc1-c1ccccc1");
}

TEST(WriteSmilesTest, RejectsInvalidWalks) {
  const Molecule mol = parse_ok("CC(C)O");
  WalkOrder walk = natural_walk(mol);
  walk.start_atom = 9;
  EXPECT_THROW(write_smiles(mol, walk), std::invalid_argument);

  walk = natural_walk(mol);
  walk.neighbor_order[1].pop_back();
  EXPECT_THROW(write_smiles(mol, walk), std::invalid_argument);

  walk = natural_walk(mol);
  walk.neighbor_order[1][0] = 1;
  EXPECT_THROW(write_smiles(mol, walk), std::invalid_argument);

  Molecule split;
  split.add_atom({});
  split.add_atom({});
  EXPECT_THROW(write_smiles(split, natural_walk(split)), std::invalid_argument);
}

TEST(WriteSmilesTest, RoundTripOnRandomMolecules) {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const Molecule mol = testing::random_molecule(rng);
    const std::string smiles = write_smiles(mol, random_walk(mol, rng));
    auto back = parse_smiles(smiles);
    ASSERT_TRUE(back.ok()) << smiles << " -> " << back.error().format();
    ASSERT_TRUE(is_isomorphic(mol, back.value())) << smiles;

    // Ring bookkeeping: bonds = (atoms - 1) + consumed ring closures.
    EXPECT_EQ(back.value().num_bonds(),
              back.value().size() - 1 + count_ring_closures(smiles))
        << smiles;
  }
}

TEST(LexSmilesTest, LosslessAndDiagnostics) {
  for (const char *s: { "N(c1)ccc1N", "CC(=O)[O-]", "C%12CC%12Br", "ClC/C=C\\I" }) {
    auto tokens = lex_smiles(s);
    ASSERT_TRUE(tokens.ok());
    std::string joined;
    for (const Token &t: tokens.value()) {
      joined += t.text;
    }
    EXPECT_EQ(joined, s);
  }
  auto bad = lex_smiles("C[Na");
  ASSERT_FALSE(bad.ok());
  EXPECT_EQ(bad.error().kind, DiagnosticKind::kUnclosedBracket);
  EXPECT_EQ(bad.error().position, 1U);
  EXPECT_EQ(bad.error().format(),
            "ERROR 1: unclosed_bracket: bracket atom is never closed");
}

}  // namespace
}  // namespace sscreen
