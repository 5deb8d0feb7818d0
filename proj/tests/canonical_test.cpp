//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/canonical.h"

#include <algorithm>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "sscreen/augment.h"
#include "sscreen/smiles.h"
#include "support/molgen.h"

namespace sscreen {
namespace {
Molecule mol_of(std::string_view smiles) {
  return parse_smiles(smiles).value();
}

TEST(CanonicalTest, BenzeneIsOneClassBeforeTieBreaking) {
  const std::vector<int> classes = refined_classes(mol_of("c1ccccc1"));
  EXPECT_EQ(std::set<int>(classes.begin(), classes.end()).size(), 1U);

  std::vector<int> ranks = canonical_ranks(mol_of("c1ccccc1"));
  std::sort(ranks.begin(), ranks.end());
  std::vector<int> expected(6);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(ranks, expected);
}

TEST(CanonicalTest, EthanolAtomsAreDistinguishable) {
  const std::vector<int> classes = refined_classes(mol_of("CCO"));
  EXPECT_EQ(std::set<int>(classes.begin(), classes.end()).size(), 3U);
}

TEST(CanonicalTest, SameGraphTwoWritings) {
  EXPECT_EQ(canonical_smiles(mol_of("OCC")), canonical_smiles(mol_of("CCO")));
  EXPECT_EQ(canonical_smiles(mol_of("C(C)(C)O")),
            canonical_smiles(mol_of("OC(C)C")));
  EXPECT_EQ(canonical_smiles(mol_of("c1ccccc1N")),
            canonical_smiles(mol_of("Nc1ccccc1")));
  EXPECT_NE(canonical_smiles(mol_of("CCO")), canonical_smiles(mol_of("CCN")));
}

TEST(CanonicalTest, InvariantUnderRelabeling) {
  Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const Molecule mol = testing::random_molecule(rng);
    const std::string reference = canonical_smiles(mol);
    for (int k = 0; k < 5; ++k) {
      ASSERT_EQ(canonical_smiles(testing::shuffle_molecule(mol, rng)),
                reference);
    }
    ASSERT_TRUE(is_isomorphic(parse_smiles(reference).value(), mol));
  }
}

TEST(IsomorphismTest, BasicCases) {
  const Molecule fig = mol_of("N(c1)ccc1N");
  EXPECT_TRUE(is_isomorphic(fig, fig));
  EXPECT_FALSE(is_isomorphic(mol_of("CCO"), mol_of("CCN")));
  EXPECT_FALSE(is_isomorphic(mol_of("CC=O"), mol_of("CCO")));
  EXPECT_FALSE(is_isomorphic(mol_of("C1CCC1C"), mol_of("CCCCC")));
  EXPECT_FALSE(is_isomorphic(mol_of("[13CH4]"), mol_of("[CH4]")));
  // Two triangles share refinement classes with a hexagon but differ.
  EXPECT_FALSE(is_isomorphic(mol_of("C1CCCCC1"), mol_of("C1CC1C1CC1")));
}

TEST(IsomorphismTest, FigureOneRewritesAgreeWithBruteForce) {
  const Molecule fig = mol_of("N(c1)ccc1N");
  Rng rng(5);
  for (const std::string &s: enumerate_smiles(fig, 50, rng)) {
    const Molecule other = mol_of(s);
    EXPECT_TRUE(testing::brute_force_isomorphic(fig, other)) << s;
    EXPECT_TRUE(is_isomorphic(fig, other)) << s;
  }
}

TEST(IsomorphismTest, AgreesWithBruteForceOnSmallGraphs) {
  Rng rng(17);
  testing::RandomMoleculeOptions opt;
  opt.min_atoms = 3;
  opt.max_atoms = 7;
  opt.max_extra_rings = 2;
  int positives = 0;
  int negatives = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const Molecule a = testing::random_molecule(rng, opt);
    Molecule b;
    switch (trial % 3) {
    case 0:
      b = testing::shuffle_molecule(a, rng);
      break;
    case 1: {
      // Same atoms, one bond order flipped: usually not isomorphic.
      Molecule copy;
      for (const Atom &atom: a.atoms()) {
        copy.add_atom(atom);
      }
      for (int k = 0; k < a.num_bonds(); ++k) {
        const Bond &bond = a.bond(k);
        const BondOrder order = k == 0 && bond.order == BondOrder::kSingle
                                    ? BondOrder::kDouble
                                    : bond.order;
        copy.add_bond(bond.src, bond.dst, order);
      }
      b = testing::shuffle_molecule(copy, rng);
      break;
    }
    default:
      b = testing::random_molecule(rng, opt);
      break;
    }
    const bool expected = testing::brute_force_isomorphic(a, b);
    ASSERT_EQ(is_isomorphic(a, b), expected);
    (expected ? positives : negatives)++;
  }
  EXPECT_GT(positives, 100);
  EXPECT_GT(negatives, 100);
}

}  // namespace
}  // namespace sscreen
