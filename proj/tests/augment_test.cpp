//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/augment.h"

#include <algorithm>
#include <functional>
#include <set>

#include <gtest/gtest.h>

#include "sscreen/canonical.h"
#include "support/molgen.h"

namespace sscreen {
namespace {
Molecule mol_of(std::string_view smiles) {
  return parse_smiles(smiles).value();
}

// Every string reachable by any start atom and any neighbor permutations.
std::set<std::string> all_writings(const Molecule &mol) {
  std::set<std::string> out;
  for (int start = 0; start < mol.size(); ++start) {
    WalkOrder walk = natural_walk(mol, start);
    for (auto &order: walk.neighbor_order) {
      std::sort(order.begin(), order.end());
    }
    std::function<void(int)> permute = [&](int atom) {
      if (atom == mol.size()) {
        out.insert(write_smiles(mol, walk));
        return;
      }
      auto &order = walk.neighbor_order[atom];
      std::sort(order.begin(), order.end());
      do {
        permute(atom + 1);
      } while (std::next_permutation(order.begin(), order.end()));
    };
    permute(0);
  }
  return out;
}

TEST(RandomWalkTest, SingleAtomHasOneWalk) {
  const Molecule na = mol_of("[Na+]");
  Rng rng(1);
  const WalkOrder walk = random_walk(na, rng);
  EXPECT_EQ(walk.start_atom, 0);
  EXPECT_EQ(enumerate_smiles(na, 1, rng), std::vector<std::string> { "[Na+]" });
}

TEST(RandomWalkTest, EmpiricalSupportMatchesExhaustiveEnumeration) {
  const Molecule ethanol = mol_of("CCO");
  const std::set<std::string> exhaustive = all_writings(ethanol);
  // Ends write one string each; the middle carbon has two branch orders.
  EXPECT_EQ(exhaustive, (std::set<std::string> { "CCO", "OCC", "C(C)O",
                                                 "C(O)C" }));

  Rng rng(42);
  std::set<std::string> seen;
  for (const std::string &s: enumerate_smiles(ethanol, 10000, rng)) {
    seen.insert(s);
  }
  EXPECT_EQ(seen, exhaustive);
}

TEST(RandomWalkTest, FixedSeedIsReproducible) {
  const Molecule mol = mol_of("CC(C)(O)c1ccc(N)cc1");
  Rng a(123);
  Rng b(123);
  EXPECT_EQ(enumerate_smiles(mol, 30, a), enumerate_smiles(mol, 30, b));

  Rng c(123);
  Rng d(123);
  const WalkOrder wc = random_walk(mol, c);
  const WalkOrder wd = random_walk(mol, d);
  EXPECT_EQ(wc.start_atom, wd.start_atom);
  EXPECT_EQ(wc.neighbor_order, wd.neighbor_order);
}

TEST(RandomWalkTest, StartAtomIsRoughlyUniform) {
  const Molecule mol = mol_of("CCCCO");
  Rng rng(3);
  std::vector<int> counts(mol.size(), 0);
  constexpr int kDraws = 50000;
  for (int i = 0; i < kDraws; ++i) {
    ++counts[random_walk(mol, rng).start_atom];
  }
  for (const int c: counts) {
    EXPECT_NEAR(static_cast<double>(c) / kDraws, 0.2, 0.01);
  }
}

TEST(EnumerateSmilesTest, EveryWritingReparsesIsomorphic) {
  Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const Molecule mol = testing::random_molecule(rng);
    for (const std::string &s: enumerate_smiles(mol, 3, rng)) {
      auto back = parse_smiles(s);
      ASSERT_TRUE(back.ok()) << s;
      ASSERT_TRUE(is_isomorphic(back.value(), mol)) << s;
    }
  }
}

TEST(EnumerateSmilesTest, BenzeneStaysASixCycle) {
  Rng rng(8);
  const std::vector<std::string> out =
      enumerate_smiles(mol_of("c1ccccc1"), 50, rng);
  ASSERT_EQ(out.size(), 50U);
  EXPECT_GE(std::set<std::string>(out.begin(), out.end()).size(), 1U);
  for (const std::string &s: out) {
    const Molecule m = mol_of(s);
    EXPECT_EQ(m.size(), 6);
    EXPECT_EQ(m.num_bonds(), 6);
    for (int i = 0; i < 6; ++i) {
      EXPECT_EQ(m.degree(i), 2);
    }
  }
}

TEST(AugmentConfigTest, RejectsZeroCounts) {
  AugmentConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.train_walks_per_molecule, 10);
  EXPECT_EQ(cfg.predict_walks_per_molecule, 20);
  cfg.predict_walks_per_molecule = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  Rng rng(0);
  EXPECT_THROW(enumerate_smiles(mol_of("C"), 0, rng), std::invalid_argument);
}

}  // namespace
}  // namespace sscreen
