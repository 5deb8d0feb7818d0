//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/structure.h"

#include <algorithm>

#include <gtest/gtest.h>

#include "sscreen/smiles.h"
#include "support/molgen.h"
#include "support/oracles.h"

namespace sscreen {
namespace {
Molecule mol_of(std::string_view smiles) {
  return parse_smiles(smiles).value();
}

TEST(ChainTest, LinearAndBranchedButane) {
  const ChainResult linear = analyze_chain(mol_of("CCCC"));
  EXPECT_EQ(linear.length, 4);
  EXPECT_EQ(linear.diameter, 0);
  EXPECT_EQ(linear.chain, (std::vector<int> { 0, 1, 2, 3 }));

  const ChainResult branched = analyze_chain(mol_of("CC(C)C"));
  EXPECT_EQ(branched.length, 3);
  EXPECT_EQ(branched.diameter, 1);
  EXPECT_EQ(diameter(mol_of("CC(C)C")), 1);
}

TEST(ChainTest, HeteroatomsBreakTheChain) {
  const ChainResult r = analyze_chain(mol_of("CCOCCC"));
  EXPECT_EQ(r.chain, (std::vector<int> { 3, 4, 5 }));
  EXPECT_EQ(r.diameter, 3);
  // Aromatic carbons count; benzene's chain covers the ring.
  EXPECT_EQ(analyze_chain(mol_of("c1ccccc1")).length, 6);
  EXPECT_EQ(analyze_chain(mol_of("c1ccccc1")).diameter, 0);
}

TEST(ChainTest, TieBreakPrefersSmallerDiameter) {
  // Chains through the ring vs. through the methyl tail: both cover
  // five carbons, the one keeping the tail wins on diameter.
  const Molecule mol = mol_of("CC1CCC1N");
  const auto [len, diam] = testing::chain_oracle(mol);
  const ChainResult r = analyze_chain(mol);
  EXPECT_EQ(r.length, len);
  EXPECT_EQ(r.diameter, diam);
}

TEST(ChainTest, CarbonFreeAndOversizedInputs) {
  const Molecule water = mol_of("O");
  EXPECT_TRUE(longest_carbon_chain(water).empty());
  EXPECT_THROW(diameter(water), std::domain_error);

  const std::string big(kMaxChainCarbons + 1, 'C');
  EXPECT_THROW(analyze_chain(mol_of(big)), std::domain_error);
  EXPECT_EQ(analyze_chain(mol_of(std::string(kMaxChainCarbons, 'C'))).length,
            kMaxChainCarbons);
}

TEST(ChainTest, OtherComponentsAreIgnored) {
  // The parser rejects dot-separated input; build the fragments directly.
  Molecule mol = mol_of("CC(C)C");
  Atom na;
  na.element = "Na";
  na.charge = 1;
  na.explicit_h = 0;
  na.bracket = true;
  mol.add_atom(na);
  EXPECT_FALSE(mol.is_connected());
  EXPECT_EQ(diameter(mol), 1);
}

TEST(ChainTest, MatchesExhaustiveOracleOnRandomMolecules) {
  Rng rng(2024);
  testing::RandomMoleculeOptions opt;
  opt.min_atoms = 4;
  opt.max_atoms = 22;
  opt.max_extra_rings = 3;
  opt.exotic_prob = 0.0;
  for (int trial = 0; trial < 400; ++trial) {
    const Molecule mol = testing::random_molecule(rng, opt);
    const auto [len, diam] = testing::chain_oracle(mol);
    if (len == 0) {
      EXPECT_THROW(diameter(mol), std::domain_error);
      continue;
    }
    const ChainResult r = analyze_chain(mol);
    ASSERT_EQ(r.length, len) << write_smiles(mol, natural_walk(mol));
    ASSERT_EQ(r.diameter, diam) << write_smiles(mol, natural_walk(mol));
    ASSERT_EQ(static_cast<int>(r.chain.size()), r.length);
    for (std::size_t k = 0; k + 1 < r.chain.size(); ++k) {
      ASSERT_GE(mol.find_bond(r.chain[k], r.chain[k + 1]), 0);
    }
    // Same answer after relabeling.
    const ChainResult s = analyze_chain(testing::shuffle_molecule(mol, rng));
    ASSERT_EQ(s.length, r.length);
    ASSERT_EQ(s.diameter, r.diameter);
  }
}

TEST(DiameterReportTest, Aggregates) {
  const std::vector<std::string> lines = { "CCCC", "", "CC(C)C", "O", "C1CC" };
  const DiameterSummary s = diameter_report(lines);
  ASSERT_EQ(s.rows.size(), 2U);
  EXPECT_EQ(s.min, 0);
  EXPECT_EQ(s.max, 1);
  EXPECT_DOUBLE_EQ(s.mean, 0.5);
  EXPECT_EQ(s.histogram.at(0), 1);
  EXPECT_EQ(s.histogram.at(1), 1);
  ASSERT_EQ(s.failures.size(), 2U);
  EXPECT_EQ(s.failures[0].line, 4U);
  EXPECT_EQ(s.failures[1].line, 5U);
  EXPECT_EQ(diameter_csv(s), "smiles,chain_len,diameter\nCCCC,4,0\nCC(C)C,3,1\n");
  EXPECT_NE(diameter_summary_text(s).find("mean"), std::string::npos);
}

TEST(DiameterReportTest, LinearAlkanesAreAllZero) {
  std::vector<std::string> lines;
  for (int n = 1; n <= 12; ++n) {
    lines.emplace_back(n, 'C');
  }
  const DiameterSummary s = diameter_report(lines);
  EXPECT_EQ(s.max, 0);
  EXPECT_DOUBLE_EQ(s.mean, 0.0);
}

}  // namespace
}  // namespace sscreen
