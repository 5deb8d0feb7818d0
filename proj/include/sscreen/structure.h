//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_STRUCTURE_H_
#define SSCREEN_STRUCTURE_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sscreen/molecule.h"

namespace sscreen {

/// Exhaustive path search is exponential in ring-rich graphs; larger carbon
/// skeletons are refused with std::domain_error.
inline constexpr int kMaxChainCarbons = 60;

struct ChainResult {
  std::vector<int> chain;
  int length = 0;
  // Max over atoms connected to the chain of the hop distance to the
  // nearest chain atom.
  int diameter = 0;
};

/// Longest simple path through carbon atoms (aromatic or not). Among equally
/// long paths the one with the smallest diameter wins, then the
/// lexicographically smallest index sequence. Carbon-free molecules yield an
/// empty chain.
std::vector<int> longest_carbon_chain(const Molecule &mol);

/// Throws std::domain_error when the molecule has no carbon.
int diameter(const Molecule &mol);

/// Chain and diameter from a single search.
ChainResult analyze_chain(const Molecule &mol);

/// Hop distance from every atom to the nearest atom of `sources`.
std::vector<int> distances_to_set(const Molecule &mol,
                                  std::span<const int> sources);

struct DiameterRow {
  std::string smiles;
  int chain_length;
  int diameter;
};

struct DiameterFailure {
  std::size_t line;
  std::string smiles;
  std::string reason;
};

struct DiameterSummary {
  std::vector<DiameterRow> rows;
  std::vector<DiameterFailure> failures;
  int min = 0;
  int max = 0;
  double mean = 0.0;
  std::map<int, int> histogram;
};

/// Aggregates diameters over SMILES lines. Blank lines are skipped;
/// unparseable or carbon-free entries are reported as failures and excluded
/// from the statistics.
DiameterSummary diameter_report(std::span<const std::string> smiles);

/// "smiles,chain_len,diameter" with one row per analyzed molecule.
std::string diameter_csv(const DiameterSummary &summary);

/// Human-readable summary block with a text histogram.
std::string diameter_summary_text(const DiameterSummary &summary);

}  // namespace sscreen

#endif  // SSCREEN_STRUCTURE_H_
