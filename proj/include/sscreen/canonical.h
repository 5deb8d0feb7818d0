//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_CANONICAL_H_
#define SSCREEN_CANONICAL_H_

#include <string>
#include <vector>

#include "sscreen/molecule.h"

namespace sscreen {

/// Equivalence classes from iterative neighborhood refinement, before any
/// tie is broken. Values are dense ranks starting at 0; atoms that no
/// invariant can tell apart share a value.
std::vector<int> refined_classes(const Molecule &mol);

/// A permutation-invariant total ranking (0..n-1). Remaining ties are broken
/// by splitting off the lowest-ranked tied atom and refining again.
std::vector<int> canonical_ranks(const Molecule &mol);

/// SMILES written from the lowest-ranked atom, visiting neighbors in
/// ascending rank.
std::string canonical_smiles(const Molecule &mol);

/// Exact attributed-graph isomorphism (atom identity and bond orders).
bool is_isomorphic(const Molecule &a, const Molecule &b);

}  // namespace sscreen

#endif  // SSCREEN_CANONICAL_H_
