//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_AUGMENT_H_
#define SSCREEN_AUGMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "sscreen/molecule.h"
#include "sscreen/random.h"
#include "sscreen/smiles.h"

namespace sscreen {

struct AugmentConfig {
  int train_walks_per_molecule = 10;
  int predict_walks_per_molecule = 20;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when a walk count is below 1.
  void validate() const;
};

/// Uniform start atom; every neighbor list independently shuffled.
WalkOrder random_walk(const Molecule &mol, Rng &rng);

/// `n` writings of the same molecule along independent random walks.
/// Duplicates are kept.
std::vector<std::string> enumerate_smiles(const Molecule &mol, int n, Rng &rng);

}  // namespace sscreen

#endif  // SSCREEN_AUGMENT_H_
