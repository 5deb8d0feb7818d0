//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/augment.h"

#include <algorithm>
#include <stdexcept>

namespace sscreen {

void AugmentConfig::validate() const {
  if (train_walks_per_molecule < 1 || predict_walks_per_molecule < 1) {
    throw std::invalid_argument("walk counts must be at least 1");
  }
}

WalkOrder random_walk(const Molecule &mol, Rng &rng) {
  if (mol.empty()) {
    throw std::invalid_argument("cannot walk an empty molecule");
  }

  std::uniform_int_distribution<int> pick(0, mol.size() - 1);
  WalkOrder walk = natural_walk(mol, pick(rng));
  for (auto &order: walk.neighbor_order) {
    std::shuffle(order.begin(), order.end(), rng);
  }
  return walk;
}

std::vector<std::string> enumerate_smiles(const Molecule &mol, int n,
                                          Rng &rng) {
  if (n < 1) {
    throw std::invalid_argument("enumerate_smiles needs n >= 1");
  }
  std::vector<std::string> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    out.push_back(write_smiles(mol, random_walk(mol, rng)));
  }
  return out;
}

}  // namespace sscreen
