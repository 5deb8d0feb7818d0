//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_SYNTH_H_
#define SSCREEN_SYNTH_H_

#include <cstdint>

#include "sscreen/dataset.h"
#include "sscreen/molecule.h"
#include "sscreen/random.h"

namespace sscreen {

/// True when some sulfur is single-bonded to a carbon that is triple-bonded
/// to a terminal nitrogen (a thiocyanate group, written SC#N).
bool has_thiocyanate(const Molecule &mol);

struct SynthConfig {
  int size = 1000;
  double active_fraction = 1.0 / 3.0;
  int min_atoms = 6;  // scaffold size before functional groups
  int max_atoms = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Random acyclic or ring-bearing organic scaffold of C, N, O, F and Cl with
/// occasional benzene rings. Contains no sulfur and no nitrile.
Molecule random_scaffold(Rng &rng, int min_atoms, int max_atoms);

/// Planted-motif screening corpus. Actives carry a thiocyanate group.
/// Inactives are plain scaffolds or decoys carrying a cyanate group (OC#N)
/// or a sulfur and a nitrile on different atoms. Labels come from
/// has_thiocyanate(), the number of actives is round(size * fraction), and
/// SMILES are canonical.
Dataset planted_motif_dataset(const SynthConfig &config);

}  // namespace sscreen

#endif  // SSCREEN_SYNTH_H_
