//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/synth.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sscreen/canonical.h"

namespace sscreen {
namespace {

int valence(const Atom &a) {
  if (a.element == "C") {
    return 4;
  }
  if (a.element == "N") {
    return 3;
  }
  if (a.element == "O" || a.element == "S") {
    return 2;
  }
  return 1;
}

// Remaining single-bond capacity of an atom. Aromatic atoms use one bond
// slot for the ring electrons.
int free_valence(const Molecule &mol, int idx) {
  int used = mol.atom(idx).aromatic ? 1 : 0;
  for (const Neighbor &n: mol.neighbors(idx)) {
    const BondOrder o = mol.bond(n.bond).order;
    used += o == BondOrder::kAromatic ? 1 : static_cast<int>(o);
  }
  return valence(mol.atom(idx)) - used;
}

int uniform(Rng &rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool chance(Rng &rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

// Random atom satisfying pred, or -1.
template <class Pred>
int pick_atom(const Molecule &mol, Rng &rng, Pred pred) {
  std::vector<int> ok;
  for (int i = 0; i < mol.size(); ++i) {
    if (pred(i)) {
      ok.push_back(i);
    }
  }
  return ok.empty() ? -1 : ok[uniform(rng, 0, static_cast<int>(ok.size()) - 1)];
}

int attachable_carbon(const Molecule &mol, Rng &rng, int exclude = -1) {
  return pick_atom(mol, rng, [&](int i) {
    return i != exclude && mol.atom(i).element == "C" && free_valence(mol, i) >= 1;
  });
}

Atom atom_of(const char *element, bool aromatic = false) {
  Atom a;
  a.element = element;
  a.aromatic = aromatic;
  return a;
}

void add_benzene(Molecule &mol, int anchor) {
  const int first = mol.size();
  for (int i = 0; i < 6; ++i) {
    mol.add_atom(atom_of("C", true));
  }
  for (int i = 0; i < 6; ++i) {
    mol.add_bond(first + i, first + (i + 1) % 6, BondOrder::kAromatic);
  }
  if (anchor >= 0) {
    mol.add_bond(anchor, first, BondOrder::kSingle);
  }
}

// -C#N on the given atom; returns the nitrile carbon.
int add_nitrile(Molecule &mol, int anchor) {
  const int c = mol.add_atom(atom_of("C"));
  const int n = mol.add_atom(atom_of("N"));
  mol.add_bond(anchor, c, BondOrder::kSingle);
  mol.add_bond(c, n, BondOrder::kTriple);
  return c;
}

// -X-C#N with X = S (thiocyanate) or O (cyanate).
void add_linked_nitrile(Molecule &mol, int anchor, const char *link) {
  const int x = mol.add_atom(atom_of(link));
  mol.add_bond(anchor, x, BondOrder::kSingle);
  add_nitrile(mol, x);
}

// Sulfur as a thiol or a methyl thioether.
int add_sulfur(Molecule &mol, int anchor, Rng &rng) {
  const int s = mol.add_atom(atom_of("S"));
  mol.add_bond(anchor, s, BondOrder::kSingle);
  if (chance(rng, 0.5)) {
    const int c = mol.add_atom(atom_of("C"));
    mol.add_bond(s, c, BondOrder::kSingle);
  }
  return s;
}

}  // namespace

bool has_thiocyanate(const Molecule &mol) {
  for (const Bond &b: mol.bonds()) {
    if (b.order != BondOrder::kSingle) {
      continue;
    }
    for (const auto &[s, c]: { std::pair(b.src, b.dst), std::pair(b.dst, b.src) }) {
      if (mol.atom(s).element != "S" || mol.atom(c).element != "C") {
        continue;
      }
      for (const Neighbor &n: mol.neighbors(c)) {
        if (mol.bond(n.bond).order == BondOrder::kTriple
            && mol.atom(n.atom).element == "N" && mol.degree(n.atom) == 1) {
          return true;
        }
      }
    }
  }
  return false;
}

void SynthConfig::validate() const {
  if (size < 2) {
    throw std::invalid_argument("synthetic corpus needs at least 2 molecules");
  }
  if (!(active_fraction > 0.0 && active_fraction < 1.0)) {
    throw std::invalid_argument("active fraction must lie strictly between 0 and 1");
  }
  if (min_atoms < 1 || max_atoms < min_atoms) {
    throw std::invalid_argument("scaffold size range is empty");
  }
}

Molecule random_scaffold(Rng &rng, int min_atoms, int max_atoms) {
  Molecule mol;
  const int target = uniform(rng, min_atoms, max_atoms);
  if (target >= 6 && chance(rng, 0.4)) {
    add_benzene(mol, -1);
  } else {
    mol.add_atom(atom_of("C"));
  }
  while (mol.size() < target) {
    const int anchor = pick_atom(mol, rng, [&](int i) {
      return free_valence(mol, i) >= 1 && mol.atom(i).element != "F"
             && mol.atom(i).element != "Cl";
    });
    if (anchor < 0) {
      break;
    }
    if (target - mol.size() >= 6 && mol.atom(anchor).element == "C"
        && chance(rng, 0.08)) {
      add_benzene(mol, anchor);
      continue;
    }
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const char *element = u < 0.72 ? "C" : u < 0.84 ? "N" : u < 0.94 ? "O" : u < 0.97 ? "F" : "Cl";
    const int idx = mol.add_atom(atom_of(element));
    BondOrder order = BondOrder::kSingle;
    if (free_valence(mol, anchor) >= 2 && valence(mol.atom(idx)) >= 2
        && !mol.atom(anchor).aromatic && chance(rng, 0.12)) {
      order = BondOrder::kDouble;
    }
    mol.add_bond(anchor, idx, order);
  }
  // Occasional saturated ring closure between carbons 4 to 6 bonds apart.
  if (chance(rng, 0.3)) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      const int a = uniform(rng, 0, mol.size() - 1);
      const int b = uniform(rng, 0, mol.size() - 1);
      if (a == b || mol.atom(a).element != "C" || mol.atom(b).element != "C"
          || mol.atom(a).aromatic || mol.atom(b).aromatic
          || free_valence(mol, a) < 1 || free_valence(mol, b) < 1) {
        continue;
      }
      // Breadth-first distance from a to b.
      std::vector<int> dist(mol.size(), -1);
      std::vector<int> queue = { a };
      dist[a] = 0;
      for (std::size_t q = 0; q < queue.size(); ++q) {
        for (const Neighbor &n: mol.neighbors(queue[q])) {
          if (dist[n.atom] < 0) {
            dist[n.atom] = dist[queue[q]] + 1;
            queue.push_back(n.atom);
          }
        }
      }
      if (dist[b] >= 4 && dist[b] <= 6) {
        mol.add_bond(a, b, BondOrder::kSingle);
        break;
      }
    }
  }
  return mol;
}

Dataset planted_motif_dataset(const SynthConfig &config) {
  config.validate();
  Rng rng(config.seed);
  const int actives = static_cast<int>(std::lround(config.size * config.active_fraction));
  std::vector<int> plan(config.size, 0);
  std::fill(plan.begin(), plan.begin() + actives, 1);
  std::shuffle(plan.begin(), plan.end(), rng);

  Dataset data;
  data.name = "planted_motif";
  for (int i = 0; i < config.size; ++i) {
    Molecule mol;
    while (true) {
      mol = random_scaffold(rng, config.min_atoms, config.max_atoms);
      const int anchor = attachable_carbon(mol, rng);
      if (anchor < 0) {
        continue;
      }
      if (plan[i] == 1) {
        add_linked_nitrile(mol, anchor, "S");
        break;
      }
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      if (u < 0.3) {
        break;  // plain scaffold
      }
      if (u < 0.55) {
        add_linked_nitrile(mol, anchor, "O");
        break;
      }
      // Sulfur and nitrile on different carbons.
      const int other = attachable_carbon(mol, rng, anchor);
      if (other < 0) {
        continue;
      }
      if (u < 0.8) {
        add_sulfur(mol, anchor, rng);
        add_nitrile(mol, other);
      } else {
        add_nitrile(mol, anchor);
        add_linked_nitrile(mol, other, "O");
        if (const int third = attachable_carbon(mol, rng, anchor); third >= 0) {
          add_sulfur(mol, third, rng);
        }
      }
      break;
    }
    Record rec;
    rec.smiles = canonical_smiles(mol);
    rec.label = has_thiocyanate(mol) ? 1 : 0;
    rec.id = "m" + std::to_string(i + 1);
    if (rec.label != plan[i]) {
      throw std::logic_error("planted label disagrees with the structure check");
    }
    data.records.push_back(std::move(rec));
  }
  return data;
}

}  // namespace sscreen
