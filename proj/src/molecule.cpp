//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/molecule.h"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace sscreen {
namespace {
// Index in this table is the atomic number.
constexpr std::array<std::string_view, 119> kSymbols = {
  "*",  "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
  "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",
  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br",
  "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag",
  "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
  "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
  "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
  "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am",
  "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh",
  "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
};
}  // namespace

int atomic_number(std::string_view symbol) {
  for (std::size_t i = 0; i < kSymbols.size(); ++i) {
    if (kSymbols[i] == symbol) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

bool is_organic_subset(std::string_view symbol, bool aromatic) {
  if (aromatic) {
    return can_be_aromatic(symbol) && symbol != "*";
  }
  static constexpr std::array<std::string_view, 11> kOrganic = {
    "B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I", "*",
  };
  return std::find(kOrganic.begin(), kOrganic.end(), symbol) != kOrganic.end();
}

bool can_be_aromatic(std::string_view symbol) {
  return symbol == "B" || symbol == "C" || symbol == "N" || symbol == "O"
         || symbol == "P" || symbol == "S" || symbol == "*";
}

std::string_view to_string(BondOrder order) {
  switch (order) {
  case BondOrder::kSingle:
    return "single";
  case BondOrder::kDouble:
    return "double";
  case BondOrder::kTriple:
    return "triple";
  case BondOrder::kAromatic:
    return "aromatic";
  }
  return "?";
}

int Molecule::add_atom(Atom atom) {
  if (atomic_number(atom.element) < 0) {
    throw std::invalid_argument("unsupported element '" + atom.element + "'");
  }
  if (atom.aromatic && !can_be_aromatic(atom.element)) {
    throw std::invalid_argument("element '" + atom.element
                                + "' cannot be aromatic");
  }
  if (!atom.bracket
      && (atom.charge != 0 || atom.isotope || atom.explicit_h)) {
    throw std::invalid_argument(
        "charge, isotope and hydrogen count require a bracket atom");
  }
  if (atom.isotope && *atom.isotope <= 0) {
    throw std::invalid_argument("isotope must be positive");
  }
  if (atom.explicit_h && *atom.explicit_h < 0) {
    throw std::invalid_argument("hydrogen count must be non-negative");
  }

  atoms_.push_back(std::move(atom));
  adj_.emplace_back();
  return size() - 1;
}

int Molecule::add_bond(int src, int dst, BondOrder order) {
  if (src < 0 || dst < 0 || src >= size() || dst >= size()) {
    throw std::invalid_argument("bond endpoint out of range");
  }
  if (src == dst) {
    throw std::invalid_argument("bond endpoints must differ");
  }
  if (find_bond(src, dst) >= 0) {
    throw std::invalid_argument("duplicate bond");
  }

  const int idx = num_bonds();
  bonds_.push_back({ src, dst, order });
  adj_[src].push_back({ dst, idx });
  adj_[dst].push_back({ src, idx });
  return idx;
}

int Molecule::find_bond(int a, int b) const {
  if (a < 0 || a >= size()) {
    return -1;
  }
  for (const Neighbor &nei: adj_[a]) {
    if (nei.atom == b) {
      return nei.bond;
    }
  }
  return -1;
}

bool Molecule::is_connected() const {
  if (atoms_.empty()) {
    return false;
  }

  std::vector<char> seen(atoms_.size(), 0);
  std::vector<int> stack = { 0 };
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    for (const Neighbor &nei: adj_[cur]) {
      if (seen[nei.atom] == 0) {
        seen[nei.atom] = 1;
        ++count;
        stack.push_back(nei.atom);
      }
    }
  }
  return count == size();
}

Molecule Molecule::permuted(std::span<const int> perm) const {
  if (static_cast<int>(perm.size()) != size()) {
    throw std::invalid_argument("permutation size mismatch");
  }

  std::vector<int> inverse(perm.size(), -1);
  for (int i = 0; i < size(); ++i) {
    if (perm[i] < 0 || perm[i] >= size() || inverse[perm[i]] >= 0) {
      throw std::invalid_argument("not a permutation");
    }
    inverse[perm[i]] = i;
  }

  Molecule result;
  for (int i = 0; i < size(); ++i) {
    result.add_atom(atoms_[inverse[i]]);
  }
  for (const Bond &b: bonds_) {
    result.add_bond(perm[b.src], perm[b.dst], b.order);
  }
  return result;
}

}  // namespace sscreen
