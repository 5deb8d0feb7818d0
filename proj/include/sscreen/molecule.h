//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_MOLECULE_H_
#define SSCREEN_MOLECULE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sscreen {

/// Atomic number for a periodic-table symbol, 0 for the wildcard "*", or -1
/// when the symbol is unknown. Symbols are case sensitive ("Cl", not "CL").
int atomic_number(std::string_view symbol);

/// True for the symbols that may be written without brackets. Aromatic atoms
/// are restricted further to b, c, n, o, p, s.
bool is_organic_subset(std::string_view symbol, bool aromatic);

/// Elements allowed to carry the aromatic flag (written in lowercase).
bool can_be_aromatic(std::string_view symbol);

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

std::string_view to_string(BondOrder order);

struct Atom {
  std::string element = "C";
  bool aromatic = false;
  int charge = 0;
  std::optional<int> isotope;
  std::optional<int> explicit_h;
  bool bracket = false;

  // Chemical identity used for graph matching; `bracket` is a writing detail.
  bool same_identity(const Atom &other) const {
    return element == other.element && aromatic == other.aromatic
           && charge == other.charge && isotope == other.isotope
           && explicit_h == other.explicit_h;
  }
};

struct Bond {
  int src;
  int dst;
  BondOrder order;

  int other(int atom) const { return atom == src ? dst : src; }
};

struct Neighbor {
  int atom;
  int bond;
};

/// Undirected attributed graph. Atoms and bonds are append-only so that the
/// adjacency lists stay in sync with the bond list.
class Molecule {
public:
  Molecule() = default;

  /// Validates the atom invariants; throws std::invalid_argument.
  int add_atom(Atom atom);

  /// Throws std::invalid_argument on self loops, duplicate bonds or indices
  /// out of range.
  int add_bond(int src, int dst, BondOrder order);

  int size() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  bool empty() const { return atoms_.empty(); }

  const Atom &atom(int idx) const { return atoms_[idx]; }
  const Bond &bond(int idx) const { return bonds_[idx]; }
  const std::vector<Atom> &atoms() const { return atoms_; }
  const std::vector<Bond> &bonds() const { return bonds_; }

  std::span<const Neighbor> neighbors(int idx) const { return adj_[idx]; }
  int degree(int idx) const { return static_cast<int>(adj_[idx].size()); }

  /// Index of the bond between the two atoms, or -1.
  int find_bond(int a, int b) const;

  bool is_connected() const;

  /// Relabels atoms: atom i of this molecule becomes atom perm[i] of the
  /// result. Bonds are re-added in the original bond order.
  Molecule permuted(std::span<const int> perm) const;

private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adj_;
};

}  // namespace sscreen

#endif  // SSCREEN_MOLECULE_H_
