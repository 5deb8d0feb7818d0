//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/canonical.h"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <vector>

#include "sscreen/smiles.h"

namespace sscreen {
namespace {
using Key = std::vector<std::int64_t>;

std::vector<int> dense_rank(const std::vector<Key> &keys) {
  std::vector<Key> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<int> ranks(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    ranks[i] = static_cast<int>(
        std::lower_bound(sorted.begin(), sorted.end(), keys[i])
        - sorted.begin());
  }
  return ranks;
}

int count_classes(const std::vector<int> &ranks) {
  if (ranks.empty()) {
    return 0;
  }
  return *std::max_element(ranks.begin(), ranks.end()) + 1;
}

// Degree first so that the lowest rank tends to be a terminal atom.
std::vector<int> initial_ranks(const Molecule &mol) {
  std::vector<Key> keys(mol.size());
  for (int i = 0; i < mol.size(); ++i) {
    const Atom &a = mol.atom(i);
    keys[i] = { mol.degree(i),
                atomic_number(a.element),
                a.aromatic ? 1 : 0,
                a.charge,
                a.isotope.value_or(0),
                a.explicit_h.value_or(-1) };
  }
  return dense_rank(keys);
}

std::vector<int> refine(const Molecule &mol, std::vector<int> ranks) {
  int classes = count_classes(ranks);
  while (classes < mol.size()) {
    std::vector<Key> keys(mol.size());
    for (int i = 0; i < mol.size(); ++i) {
      Key nbrs;
      for (const Neighbor &nei: mol.neighbors(i)) {
        nbrs.push_back(std::int64_t { ranks[nei.atom] } * 8
                       + static_cast<std::int64_t>(mol.bond(nei.bond).order));
      }
      std::sort(nbrs.begin(), nbrs.end());
      keys[i].reserve(nbrs.size() + 1);
      keys[i].push_back(ranks[i]);
      keys[i].insert(keys[i].end(), nbrs.begin(), nbrs.end());
    }
    std::vector<int> next = dense_rank(keys);
    const int next_classes = count_classes(next);
    if (next_classes == classes) {
      break;
    }
    ranks = std::move(next);
    classes = next_classes;
  }
  return ranks;
}

class IsomorphismSearch {
public:
  IsomorphismSearch(const Molecule &a, const Molecule &b,
                    std::vector<int> rank_a, std::vector<int> rank_b)
      : a_(a), b_(b), rank_a_(std::move(rank_a)), rank_b_(std::move(rank_b)),
        map_ab_(a.size(), -1), map_ba_(b.size(), -1) {
    // BFS order keeps every atom after the first adjacent to a mapped atom.
    std::vector<char> seen(a.size(), 0);
    std::queue<int> queue;
    queue.push(0);
    seen[0] = 1;
    parent_.assign(a.size(), -1);
    while (!queue.empty()) {
      const int cur = queue.front();
      queue.pop();
      order_.push_back(cur);
      for (const Neighbor &nei: a.neighbors(cur)) {
        if (seen[nei.atom] == 0) {
          seen[nei.atom] = 1;
          parent_[nei.atom] = cur;
          queue.push(nei.atom);
        }
      }
    }
  }

  bool run() {
    if (static_cast<int>(order_.size()) != a_.size()) {
      return false;
    }
    return extend(0);
  }

private:
  bool feasible(int va, int vb) const {
    if (map_ba_[vb] >= 0 || rank_a_[va] != rank_b_[vb]
        || a_.degree(va) != b_.degree(vb)
        || !a_.atom(va).same_identity(b_.atom(vb))) {
      return false;
    }
    int mapped_a = 0;
    for (const Neighbor &nei: a_.neighbors(va)) {
      const int image = map_ab_[nei.atom];
      if (image < 0) {
        continue;
      }
      ++mapped_a;
      const int bond = b_.find_bond(vb, image);
      if (bond < 0 || b_.bond(bond).order != a_.bond(nei.bond).order) {
        return false;
      }
    }
    int mapped_b = 0;
    for (const Neighbor &nei: b_.neighbors(vb)) {
      if (map_ba_[nei.atom] >= 0) {
        ++mapped_b;
      }
    }
    return mapped_a == mapped_b;
  }

  bool try_pair(std::size_t depth, int va, int vb) {
    if (!feasible(va, vb)) {
      return false;
    }
    map_ab_[va] = vb;
    map_ba_[vb] = va;
    if (extend(depth + 1)) {
      return true;
    }
    map_ab_[va] = -1;
    map_ba_[vb] = -1;
    return false;
  }

  bool extend(std::size_t depth) {
    if (depth == order_.size()) {
      return true;
    }
    const int va = order_[depth];
    const int pa = parent_[va];
    if (pa < 0) {
      for (int vb = 0; vb < b_.size(); ++vb) {
        if (try_pair(depth, va, vb)) {
          return true;
        }
      }
      return false;
    }
    for (const Neighbor &nei: b_.neighbors(map_ab_[pa])) {
      if (try_pair(depth, va, nei.atom)) {
        return true;
      }
    }
    return false;
  }

  const Molecule &a_;
  const Molecule &b_;
  std::vector<int> rank_a_;
  std::vector<int> rank_b_;
  std::vector<int> map_ab_;
  std::vector<int> map_ba_;
  std::vector<int> order_;
  std::vector<int> parent_;
};
}  // namespace

std::vector<int> refined_classes(const Molecule &mol) {
  return refine(mol, initial_ranks(mol));
}

std::vector<int> canonical_ranks(const Molecule &mol) {
  std::vector<int> ranks = refined_classes(mol);
  while (count_classes(ranks) < mol.size()) {
    std::vector<int> sizes(mol.size(), 0);
    for (const int r: ranks) {
      ++sizes[r];
    }
    const int tied = static_cast<int>(
        std::find_if(sizes.begin(), sizes.end(), [](int s) { return s > 1; })
        - sizes.begin());
    const int chosen = static_cast<int>(
        std::find(ranks.begin(), ranks.end(), tied) - ranks.begin());

    std::vector<Key> keys(mol.size());
    for (int i = 0; i < mol.size(); ++i) {
      keys[i] = { std::int64_t { ranks[i] } * 2 - (i == chosen ? 1 : 0) };
    }
    ranks = refine(mol, dense_rank(keys));
  }
  return ranks;
}

std::string canonical_smiles(const Molecule &mol) {
  const std::vector<int> ranks = canonical_ranks(mol);

  WalkOrder walk;
  walk.start_atom = static_cast<int>(
      std::min_element(ranks.begin(), ranks.end()) - ranks.begin());
  walk.neighbor_order.resize(mol.size());
  for (int i = 0; i < mol.size(); ++i) {
    auto &order = walk.neighbor_order[i];
    for (const Neighbor &nei: mol.neighbors(i)) {
      order.push_back(nei.atom);
    }
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return ranks[x] < ranks[y]; });
  }
  return write_smiles(mol, walk);
}

bool is_isomorphic(const Molecule &a, const Molecule &b) {
  if (a.size() != b.size() || a.num_bonds() != b.num_bonds()) {
    return false;
  }
  if (a.empty()) {
    return true;
  }

  std::vector<int> rank_a = refined_classes(a);
  std::vector<int> rank_b = refined_classes(b);
  std::vector<int> sa = rank_a;
  std::vector<int> sb = rank_b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa != sb) {
    return false;
  }

  return IsomorphismSearch(a, b, std::move(rank_a), std::move(rank_b)).run();
}

}  // namespace sscreen
