//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_RANDOM_H_
#define SSCREEN_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sscreen {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for an independent stream identified by a path of integers below a
/// master seed, e.g. derive_seed(seed, {fold, grid_index}). Streams depend
/// only on the path, never on scheduling order.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master);
  for (const std::uint64_t p: path) {
    h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  }
  return h;
}

}  // namespace sscreen

#endif  // SSCREEN_RANDOM_H_
