//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sscreen/random.h"

namespace sscreen {
namespace {
void check_pair(std::span<const double> p, std::span<const int> y) {
  if (p.size() != y.size()) {
    throw std::invalid_argument("probabilities and labels differ in length: "
                                + std::to_string(p.size()) + " vs "
                                + std::to_string(y.size()));
  }
  if (p.empty()) {
    throw std::invalid_argument("metric of an empty sample");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (y[i] != 0 && y[i] != 1) {
      throw std::invalid_argument("label must be 0 or 1");
    }
    if (!(p[i] >= 0.0 && p[i] <= 1.0)) {
      throw std::invalid_argument("probability outside [0,1] at index "
                                  + std::to_string(i));
    }
  }
}
}  // namespace

double log_loss(std::span<const double> probabilities,
                std::span<const int> labels) {
  check_pair(probabilities, labels);
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p =
        std::clamp(probabilities[i], kLogLossClamp, 1.0 - kLogLossClamp);
    total += labels[i] == 1 ? std::log(p) : std::log1p(-p);
  }
  return -total / static_cast<double>(labels.size());
}

double accuracy(std::span<const double> probabilities,
                std::span<const int> labels) {
  check_pair(probabilities, labels);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    hits += static_cast<int>(probabilities[i] >= 0.5) == labels[i];
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

std::vector<int> stratified_assignment(std::span<const int> labels, int k,
                                       std::uint64_t seed) {
  if (k < 2) {
    throw std::invalid_argument("fold count must be at least 2");
  }
  std::vector<int> fold(labels.size(), -1);
  int offset = 0;
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<int> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] != 0 && labels[i] != 1) {
        throw std::invalid_argument("label must be 0 or 1");
      }
      if (labels[i] == cls) {
        members.push_back(static_cast<int>(i));
      }
    }
    if (members.empty()) {
      continue;
    }
    if (static_cast<int>(members.size()) < k) {
      throw std::invalid_argument(
          "class " + std::to_string(cls) + " has " + std::to_string(members.size())
          + " members, fewer than the " + std::to_string(k) + " folds");
    }
    Rng rng(derive_seed(seed, { static_cast<std::uint64_t>(cls) }));
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t r = 0; r < members.size(); ++r) {
      fold[members[r]] = static_cast<int>((offset + r) % k);
    }
    offset = static_cast<int>((offset + members.size()) % k);
  }
  return fold;
}

}  // namespace sscreen
