//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_METRICS_H_
#define SSCREEN_METRICS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace sscreen {

inline constexpr double kLogLossClamp = 1e-15;

/// Mean binary cross-entropy with p clamped to [1e-15, 1 - 1e-15]. Throws
/// std::invalid_argument on length mismatch, empty input, labels outside
/// {0,1} or probabilities outside [0,1].
double log_loss(std::span<const double> probabilities,
                std::span<const int> labels);

/// Fraction of samples where (p >= 0.5) equals the label.
double accuracy(std::span<const double> probabilities,
                std::span<const int> labels);

/// Fold index per sample. Each class (0 first, then 1) is shuffled by its own
/// seeded stream and dealt round-robin; the dealing position carries over
/// from one class to the next so total fold sizes also stay within one.
/// Throws std::invalid_argument when k < 2 or a present class has fewer
/// than k members.
std::vector<int> stratified_assignment(std::span<const int> labels, int k,
                                       std::uint64_t seed);

}  // namespace sscreen

#endif  // SSCREEN_METRICS_H_
