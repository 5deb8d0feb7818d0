//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_TESTS_ORACLES_H_
#define SSCREEN_TESTS_ORACLES_H_

#include <span>
#include <utility>

#include <Eigen/Dense>

#include "sscreen/molecule.h"
#include "sscreen/neural.h"

namespace sscreen::testing {

/// Longest simple carbon path and, among those, the smallest diameter,
/// by exhaustive path enumeration. Exponential; keep inputs small.
std::pair<int, int> chain_oracle(const Molecule &mol);

/// Dual objective at the optimum of the C-SVM dual on kernel k, found by
/// accelerated projected gradient. Independent of the SMO solver.
double qp_oracle_objective(const Eigen::MatrixXd &k, std::span<const int> labels,
                           double c);

/// Central differences of the mean batch loss against the analytic
/// gradient; returns the worst |a - n| / max(|a|, |n|, 1e-6).
double max_gradient_error(SequenceNet &net, std::span<const SymbolSeq> seqs,
                          std::span<const int> labels);

}  // namespace sscreen::testing

#endif  // SSCREEN_TESTS_ORACLES_H_
