//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_EVALUATE_H_
#define SSCREEN_EVALUATE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sscreen/config.h"
#include "sscreen/dataset.h"
#include "sscreen/pipeline.h"

namespace sscreen {

struct FoldPlan {
  int k = 0;
  std::vector<int> assignment;  // fold index per record
  std::uint64_t seed = 0;

  /// Rows in fold f (test) and the rest (train), both ascending.
  std::vector<int> test_rows(int f) const;
  std::vector<int> train_rows(int f) const;
};

/// Per class: shuffle by seed, deal round-robin. Throws
/// std::invalid_argument when a class has fewer than k members.
FoldPlan stratified_folds(const Dataset &dataset, int k, std::uint64_t seed);

/// Throws std::logic_error naming the first id present in both sets.
void assert_disjoint(const PreparedData &data, std::span<const int> train,
                     std::span<const int> test);

/// Inner fold count for an outer-train split: inner_k, or small_inner_k
/// when the smaller class has fewer than small_class members.
int inner_fold_count(std::span<const int> labels, const EvalConfig &config);

struct FoldOutcome {
  int fold = 0;
  bool ok = false;
  std::string error;
  std::string selected;  // winning grid point
  std::vector<double> inner_scores;  // mean inner log-loss per grid point
  int inner_k = 0;
  double log_loss = 0.0;
  double accuracy = 0.0;
  int n_train = 0;
  int n_test = 0;
  double seconds = 0.0;
  nlohmann::json diagnostics;
};

struct EvalRow {
  std::string dataset;
  std::string model;
  std::string repr;
  std::vector<std::optional<double>> fold_log_loss;  // empty optional = failed
  std::vector<std::optional<double>> fold_accuracy;
  std::vector<std::string> selected;
  std::uint64_t seed = 0;
  std::string config_hash;
  double seconds = 0.0;

  bool complete() const;
  /// Mean and population std over the k outer folds; nullopt when any
  /// fold failed.
  std::optional<double> mean_log_loss() const;
  std::optional<double> std_log_loss() const;
  std::optional<double> mean_accuracy() const;
};

/// Called once per successful outer fold with the refitted pipeline.
using OuterFitHook = std::function<void(int fold, const Pipeline &pipeline,
                                        std::span<const int> test_rows)>;

struct NestedCvResult {
  EvalRow row;
  std::vector<FoldOutcome> folds;
};

/// Selects on the outer-train split by mean inner log-loss (ties go to the
/// earlier grid point), refits the winner on the whole outer-train split and
/// scores the outer-test split. A grid with one point skips the inner loop.
/// A fold whose model throws is recorded as failed.
FoldOutcome evaluate_fold(const PreparedData &data, std::span<const int> train,
                          std::span<const int> test, const ModelSettings &base,
                          const HyperGrid &grid, const EvalConfig &config,
                          std::uint64_t seed, int fold,
                          const OuterFitHook &hook = nullptr);

NestedCvResult nested_cv(const PreparedData &data, const std::string &model,
                         const std::string &repr, const EvalConfig &config,
                         std::uint64_t seed, const OuterFitHook &hook = nullptr);

/// "0.249±0.015".
std::string format_mean_std(double mean, double std);

std::string report_markdown(std::span<const EvalRow> rows);
std::string report_csv(std::span<const EvalRow> rows);
/// Inverse of report_csv(); throws std::invalid_argument on malformed input.
std::vector<EvalRow> parse_report_csv(std::string_view text);

nlohmann::json fold_log(const EvalRow &row, const FoldOutcome &outcome);

}  // namespace sscreen

#endif  // SSCREEN_EVALUATE_H_
