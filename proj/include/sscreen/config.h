//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_CONFIG_H_
#define SSCREEN_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sscreen/features.h"
#include "sscreen/neural.h"

namespace sscreen {

/// Model kinds understood by the harness.
inline constexpr std::string_view kModelKinds[] = { "svm", "nb",  "rf",   "cnn",
                                                    "gru", "rnnlm", "prior" };

bool is_model_kind(std::string_view model);
/// "ngram" for svm/nb/rf/prior, "symbols" for the sequence models.
std::string default_representation(std::string_view model);
/// Throws std::invalid_argument when the pair is not supported.
void check_representation(std::string_view model, std::string_view repr);

/// Every knob of one model fit. Unused fields are ignored by a given model.
struct ModelSettings {
  std::string model = "svm";
  std::string repr = "ngram";

  NGramConfig ngram;
  int stride = 1;

  double c = 1.0;
  double alpha = 1.0;
  int trees = 200;
  int min_leaf = 2;

  CnnConfig cnn;
  GruConfig gru;
  TrainConfig train;

  bool augment = true;
  int train_walks = 10;
  int predict_walks = 20;
  int validation_walks = 5;

  /// Sets one field from its config-file spelling; throws
  /// std::invalid_argument for unknown keys or malformed values.
  void set(std::string_view key, std::string_view value);
  void validate() const;
  /// Sorted "key=value" pairs of every field (round-trips through set()).
  std::vector<std::pair<std::string, std::string>> entries() const;
};

/// True when the key changes the behavior of the given model.
bool key_affects_model(std::string_view key, std::string_view model);

/// Flat "key = value" configuration. Blank lines and '#' comments are
/// skipped. Keys prefixed with "grid." hold comma-separated value lists.
struct EvalConfig {
  std::string dataset;  // report column name; defaults to the file stem
  int outer_k = 5;
  int inner_k = 5;
  int small_inner_k = 3;
  int small_class = 25;

  std::vector<std::pair<std::string, std::string>> settings;
  std::vector<std::pair<std::string, std::vector<std::string>>> grid;

  static EvalConfig parse(std::string_view text);
  static EvalConfig load(const std::string &path);

  /// Base settings for the model with every plain key applied.
  ModelSettings base_settings(std::string_view model, std::string_view repr) const;
  /// FNV-1a of the normalized configuration, as 16 hex digits.
  std::string hash() const;
  std::string normalized() const;
};

/// Named value lists expanded as a cartesian product; the first parameter
/// varies slowest.
struct HyperGrid {
  std::string model;
  std::vector<std::pair<std::string, std::vector<std::string>>> params;
  int inner_k = 5;

  void validate() const;
  int size() const;
  /// Assignments of grid point i in parameter order.
  std::vector<std::pair<std::string, std::string>> point(int i) const;
  static std::string describe(
      const std::vector<std::pair<std::string, std::string>> &point);
};

/// Grid from "grid.*" keys relevant to the model, or the built-in default
/// grid when none are given.
HyperGrid grid_for(const EvalConfig &config, std::string_view model);

std::uint64_t fnv1a(std::string_view text);

}  // namespace sscreen

#endif  // SSCREEN_CONFIG_H_
