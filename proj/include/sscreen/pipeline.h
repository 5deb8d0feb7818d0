//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_PIPELINE_H_
#define SSCREEN_PIPELINE_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sscreen/archive.h"
#include "sscreen/config.h"
#include "sscreen/dataset.h"

namespace sscreen {

/// Representation, model and every fitted object (vocabulary, calibration,
/// networks) needed to go from SMILES to a probability. All fitted state is
/// derived from the rows passed to fit().
class Pipeline {
public:
  virtual ~Pipeline() = default;

  const ModelSettings &settings() const { return settings_; }

  /// Fits on the given rows of data. seed drives every random choice.
  virtual void fit(const PreparedData &data, std::span<const int> rows,
                   std::uint64_t seed) = 0;
  /// Probability of the active class for each row. Sequence models average
  /// over settings().predict_walks random writings when augmentation is on.
  std::vector<double> predict(const PreparedData &data,
                              std::span<const int> rows) const;
  /// As predict() with an explicit walk count (ignored by n-gram models).
  virtual std::vector<double> predict_walks(const PreparedData &data,
                                            std::span<const int> rows,
                                            int walks) const = 0;
  /// Ids of the rows the pipeline was fitted on.
  const std::vector<std::string> &training_ids() const { return training_ids_; }
  /// Fit summary for logs (epochs run, vocabulary size, ...).
  virtual nlohmann::json diagnostics() const { return nlohmann::json::object(); }

  void save(Archive &ar) const;

protected:
  explicit Pipeline(ModelSettings settings);
  void remember_training(const PreparedData &data, std::span<const int> rows);
  virtual void save_model(Archive &ar) const = 0;
  virtual void load_model(const Archive &ar) = 0;

  ModelSettings settings_;
  std::uint64_t seed_ = 0;
  std::vector<std::string> training_ids_;

  friend std::unique_ptr<Pipeline> load_pipeline(const Archive &ar);
};

/// Builds an unfitted pipeline; throws std::invalid_argument for invalid
/// settings.
std::unique_ptr<Pipeline> make_pipeline(const ModelSettings &settings);
std::unique_ptr<Pipeline> load_pipeline(const Archive &ar);

/// Per-class shuffled holdout of round(fraction * n_c) members (at least one
/// when the class has two or more). Returns {fit rows, holdout rows}, both
/// sorted.
std::pair<std::vector<int>, std::vector<int>> holdout_split(
    std::span<const int> rows, std::span<const int> labels, double fraction,
    std::uint64_t seed);

/// Random writing of row's molecule used at predict time; depends only on
/// (seed, record id, walk index).
std::string predict_writing(const PreparedData &data, int row, int walk,
                            std::uint64_t seed);

}  // namespace sscreen

#endif  // SSCREEN_PIPELINE_H_
