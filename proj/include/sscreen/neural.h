//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_NEURAL_H_
#define SSCREEN_NEURAL_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sscreen/archive.h"
#include "sscreen/features.h"
#include "sscreen/random.h"

namespace sscreen {

/// Named dense tensors (vectors are n x 1). Gradients share the layout of
/// the parameters they belong to.
struct ParamSet {
  std::vector<std::string> names;
  std::vector<Eigen::MatrixXd> mats;

  int add(std::string name, Eigen::MatrixXd m);
  int count() const { return static_cast<int>(mats.size()); }
  ParamSet zeros_like() const;
  void set_zero();
  long num_scalars() const;
  double squared_norm() const;
  void scale(double s);
  void add_scaled(const ParamSet &other, double s);
  bool all_finite() const;

  void save(Archive &ar, const std::string &prefix) const;
  /// Reads tensors saved under prefix into the existing layout; throws
  /// std::runtime_error on shape mismatch.
  void load(const Archive &ar, const std::string &prefix);
};

/// Differentiable sequence model trained by minibatch gradient descent.
class SequenceNet {
public:
  virtual ~SequenceNet() = default;

  virtual std::string kind() const = 0;
  /// Loss of one sample; adds d(loss)/d(params) into grad.
  virtual double loss_and_grad(const SymbolSeq &seq, int label,
                               ParamSet &grad) const = 0;
  virtual double loss(const SymbolSeq &seq, int label) const = 0;

  ParamSet params;
};

// ---- CNN ----

struct CnnConfig {
  std::vector<int> regions = { 5, 3 };
  int filters = 64;

  void validate() const;
};

/// One-hot convolution over 2-char symbols, ReLU, max over time, dense
/// layer, sigmoid. A window takes part in pooling only when it starts on a
/// non-PAD symbol; a filter with no such window pools to 0.
class Cnn final : public SequenceNet {
public:
  Cnn(int vocab_size, CnnConfig config, Rng &rng);

  std::string kind() const override { return "cnn"; }
  double predict(const SymbolSeq &seq) const;
  double loss_and_grad(const SymbolSeq &seq, int label,
                       ParamSet &grad) const override;
  double loss(const SymbolSeq &seq, int label) const override;

  int vocab_size() const { return vocab_size_; }
  const CnnConfig &config() const { return config_; }
  int weight_index(int region) const { return 2 * region; }
  int bias_index(int region) const { return 2 * region + 1; }
  int dense_weight_index() const;
  int dense_bias_index() const;

private:
  struct Pooled {
    Eigen::VectorXd h;
    std::vector<int> argmax;  // window start per unit, -1 when empty
    std::vector<int> padded;
  };
  Pooled pool(const SymbolSeq &seq) const;

  int vocab_size_;
  CnnConfig config_;
};

// ---- GRU ----

struct GruConfig {
  int embed = 32;
  int hidden = 64;
  int max_length = 250;

  void validate() const;
};

/// Number of sequences cut to GruConfig::max_length since start-up.
long gru_truncation_count();

/// GRU recurrence shared by the classifier and the language model:
///   z = σ(Wz x + Uz h + bz), r = σ(Wr x + Ur h + br)
///   ĥ = tanh(Wh x + Uh (r ⊙ h) + bh), h' = (1 − z) ⊙ h + z ⊙ ĥ
/// with x the embedding row of the input symbol and h0 = 0.
struct GruLayout {
  int embed = 0;
  int wz = 0;
  int uz = 0;
  int bz = 0;
  int wr = 0;
  int ur = 0;
  int br = 0;
  int wh = 0;
  int uh = 0;
  int bh = 0;
};

struct GruTrace {
  std::vector<int> inputs;
  std::vector<Eigen::VectorXd> h;  // h[0] = 0, h[t+1] after input t
  std::vector<Eigen::VectorXd> z;
  std::vector<Eigen::VectorXd> r;
  std::vector<Eigen::VectorXd> cand;
};

GruLayout add_gru_params(ParamSet &p, int input_symbols, const GruConfig &cfg,
                         Rng &rng);
GruTrace gru_run(const ParamSet &p, const GruLayout &l,
                 std::span<const int> inputs);
/// Backpropagates dh (one vector per step, gradient w.r.t. h[t+1]) through
/// the recurrence.
void gru_backward(const ParamSet &p, const GruLayout &l, const GruTrace &trace,
                  std::vector<Eigen::VectorXd> dh, ParamSet &grad);

/// Many-to-one GRU: final hidden state, dense layer, sigmoid.
class GruClassifier final : public SequenceNet {
public:
  GruClassifier(int vocab_size, GruConfig config, Rng &rng);

  std::string kind() const override { return "gru"; }
  double predict(const SymbolSeq &seq) const;
  double loss_and_grad(const SymbolSeq &seq, int label,
                       ParamSet &grad) const override;
  double loss(const SymbolSeq &seq, int label) const override;
  /// Final hidden state.
  Eigen::VectorXd encode(const SymbolSeq &seq) const;

  int vocab_size() const { return vocab_size_; }
  const GruConfig &config() const { return config_; }
  const GruLayout &layout() const { return layout_; }

private:
  std::vector<int> clipped(const SymbolSeq &seq) const;

  int vocab_size_;
  GruConfig config_;
  GruLayout layout_;
  int readout_w_ = 0;
  int readout_b_ = 0;
};

/// Next-symbol GRU language model. Input index V is BOS, output index V is
/// EOS; the label argument of the loss is ignored.
class GruLanguageModel final : public SequenceNet {
public:
  GruLanguageModel(int vocab_size, GruConfig config, Rng &rng);

  std::string kind() const override { return "lm"; }
  /// Σ log p(next symbol), EOS included.
  double loglik(const SymbolSeq &seq) const;
  /// Softmax rows, one per predicted position (L + 1 rows of size V + 1).
  std::vector<Eigen::VectorXd> next_distributions(const SymbolSeq &seq) const;
  double loss_and_grad(const SymbolSeq &seq, int label,
                       ParamSet &grad) const override;
  double loss(const SymbolSeq &seq, int label) const override;

  int vocab_size() const { return vocab_size_; }
  const GruConfig &config() const { return config_; }

private:
  std::vector<int> inputs(const SymbolSeq &seq) const;

  int vocab_size_;
  GruConfig config_;
  GruLayout layout_;
  int out_w_ = 0;
  int out_b_ = 0;
};

// ---- Stacker ----

/// Logistic regression on standardized features, fitted by damped Newton
/// steps with step halving. The intercept is not penalized.
class LogisticStacker {
public:
  explicit LogisticStacker(double l2 = 1e-4) : l2_(l2) {}

  void fit(const Eigen::MatrixXd &x, std::span<const int> y);
  double predict(const Eigen::VectorXd &features) const;
  /// Penalized mean log-loss after each accepted iteration, starting with
  /// the initial point.
  const std::vector<double> &loss_history() const { return history_; }

  void save(Archive &ar, const std::string &prefix) const;
  void load(const Archive &ar, const std::string &prefix);

private:
  double l2_;
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;
  Eigen::VectorXd weights_;  // intercept last
  std::vector<double> history_;
};

/// [loglik_active / n, loglik_inactive / n, n] with n = predicted positions.
Eigen::VectorXd stacker_features(const GruLanguageModel &active,
                                 const GruLanguageModel &inactive,
                                 const SymbolSeq &seq);

// ---- Training ----

struct TrainConfig {
  std::string optimizer = "adam";  // adam | sgd
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 100;
  int patience = 10;
  double clip_norm = 5.0;
  std::uint64_t seed = 0;

  void validate() const;
  std::string describe() const;
};

struct TrainResult {
  int best_epoch = -1;  // 0-based; -1 when no epoch improved
  int epochs_run = 0;
  double best_validation = 0.0;
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
};

/// Produces the training sequence for sample i in the current epoch.
using SampleFn = std::function<SymbolSeq(int index, Rng &rng)>;
/// Validation loss of the current parameters (lower is better).
using ValidationFn = std::function<double(const SequenceNet &)>;

/// Minibatch training with per-epoch reshuffling and resampling, global-norm
/// gradient clipping, and early stopping; the parameters of the best
/// validation epoch are restored. Throws std::runtime_error with the config
/// echoed when the loss stops being finite.
TrainResult train_network(SequenceNet &net, int num_samples,
                          std::span<const int> labels, const SampleFn &sample,
                          const ValidationFn &validation,
                          const TrainConfig &config);

/// Mean loss and gradient over a batch (for checks).
double batch_loss_and_grad(const SequenceNet &net,
                           std::span<const SymbolSeq> seqs,
                           std::span<const int> labels, ParamSet &grad);

}  // namespace sscreen

#endif  // SSCREEN_NEURAL_H_
