//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_CLASSICAL_H_
#define SSCREEN_CLASSICAL_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sscreen/archive.h"
#include "sscreen/features.h"

namespace sscreen {

/// Binary classifier over sparse n-gram features producing P(label = 1).
class ProbClassifier {
public:
  virtual ~ProbClassifier() = default;

  virtual std::string kind() const = 0;
  /// Labels are 0/1; x and y have equal length.
  virtual void fit(std::span<const NGramSet> x, std::span<const int> y) = 0;
  /// Throws std::logic_error before fit().
  virtual std::vector<double> predict_proba(std::span<const NGramSet> x) const = 0;
  virtual bool fitted() const = 0;

  virtual void save(Archive &ar) const = 0;
};

/// Rebuilds a fitted classifier from save(). Throws std::runtime_error for
/// unknown kinds.
std::unique_ptr<ProbClassifier> load_classifier(const Archive &ar);

// ---- Jaccard kernel ----

/// |a ∩ b| / |a ∪ b| over the index sets; 1 when both are empty. Throws
/// std::invalid_argument for count-mode input or differing vocabularies.
double jaccard_kernel(const NGramSet &a, const NGramSet &b);

struct GramMatrix {
  Eigen::MatrixXd values;
  // Positions of the rows in the caller's sample list.
  std::vector<int> ids;

  int size() const { return static_cast<int>(values.rows()); }
  /// Principal submatrix on the given rows (positions into ids).
  GramMatrix subset(std::span<const int> rows) const;
};

GramMatrix gram_matrix(std::span<const NGramSet> x);
/// rows(a) x rows(b) kernel values.
Eigen::MatrixXd cross_kernel(std::span<const NGramSet> a,
                             std::span<const NGramSet> b);

// ---- SVM ----

struct SvmDualSolution {
  Eigen::VectorXd alpha;
  double rho = 0.0;
  long iterations = 0;
};

/// Soft-margin dual  min ½ αᵀQα − Σα  s.t. 0 ≤ α ≤ C, Σ yᵢαᵢ = 0, with
/// Q = yyᵀ∘K, by SMO with second-order working-set selection. Stops when
/// the maximal KKT violation drops below eps. Labels are 0/1.
SvmDualSolution solve_svm_dual(const Eigen::MatrixXd &kernel,
                               std::span<const int> labels, double c,
                               double eps = 1e-3);

double svm_dual_objective(const Eigen::MatrixXd &kernel,
                          std::span<const int> labels,
                          const Eigen::VectorXd &alpha);

/// max over I_up of −y∇f minus min over I_low of −y∇f; zero at optimum.
double svm_kkt_violation(const Eigen::MatrixXd &kernel,
                         std::span<const int> labels,
                         const Eigen::VectorXd &alpha, double c);

struct PlattParams {
  double a = 0.0;
  double b = 0.0;
};

/// Sigmoid 1 / (1 + exp(A f + B)) fitted by Newton's method with
/// backtracking on regularized targets.
PlattParams fit_platt(std::span<const double> decision,
                      std::span<const int> labels);
/// Clamped to [1e-12, 1 - 1e-12].
double platt_probability(const PlattParams &p, double decision);

struct SvmModel {
  std::vector<NGramSet> support;
  std::vector<double> coef;  // αᵢ yᵢ
  double rho = 0.0;
  double c = 1.0;
  PlattParams platt;

  double decision(const NGramSet &x) const;
  double probability(const NGramSet &x) const;
};

/// Solves the dual on the given Gram matrix, then fits Platt scaling on
/// out-of-fold decision values from an internal stratified 3-fold split of
/// the same Gram matrix. When a class has fewer than 3 members the
/// in-sample decision values are used instead. Throws std::invalid_argument
/// for single-class labels.
SvmModel svm_fit(const GramMatrix &gram, std::span<const NGramSet> x,
                 std::span<const int> y, double c, std::uint64_t seed);

class SvmClassifier final : public ProbClassifier {
public:
  explicit SvmClassifier(double c = 1.0, std::uint64_t seed = 0);

  std::string kind() const override { return "svm"; }
  void fit(std::span<const NGramSet> x, std::span<const int> y) override;
  std::vector<double> predict_proba(std::span<const NGramSet> x) const override;
  bool fitted() const override { return fitted_; }
  void save(Archive &ar) const override;
  static SvmClassifier load(const Archive &ar);

  const SvmModel &model() const { return model_; }

private:
  double c_;
  std::uint64_t seed_;
  bool fitted_ = false;
  SvmModel model_;
};

// ---- Bernoulli naive Bayes ----

/// Features that never occur in the training data are not part of the
/// model and are ignored at prediction time.
class NaiveBayesClassifier final : public ProbClassifier {
public:
  explicit NaiveBayesClassifier(double alpha = 1.0);

  std::string kind() const override { return "nb"; }
  void fit(std::span<const NGramSet> x, std::span<const int> y) override;
  std::vector<double> predict_proba(std::span<const NGramSet> x) const override;
  bool fitted() const override { return fitted_; }
  void save(Archive &ar) const override;
  static NaiveBayesClassifier load(const Archive &ar);

  int num_features() const { return static_cast<int>(features_.size()); }

private:
  double alpha_;
  bool fitted_ = false;
  std::vector<std::uint32_t> features_;  // sorted vocabulary indices
  double log_prior_[2] = { 0.0, 0.0 };
  // Σ_j log(1 − θ_cj) and per-feature log θ_cj − log(1 − θ_cj).
  double absent_sum_[2] = { 0.0, 0.0 };
  std::vector<double> present_delta_[2];
};

// ---- Random forest ----

struct TreeNode {
  int feature = -1;  // vocabulary index; -1 for a leaf
  double threshold = 0.0;  // count <= threshold goes left
  int left = -1;
  int right = -1;
  double positive_fraction = 0.0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(const NGramSet &x) const;
};

class RandomForestClassifier final : public ProbClassifier {
public:
  RandomForestClassifier(int trees = 200, int min_leaf = 2,
                         std::uint64_t seed = 0);

  std::string kind() const override { return "rf"; }
  void fit(std::span<const NGramSet> x, std::span<const int> y) override;
  std::vector<double> predict_proba(std::span<const NGramSet> x) const override;
  bool fitted() const override { return fitted_; }
  void save(Archive &ar) const override;
  static RandomForestClassifier load(const Archive &ar);

  const std::vector<DecisionTree> &trees() const { return trees_; }

private:
  int num_trees_;
  int min_leaf_;
  std::uint64_t seed_;
  bool fitted_ = false;
  std::vector<DecisionTree> trees_;
};

}  // namespace sscreen

#endif  // SSCREEN_CLASSICAL_H_
