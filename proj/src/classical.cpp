//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/classical.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sscreen/metrics.h"
#include "sscreen/random.h"

namespace sscreen {
namespace {
constexpr double kTau = 1e-12;
constexpr double kProbFloor = 1e-12;

void check_labels(std::span<const NGramSet> x, std::span<const int> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("feature and label counts differ");
  }
  if (x.empty()) {
    throw std::invalid_argument("cannot fit on an empty training set");
  }
  for (const int label: y) {
    if (label != 0 && label != 1) {
      throw std::invalid_argument("labels must be 0 or 1");
    }
  }
}

std::pair<int, int> class_counts(std::span<const int> y) {
  const int pos = static_cast<int>(std::count(y.begin(), y.end(), 1));
  return { static_cast<int>(y.size()) - pos, pos };
}

std::uint64_t common_vocabulary(std::span<const NGramSet> x) {
  const std::uint64_t ref = x.empty() ? 0 : x.front().vocabulary_ref;
  for (const NGramSet &s: x) {
    if (s.vocabulary_ref != ref) {
      throw std::invalid_argument("feature sets come from different vocabularies");
    }
  }
  return ref;
}

std::uint32_t count_of(const NGramSet &x, std::uint32_t feature) {
  auto it = std::lower_bound(x.indices.begin(), x.indices.end(), feature);
  if (it == x.indices.end() || *it != feature) {
    return 0;
  }
  return x.counts[it - x.indices.begin()];
}

double sigmoid(double z) {
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<std::uint64_t> to_u64(std::span<const std::uint32_t> v) {
  return { v.begin(), v.end() };
}

void put_sets(Archive &ar, const std::string &prefix,
              std::span<const NGramSet> sets) {
  std::vector<std::uint64_t> offsets = { 0 };
  std::vector<std::uint64_t> indices;
  std::vector<std::uint64_t> counts;
  for (const NGramSet &s: sets) {
    indices.insert(indices.end(), s.indices.begin(), s.indices.end());
    counts.insert(counts.end(), s.counts.begin(), s.counts.end());
    offsets.push_back(indices.size());
  }
  ar.put_u64(prefix + ".offsets", std::move(offsets));
  ar.put_u64(prefix + ".indices", std::move(indices));
  ar.put_u64(prefix + ".counts", std::move(counts));
}

std::vector<NGramSet> get_sets(const Archive &ar, const std::string &prefix,
                               NGramMode mode, std::uint64_t ref) {
  const auto &offsets = ar.u64(prefix + ".offsets");
  const auto &indices = ar.u64(prefix + ".indices");
  const auto &counts = ar.u64(prefix + ".counts");
  std::vector<NGramSet> out;
  for (std::size_t r = 0; r + 1 < offsets.size(); ++r) {
    NGramSet s;
    s.mode = mode;
    s.vocabulary_ref = ref;
    for (std::uint64_t k = offsets[r]; k < offsets[r + 1]; ++k) {
      s.indices.push_back(static_cast<std::uint32_t>(indices.at(k)));
      s.counts.push_back(static_cast<std::uint32_t>(counts.at(k)));
    }
    out.push_back(std::move(s));
  }
  return out;
}

void expect_kind(const Archive &ar, const std::string &kind) {
  if (ar.header.value("kind", "") != kind) {
    throw std::runtime_error("archive does not hold a '" + kind + "' model");
  }
}
}  // namespace

// ---- Jaccard kernel ----

double jaccard_kernel(const NGramSet &a, const NGramSet &b) {
  if (a.mode != NGramMode::kSet || b.mode != NGramMode::kSet) {
    throw std::invalid_argument("Jaccard kernel needs set-mode features");
  }
  if (a.vocabulary_ref != b.vocabulary_ref) {
    throw std::invalid_argument("Jaccard kernel on different vocabularies");
  }
  if (a.empty() && b.empty()) {
    return 1.0;
  }
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t common = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] < b.indices[j]) {
      ++i;
    } else if (b.indices[j] < a.indices[i]) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = a.indices.size() + b.indices.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

GramMatrix GramMatrix::subset(std::span<const int> rows) const {
  GramMatrix out;
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.values.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      out.values(r, c) = values(rows[r], rows[c]);
    }
    out.ids.push_back(ids.at(rows[r]));
  }
  return out;
}

GramMatrix gram_matrix(std::span<const NGramSet> x) {
  GramMatrix g;
  const auto n = static_cast<Eigen::Index>(x.size());
  g.values.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    g.values(r, r) = jaccard_kernel(x[r], x[r]);
    for (Eigen::Index c = r + 1; c < n; ++c) {
      g.values(r, c) = g.values(c, r) = jaccard_kernel(x[r], x[c]);
    }
  }
  g.ids.resize(x.size());
  std::iota(g.ids.begin(), g.ids.end(), 0);
  return g;
}

Eigen::MatrixXd cross_kernel(std::span<const NGramSet> a,
                             std::span<const NGramSet> b) {
  Eigen::MatrixXd k(a.size(), b.size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    for (std::size_t c = 0; c < b.size(); ++c) {
      k(r, c) = jaccard_kernel(a[r], b[c]);
    }
  }
  return k;
}

// ---- SVM dual ----

namespace {
struct DualState {
  const Eigen::MatrixXd &k;
  std::vector<double> y;
  double c;

  bool upper(double a) const { return a >= c; }
  bool lower(double a) const { return a <= 0.0; }
  bool in_up(int t, double a) const {
    return (y[t] > 0 && !upper(a)) || (y[t] < 0 && !lower(a));
  }
  bool in_low(int t, double a) const {
    return (y[t] > 0 && !lower(a)) || (y[t] < 0 && !upper(a));
  }
};

std::vector<double> signed_labels(std::span<const int> labels) {
  std::vector<double> y;
  y.reserve(labels.size());
  for (const int l: labels) {
    if (l != 0 && l != 1) {
      throw std::invalid_argument("labels must be 0 or 1");
    }
    y.push_back(l == 1 ? 1.0 : -1.0);
  }
  return y;
}

Eigen::VectorXd dual_gradient(const Eigen::MatrixXd &k,
                              const std::vector<double> &y,
                              const Eigen::VectorXd &alpha) {
  const Eigen::Index n = k.rows();
  Eigen::VectorXd ya(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    ya(t) = y[t] * alpha(t);
  }
  const Eigen::VectorXd kya = k * ya;
  Eigen::VectorXd g(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    g(t) = y[t] * kya(t) - 1.0;
  }
  return g;
}
}  // namespace

SvmDualSolution solve_svm_dual(const Eigen::MatrixXd &kernel,
                               std::span<const int> labels, double c,
                               double eps) {
  const auto n = static_cast<int>(kernel.rows());
  if (kernel.cols() != n || static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("kernel and label sizes disagree");
  }
  if (!(c > 0.0)) {
    throw std::invalid_argument("C must be positive");
  }
  DualState st { kernel, signed_labels(labels), c };
  const std::vector<double> &y = st.y;

  SvmDualSolution sol;
  sol.alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd &alpha = sol.alpha;
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

  const long max_iter = std::max(10'000'000L, 100L * n);
  for (; sol.iterations < max_iter; ++sol.iterations) {
    int i = -1;
    double gmax = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
      if (st.in_up(t, alpha(t)) && -y[t] * grad(t) >= gmax) {
        gmax = -y[t] * grad(t);
        i = t;
      }
    }
    if (i < 0) {
      break;
    }
    int j = -1;
    double gmin = std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
      if (!st.in_low(t, alpha(t))) {
        continue;
      }
      const double v = -y[t] * grad(t);
      gmin = std::min(gmin, v);
      const double b = gmax - v;
      if (b > 0) {
        double a = kernel(i, i) + kernel(t, t) - 2.0 * kernel(i, t);
        if (a <= 0) {
          a = kTau;
        }
        if (-b * b / a <= best) {
          best = -b * b / a;
          j = t;
        }
      }
    }
    if (j < 0 || gmax - gmin < eps) {
      break;
    }

    const double old_i = alpha(i);
    const double old_j = alpha(j);
    const double qij = y[i] * y[j] * kernel(i, j);
    if (y[i] != y[j]) {
      double quad = kernel(i, i) + kernel(j, j) + 2.0 * qij;
      if (quad <= 0) {
        quad = kTau;
      }
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) {
          alpha(j) = 0;
          alpha(i) = diff;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = -diff;
      }
      if (diff > 0) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = c - diff;
        }
      } else if (alpha(j) > c) {
        alpha(j) = c;
        alpha(i) = c + diff;
      }
    } else {
      double quad = kernel(i, i) + kernel(j, j) - 2.0 * qij;
      if (quad <= 0) {
        quad = kTau;
      }
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = sum - c;
        }
      } else if (alpha(j) < 0) {
        alpha(j) = 0;
        alpha(i) = sum;
      }
      if (sum > c) {
        if (alpha(j) > c) {
          alpha(j) = c;
          alpha(i) = sum - c;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = sum;
      }
    }

    const double di = alpha(i) - old_i;
    const double dj = alpha(j) - old_j;
    for (int t = 0; t < n; ++t) {
      grad(t) += y[t] * (y[i] * kernel(i, t) * di + y[j] * kernel(j, t) * dj);
    }
  }

  // Offset from free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  int n_free = 0;
  for (int t = 0; t < n; ++t) {
    const double yg = y[t] * grad(t);
    if (st.upper(alpha(t))) {
      if (y[t] < 0) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else if (st.lower(alpha(t))) {
      if (y[t] > 0) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  sol.rho = n_free > 0 ? sum_free / n_free : (ub + lb) / 2.0;
  return sol;
}

double svm_dual_objective(const Eigen::MatrixXd &kernel,
                          std::span<const int> labels,
                          const Eigen::VectorXd &alpha) {
  const std::vector<double> y = signed_labels(labels);
  Eigen::VectorXd ya(alpha.size());
  for (Eigen::Index t = 0; t < alpha.size(); ++t) {
    ya(t) = y[t] * alpha(t);
  }
  return 0.5 * ya.dot(kernel * ya) - alpha.sum();
}

double svm_kkt_violation(const Eigen::MatrixXd &kernel,
                         std::span<const int> labels,
                         const Eigen::VectorXd &alpha, double c) {
  DualState st { kernel, signed_labels(labels), c };
  const Eigen::VectorXd grad = dual_gradient(kernel, st.y, alpha);
  double m = -std::numeric_limits<double>::infinity();
  double big_m = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < alpha.size(); ++t) {
    const double v = -st.y[t] * grad(t);
    if (st.in_up(static_cast<int>(t), alpha(t))) {
      m = std::max(m, v);
    }
    if (st.in_low(static_cast<int>(t), alpha(t))) {
      big_m = std::min(big_m, v);
    }
  }
  if (!std::isfinite(m) || !std::isfinite(big_m)) {
    return 0.0;
  }
  return std::max(0.0, m - big_m);
}

// ---- Platt scaling ----

PlattParams fit_platt(std::span<const double> decision,
                      std::span<const int> labels) {
  if (decision.size() != labels.size() || decision.empty()) {
    throw std::invalid_argument("Platt scaling needs matching nonempty inputs");
  }
  const auto [neg, pos] = class_counts(labels);
  const double hi = (pos + 1.0) / (pos + 2.0);
  const double lo = 1.0 / (neg + 2.0);
  const std::size_t n = decision.size();
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = labels[i] == 1 ? hi : lo;
  }

  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = decision[i] * a + b;
      f += z >= 0 ? t[i] * z + std::log1p(std::exp(-z))
                  : (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };

  PlattParams p { 0.0, std::log((neg + 1.0) / (pos + 1.0)) };
  double fval = objective(p.a, p.b);
  constexpr double kSigma = 1e-12;
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = kSigma;
    double h22 = kSigma;
    double h21 = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = decision[i] * p.a + p.b;
      // prob = P(y=1) = 1/(1+e^z), q = 1 - prob
      double prob;
      double q;
      if (z >= 0) {
        prob = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        prob = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = prob * q;
      h11 += decision[i] * decision[i] * d2;
      h22 += d2;
      h21 += decision[i] * d2;
      const double d1 = t[i] - prob;
      g1 += decision[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) {
      break;
    }
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= 1e-10) {
      const double na = p.a + step * da;
      const double nb = p.b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        p = { na, nb };
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < 1e-10) {
      break;
    }
  }
  return p;
}

double platt_probability(const PlattParams &p, double decision) {
  return std::clamp(sigmoid(-(decision * p.a + p.b)), kProbFloor,
                    1.0 - kProbFloor);
}

double SvmModel::decision(const NGramSet &x) const {
  double f = -rho;
  for (std::size_t k = 0; k < support.size(); ++k) {
    f += coef[k] * jaccard_kernel(support[k], x);
  }
  return f;
}

double SvmModel::probability(const NGramSet &x) const {
  return platt_probability(platt, decision(x));
}

SvmModel svm_fit(const GramMatrix &gram, std::span<const NGramSet> x,
                 std::span<const int> y, double c, std::uint64_t seed) {
  check_labels(x, y);
  if (gram.size() != static_cast<int>(x.size())) {
    throw std::invalid_argument("Gram matrix does not match the training set");
  }
  const auto [neg, pos] = class_counts(y);
  if (neg == 0 || pos == 0) {
    throw std::invalid_argument("SVM training needs both classes");
  }

  const SvmDualSolution sol = solve_svm_dual(gram.values, y, c);
  SvmModel model;
  model.c = c;
  model.rho = sol.rho;
  for (int t = 0; t < gram.size(); ++t) {
    if (sol.alpha(t) > 0.0) {
      model.support.push_back(x[t]);
      model.coef.push_back(y[t] == 1 ? sol.alpha(t) : -sol.alpha(t));
    }
  }

  const int n = gram.size();
  std::vector<double> dec(n, 0.0);
  constexpr int kPlattFolds = 3;
  if (std::min(neg, pos) >= kPlattFolds) {
    const std::vector<int> fold =
        stratified_assignment(y, kPlattFolds, derive_seed(seed, { 0x706c61ULL }));
    for (int f = 0; f < kPlattFolds; ++f) {
      std::vector<int> train;
      std::vector<int> held;
      for (int t = 0; t < n; ++t) {
        (fold[t] == f ? held : train).push_back(t);
      }
      std::vector<int> y_train;
      for (const int t: train) {
        y_train.push_back(y[t]);
      }
      const SvmDualSolution part =
          solve_svm_dual(gram.subset(train).values, y_train, c);
      for (const int h: held) {
        double f_val = -part.rho;
        for (std::size_t k = 0; k < train.size(); ++k) {
          const double a = part.alpha(static_cast<Eigen::Index>(k));
          if (a > 0.0) {
            f_val += (y_train[k] == 1 ? a : -a) * gram.values(h, train[k]);
          }
        }
        dec[h] = f_val;
      }
    }
  } else {
    for (int t = 0; t < n; ++t) {
      double f_val = -sol.rho;
      for (int s = 0; s < n; ++s) {
        f_val += (y[s] == 1 ? sol.alpha(s) : -sol.alpha(s)) * gram.values(t, s);
      }
      dec[t] = f_val;
    }
  }
  model.platt = fit_platt(dec, y);
  return model;
}

SvmClassifier::SvmClassifier(double c, std::uint64_t seed) : c_(c), seed_(seed) {
  if (!(c > 0.0)) {
    throw std::invalid_argument("C must be positive");
  }
}

void SvmClassifier::fit(std::span<const NGramSet> x, std::span<const int> y) {
  check_labels(x, y);
  common_vocabulary(x);
  model_ = svm_fit(gram_matrix(x), x, y, c_, seed_);
  fitted_ = true;
}

std::vector<double> SvmClassifier::predict_proba(
    std::span<const NGramSet> x) const {
  if (!fitted_) {
    throw std::logic_error("predict_proba before fit");
  }
  std::vector<double> out;
  out.reserve(x.size());
  for (const NGramSet &s: x) {
    out.push_back(model_.probability(s));
  }
  return out;
}

void SvmClassifier::save(Archive &ar) const {
  if (!fitted_) {
    throw std::logic_error("cannot save an unfitted model");
  }
  ar.header["kind"] = kind();
  ar.header["c"] = c_;
  ar.header["seed"] = seed_;
  ar.header["rho"] = model_.rho;
  ar.header["platt_a"] = model_.platt.a;
  ar.header["platt_b"] = model_.platt.b;
  ar.header["vocabulary_ref"] =
      model_.support.empty() ? 0 : model_.support.front().vocabulary_ref;
  ar.put("coef", model_.coef);
  put_sets(ar, "support", model_.support);
}

SvmClassifier SvmClassifier::load(const Archive &ar) {
  expect_kind(ar, "svm");
  SvmClassifier m(ar.header.at("c").get<double>(),
                  ar.header.at("seed").get<std::uint64_t>());
  m.model_.c = m.c_;
  m.model_.rho = ar.header.at("rho").get<double>();
  m.model_.platt = { ar.header.at("platt_a").get<double>(),
                     ar.header.at("platt_b").get<double>() };
  m.model_.coef = ar.f64("coef");
  m.model_.support = get_sets(ar, "support", NGramMode::kSet,
                              ar.header.at("vocabulary_ref").get<std::uint64_t>());
  if (m.model_.coef.size() != m.model_.support.size()) {
    throw std::runtime_error("corrupt SVM archive");
  }
  m.fitted_ = true;
  return m;
}

// ---- naive Bayes ----

NaiveBayesClassifier::NaiveBayesClassifier(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("smoothing alpha must be positive");
  }
}

void NaiveBayesClassifier::fit(std::span<const NGramSet> x,
                               std::span<const int> y) {
  check_labels(x, y);
  common_vocabulary(x);
  std::vector<std::uint32_t> seen;
  for (const NGramSet &s: x) {
    seen.insert(seen.end(), s.indices.begin(), s.indices.end());
  }
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  features_ = std::move(seen);

  const std::size_t f = features_.size();
  std::vector<double> counts[2] = { std::vector<double>(f, 0.0),
                                    std::vector<double>(f, 0.0) };
  const auto [neg, pos] = class_counts(y);
  const int n_c[2] = { neg, pos };
  for (std::size_t r = 0; r < x.size(); ++r) {
    for (const std::uint32_t idx: x[r].indices) {
      const auto col = std::lower_bound(features_.begin(), features_.end(), idx)
                       - features_.begin();
      counts[y[r]][col] += 1.0;
    }
  }

  const double n = static_cast<double>(y.size());
  for (int c = 0; c < 2; ++c) {
    log_prior_[c] = n_c[c] > 0 ? std::log(n_c[c] / n)
                               : -std::numeric_limits<double>::infinity();
    absent_sum_[c] = 0.0;
    present_delta_[c].assign(f, 0.0);
    for (std::size_t j = 0; j < f; ++j) {
      const double theta = (counts[c][j] + alpha_) / (n_c[c] + 2.0 * alpha_);
      absent_sum_[c] += std::log1p(-theta);
      present_delta_[c][j] = std::log(theta) - std::log1p(-theta);
    }
  }
  fitted_ = true;
}

std::vector<double> NaiveBayesClassifier::predict_proba(
    std::span<const NGramSet> x) const {
  if (!fitted_) {
    throw std::logic_error("predict_proba before fit");
  }
  std::vector<double> out;
  out.reserve(x.size());
  for (const NGramSet &s: x) {
    if (std::isinf(log_prior_[0])) {
      out.push_back(1.0);
      continue;
    }
    if (std::isinf(log_prior_[1])) {
      out.push_back(0.0);
      continue;
    }
    double lj[2] = { log_prior_[0] + absent_sum_[0],
                     log_prior_[1] + absent_sum_[1] };
    for (const std::uint32_t idx: s.indices) {
      auto it = std::lower_bound(features_.begin(), features_.end(), idx);
      if (it != features_.end() && *it == idx) {
        const auto col = it - features_.begin();
        lj[0] += present_delta_[0][col];
        lj[1] += present_delta_[1][col];
      }
    }
    out.push_back(sigmoid(lj[1] - lj[0]));
  }
  return out;
}

void NaiveBayesClassifier::save(Archive &ar) const {
  if (!fitted_) {
    throw std::logic_error("cannot save an unfitted model");
  }
  ar.header["kind"] = kind();
  ar.header["alpha"] = alpha_;
  ar.put_u64("features", to_u64(features_));
  ar.put("log_prior", std::vector<double> { log_prior_[0], log_prior_[1] });
  ar.put("absent_sum", std::vector<double> { absent_sum_[0], absent_sum_[1] });
  ar.put("delta0", present_delta_[0]);
  ar.put("delta1", present_delta_[1]);
}

NaiveBayesClassifier NaiveBayesClassifier::load(const Archive &ar) {
  expect_kind(ar, "nb");
  NaiveBayesClassifier m(ar.header.at("alpha").get<double>());
  for (const std::uint64_t f: ar.u64("features")) {
    m.features_.push_back(static_cast<std::uint32_t>(f));
  }
  const auto &lp = ar.f64("log_prior");
  const auto &as = ar.f64("absent_sum");
  for (int c = 0; c < 2; ++c) {
    m.log_prior_[c] = lp.at(c);
    m.absent_sum_[c] = as.at(c);
  }
  m.present_delta_[0] = ar.f64("delta0");
  m.present_delta_[1] = ar.f64("delta1");
  if (m.present_delta_[0].size() != m.features_.size()
      || m.present_delta_[1].size() != m.features_.size()) {
    throw std::runtime_error("corrupt NB archive");
  }
  m.fitted_ = true;
  return m;
}

// ---- random forest ----

double DecisionTree::predict(const NGramSet &x) const {
  int node = 0;
  while (nodes.at(node).feature >= 0) {
    const TreeNode &n = nodes[node];
    node = count_of(x, static_cast<std::uint32_t>(n.feature)) <= n.threshold
               ? n.left
               : n.right;
  }
  return nodes[node].positive_fraction;
}

namespace {
// Dense view of the training columns. Candidate features are ordered by a
// hash of their column contents so results do not depend on how the
// vocabulary happens to number its entries.
class TreeGrower {
public:
  TreeGrower(std::span<const NGramSet> x, std::span<const int> y, int min_leaf)
      : y_(y), min_leaf_(min_leaf) {
    for (const NGramSet &s: x) {
      columns_.insert(columns_.end(), s.indices.begin(), s.indices.end());
    }
    std::sort(columns_.begin(), columns_.end());
    columns_.erase(std::unique(columns_.begin(), columns_.end()), columns_.end());

    const std::size_t f = columns_.size();
    values_.assign(f, std::vector<std::uint32_t>(x.size(), 0));
    rows_.resize(x.size());
    std::vector<std::uint64_t> key(f, 0x9e3779b97f4a7c15ULL);
    for (std::size_t r = 0; r < x.size(); ++r) {
      for (int k = 0; k < x[r].size(); ++k) {
        const auto col = static_cast<int>(
            std::lower_bound(columns_.begin(), columns_.end(), x[r].indices[k])
            - columns_.begin());
        values_[col][r] = x[r].counts[k];
        rows_[r].push_back(col);
        key[col] = mix64(key[col] ^ mix64((r << 20) ^ x[r].counts[k]));
      }
    }
    rank_.resize(f);
    std::vector<int> order(f);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return key[a] != key[b] ? key[a] < key[b] : a < b;
    });
    for (std::size_t k = 0; k < f; ++k) {
      rank_[order[k]] = static_cast<int>(k);
    }
    mtry_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(f))));
    touched_count_.assign(f, 0);
    touched_min_.assign(f, 0);
    touched_max_.assign(f, 0);
  }

  DecisionTree grow(Rng &rng) {
    const std::size_t n = y_.size();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<int> sample(n);
    for (auto &s: sample) {
      s = static_cast<int>(pick(rng));
    }
    DecisionTree tree;
    build(tree, sample, rng);
    return tree;
  }

private:
  int build(DecisionTree &tree, std::vector<int> &samples, Rng &rng) {
    const int node = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const int n = static_cast<int>(samples.size());
    int pos = 0;
    for (const int s: samples) {
      pos += y_[s];
    }
    tree.nodes[node].positive_fraction = static_cast<double>(pos) / n;
    if (pos == 0 || pos == n || n < 2 * min_leaf_) {
      return node;
    }

    std::vector<int> candidates = nonconstant(samples);
    if (candidates.empty()) {
      return node;
    }
    std::sort(candidates.begin(), candidates.end(),
              [&](int a, int b) { return rank_[a] < rank_[b]; });
    const int m = std::min<int>(mtry_, static_cast<int>(candidates.size()));
    for (int k = 0; k < m; ++k) {
      std::uniform_int_distribution<int> pick(k, static_cast<int>(candidates.size()) - 1);
      std::swap(candidates[k], candidates[pick(rng)]);
    }
    candidates.resize(m);

    int best_col = -1;
    double best_score = -1.0;
    double best_threshold = 0.0;
    std::vector<std::pair<std::uint32_t, int>> vals(n);
    for (const int col: candidates) {
      for (int k = 0; k < n; ++k) {
        vals[k] = { values_[col][samples[k]], y_[samples[k]] };
      }
      std::sort(vals.begin(), vals.end());
      int left_n = 0;
      int left_pos = 0;
      for (int k = 0; k + 1 < n; ++k) {
        ++left_n;
        left_pos += vals[k].second;
        if (vals[k].first == vals[k + 1].first) {
          continue;
        }
        const int right_n = n - left_n;
        if (left_n < min_leaf_ || right_n < min_leaf_) {
          continue;
        }
        const int right_pos = pos - left_pos;
        // Maximizing Σ (p² + q²) / n_child minimizes weighted Gini.
        const double score =
            (static_cast<double>(left_pos) * left_pos
             + static_cast<double>(left_n - left_pos) * (left_n - left_pos))
                / left_n
            + (static_cast<double>(right_pos) * right_pos
               + static_cast<double>(right_n - right_pos) * (right_n - right_pos))
                  / right_n;
        const bool better =
            score > best_score + 1e-12
            || (std::abs(score - best_score) <= 1e-12 && best_col >= 0
                && rank_[col] < rank_[best_col]);
        if (better) {
          best_score = score;
          best_col = col;
          best_threshold = 0.5 * (static_cast<double>(vals[k].first)
                                  + static_cast<double>(vals[k + 1].first));
        }
      }
    }
    if (best_col < 0) {
      return node;
    }

    std::vector<int> left;
    std::vector<int> right;
    for (const int s: samples) {
      (values_[best_col][s] <= best_threshold ? left : right).push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();
    const int l = build(tree, left, rng);
    const int r = build(tree, right, rng);
    TreeNode &t = tree.nodes[node];
    t.feature = static_cast<int>(columns_[best_col]);
    t.threshold = best_threshold;
    t.left = l;
    t.right = r;
    return node;
  }

  std::vector<int> nonconstant(const std::vector<int> &samples) {
    std::vector<int> touched;
    for (const int s: samples) {
      for (const int col: rows_[s]) {
        const std::uint32_t v = values_[col][s];
        if (touched_count_[col] == 0) {
          touched.push_back(col);
          touched_min_[col] = touched_max_[col] = v;
        } else {
          touched_min_[col] = std::min(touched_min_[col], v);
          touched_max_[col] = std::max(touched_max_[col], v);
        }
        ++touched_count_[col];
      }
    }
    std::vector<int> out;
    for (const int col: touched) {
      if (touched_count_[col] < static_cast<int>(samples.size())
          || touched_min_[col] != touched_max_[col]) {
        out.push_back(col);
      }
      touched_count_[col] = 0;
    }
    return out;
  }

  std::span<const int> y_;
  int min_leaf_;
  int mtry_ = 1;
  std::vector<std::uint32_t> columns_;
  std::vector<std::vector<std::uint32_t>> values_;
  std::vector<std::vector<int>> rows_;
  std::vector<int> rank_;
  std::vector<int> touched_count_;
  std::vector<std::uint32_t> touched_min_;
  std::vector<std::uint32_t> touched_max_;
};
}  // namespace

RandomForestClassifier::RandomForestClassifier(int trees, int min_leaf,
                                               std::uint64_t seed)
    : num_trees_(trees), min_leaf_(min_leaf), seed_(seed) {
  if (trees < 1 || min_leaf < 1) {
    throw std::invalid_argument("forest needs at least one tree and min_leaf >= 1");
  }
}

void RandomForestClassifier::fit(std::span<const NGramSet> x,
                                 std::span<const int> y) {
  check_labels(x, y);
  common_vocabulary(x);
  TreeGrower grower(x, y, min_leaf_);
  trees_.clear();
  trees_.reserve(num_trees_);
  for (int t = 0; t < num_trees_; ++t) {
    Rng rng(derive_seed(seed_, { static_cast<std::uint64_t>(t) }));
    trees_.push_back(grower.grow(rng));
  }
  fitted_ = true;
}

std::vector<double> RandomForestClassifier::predict_proba(
    std::span<const NGramSet> x) const {
  if (!fitted_) {
    throw std::logic_error("predict_proba before fit");
  }
  std::vector<double> out;
  out.reserve(x.size());
  for (const NGramSet &s: x) {
    double sum = 0.0;
    for (const DecisionTree &t: trees_) {
      sum += t.predict(s);
    }
    out.push_back(sum / static_cast<double>(trees_.size()));
  }
  return out;
}

void RandomForestClassifier::save(Archive &ar) const {
  if (!fitted_) {
    throw std::logic_error("cannot save an unfitted model");
  }
  ar.header["kind"] = kind();
  ar.header["trees"] = num_trees_;
  ar.header["min_leaf"] = min_leaf_;
  ar.header["seed"] = seed_;
  std::vector<std::uint64_t> offsets = { 0 };
  std::vector<std::uint64_t> feature;
  std::vector<std::uint64_t> children;
  std::vector<double> threshold;
  std::vector<double> fraction;
  for (const DecisionTree &t: trees_) {
    for (const TreeNode &n: t.nodes) {
      feature.push_back(static_cast<std::uint64_t>(n.feature + 1));
      children.push_back(static_cast<std::uint64_t>(n.left + 1));
      children.push_back(static_cast<std::uint64_t>(n.right + 1));
      threshold.push_back(n.threshold);
      fraction.push_back(n.positive_fraction);
    }
    offsets.push_back(feature.size());
  }
  ar.put_u64("tree_offsets", std::move(offsets));
  ar.put_u64("node_feature", std::move(feature));
  ar.put_u64("node_children", std::move(children));
  ar.put("node_threshold", std::move(threshold));
  ar.put("node_fraction", std::move(fraction));
}

RandomForestClassifier RandomForestClassifier::load(const Archive &ar) {
  expect_kind(ar, "rf");
  RandomForestClassifier m(ar.header.at("trees").get<int>(),
                           ar.header.at("min_leaf").get<int>(),
                           ar.header.at("seed").get<std::uint64_t>());
  const auto &offsets = ar.u64("tree_offsets");
  const auto &feature = ar.u64("node_feature");
  const auto &children = ar.u64("node_children");
  const auto &threshold = ar.f64("node_threshold");
  const auto &fraction = ar.f64("node_fraction");
  for (std::size_t t = 0; t + 1 < offsets.size(); ++t) {
    DecisionTree tree;
    for (std::uint64_t k = offsets[t]; k < offsets[t + 1]; ++k) {
      TreeNode n;
      n.feature = static_cast<int>(feature.at(k)) - 1;
      n.left = static_cast<int>(children.at(2 * k)) - 1;
      n.right = static_cast<int>(children.at(2 * k + 1)) - 1;
      n.threshold = threshold.at(k);
      n.positive_fraction = fraction.at(k);
      tree.nodes.push_back(n);
    }
    m.trees_.push_back(std::move(tree));
  }
  m.fitted_ = true;
  return m;
}

std::unique_ptr<ProbClassifier> load_classifier(const Archive &ar) {
  const std::string kind = ar.header.value("kind", "");
  if (kind == "svm") {
    return std::make_unique<SvmClassifier>(SvmClassifier::load(ar));
  }
  if (kind == "nb") {
    return std::make_unique<NaiveBayesClassifier>(NaiveBayesClassifier::load(ar));
  }
  if (kind == "rf") {
    return std::make_unique<RandomForestClassifier>(
        RandomForestClassifier::load(ar));
  }
  throw std::runtime_error("unknown classifier kind '" + kind + "'");
}

}  // namespace sscreen
