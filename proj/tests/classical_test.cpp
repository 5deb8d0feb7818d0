//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/classical.h"

#include <algorithm>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "sscreen/metrics.h"
#include "sscreen/random.h"
#include "support/oracles.h"

namespace sscreen {
namespace {
NGramSet make_set(std::vector<std::uint32_t> idx, std::uint64_t ref = 7) {
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  NGramSet s;
  s.indices = idx;
  s.counts.assign(idx.size(), 1);
  s.vocabulary_ref = ref;
  return s;
}

NGramSet random_set(Rng &rng, int lo, int hi, double density) {
  std::bernoulli_distribution keep(density);
  std::vector<std::uint32_t> idx;
  for (int f = lo; f < hi; ++f) {
    if (keep(rng)) {
      idx.push_back(static_cast<std::uint32_t>(f));
    }
  }
  return make_set(idx);
}

TEST(JaccardTest, Definition) {
  const NGramSet ab = make_set({ 2, 3 });
  const NGramSet bc = make_set({ 3, 4 });
  EXPECT_DOUBLE_EQ(jaccard_kernel(ab, ab), 1.0);
  EXPECT_DOUBLE_EQ(jaccard_kernel(ab, make_set({ 5, 6 })), 0.0);
  EXPECT_DOUBLE_EQ(jaccard_kernel(ab, bc), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(jaccard_kernel(make_set({}), make_set({})), 1.0);
  EXPECT_DOUBLE_EQ(jaccard_kernel(ab, make_set({})), 0.0);
  EXPECT_THROW(jaccard_kernel(ab, make_set({ 2 }, 8)), std::invalid_argument);
  NGramSet counted = ab;
  counted.mode = NGramMode::kCount;
  EXPECT_THROW(jaccard_kernel(ab, counted), std::invalid_argument);
}

TEST(JaccardTest, GramMatricesArePositiveSemidefinite) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<NGramSet> x;
    const double density = 0.05 + 0.05 * (trial % 5);
    for (int i = 0; i < 50; ++i) {
      x.push_back(random_set(rng, 2, 40, density));
    }
    const GramMatrix g = gram_matrix(x);
    EXPECT_LT((g.values - g.values.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    for (int i = 0; i < 50; ++i) {
      if (!x[i].empty()) {
        EXPECT_EQ(g.values(i, i), 1.0);
      }
    }
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g.values)
                               .eigenvalues()
                               .minCoeff();
    EXPECT_GE(min_eig, -1e-8);
  }
}

TEST(SvmDualTest, MatchesGenericQpOracle) {
  Rng rng(21);
  for (const double c: { 0.1, 1.0, 10.0 }) {
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<NGramSet> x;
      std::vector<int> y;
      for (int i = 0; i < 30; ++i) {
        y.push_back(i % 3 == 0 ? 1 : 0);
        // Class-dependent but overlapping feature pools.
        x.push_back(y.back() == 1 ? random_set(rng, 2, 20, 0.3)
                                  : random_set(rng, 10, 30, 0.3));
      }
      const Eigen::MatrixXd k = gram_matrix(x).values;
      const SvmDualSolution sol = solve_svm_dual(k, y, c);
      double balance = 0.0;
      for (int i = 0; i < 30; ++i) {
        ASSERT_GE(sol.alpha(i), 0.0);
        ASSERT_LE(sol.alpha(i), c);
        balance += (y[i] == 1 ? 1.0 : -1.0) * sol.alpha(i);
      }
      EXPECT_LT(std::abs(balance), 1e-9);
      EXPECT_LT(svm_kkt_violation(k, y, sol.alpha, c), 1e-3);
      const double smo = svm_dual_objective(k, y, sol.alpha);
      const double oracle = testing::qp_oracle_objective(k, y, c);
      EXPECT_LE(std::abs(smo - oracle), 1e-3 * std::abs(oracle))
          << "C=" << c << " smo=" << smo << " oracle=" << oracle;
    }
  }
}

TEST(SvmTest, SeparableFamilies) {
  Rng rng(3);
  std::vector<NGramSet> x;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    y.push_back(i % 2);
    NGramSet s = y.back() == 1 ? random_set(rng, 2, 12, 0.5)
                               : random_set(rng, 12, 22, 0.5);
    if (s.empty()) {
      s = make_set({ y.back() == 1 ? 2U : 12U });
    }
    x.push_back(s);
  }
  SvmClassifier svm(10.0, 5);
  svm.fit(x, y);
  const std::vector<double> p = svm.predict_proba(x);
  EXPECT_DOUBLE_EQ(accuracy(p, y), 1.0);
  for (const double v: p) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  // A duplicate of a training point lands on its class's side.
  const std::vector<NGramSet> dup = { x[0], x[1] };
  const std::vector<double> pd = svm.predict_proba(dup);
  EXPECT_LT(pd[0], 0.5);
  EXPECT_GT(pd[1], 0.5);

  std::stringstream buf;
  Archive ar;
  svm.save(ar);
  ar.write(buf);
  const auto back = load_classifier(Archive::read(buf));
  EXPECT_EQ(back->kind(), "svm");
  EXPECT_EQ(back->predict_proba(x), p);
}

TEST(SvmTest, RejectsSingleClass) {
  const std::vector<NGramSet> x = { make_set({ 2 }), make_set({ 3 }) };
  const std::vector<int> y = { 1, 1 };
  SvmClassifier svm;
  EXPECT_THROW(svm.fit(x, y), std::invalid_argument);
  EXPECT_THROW(svm.predict_proba(x), std::logic_error);
}

TEST(PlattTest, MonotoneAndOpenInterval) {
  const std::vector<double> dec = { -3, -2, -1.5, -0.2, 0.1, 0.4, 1.7, 2.5 };
  const std::vector<int> y = { 0, 0, 0, 1, 0, 1, 1, 1 };
  const PlattParams p = fit_platt(dec, y);
  EXPECT_LT(p.a, 0.0);
  EXPECT_LT(platt_probability(p, -1.0), platt_probability(p, 1.0));
  EXPECT_GT(platt_probability(p, -1e6), 0.0);
  EXPECT_LT(platt_probability(p, 1e6), 1.0);
}

TEST(NaiveBayesTest, HandComputedPosteriors) {
  // Symmetric data, one perfectly correlated feature, alpha = 1:
  // theta_pos = (3+1)/(3+2), theta_neg = 1/5, so P(pos | {f}) = 0.8.
  {
    const std::vector<NGramSet> x = { make_set({ 2 }), make_set({ 2 }),
                                      make_set({ 2 }), make_set({}),
                                      make_set({}), make_set({}) };
    const std::vector<int> y = { 1, 1, 1, 0, 0, 0 };
    NaiveBayesClassifier nb(1.0);
    nb.fit(x, y);
    const std::vector<NGramSet> q = { make_set({ 2 }), make_set({}) };
    const std::vector<double> p = nb.predict_proba(q);
    EXPECT_NEAR(p[0], 0.8, 1e-12);
    EXPECT_NEAR(p[1], 0.2, 1e-12);
  }
  // Unbalanced: pos 3/4 with f, neg 1/3 with f. theta_pos = 2/3,
  // theta_neg = 2/5, priors 4/7 and 3/7 give 20/29 and 20/47.
  {
    const std::vector<NGramSet> x = { make_set({ 2 }), make_set({ 2 }),
                                      make_set({ 2 }), make_set({}),
                                      make_set({}), make_set({}),
                                      make_set({ 2 }) };
    const std::vector<int> y = { 1, 1, 1, 1, 0, 0, 0 };
    NaiveBayesClassifier nb(1.0);
    nb.fit(x, y);
    const std::vector<NGramSet> q = { make_set({ 2 }), make_set({}),
                                      make_set({ 99 }) };
    const std::vector<double> p = nb.predict_proba(q);
    EXPECT_NEAR(p[0], 20.0 / 29.0, 1e-12);
    EXPECT_NEAR(p[1], 20.0 / 47.0, 1e-12);
    // Unseen features are not part of the model.
    EXPECT_NEAR(p[2], 20.0 / 47.0, 1e-12);
  }
}

TEST(NaiveBayesTest, SymmetryAndPrior) {
  // Every feature equally frequent in both classes.
  const std::vector<NGramSet> x = { make_set({ 2, 3 }), make_set({ 4 }),
                                    make_set({ 2, 3 }), make_set({ 4 }) };
  const std::vector<int> y = { 1, 1, 0, 0 };
  NaiveBayesClassifier nb(0.5);
  nb.fit(x, y);
  for (const double p: nb.predict_proba(x)) {
    EXPECT_NEAR(p, 0.5, 1e-12);
  }

  const std::vector<NGramSet> empty(6, make_set({}));
  const std::vector<int> y2 = { 1, 1, 0, 0, 0, 0 };
  NaiveBayesClassifier prior;
  prior.fit(empty, y2);
  EXPECT_EQ(prior.num_features(), 0);
  EXPECT_NEAR(prior.predict_proba(empty)[0], 1.0 / 3.0, 1e-12);
}

// Relabels vocabulary indices 2.. by a fixed permutation.
std::vector<NGramSet> permute_columns(std::span<const NGramSet> x,
                                      const std::vector<std::uint32_t> &perm) {
  std::vector<NGramSet> out;
  for (const NGramSet &s: x) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (int k = 0; k < s.size(); ++k) {
      pairs.emplace_back(perm[s.indices[k]], s.counts[k]);
    }
    std::sort(pairs.begin(), pairs.end());
    NGramSet t;
    t.mode = s.mode;
    t.vocabulary_ref = s.vocabulary_ref;
    for (const auto &[i, c]: pairs) {
      t.indices.push_back(i);
      t.counts.push_back(c);
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<NGramSet> random_counts(Rng &rng, int n, int features) {
  std::vector<NGramSet> x;
  std::uniform_int_distribution<int> cnt(0, 3);
  for (int i = 0; i < n; ++i) {
    NGramSet s;
    s.mode = NGramMode::kCount;
    s.vocabulary_ref = 7;
    for (int f = 2; f < 2 + features; ++f) {
      const int c = cnt(rng) - 1;
      if (c > 0) {
        s.indices.push_back(f);
        s.counts.push_back(c);
      }
    }
    x.push_back(std::move(s));
  }
  return x;
}

TEST(ColumnPermutationTest, NbAndRfAreInvariant) {
  Rng rng(31);
  const std::vector<NGramSet> train = random_counts(rng, 80, 25);
  const std::vector<NGramSet> test = random_counts(rng, 40, 25);
  std::vector<int> y;
  for (const NGramSet &s: train) {
    y.push_back(s.size() > 6 ? 1 : 0);
  }
  std::vector<std::uint32_t> perm(2 + 25);
  std::iota(perm.begin(), perm.end(), 0U);
  std::shuffle(perm.begin() + 2, perm.end(), rng);
  const auto train_p = permute_columns(train, perm);
  const auto test_p = permute_columns(test, perm);

  NaiveBayesClassifier nb_a;
  NaiveBayesClassifier nb_b;
  nb_a.fit(train, y);
  nb_b.fit(train_p, y);
  const auto pa = nb_a.predict_proba(test);
  const auto pb = nb_b.predict_proba(test_p);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_NEAR(pa[i], pb[i], 1e-12);
  }

  RandomForestClassifier rf_a(50, 1, 9);
  RandomForestClassifier rf_b(50, 1, 9);
  rf_a.fit(train, y);
  rf_b.fit(train_p, y);
  EXPECT_EQ(rf_a.predict_proba(test), rf_b.predict_proba(test_p));
}

TEST(RandomForestTest, PureDatasetsAndDeterminism) {
  Rng rng(2);
  const std::vector<NGramSet> x = random_counts(rng, 30, 10);
  RandomForestClassifier ones(20, 2, 1);
  ones.fit(x, std::vector<int>(30, 1));
  for (const double p: ones.predict_proba(x)) {
    EXPECT_EQ(p, 1.0);
  }
  RandomForestClassifier zeros(20, 2, 1);
  zeros.fit(x, std::vector<int>(30, 0));
  for (const double p: zeros.predict_proba(x)) {
    EXPECT_EQ(p, 0.0);
  }

  std::vector<int> y;
  for (int i = 0; i < 30; ++i) {
    y.push_back(i % 3 == 0);
  }
  RandomForestClassifier a(30, 2, 77);
  RandomForestClassifier b(30, 2, 77);
  a.fit(x, y);
  b.fit(x, y);
  EXPECT_EQ(a.predict_proba(x), b.predict_proba(x));

  Archive ar;
  a.save(ar);
  std::stringstream buf;
  ar.write(buf);
  EXPECT_EQ(load_classifier(Archive::read(buf))->predict_proba(x),
            a.predict_proba(x));

  // Trees only test features present in training.
  for (const DecisionTree &t: a.trees()) {
    for (const TreeNode &n: t.nodes) {
      if (n.feature >= 0) {
        EXPECT_GE(n.feature, 2);
        EXPECT_LT(n.feature, 12);
      }
    }
  }
}

TEST(RandomForestTest, LearnsXorThatNaiveBayesCannot) {
  Rng rng(5);
  auto make = [&](int n, std::vector<NGramSet> &x, std::vector<int> &y) {
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < n; ++i) {
      const bool a = coin(rng);
      const bool b = coin(rng);
      std::vector<std::uint32_t> idx;
      if (a) {
        idx.push_back(2);
      }
      if (b) {
        idx.push_back(3);
      }
      for (std::uint32_t f = 4; f < 10; ++f) {
        if (coin(rng)) {
          idx.push_back(f);
        }
      }
      NGramSet s = make_set(idx);
      s.mode = NGramMode::kCount;
      x.push_back(s);
      y.push_back(a != b ? 1 : 0);
    }
  };
  std::vector<NGramSet> train;
  std::vector<NGramSet> test;
  std::vector<int> y_train;
  std::vector<int> y_test;
  make(300, train, y_train);
  make(300, test, y_test);

  RandomForestClassifier rf(100, 1, 3);
  rf.fit(train, y_train);
  EXPECT_GT(accuracy(rf.predict_proba(test), y_test), 0.95);

  NaiveBayesClassifier nb;
  nb.fit(train, y_train);
  EXPECT_LT(accuracy(nb.predict_proba(test), y_test), 0.7);
}

TEST(NaiveBayesTest, SaveLoadRoundTrip) {
  Rng rng(8);
  const std::vector<NGramSet> x = random_counts(rng, 20, 8);
  std::vector<int> y;
  for (int i = 0; i < 20; ++i) {
    y.push_back(i % 2);
  }
  NaiveBayesClassifier nb(0.5);
  nb.fit(x, y);
  Archive ar;
  nb.save(ar);
  std::stringstream buf;
  ar.write(buf);
  EXPECT_EQ(load_classifier(Archive::read(buf))->predict_proba(x),
            nb.predict_proba(x));

  std::stringstream bad("not an archive");
  EXPECT_THROW(Archive::read(bad), std::runtime_error);
}

}  // namespace
}  // namespace sscreen
