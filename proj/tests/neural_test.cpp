//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/neural.h"

#include <cmath>

#include <gtest/gtest.h>

#include "sscreen/metrics.h"
#include "support/oracles.h"

namespace sscreen {
namespace {
SymbolSeq seq_of(std::vector<int> s) {
  SymbolSeq q;
  q.symbols = std::move(s);
  return q;
}

SymbolSeq random_seq(Rng &rng, int vocab, int min_len, int max_len) {
  std::uniform_int_distribution<int> len(min_len, max_len);
  std::uniform_int_distribution<int> sym(0, vocab - 1);
  SymbolSeq s;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    int v = sym(rng);
    if (v == Vocabulary::kPad) {
      v = Vocabulary::kUnk;
    }
    s.symbols.push_back(v);
  }
  return s;
}

void jitter(ParamSet &p, Rng &rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  for (auto &m: p.mats) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] += n(rng);
    }
  }
}

TEST(GradientCheckTest, Cnn) {
  Rng rng(100);
  const std::vector<std::vector<int>> region_sets = { { 5, 3 }, { 3 }, { 5 },
                                                      { 2, 4 }, { 3, 5, 1 } };
  for (int trial = 0; trial < 24; ++trial) {
    const int vocab = 3 + trial % 6;
    CnnConfig cfg;
    cfg.regions = region_sets[trial % region_sets.size()];
    cfg.filters = 1 + trial % 4;
    Cnn net(vocab, cfg, rng);
    jitter(net.params, rng, 0.3);
    std::vector<SymbolSeq> seqs;
    std::vector<int> labels;
    for (int i = 0; i < 3; ++i) {
      seqs.push_back(random_seq(rng, vocab, 1, 9));
      labels.push_back(static_cast<int>(rng() % 2));
    }
    EXPECT_LT(testing::max_gradient_error(net, seqs, labels), 1e-4) << "trial " << trial;
  }
}

TEST(GradientCheckTest, GruClassifier) {
  Rng rng(200);
  for (int trial = 0; trial < 24; ++trial) {
    const int vocab = 3 + trial % 5;
    GruConfig cfg;
    cfg.embed = 1 + trial % 3;
    cfg.hidden = 1 + trial % 4;
    GruClassifier net(vocab, cfg, rng);
    jitter(net.params, rng, 0.3);
    std::vector<SymbolSeq> seqs;
    std::vector<int> labels;
    for (int i = 0; i < 3; ++i) {
      seqs.push_back(random_seq(rng, vocab, 1, 8));
      labels.push_back(static_cast<int>(rng() % 2));
    }
    EXPECT_LT(testing::max_gradient_error(net, seqs, labels), 1e-4) << "trial " << trial;
  }
}

TEST(GradientCheckTest, LanguageModel) {
  Rng rng(300);
  for (int trial = 0; trial < 24; ++trial) {
    const int vocab = 3 + trial % 5;
    GruConfig cfg;
    cfg.embed = 1 + trial % 3;
    cfg.hidden = 1 + (trial + 1) % 4;
    GruLanguageModel net(vocab, cfg, rng);
    jitter(net.params, rng, 0.3);
    std::vector<SymbolSeq> seqs;
    for (int i = 0; i < 3; ++i) {
      seqs.push_back(random_seq(rng, vocab, 0, 7));
    }
    const std::vector<int> labels(3, 0);
    EXPECT_LT(testing::max_gradient_error(net, seqs, labels), 1e-4) << "trial " << trial;
  }
}

TEST(CnnTest, AllPadInputGivesSigmoidOfDenseBias) {
  Rng rng(1);
  Cnn net(6, {}, rng);
  jitter(net.params, rng, 1.0);
  const double b = net.params.mats[net.dense_bias_index()](0, 0);
  const double expected = 1.0 / (1.0 + std::exp(-b));
  EXPECT_DOUBLE_EQ(net.predict(seq_of({ Vocabulary::kPad, Vocabulary::kPad })),
                   expected);
  EXPECT_DOUBLE_EQ(net.predict(seq_of({})), expected);
}

TEST(CnnTest, HandBuiltMotifFilter) {
  constexpr int kVocab = 8;
  const std::vector<int> motif = { 2, 5, 3, 7, 4 };
  CnnConfig cfg;
  cfg.regions = { 5, 3 };
  cfg.filters = 1;
  Rng rng(0);
  Cnn net(kVocab, cfg, rng);
  net.params.set_zero();
  Eigen::MatrixXd &w = net.params.mats[net.weight_index(0)];
  for (int o = 0; o < 5; ++o) {
    w(0, o * kVocab + motif[o]) = 10.0;
  }
  net.params.mats[net.bias_index(0)](0, 0) = -45.0;
  net.params.mats[net.dense_weight_index()](0, 0) = 2.0;
  net.params.mats[net.dense_bias_index()](0, 0) = -5.0;

  Rng data(9);
  std::uniform_int_distribution<int> sym(2, kVocab - 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> s(5 + trial % 20);
    for (auto &v: s) {
      v = sym(data);
    }
    const bool plant = trial % 2 == 0;
    if (plant) {
      const int at = static_cast<int>(data() % (s.size() - 4));
      std::copy(motif.begin(), motif.end(), s.begin() + at);
    }
    const bool present =
        std::search(s.begin(), s.end(), motif.begin(), motif.end()) != s.end();
    const double p = net.predict(seq_of(s));
    if (present) {
      EXPECT_GT(p, 0.99);
    } else {
      EXPECT_LT(p, 0.01);
    }
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
}

TEST(CnnTest, BatchGradientIsAMean) {
  Rng rng(4);
  Cnn net(6, { { 3 }, 4 }, rng);
  jitter(net.params, rng, 0.3);
  const SymbolSeq a = random_seq(rng, 6, 4, 8);
  const SymbolSeq b = random_seq(rng, 6, 4, 8);
  ParamSet ga = net.params.zeros_like();
  ParamSet gb = net.params.zeros_like();
  net.loss_and_grad(a, 1, ga);
  net.loss_and_grad(b, 0, gb);

  const std::vector<SymbolSeq> batch = { a, a, b };
  const std::vector<int> labels = { 1, 1, 0 };
  ParamSet g = net.params.zeros_like();
  batch_loss_and_grad(net, batch, labels, g);
  ParamSet expected = ga;
  expected.scale(2.0);
  expected.add_scaled(gb, 1.0);
  expected.scale(1.0 / 3.0);
  for (int p = 0; p < g.count(); ++p) {
    EXPECT_LT((g.mats[p] - expected.mats[p]).cwiseAbs().maxCoeff(), 1e-12);
  }

  // A zero-sized step leaves the loss unchanged.
  const double before = net.loss(a, 1);
  net.params.add_scaled(g, 0.0);
  EXPECT_EQ(net.loss(a, 1), before);
}

TEST(GruTest, SingleStepByHand) {
  GruConfig cfg;
  cfg.embed = 2;
  cfg.hidden = 2;
  Rng rng(0);
  GruClassifier net(3, cfg, rng);
  const GruLayout &l = net.layout();
  ParamSet &p = net.params;
  p.mats[l.embed] << 0.1, 0.2, 0.5, -0.3, 0.0, 0.0;
  p.mats[l.wz] << 0.4, -0.2, 0.1, 0.3;
  p.mats[l.bz] << 0.05, -0.1;
  p.mats[l.wr] << -0.3, 0.2, 0.6, 0.1;
  p.mats[l.br] << 0.0, 0.2;
  p.mats[l.wh] << 0.7, -0.5, 0.2, 0.9;
  p.mats[l.bh] << -0.1, 0.3;
  p.mats[l.uz].setConstant(0.37);  // no effect: h0 = 0
  p.mats[l.ur].setConstant(-0.21);
  p.mats[l.uh].setConstant(0.44);
  p.mats[p.count() - 2] << 1.5, -2.0;
  p.mats[p.count() - 1] << 0.25;

  // Symbol 1 has embedding (0.5, -0.3). With h0 = 0 only z and the
  // candidate matter: h1 = z ⊙ tanh(Wh x + bh).
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  const double x0 = 0.5;
  const double x1 = -0.3;
  const double z0 = sig(0.4 * x0 - 0.2 * x1 + 0.05);
  const double z1 = sig(0.1 * x0 + 0.3 * x1 - 0.1);
  const double c0 = std::tanh(0.7 * x0 - 0.5 * x1 - 0.1);
  const double c1 = std::tanh(0.2 * x0 + 0.9 * x1 + 0.3);
  const double h0 = z0 * c0;
  const double h1 = z1 * c1;
  const Eigen::VectorXd h = net.encode(seq_of({ 1 }));
  EXPECT_NEAR(h(0), h0, 1e-15);
  EXPECT_NEAR(h(1), h1, 1e-15);
  EXPECT_NEAR(net.predict(seq_of({ 1 })), sig(1.5 * h0 - 2.0 * h1 + 0.25), 1e-15);
}

TEST(GruTest, HiddenStateStaysInsideUnitBox) {
  Rng rng(6);
  GruConfig cfg;
  cfg.embed = 4;
  cfg.hidden = 6;
  GruClassifier net(10, cfg, rng);
  jitter(net.params, rng, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const GruTrace t = gru_run(net.params, net.layout(),
                               random_seq(rng, 10, 1, 80).symbols);
    for (const auto &h: t.h) {
      EXPECT_LT(h.cwiseAbs().maxCoeff(), 1.0);
    }
  }
  // Saturated gates round to ±1 in double precision but never beyond.
  jitter(net.params, rng, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    const GruTrace t = gru_run(net.params, net.layout(),
                               random_seq(rng, 10, 1, 80).symbols);
    for (const auto &h: t.h) {
      EXPECT_LE(h.cwiseAbs().maxCoeff(), 1.0);
    }
  }
}

TEST(GruTest, LongSequencesAreTruncated) {
  Rng rng(7);
  GruConfig cfg;
  cfg.embed = 2;
  cfg.hidden = 2;
  cfg.max_length = 250;
  GruClassifier net(4, cfg, rng);
  const long before = gru_truncation_count();
  SymbolSeq long_seq = random_seq(rng, 4, 300, 300);
  SymbolSeq head;
  head.symbols.assign(long_seq.symbols.begin(), long_seq.symbols.begin() + 250);
  EXPECT_EQ(net.predict(long_seq), net.predict(head));
  EXPECT_EQ(gru_truncation_count(), before + 1);
  EXPECT_THROW(net.predict(seq_of({})), std::invalid_argument);
}

TEST(LanguageModelTest, DistributionsAndLogLikelihood) {
  Rng rng(8);
  GruConfig cfg;
  cfg.embed = 3;
  cfg.hidden = 5;
  GruLanguageModel lm(7, cfg, rng);
  jitter(lm.params, rng, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const SymbolSeq s = random_seq(rng, 7, 0, 12);
    const auto rows = lm.next_distributions(s);
    ASSERT_EQ(static_cast<int>(rows.size()), s.length() + 1);
    double ll = 0.0;
    for (std::size_t t = 0; t < rows.size(); ++t) {
      EXPECT_NEAR(rows[t].sum(), 1.0, 1e-9);
      EXPECT_EQ(rows[t].size(), 8);
      const int target = t < s.symbols.size() ? s.symbols[t] : 7;
      ll += std::log(rows[t](target));
    }
    EXPECT_LE(lm.loglik(s), 0.0);
    EXPECT_NEAR(lm.loglik(s), ll, 1e-9);
  }
}

TEST(LanguageModelTest, MemorizesARepeatedSequence) {
  Rng rng(9);
  GruConfig cfg;
  cfg.embed = 8;
  cfg.hidden = 16;
  GruLanguageModel lm(6, cfg, rng);
  const SymbolSeq target = seq_of({ 2, 3, 3, 4, 5, 2, 0 });
  TrainConfig tc;
  tc.learning_rate = 0.02;
  tc.batch_size = 8;
  tc.epochs = 150;
  tc.patience = 150;
  tc.seed = 3;
  const std::vector<int> labels(8, 0);
  const TrainResult r = train_network(
      lm, 8, labels, [&](int, Rng &) { return target; }, nullptr, tc);
  const double per_symbol = -lm.loglik(target) / (target.length() + 1);
  EXPECT_LT(per_symbol, 0.05);
  EXPECT_LT(r.train_loss.back(), r.train_loss.front());
}

TEST(StackerTest, SymmetricModelsFallBackToThePrior) {
  Rng rng(10);
  GruConfig cfg;
  cfg.embed = 3;
  cfg.hidden = 4;
  GruLanguageModel a(5, cfg, rng);
  GruLanguageModel b = a;
  std::vector<SymbolSeq> seqs;
  std::vector<int> y;
  // Each sequence appears once as active and twice as inactive, so the
  // features carry no label information.
  for (int i = 0; i < 300; ++i) {
    if (i % 3 == 0) {
      seqs.push_back(random_seq(rng, 5, 4, 10));
    } else {
      seqs.push_back(seqs.back());
    }
    y.push_back(i % 3 == 0 ? 1 : 0);
  }
  Eigen::MatrixXd x(300, 3);
  for (int i = 0; i < 300; ++i) {
    x.row(i) = stacker_features(a, b, seqs[i]).transpose();
    EXPECT_EQ(x(i, 0), x(i, 1));
  }
  LogisticStacker stacker;
  stacker.fit(x, y);
  for (int i = 0; i < 300; i += 17) {
    EXPECT_NEAR(stacker.predict(x.row(i).transpose()), 1.0 / 3.0, 1e-6);
  }
  const auto &h = stacker.loss_history();
  for (std::size_t k = 1; k < h.size(); ++k) {
    EXPECT_LE(h[k], h[k - 1]);
  }
  EXPECT_THROW(stacker.fit(x, std::vector<int>(300, 0)), std::invalid_argument);
}

TEST(StackerTest, MotifAwareLanguageModelsSeparateClasses) {
  // Actives carry the subsequence 4 5 4; inactives never contain 5.
  Rng rng(11);
  auto make = [&](int label) {
    SymbolSeq s = random_seq(rng, 5, 4, 10);
    for (auto &v: s.symbols) {
      if (v == 4) {
        v = 3;
      }
    }
    if (label == 1) {
      const auto at = static_cast<long>(rng() % (s.symbols.size() + 1));
      s.symbols.insert(s.symbols.begin() + at, { 4, 5, 4 });
    }
    return s;
  };
  std::vector<SymbolSeq> act;
  std::vector<SymbolSeq> inact;
  for (int i = 0; i < 60; ++i) {
    act.push_back(make(1));
    inact.push_back(make(0));
    inact.push_back(make(0));
  }
  GruConfig cfg;
  cfg.embed = 6;
  cfg.hidden = 12;
  TrainConfig tc;
  tc.learning_rate = 0.01;
  tc.batch_size = 16;
  tc.epochs = 25;
  tc.patience = 25;
  auto fit_lm = [&](const std::vector<SymbolSeq> &data, std::uint64_t seed) {
    Rng init(seed);
    GruLanguageModel lm(6, cfg, init);
    tc.seed = seed;
    const std::vector<int> labels(data.size(), 0);
    train_network(lm, static_cast<int>(data.size()), labels,
                  [&](int i, Rng &) { return data[i]; }, nullptr, tc);
    return lm;
  };
  const GruLanguageModel lm_a = fit_lm(act, 1);
  const GruLanguageModel lm_i = fit_lm(inact, 2);

  std::vector<SymbolSeq> train;
  std::vector<int> y_train;
  for (int i = 0; i < 150; ++i) {
    y_train.push_back(i % 3 == 0);
    train.push_back(make(y_train.back()));
  }
  Eigen::MatrixXd x(150, 3);
  for (int i = 0; i < 150; ++i) {
    x.row(i) = stacker_features(lm_a, lm_i, train[i]).transpose();
  }
  LogisticStacker stacker;
  stacker.fit(x, y_train);

  std::vector<double> p;
  std::vector<int> y_test;
  for (int i = 0; i < 150; ++i) {
    y_test.push_back(i % 3 == 0);
    p.push_back(stacker.predict(stacker_features(lm_a, lm_i, make(y_test.back()))));
  }
  EXPECT_GT(accuracy(p, y_test), 0.9);
}

TEST(TrainingTest, DeterministicAndKeepsBestEpoch) {
  auto run = [](TrainResult &result) {
    Rng init(5);
    Cnn net(6, { { 3 }, 4 }, init);
    Rng data(6);
    std::vector<SymbolSeq> seqs;
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) {
      labels.push_back(i % 2);
      SymbolSeq s = random_seq(data, 6, 3, 9);
      if (labels.back() == 1) {
        s.symbols.push_back(5);
        s.symbols.push_back(5);
      }
      seqs.push_back(s);
    }
    TrainConfig tc;
    tc.learning_rate = 0.05;
    tc.batch_size = 8;
    tc.epochs = 30;
    tc.patience = 5;
    tc.seed = 77;
    const auto validation = [&](const SequenceNet &n) {
      double total = 0.0;
      for (int i = 30; i < 40; ++i) {
        total += n.loss(seqs[i], labels[i]);
      }
      return total / 10.0;
    };
    result = train_network(net, 30, std::span(labels).first(30), [&](int i, Rng &) { return seqs[i]; },
                           validation, tc);
    EXPECT_DOUBLE_EQ(validation(net), result.best_validation);
    return net.params;
  };
  TrainResult r1;
  TrainResult r2;
  const ParamSet p1 = run(r1);
  const ParamSet p2 = run(r2);
  for (int k = 0; k < p1.count(); ++k) {
    EXPECT_EQ(p1.mats[k], p2.mats[k]);
  }
  EXPECT_EQ(r1.validation_loss, r2.validation_loss);
  EXPECT_LT(r1.best_epoch, r1.epochs_run);
  EXPECT_EQ(*std::min_element(r1.validation_loss.begin(), r1.validation_loss.end()),
            r1.best_validation);
}

TEST(TrainingTest, DivergenceAbortsWithConfig) {
  Rng init(1);
  Cnn net(4, { { 3 }, 2 }, init);
  const std::vector<int> labels = { 1 };
  TrainConfig tc;
  tc.epochs = 1;
  net.params.mats[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
  try {
    train_network(net, 1, labels, [](int, Rng &) { return seq_of({ 2, 3, 2 }); },
                  nullptr, tc);
    FAIL() << "expected divergence";
  } catch (const std::runtime_error &e) {
    EXPECT_NE(std::string(e.what()).find("lr="), std::string::npos);
  }
}

TEST(ParamSetTest, ArchiveRoundTrip) {
  Rng rng(3);
  GruLanguageModel lm(5, {}, rng);
  Archive ar;
  lm.params.save(ar, "lm.");
  Rng other(4);
  GruLanguageModel copy(5, {}, other);
  copy.params.load(ar, "lm.");
  for (int k = 0; k < lm.params.count(); ++k) {
    EXPECT_EQ(lm.params.mats[k], copy.params.mats[k]);
  }
  GruLanguageModel wrong(6, {}, other);
  EXPECT_THROW(wrong.params.load(ar, "lm."), std::runtime_error);
}

}  // namespace
}  // namespace sscreen
