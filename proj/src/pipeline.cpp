//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/pipeline.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sscreen/augment.h"
#include "sscreen/classical.h"
#include "sscreen/metrics.h"
#include "sscreen/neural.h"

namespace sscreen {
namespace {

// Seed-derivation tags.
constexpr std::uint64_t kTagModel = 1;
constexpr std::uint64_t kTagVocab = 2;
constexpr std::uint64_t kTagInit = 3;
constexpr std::uint64_t kTagTrain = 4;
constexpr std::uint64_t kTagHoldout = 5;
constexpr std::uint64_t kTagValidation = 6;
constexpr std::uint64_t kTagPredict = 7;

// Fraction of the training rows held out for early stopping.
constexpr double kValidationFraction = 0.1;
// Language models need at least this many training molecules per class.
constexpr int kMinLmSequences = 10;

std::vector<int> labels_of(const PreparedData &data, std::span<const int> rows) {
  std::vector<int> y;
  y.reserve(rows.size());
  for (const int r: rows) {
    y.push_back(data.label(r));
  }
  return y;
}

std::string random_writing(const Molecule &mol, Rng &rng) {
  return write_smiles(mol, random_walk(mol, rng));
}

double mean(const std::vector<double> &v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// ---- Prior ----

class PriorPipeline final : public Pipeline {
public:
  explicit PriorPipeline(ModelSettings s) : Pipeline(std::move(s)) {}

  void fit(const PreparedData &data, std::span<const int> rows,
           std::uint64_t seed) override {
    seed_ = seed;
    remember_training(data, rows);
    const auto y = labels_of(data, rows);
    rate_ = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  }

  std::vector<double> predict_walks(const PreparedData &, std::span<const int> rows,
                                    int) const override {
    return std::vector<double>(rows.size(), rate_);
  }

protected:
  void save_model(Archive &ar) const override { ar.header["rate"] = rate_; }
  void load_model(const Archive &ar) override { rate_ = ar.header.at("rate"); }

private:
  double rate_ = 0.5;
};

// ---- n-gram models ----

class NGramPipeline final : public Pipeline {
public:
  explicit NGramPipeline(ModelSettings s) : Pipeline(std::move(s)) {
    settings_.ngram.mode = settings_.model == "rf" ? NGramMode::kCount : NGramMode::kSet;
  }

  void fit(const PreparedData &data, std::span<const int> rows,
           std::uint64_t seed) override {
    seed_ = seed;
    remember_training(data, rows);
    vocab_ = Vocabulary();
    for (const int r: rows) {
      fit_ngram_vocabulary(vocab_, data.canonical_tokens[r], settings_.ngram);
    }
    vocab_.freeze();
    const std::uint64_t model_seed = derive_seed(seed, { kTagModel });
    if (settings_.model == "svm") {
      clf_ = std::make_unique<SvmClassifier>(settings_.c, model_seed);
    } else if (settings_.model == "nb") {
      clf_ = std::make_unique<NaiveBayesClassifier>(settings_.alpha);
    } else {
      clf_ = std::make_unique<RandomForestClassifier>(settings_.trees,
                                                      settings_.min_leaf, model_seed);
    }
    clf_->fit(featurize(data, rows), labels_of(data, rows));
  }

  std::vector<double> predict_walks(const PreparedData &data, std::span<const int> rows,
                                    int) const override {
    if (!clf_) {
      throw std::logic_error("pipeline used before fit");
    }
    return clf_->predict_proba(featurize(data, rows));
  }

  nlohmann::json diagnostics() const override {
    return { { "vocabulary", vocab_.size() } };
  }

protected:
  void save_model(Archive &ar) const override {
    clf_->save(ar);
    ar.header["pipeline"]["vocabulary"] = vocab_.serialize();
  }
  void load_model(const Archive &ar) override {
    vocab_ = Vocabulary::deserialize(
        ar.header.at("pipeline").at("vocabulary").get<std::string>());
    clf_ = load_classifier(ar);
  }

private:
  std::vector<NGramSet> featurize(const PreparedData &data,
                                  std::span<const int> rows) const {
    std::vector<NGramSet> x;
    x.reserve(rows.size());
    for (const int r: rows) {
      x.push_back(ngram_featurize(data.canonical_tokens[r], settings_.ngram, vocab_));
    }
    return x;
  }

  Vocabulary vocab_;
  std::unique_ptr<ProbClassifier> clf_;
};

// ---- Sequence models ----

// Shared plumbing: symbol vocabulary, training writings and the
// early-stopping holdout.
class SequencePipeline : public Pipeline {
public:
  using Pipeline::Pipeline;

  std::vector<double> predict_walks(const PreparedData &data, std::span<const int> rows,
                                    int walks) const override {
    check_fitted();
    std::vector<double> out;
    out.reserve(rows.size());
    for (const int r: rows) {
      std::vector<double> p;
      for (const auto &seq: writings(data, r, walks)) {
        p.push_back(probability(seq));
      }
      out.push_back(mean(p));
    }
    return out;
  }

protected:
  virtual double probability(const SymbolSeq &seq) const = 0;
  virtual void check_fitted() const = 0;

  SymbolSeq encode(std::string_view text) const {
    return symbol_encode(text, settings_.stride, vocab_);
  }

  void fit_vocabulary(const PreparedData &data, std::span<const int> rows) {
    vocab_ = Vocabulary();
    Rng rng(derive_seed(seed_, { kTagVocab }));
    for (const int r: rows) {
      fit_symbol_vocabulary(vocab_, data.canonical[r], settings_.stride);
      if (settings_.augment) {
        for (int w = 0; w < settings_.train_walks; ++w) {
          fit_symbol_vocabulary(vocab_, random_writing(data.molecules[r], rng),
                                settings_.stride);
        }
      }
    }
    vocab_.freeze();
  }

  /// Predict-time writings of a row: canonical when augmentation is off.
  std::vector<SymbolSeq> writings(const PreparedData &data, int row, int walks) const {
    if (!settings_.augment) {
      return { encode(data.canonical[row]) };
    }
    std::vector<SymbolSeq> out;
    for (int w = 0; w < walks; ++w) {
      out.push_back(encode(predict_writing(data, row, w, seed_)));
    }
    return out;
  }

  /// Fixed validation writings drawn once per fit.
  std::vector<std::vector<SymbolSeq>> validation_writings(const PreparedData &data,
                                                          std::span<const int> rows) const {
    std::vector<std::vector<SymbolSeq>> out;
    Rng rng(derive_seed(seed_, { kTagValidation }));
    for (const int r: rows) {
      std::vector<SymbolSeq> seqs;
      if (!settings_.augment) {
        seqs.push_back(encode(data.canonical[r]));
      } else {
        for (int w = 0; w < settings_.validation_walks; ++w) {
          seqs.push_back(encode(random_writing(data.molecules[r], rng)));
        }
      }
      out.push_back(std::move(seqs));
    }
    return out;
  }

  /// Training sample i of an epoch over rows: one random writing per
  /// (row, walk) when augmenting, else the canonical form.
  int sample_count(std::span<const int> rows) const {
    return static_cast<int>(rows.size()) * (settings_.augment ? settings_.train_walks : 1);
  }
  SampleFn sampler(const PreparedData &data, std::vector<int> rows) const {
    const int per_row = settings_.augment ? settings_.train_walks : 1;
    if (!settings_.augment) {
      std::vector<SymbolSeq> fixed;
      for (const int r: rows) {
        fixed.push_back(encode(data.canonical[r]));
      }
      return [fixed = std::move(fixed)](int i, Rng &) { return fixed[i]; };
    }
    return [this, &data, rows = std::move(rows), per_row](int i, Rng &rng) {
      return encode(random_writing(data.molecules[rows[i / per_row]], rng));
    };
  }
  std::vector<int> sample_labels(const PreparedData &data, std::span<const int> rows) const {
    const int per_row = settings_.augment ? settings_.train_walks : 1;
    std::vector<int> y;
    for (const int r: rows) {
      y.insert(y.end(), per_row, data.label(r));
    }
    return y;
  }

  TrainConfig train_config(std::uint64_t tag) const {
    TrainConfig tc = settings_.train;
    tc.seed = derive_seed(seed_, { kTagTrain, tag });
    return tc;
  }

  void save_vocabulary(Archive &ar) const {
    ar.header["pipeline"]["vocabulary"] = vocab_.serialize();
  }
  void load_vocabulary(const Archive &ar) {
    vocab_ = Vocabulary::deserialize(
        ar.header.at("pipeline").at("vocabulary").get<std::string>());
  }

  Vocabulary vocab_;
};

nlohmann::json train_summary(const TrainResult &r) {
  return { { "epochs_run", r.epochs_run },
           { "best_epoch", r.best_epoch },
           { "best_validation", r.best_validation } };
}

// CNN or many-to-one GRU trained on labelled writings.
class ClassifierPipeline final : public SequencePipeline {
public:
  explicit ClassifierPipeline(ModelSettings s) : SequencePipeline(std::move(s)) {}

  void fit(const PreparedData &data, std::span<const int> rows,
           std::uint64_t seed) override {
    seed_ = seed;
    remember_training(data, rows);
    fit_vocabulary(data, rows);
    const auto y = labels_of(data, rows);
    auto [fit_rows, val_rows] =
        holdout_split(rows, y, kValidationFraction, derive_seed(seed, { kTagHoldout }));
    if (fit_rows.empty()) {
      throw std::invalid_argument("training split is too small");
    }
    build(Rng(derive_seed(seed, { kTagInit })));

    const auto val_seqs = validation_writings(data, val_rows);
    const auto val_y = labels_of(data, val_rows);
    ValidationFn validation;
    if (!val_rows.empty()) {
      validation = [&](const SequenceNet &) {
        std::vector<double> p;
        for (const auto &seqs: val_seqs) {
          std::vector<double> q;
          for (const auto &s: seqs) {
            q.push_back(probability(s));
          }
          p.push_back(mean(q));
        }
        return log_loss(p, val_y);
      };
    }
    const auto labels = sample_labels(data, fit_rows);
    result_ = train_network(*net_, sample_count(fit_rows), labels,
                            sampler(data, fit_rows), validation, train_config(0));
  }

  nlohmann::json diagnostics() const override {
    auto d = train_summary(result_);
    d["vocabulary"] = vocab_.size();
    return d;
  }

protected:
  double probability(const SymbolSeq &seq) const override {
    if (settings_.model == "cnn") {
      return static_cast<const Cnn &>(*net_).predict(seq);
    }
    return static_cast<const GruClassifier &>(*net_).predict(seq);
  }
  void check_fitted() const override {
    if (!net_) {
      throw std::logic_error("pipeline used before fit");
    }
  }
  void save_model(Archive &ar) const override {
    save_vocabulary(ar);
    net_->params.save(ar, "net.");
  }
  void load_model(const Archive &ar) override {
    load_vocabulary(ar);
    build(Rng(0));
    net_->params.load(ar, "net.");
  }

private:
  void build(Rng rng) {
    if (settings_.model == "cnn") {
      net_ = std::make_unique<Cnn>(vocab_.size(), settings_.cnn, rng);
    } else {
      net_ = std::make_unique<GruClassifier>(vocab_.size(), settings_.gru, rng);
    }
  }

  std::unique_ptr<SequenceNet> net_;
  TrainResult result_;
};

// Class-conditional language models with a logistic stacker on top. The
// stacker is fitted on the holdout, which neither language model sees.
class RnnlmPipeline final : public SequencePipeline {
public:
  explicit RnnlmPipeline(ModelSettings s) : SequencePipeline(std::move(s)) {}

  void fit(const PreparedData &data, std::span<const int> rows,
           std::uint64_t seed) override {
    seed_ = seed;
    remember_training(data, rows);
    fit_vocabulary(data, rows);
    const auto y = labels_of(data, rows);
    auto [fit_rows, val_rows] =
        holdout_split(rows, y, kValidationFraction, derive_seed(seed, { kTagHoldout }));

    std::vector<int> by_class[2];
    std::vector<int> val_by_class[2];
    for (const int r: fit_rows) {
      by_class[data.label(r)].push_back(r);
    }
    for (const int r: val_rows) {
      val_by_class[data.label(r)].push_back(r);
    }
    for (int c = 0; c < 2; ++c) {
      if (static_cast<int>(by_class[c].size()) < kMinLmSequences) {
        throw std::invalid_argument(
            "language model for class " + std::to_string(c) + " needs at least "
            + std::to_string(kMinLmSequences) + " training molecules, found "
            + std::to_string(by_class[c].size()));
      }
      if (val_by_class[c].empty()) {
        throw std::invalid_argument("stacker holdout lacks class " + std::to_string(c));
      }
    }

    const auto val_seqs = validation_writings(data, val_rows);
    for (int c = 0; c < 2; ++c) {
      Rng init(derive_seed(seed, { kTagInit, static_cast<std::uint64_t>(c) }));
      lm_[c] = std::make_unique<GruLanguageModel>(vocab_.size(), settings_.gru, init);
      std::vector<const SymbolSeq *> held;
      for (std::size_t i = 0; i < val_rows.size(); ++i) {
        if (data.label(val_rows[i]) == c) {
          for (const auto &s: val_seqs[i]) {
            held.push_back(&s);
          }
        }
      }
      const GruLanguageModel &lm = *lm_[c];
      const ValidationFn validation = [&](const SequenceNet &) {
        double total = 0.0;
        for (const SymbolSeq *s: held) {
          total -= lm.loglik(*s) / (s->length() + 1);
        }
        return total / static_cast<double>(held.size());
      };
      const std::vector<int> labels(sample_count(by_class[c]), 0);
      result_[c] = train_network(*lm_[c], sample_count(by_class[c]), labels,
                                 sampler(data, by_class[c]), validation,
                                 train_config(static_cast<std::uint64_t>(c) + 1));
    }

    std::vector<Eigen::VectorXd> rows_x;
    std::vector<int> stack_y;
    for (std::size_t i = 0; i < val_rows.size(); ++i) {
      for (const auto &s: val_seqs[i]) {
        rows_x.push_back(stacker_features(*lm_[1], *lm_[0], s));
        stack_y.push_back(data.label(val_rows[i]));
      }
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows_x.size()), 3);
    for (std::size_t i = 0; i < rows_x.size(); ++i) {
      x.row(static_cast<Eigen::Index>(i)) = rows_x[i].transpose();
    }
    stacker_ = LogisticStacker();
    stacker_.fit(x, stack_y);
    fitted_ = true;
  }

  nlohmann::json diagnostics() const override {
    return { { "active_lm", train_summary(result_[1]) },
             { "inactive_lm", train_summary(result_[0]) },
             { "vocabulary", vocab_.size() } };
  }

protected:
  double probability(const SymbolSeq &seq) const override {
    return stacker_.predict(stacker_features(*lm_[1], *lm_[0], seq));
  }
  void check_fitted() const override {
    if (!fitted_) {
      throw std::logic_error("pipeline used before fit");
    }
  }
  void save_model(Archive &ar) const override {
    save_vocabulary(ar);
    lm_[0]->params.save(ar, "lm0.");
    lm_[1]->params.save(ar, "lm1.");
    stacker_.save(ar, "stacker.");
  }
  void load_model(const Archive &ar) override {
    load_vocabulary(ar);
    for (int c = 0; c < 2; ++c) {
      Rng rng(0);
      lm_[c] = std::make_unique<GruLanguageModel>(vocab_.size(), settings_.gru, rng);
      lm_[c]->params.load(ar, c == 0 ? "lm0." : "lm1.");
    }
    stacker_.load(ar, "stacker.");
    fitted_ = true;
  }

private:
  std::unique_ptr<GruLanguageModel> lm_[2];
  LogisticStacker stacker_;
  TrainResult result_[2];
  bool fitted_ = false;
};

}  // namespace

Pipeline::Pipeline(ModelSettings settings) : settings_(std::move(settings)) {
  settings_.validate();
}

std::vector<double> Pipeline::predict(const PreparedData &data,
                                      std::span<const int> rows) const {
  return predict_walks(data, rows, settings_.predict_walks);
}

void Pipeline::remember_training(const PreparedData &data, std::span<const int> rows) {
  if (rows.empty()) {
    throw std::invalid_argument("cannot fit on zero rows");
  }
  const auto y = labels_of(data, rows);
  if (std::count(y.begin(), y.end(), 1) == 0 || std::count(y.begin(), y.end(), 0) == 0) {
    throw std::invalid_argument("training rows must contain both classes");
  }
  training_ids_.clear();
  for (const int r: rows) {
    training_ids_.push_back(data.id(r));
  }
}

void Pipeline::save(Archive &ar) const {
  save_model(ar);
  nlohmann::json &p = ar.header["pipeline"];
  p["model"] = settings_.model;
  p["repr"] = settings_.repr;
  p["seed"] = seed_;
  p["training_ids"] = training_ids_;
  for (const auto &[k, v]: settings_.entries()) {
    p["settings"][k] = v;
  }
}

std::unique_ptr<Pipeline> make_pipeline(const ModelSettings &settings) {
  settings.validate();
  if (settings.model == "prior") {
    return std::make_unique<PriorPipeline>(settings);
  }
  if (settings.model == "svm" || settings.model == "nb" || settings.model == "rf") {
    return std::make_unique<NGramPipeline>(settings);
  }
  if (settings.model == "rnnlm") {
    return std::make_unique<RnnlmPipeline>(settings);
  }
  return std::make_unique<ClassifierPipeline>(settings);
}

std::unique_ptr<Pipeline> load_pipeline(const Archive &ar) {
  if (!ar.header.contains("pipeline")) {
    throw std::runtime_error("archive does not hold a pipeline");
  }
  const nlohmann::json &p = ar.header.at("pipeline");
  ModelSettings s;
  s.model = p.at("model").get<std::string>();
  s.repr = p.at("repr").get<std::string>();
  for (const auto &[k, v]: p.at("settings").items()) {
    s.set(k, v.get<std::string>());
  }
  auto pipeline = make_pipeline(s);
  pipeline->seed_ = p.at("seed").get<std::uint64_t>();
  pipeline->training_ids_ = p.value("training_ids", std::vector<std::string>{});
  pipeline->load_model(ar);
  return pipeline;
}

std::pair<std::vector<int>, std::vector<int>> holdout_split(
    std::span<const int> rows, std::span<const int> labels, double fraction,
    std::uint64_t seed) {
  if (rows.size() != labels.size()) {
    throw std::invalid_argument("rows and labels differ in length");
  }
  std::vector<int> fit;
  std::vector<int> held;
  for (int c = 0; c < 2; ++c) {
    std::vector<int> members;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (labels[i] == c) {
        members.push_back(rows[i]);
      }
    }
    Rng rng(derive_seed(seed, { static_cast<std::uint64_t>(c) }));
    std::shuffle(members.begin(), members.end(), rng);
    int take = static_cast<int>(std::lround(fraction * static_cast<double>(members.size())));
    if (members.size() >= 2) {
      take = std::clamp(take, 1, static_cast<int>(members.size()) - 1);
    } else {
      take = 0;
    }
    held.insert(held.end(), members.begin(), members.begin() + take);
    fit.insert(fit.end(), members.begin() + take, members.end());
  }
  std::sort(fit.begin(), fit.end());
  std::sort(held.begin(), held.end());
  return { std::move(fit), std::move(held) };
}

std::string predict_writing(const PreparedData &data, int row, int walk,
                            std::uint64_t seed) {
  Rng rng(derive_seed(seed, { kTagPredict, fnv1a(data.id(row)),
                              static_cast<std::uint64_t>(walk) }));
  return random_writing(data.molecules[row], rng);
}

}  // namespace sscreen
