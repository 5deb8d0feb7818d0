//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/neural.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sscreen {
namespace {
std::atomic<long> g_truncations { 0 };

Eigen::MatrixXd uniform(int rows, int cols, double limit, Rng &rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  Eigen::MatrixXd m(rows, cols);
  // Fill in a fixed order so initialization does not depend on Eigen's
  // evaluation strategy.
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      m(r, c) = dist(rng);
    }
  }
  return m;
}

double sigmoid(double z) {
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd &z) {
  Eigen::VectorXd out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    out(i) = sigmoid(z(i));
  }
  return out;
}

// -log σ(z) for y = 1, -log(1 - σ(z)) for y = 0.
double bce_from_logit(double z, int y) {
  const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
  return softplus - (y == 1 ? z : 0.0);
}

void check_label(int y) {
  if (y != 0 && y != 1) {
    throw std::invalid_argument("label must be 0 or 1");
  }
}

void check_symbols(const SymbolSeq &seq, int vocab_size) {
  for (const int s: seq.symbols) {
    if (s < 0 || s >= vocab_size) {
      throw std::out_of_range("symbol index " + std::to_string(s)
                              + " outside vocabulary of size "
                              + std::to_string(vocab_size));
    }
  }
}
}  // namespace

// ---- ParamSet ----

int ParamSet::add(std::string name, Eigen::MatrixXd m) {
  names.push_back(std::move(name));
  mats.push_back(std::move(m));
  return count() - 1;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  out.names = names;
  for (const auto &m: mats) {
    out.mats.push_back(Eigen::MatrixXd::Zero(m.rows(), m.cols()));
  }
  return out;
}

void ParamSet::set_zero() {
  for (auto &m: mats) {
    m.setZero();
  }
}

long ParamSet::num_scalars() const {
  long n = 0;
  for (const auto &m: mats) {
    n += static_cast<long>(m.size());
  }
  return n;
}

double ParamSet::squared_norm() const {
  double s = 0.0;
  for (const auto &m: mats) {
    s += m.squaredNorm();
  }
  return s;
}

void ParamSet::scale(double s) {
  for (auto &m: mats) {
    m *= s;
  }
}

void ParamSet::add_scaled(const ParamSet &other, double s) {
  for (std::size_t i = 0; i < mats.size(); ++i) {
    mats[i] += s * other.mats.at(i);
  }
}

bool ParamSet::all_finite() const {
  for (const auto &m: mats) {
    if (!m.allFinite()) {
      return false;
    }
  }
  return true;
}

void ParamSet::save(Archive &ar, const std::string &prefix) const {
  for (std::size_t i = 0; i < mats.size(); ++i) {
    ar.put(prefix + names[i], mats[i]);
  }
}

void ParamSet::load(const Archive &ar, const std::string &prefix) {
  for (std::size_t i = 0; i < mats.size(); ++i) {
    Eigen::MatrixXd m = ar.matrix(prefix + names[i]);
    if (m.rows() != mats[i].rows() || m.cols() != mats[i].cols()) {
      throw std::runtime_error("tensor '" + prefix + names[i]
                               + "' has the wrong shape");
    }
    mats[i] = std::move(m);
  }
}

// ---- CNN ----

void CnnConfig::validate() const {
  if (regions.empty() || filters < 1) {
    throw std::invalid_argument("CNN needs at least one region and one filter");
  }
  for (const int r: regions) {
    if (r < 1) {
      throw std::invalid_argument("CNN region sizes must be positive");
    }
  }
}

Cnn::Cnn(int vocab_size, CnnConfig config, Rng &rng)
    : vocab_size_(vocab_size), config_(std::move(config)) {
  config_.validate();
  if (vocab_size < 2) {
    throw std::invalid_argument("vocabulary must include UNK and PAD");
  }
  const int k = config_.filters;
  for (std::size_t i = 0; i < config_.regions.size(); ++i) {
    const int r = config_.regions[i];
    // One-hot input: each window has r nonzero entries.
    params.add("conv" + std::to_string(i) + ".w",
               uniform(k, r * vocab_size, 1.0 / std::sqrt(static_cast<double>(r)), rng));
    params.add("conv" + std::to_string(i) + ".b", Eigen::MatrixXd::Zero(k, 1));
  }
  const int units = k * static_cast<int>(config_.regions.size());
  params.add("dense.w", uniform(units, 1, std::sqrt(6.0 / (units + 1)), rng));
  params.add("dense.b", Eigen::MatrixXd::Zero(1, 1));
}

int Cnn::dense_weight_index() const {
  return 2 * static_cast<int>(config_.regions.size());
}

int Cnn::dense_bias_index() const {
  return dense_weight_index() + 1;
}

Cnn::Pooled Cnn::pool(const SymbolSeq &seq) const {
  check_symbols(seq, vocab_size_);
  const int k = config_.filters;
  const int max_region = *std::max_element(config_.regions.begin(),
                                           config_.regions.end());
  Pooled out;
  out.padded = seq.symbols;
  if (static_cast<int>(out.padded.size()) < max_region) {
    out.padded.resize(max_region, Vocabulary::kPad);
  }
  const int len = static_cast<int>(out.padded.size());
  const int n_regions = static_cast<int>(config_.regions.size());
  out.h = Eigen::VectorXd::Zero(k * n_regions);
  out.argmax.assign(k * n_regions, -1);

  Eigen::VectorXd best(k);
  Eigen::VectorXd act(k);
  for (int i = 0; i < n_regions; ++i) {
    const int r = config_.regions[i];
    const Eigen::MatrixXd &w = params.mats[weight_index(i)];
    const Eigen::VectorXd b = params.mats[bias_index(i)].col(0);
    std::vector<int> arg(k, -1);
    for (int p = 0; p + r <= len; ++p) {
      if (out.padded[p] == Vocabulary::kPad) {
        continue;
      }
      act = b;
      for (int o = 0; o < r; ++o) {
        const int sym = out.padded[p + o];
        if (sym != Vocabulary::kPad) {
          act += w.col(o * vocab_size_ + sym);
        }
      }
      for (int f = 0; f < k; ++f) {
        if (arg[f] < 0 || act(f) > best(f)) {
          best(f) = act(f);
          arg[f] = p;
        }
      }
    }
    for (int f = 0; f < k; ++f) {
      const int u = i * k + f;
      out.argmax[u] = arg[f];
      out.h(u) = arg[f] < 0 ? 0.0 : std::max(0.0, best(f));
    }
  }
  return out;
}

double Cnn::predict(const SymbolSeq &seq) const {
  const Pooled pooled = pool(seq);
  const double z = params.mats[dense_weight_index()].col(0).dot(pooled.h)
                   + params.mats[dense_bias_index()](0, 0);
  return sigmoid(z);
}

double Cnn::loss(const SymbolSeq &seq, int label) const {
  check_label(label);
  const Pooled pooled = pool(seq);
  const double z = params.mats[dense_weight_index()].col(0).dot(pooled.h)
                   + params.mats[dense_bias_index()](0, 0);
  return bce_from_logit(z, label);
}

double Cnn::loss_and_grad(const SymbolSeq &seq, int label,
                          ParamSet &grad) const {
  check_label(label);
  const Pooled pooled = pool(seq);
  const Eigen::VectorXd w = params.mats[dense_weight_index()].col(0);
  const double z = w.dot(pooled.h) + params.mats[dense_bias_index()](0, 0);
  const double g = sigmoid(z) - label;

  grad.mats[dense_weight_index()].col(0) += g * pooled.h;
  grad.mats[dense_bias_index()](0, 0) += g;
  const int k = config_.filters;
  for (int i = 0; i < static_cast<int>(config_.regions.size()); ++i) {
    const int r = config_.regions[i];
    Eigen::MatrixXd &gw = grad.mats[weight_index(i)];
    Eigen::MatrixXd &gb = grad.mats[bias_index(i)];
    for (int f = 0; f < k; ++f) {
      const int u = i * k + f;
      if (pooled.h(u) <= 0.0) {
        continue;
      }
      const double d = g * w(u);
      const int p = pooled.argmax[u];
      gb(f, 0) += d;
      for (int o = 0; o < r; ++o) {
        const int sym = pooled.padded[p + o];
        if (sym != Vocabulary::kPad) {
          gw(f, o * vocab_size_ + sym) += d;
        }
      }
    }
  }
  return bce_from_logit(z, label);
}

// ---- GRU core ----

void GruConfig::validate() const {
  if (embed < 1 || hidden < 1 || max_length < 1) {
    throw std::invalid_argument("GRU sizes must be positive");
  }
}

long gru_truncation_count() {
  return g_truncations.load();
}

GruLayout add_gru_params(ParamSet &p, int input_symbols, const GruConfig &cfg,
                         Rng &rng) {
  cfg.validate();
  const int d = cfg.embed;
  const int h = cfg.hidden;
  const double wx = std::sqrt(6.0 / (d + h));
  const double wh = std::sqrt(6.0 / (2.0 * h));
  GruLayout l;
  l.embed = p.add("gru.embed", uniform(input_symbols, d, std::sqrt(3.0 / d), rng));
  l.wz = p.add("gru.wz", uniform(h, d, wx, rng));
  l.uz = p.add("gru.uz", uniform(h, h, wh, rng));
  l.bz = p.add("gru.bz", Eigen::MatrixXd::Zero(h, 1));
  l.wr = p.add("gru.wr", uniform(h, d, wx, rng));
  l.ur = p.add("gru.ur", uniform(h, h, wh, rng));
  l.br = p.add("gru.br", Eigen::MatrixXd::Zero(h, 1));
  l.wh = p.add("gru.wh", uniform(h, d, wx, rng));
  l.uh = p.add("gru.uh", uniform(h, h, wh, rng));
  l.bh = p.add("gru.bh", Eigen::MatrixXd::Zero(h, 1));
  return l;
}

GruTrace gru_run(const ParamSet &p, const GruLayout &l,
                 std::span<const int> inputs) {
  const Eigen::MatrixXd &emb = p.mats[l.embed];
  const Eigen::Index hidden = p.mats[l.uz].rows();
  GruTrace t;
  t.inputs.assign(inputs.begin(), inputs.end());
  t.h.push_back(Eigen::VectorXd::Zero(hidden));
  for (const int sym: inputs) {
    if (sym < 0 || sym >= emb.rows()) {
      throw std::out_of_range("GRU input symbol outside the embedding table");
    }
    const Eigen::VectorXd x = emb.row(sym).transpose();
    const Eigen::VectorXd &h = t.h.back();
    Eigen::VectorXd z = sigmoid((p.mats[l.wz] * x + p.mats[l.uz] * h
                                 + p.mats[l.bz].col(0)).eval());
    Eigen::VectorXd r = sigmoid((p.mats[l.wr] * x + p.mats[l.ur] * h
                                 + p.mats[l.br].col(0)).eval());
    Eigen::VectorXd c = (p.mats[l.wh] * x + p.mats[l.uh] * r.cwiseProduct(h)
                         + p.mats[l.bh].col(0))
                            .array()
                            .tanh()
                            .matrix();
    Eigen::VectorXd next = (Eigen::VectorXd::Ones(hidden) - z).cwiseProduct(h)
                           + z.cwiseProduct(c);
    t.z.push_back(std::move(z));
    t.r.push_back(std::move(r));
    t.cand.push_back(std::move(c));
    t.h.push_back(std::move(next));
  }
  return t;
}

void gru_backward(const ParamSet &p, const GruLayout &l, const GruTrace &trace,
                  std::vector<Eigen::VectorXd> dh, ParamSet &grad) {
  const Eigen::MatrixXd &emb = p.mats[l.embed];
  const int steps = static_cast<int>(trace.inputs.size());
  const Eigen::Index hidden = p.mats[l.uz].rows();
  Eigen::VectorXd carry = Eigen::VectorXd::Zero(hidden);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(hidden);
  for (int t = steps - 1; t >= 0; --t) {
    const Eigen::VectorXd d = dh[t] + carry;
    const Eigen::VectorXd &hp = trace.h[t];
    const Eigen::VectorXd &z = trace.z[t];
    const Eigen::VectorXd &r = trace.r[t];
    const Eigen::VectorXd &c = trace.cand[t];
    const Eigen::VectorXd x = emb.row(trace.inputs[t]).transpose();

    const Eigen::VectorXd dz = d.cwiseProduct(c - hp);
    const Eigen::VectorXd dc = d.cwiseProduct(z);
    Eigen::VectorXd dhp = d.cwiseProduct(ones - z);

    const Eigen::VectorXd dac = dc.cwiseProduct(ones - c.cwiseProduct(c));
    const Eigen::VectorXd rh = r.cwiseProduct(hp);
    grad.mats[l.wh] += dac * x.transpose();
    grad.mats[l.uh] += dac * rh.transpose();
    grad.mats[l.bh].col(0) += dac;
    const Eigen::VectorXd drh = p.mats[l.uh].transpose() * dac;
    const Eigen::VectorXd dr = drh.cwiseProduct(hp);
    dhp += drh.cwiseProduct(r);
    Eigen::VectorXd dx = p.mats[l.wh].transpose() * dac;

    const Eigen::VectorXd daz = dz.cwiseProduct(z).cwiseProduct(ones - z);
    grad.mats[l.wz] += daz * x.transpose();
    grad.mats[l.uz] += daz * hp.transpose();
    grad.mats[l.bz].col(0) += daz;
    dhp += p.mats[l.uz].transpose() * daz;
    dx += p.mats[l.wz].transpose() * daz;

    const Eigen::VectorXd dar = dr.cwiseProduct(r).cwiseProduct(ones - r);
    grad.mats[l.wr] += dar * x.transpose();
    grad.mats[l.ur] += dar * hp.transpose();
    grad.mats[l.br].col(0) += dar;
    dhp += p.mats[l.ur].transpose() * dar;
    dx += p.mats[l.wr].transpose() * dar;

    grad.mats[l.embed].row(trace.inputs[t]) += dx.transpose();
    carry = std::move(dhp);
  }
}

// ---- GRU classifier ----

GruClassifier::GruClassifier(int vocab_size, GruConfig config, Rng &rng)
    : vocab_size_(vocab_size), config_(config) {
  config_.validate();
  layout_ = add_gru_params(params, vocab_size, config_, rng);
  readout_w_ = params.add(
      "readout.w", uniform(config_.hidden, 1,
                           std::sqrt(6.0 / (config_.hidden + 1)), rng));
  readout_b_ = params.add("readout.b", Eigen::MatrixXd::Zero(1, 1));
}

std::vector<int> GruClassifier::clipped(const SymbolSeq &seq) const {
  if (seq.symbols.empty()) {
    throw std::invalid_argument("GRU input sequence is empty");
  }
  check_symbols(seq, vocab_size_);
  if (seq.length() > config_.max_length) {
    ++g_truncations;
    return { seq.symbols.begin(), seq.symbols.begin() + config_.max_length };
  }
  return seq.symbols;
}

Eigen::VectorXd GruClassifier::encode(const SymbolSeq &seq) const {
  return gru_run(params, layout_, clipped(seq)).h.back();
}

double GruClassifier::predict(const SymbolSeq &seq) const {
  return sigmoid(params.mats[readout_w_].col(0).dot(encode(seq))
                 + params.mats[readout_b_](0, 0));
}

double GruClassifier::loss(const SymbolSeq &seq, int label) const {
  check_label(label);
  const double z = params.mats[readout_w_].col(0).dot(encode(seq))
                   + params.mats[readout_b_](0, 0);
  return bce_from_logit(z, label);
}

double GruClassifier::loss_and_grad(const SymbolSeq &seq, int label,
                                    ParamSet &grad) const {
  check_label(label);
  const GruTrace trace = gru_run(params, layout_, clipped(seq));
  const Eigen::VectorXd &h = trace.h.back();
  const Eigen::VectorXd w = params.mats[readout_w_].col(0);
  const double z = w.dot(h) + params.mats[readout_b_](0, 0);
  const double g = sigmoid(z) - label;
  grad.mats[readout_w_].col(0) += g * h;
  grad.mats[readout_b_](0, 0) += g;
  std::vector<Eigen::VectorXd> dh(trace.inputs.size(),
                                  Eigen::VectorXd::Zero(h.size()));
  dh.back() = g * w;
  gru_backward(params, layout_, trace, std::move(dh), grad);
  return bce_from_logit(z, label);
}

// ---- GRU language model ----

GruLanguageModel::GruLanguageModel(int vocab_size, GruConfig config, Rng &rng)
    : vocab_size_(vocab_size), config_(config) {
  config_.validate();
  layout_ = add_gru_params(params, vocab_size + 1, config_, rng);
  out_w_ = params.add("lm.out.w",
                      uniform(vocab_size + 1, config_.hidden,
                              std::sqrt(6.0 / (vocab_size + 1 + config_.hidden)),
                              rng));
  out_b_ = params.add("lm.out.b", Eigen::MatrixXd::Zero(vocab_size + 1, 1));
}

std::vector<int> GruLanguageModel::inputs(const SymbolSeq &seq) const {
  check_symbols(seq, vocab_size_);
  std::vector<int> in = { vocab_size_ };
  const int len = std::min(seq.length(), config_.max_length);
  if (seq.length() > config_.max_length) {
    ++g_truncations;
  }
  in.insert(in.end(), seq.symbols.begin(), seq.symbols.begin() + len);
  return in;
}

std::vector<Eigen::VectorXd> GruLanguageModel::next_distributions(
    const SymbolSeq &seq) const {
  const GruTrace trace = gru_run(params, layout_, inputs(seq));
  std::vector<Eigen::VectorXd> out;
  for (std::size_t t = 1; t < trace.h.size(); ++t) {
    Eigen::VectorXd logits = params.mats[out_w_] * trace.h[t] + params.mats[out_b_].col(0);
    logits.array() -= logits.maxCoeff();
    logits = logits.array().exp().matrix();
    out.push_back(logits / logits.sum());
  }
  return out;
}

double GruLanguageModel::loglik(const SymbolSeq &seq) const {
  return -loss(seq, 0);
}

double GruLanguageModel::loss(const SymbolSeq &seq, int /*label*/) const {
  const std::vector<int> in = inputs(seq);
  const GruTrace trace = gru_run(params, layout_, in);
  double total = 0.0;
  for (std::size_t t = 0; t < in.size(); ++t) {
    const int target = t + 1 < in.size() ? in[t + 1] : vocab_size_;
    const Eigen::VectorXd logits =
        params.mats[out_w_] * trace.h[t + 1] + params.mats[out_b_].col(0);
    const double m = logits.maxCoeff();
    const double lse = m + std::log((logits.array() - m).exp().sum());
    total += lse - logits(target);
  }
  return total;
}

double GruLanguageModel::loss_and_grad(const SymbolSeq &seq, int /*label*/,
                                       ParamSet &grad) const {
  const std::vector<int> in = inputs(seq);
  const GruTrace trace = gru_run(params, layout_, in);
  const Eigen::MatrixXd &wo = params.mats[out_w_];
  std::vector<Eigen::VectorXd> dh;
  double total = 0.0;
  for (std::size_t t = 0; t < in.size(); ++t) {
    const int target = t + 1 < in.size() ? in[t + 1] : vocab_size_;
    const Eigen::VectorXd &h = trace.h[t + 1];
    Eigen::VectorXd logits = wo * h + params.mats[out_b_].col(0);
    const double m = logits.maxCoeff();
    Eigen::VectorXd prob = (logits.array() - m).exp().matrix();
    const double sum = prob.sum();
    total += m + std::log(sum) - logits(target);
    prob /= sum;
    prob(target) -= 1.0;
    grad.mats[out_w_] += prob * h.transpose();
    grad.mats[out_b_].col(0) += prob;
    dh.push_back(wo.transpose() * prob);
  }
  gru_backward(params, layout_, trace, std::move(dh), grad);
  return total;
}

// ---- Stacker ----

namespace {
double stacker_objective(const Eigen::MatrixXd &x, std::span<const int> y,
                         const Eigen::VectorXd &w, double l2) {
  const Eigen::VectorXd s = x * w;
  double f = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    f += bce_from_logit(s(i), y[i]);
  }
  f /= static_cast<double>(s.size());
  return f + 0.5 * l2 * w.head(w.size() - 1).squaredNorm();
}
}  // namespace

void LogisticStacker::fit(const Eigen::MatrixXd &x, std::span<const int> y) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n != static_cast<Eigen::Index>(y.size()) || n == 0) {
    throw std::invalid_argument("stacker needs matching nonempty inputs");
  }
  const auto pos = std::count(y.begin(), y.end(), 1);
  if (pos == 0 || pos == n) {
    throw std::invalid_argument("stacker training needs both classes");
  }
  mean_ = x.colwise().mean().transpose();
  scale_.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double var = (x.col(j).array() - mean_(j)).square().mean();
    scale_(j) = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  Eigen::MatrixXd xs(n, d + 1);
  for (Eigen::Index j = 0; j < d; ++j) {
    xs.col(j) = (x.col(j).array() - mean_(j)) / scale_(j);
  }
  xs.col(d).setOnes();

  weights_ = Eigen::VectorXd::Zero(d + 1);
  double f = stacker_objective(xs, y, weights_, l2_);
  history_ = { f };
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(d + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d + 1, d + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = sigmoid(xs.row(i).dot(weights_));
      g += (p - y[i]) * xs.row(i).transpose();
      h += p * (1.0 - p) * xs.row(i).transpose() * xs.row(i);
    }
    g /= static_cast<double>(n);
    h /= static_cast<double>(n);
    for (Eigen::Index j = 0; j < d; ++j) {
      g(j) += l2_ * weights_(j);
      h(j, j) += l2_;
    }
    h(d, d) += 1e-10;
    if (g.lpNorm<Eigen::Infinity>() < 1e-10) {
      break;
    }
    const Eigen::VectorXd step = -h.ldlt().solve(g);
    double t = 1.0;
    bool accepted = false;
    while (t >= 1e-10) {
      const Eigen::VectorXd cand = weights_ + t * step;
      const double fc = stacker_objective(xs, y, cand, l2_);
      if (fc <= f) {
        const double gain = f - fc;
        weights_ = cand;
        f = fc;
        history_.push_back(f);
        accepted = gain > 1e-15;
        break;
      }
      t /= 2.0;
    }
    if (!accepted) {
      break;
    }
  }
}

double LogisticStacker::predict(const Eigen::VectorXd &features) const {
  if (weights_.size() == 0) {
    throw std::logic_error("stacker used before fit");
  }
  const Eigen::Index d = mean_.size();
  double s = weights_(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    s += weights_(j) * (features(j) - mean_(j)) / scale_(j);
  }
  return sigmoid(s);
}

void LogisticStacker::save(Archive &ar, const std::string &prefix) const {
  ar.put(prefix + "mean", std::vector<double>(mean_.data(), mean_.data() + mean_.size()));
  ar.put(prefix + "scale", std::vector<double>(scale_.data(), scale_.data() + scale_.size()));
  ar.put(prefix + "weights",
         std::vector<double>(weights_.data(), weights_.data() + weights_.size()));
}

void LogisticStacker::load(const Archive &ar, const std::string &prefix) {
  const auto &m = ar.f64(prefix + "mean");
  const auto &s = ar.f64(prefix + "scale");
  const auto &w = ar.f64(prefix + "weights");
  if (s.size() != m.size() || w.size() != m.size() + 1) {
    throw std::runtime_error("corrupt stacker archive");
  }
  mean_ = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
  scale_ = Eigen::Map<const Eigen::VectorXd>(s.data(), s.size());
  weights_ = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
}

Eigen::VectorXd stacker_features(const GruLanguageModel &active,
                                 const GruLanguageModel &inactive,
                                 const SymbolSeq &seq) {
  const double n =
      std::min(seq.length(), active.config().max_length) + 1.0;
  Eigen::VectorXd f(3);
  f << active.loglik(seq) / n, inactive.loglik(seq) / n, n;
  return f;
}

// ---- Training ----

void TrainConfig::validate() const {
  if (optimizer != "adam" && optimizer != "sgd") {
    throw std::invalid_argument("optimizer must be adam or sgd");
  }
  if (!(learning_rate > 0) || batch_size < 1 || epochs < 1 || patience < 1
      || !(clip_norm > 0)) {
    throw std::invalid_argument("training settings must be positive");
  }
}

std::string TrainConfig::describe() const {
  std::ostringstream os;
  os << "optimizer=" << optimizer << " lr=" << learning_rate
     << " batch=" << batch_size << " epochs=" << epochs
     << " patience=" << patience << " clip=" << clip_norm << " seed=" << seed;
  return os.str();
}

double batch_loss_and_grad(const SequenceNet &net,
                           std::span<const SymbolSeq> seqs,
                           std::span<const int> labels, ParamSet &grad) {
  if (seqs.size() != labels.size() || seqs.empty()) {
    throw std::invalid_argument("batch needs matching nonempty inputs");
  }
  grad.set_zero();
  double total = 0.0;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    total += net.loss_and_grad(seqs[i], labels[i], grad);
  }
  const double inv = 1.0 / static_cast<double>(seqs.size());
  grad.scale(inv);
  return total * inv;
}

TrainResult train_network(SequenceNet &net, int num_samples,
                          std::span<const int> labels, const SampleFn &sample,
                          const ValidationFn &validation,
                          const TrainConfig &config) {
  config.validate();
  if (num_samples < 1 || static_cast<int>(labels.size()) != num_samples) {
    throw std::invalid_argument("training set size and labels disagree");
  }
  auto diverged = [&](const std::string &what) {
    return std::runtime_error(what + " is not finite; training diverged ("
                              + config.describe() + ")");
  };

  Rng rng(config.seed);
  ParamSet grad = net.params.zeros_like();
  ParamSet m1 = net.params.zeros_like();
  ParamSet m2 = net.params.zeros_like();
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  long step = 0;

  ParamSet best = net.params;
  TrainResult result;
  result.best_validation = std::numeric_limits<double>::infinity();
  int since_best = 0;
  std::vector<int> order(num_samples);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<SymbolSeq> seqs;
    seqs.reserve(num_samples);
    for (int i = 0; i < num_samples; ++i) {
      seqs.push_back(sample(i, rng));
    }
    std::shuffle(order.begin(), order.end(), rng);

    double epoch_loss = 0.0;
    for (int start = 0; start < num_samples; start += config.batch_size) {
      const int end = std::min(num_samples, start + config.batch_size);
      grad.set_zero();
      for (int k = start; k < end; ++k) {
        epoch_loss += net.loss_and_grad(seqs[order[k]], labels[order[k]], grad);
      }
      grad.scale(1.0 / (end - start));
      const double norm = std::sqrt(grad.squared_norm());
      if (!std::isfinite(norm)) {
        throw diverged("gradient");
      }
      if (norm > config.clip_norm) {
        grad.scale(config.clip_norm / norm);
      }
      ++step;
      for (int p = 0; p < net.params.count(); ++p) {
        Eigen::MatrixXd &w = net.params.mats[p];
        const Eigen::MatrixXd &g = grad.mats[p];
        if (config.optimizer == "sgd") {
          w -= config.learning_rate * g;
          continue;
        }
        m1.mats[p] = kBeta1 * m1.mats[p] + (1.0 - kBeta1) * g;
        m2.mats[p] = kBeta2 * m2.mats[p] + (1.0 - kBeta2) * g.cwiseProduct(g);
        const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
        w.array() -= config.learning_rate * (m1.mats[p].array() / c1)
                     / ((m2.mats[p].array() / c2).sqrt() + kEps);
      }
      if (!net.params.all_finite()) {
        throw diverged("parameter");
      }
    }
    epoch_loss /= num_samples;
    if (!std::isfinite(epoch_loss)) {
      throw diverged("training loss");
    }
    result.train_loss.push_back(epoch_loss);
    result.epochs_run = epoch + 1;

    const double val = validation ? validation(net) : epoch_loss;
    if (!std::isfinite(val)) {
      throw diverged("validation loss");
    }
    result.validation_loss.push_back(val);
    if (val < result.best_validation) {
      result.best_validation = val;
      result.best_epoch = epoch;
      best = net.params;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  net.params = std::move(best);
  return result;
}

}  // namespace sscreen
