//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/config.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sscreen {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) {
      return out;
    }
    start = pos + 1;
  }
}

std::invalid_argument bad_value(std::string_view key, std::string_view value) {
  return std::invalid_argument("invalid value '" + std::string(value)
                               + "' for config key '" + std::string(key) + "'");
}

int to_int(std::string_view key, std::string_view value) {
  int out = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw bad_value(key, value);
  }
  return out;
}

double to_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw bad_value(key, value);
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "on" || value == "true" || value == "1") {
    return true;
  }
  if (value == "off" || value == "false" || value == "0") {
    return false;
  }
  throw bad_value(key, value);
}

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string join_ints(const std::vector<int> &v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += (i ? "," : "") + std::to_string(v[i]);
  }
  return out;
}

const std::map<std::string, std::vector<std::string>, std::less<>> &
model_keys() {
  static const std::map<std::string, std::vector<std::string>, std::less<>> keys = {
    { "svm", { "ngram_lo", "ngram_hi", "c" } },
    { "nb", { "ngram_lo", "ngram_hi", "alpha" } },
    { "rf", { "ngram_lo", "ngram_hi", "trees", "min_leaf" } },
    { "prior", {} },
    { "cnn",
      { "stride", "filters", "regions", "optimizer", "lr", "batch_size", "epochs",
        "patience", "clip_norm", "augment", "train_walks", "predict_walks",
        "validation_walks" } },
    { "gru",
      { "stride", "embed", "hidden", "max_length", "optimizer", "lr",
        "batch_size", "epochs", "patience", "clip_norm", "augment",
        "train_walks", "predict_walks", "validation_walks" } },
    { "rnnlm",
      { "stride", "embed", "hidden", "max_length", "optimizer", "lr",
        "batch_size", "epochs", "patience", "clip_norm", "augment",
        "train_walks", "predict_walks", "validation_walks" } },
  };
  return keys;
}

}  // namespace

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c: text) {
    h = (h ^ c) * 0x100000001b3ULL;
  }
  return h;
}

bool is_model_kind(std::string_view model) {
  return std::find(std::begin(kModelKinds), std::end(kModelKinds), model)
         != std::end(kModelKinds);
}

std::string default_representation(std::string_view model) {
  if (!is_model_kind(model)) {
    throw std::invalid_argument("unknown model '" + std::string(model) + "'");
  }
  return model == "cnn" || model == "gru" || model == "rnnlm" ? "symbols" : "ngram";
}

void check_representation(std::string_view model, std::string_view repr) {
  if (repr != "ngram" && repr != "symbols") {
    throw std::invalid_argument("unknown representation '" + std::string(repr)
                                + "' (expected ngram or symbols)");
  }
  if (model != "prior" && default_representation(model) != repr) {
    throw std::invalid_argument("model '" + std::string(model)
                                + "' does not support representation '"
                                + std::string(repr) + "'");
  }
}

bool key_affects_model(std::string_view key, std::string_view model) {
  const auto it = model_keys().find(model);
  if (it == model_keys().end()) {
    return false;
  }
  return std::find(it->second.begin(), it->second.end(), key) != it->second.end();
}

void ModelSettings::set(std::string_view key, std::string_view value) {
  if (key == "ngram_lo") {
    ngram.lo = to_int(key, value);
  } else if (key == "ngram_hi") {
    ngram.hi = to_int(key, value);
  } else if (key == "stride") {
    stride = to_int(key, value);
  } else if (key == "c") {
    c = to_double(key, value);
  } else if (key == "alpha") {
    alpha = to_double(key, value);
  } else if (key == "trees") {
    trees = to_int(key, value);
  } else if (key == "min_leaf") {
    min_leaf = to_int(key, value);
  } else if (key == "filters") {
    cnn.filters = to_int(key, value);
  } else if (key == "regions") {
    cnn.regions.clear();
    for (const auto &part: split(value, ',')) {
      cnn.regions.push_back(to_int(key, part));
    }
  } else if (key == "embed") {
    gru.embed = to_int(key, value);
  } else if (key == "hidden") {
    gru.hidden = to_int(key, value);
  } else if (key == "max_length") {
    gru.max_length = to_int(key, value);
  } else if (key == "optimizer") {
    train.optimizer = std::string(value);
  } else if (key == "lr") {
    train.learning_rate = to_double(key, value);
  } else if (key == "batch_size") {
    train.batch_size = to_int(key, value);
  } else if (key == "epochs") {
    train.epochs = to_int(key, value);
  } else if (key == "patience") {
    train.patience = to_int(key, value);
  } else if (key == "clip_norm") {
    train.clip_norm = to_double(key, value);
  } else if (key == "augment") {
    augment = to_bool(key, value);
  } else if (key == "train_walks") {
    train_walks = to_int(key, value);
  } else if (key == "predict_walks") {
    predict_walks = to_int(key, value);
  } else if (key == "validation_walks") {
    validation_walks = to_int(key, value);
  } else {
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  }
}

void ModelSettings::validate() const {
  if (!is_model_kind(model)) {
    throw std::invalid_argument("unknown model '" + model + "'");
  }
  check_representation(model, repr);
  ngram.validate();
  if (stride < 1) {
    throw std::invalid_argument("stride must be at least 1");
  }
  if (!(c > 0.0) || !(alpha > 0.0)) {
    throw std::invalid_argument("c and alpha must be positive");
  }
  if (trees < 1 || min_leaf < 1) {
    throw std::invalid_argument("trees and min_leaf must be at least 1");
  }
  cnn.validate();
  gru.validate();
  train.validate();
  if (train_walks < 1 || predict_walks < 1 || validation_walks < 1) {
    throw std::invalid_argument("walk counts must be at least 1");
  }
}

std::vector<std::pair<std::string, std::string>> ModelSettings::entries() const {
  std::vector<std::pair<std::string, std::string>> out = {
    { "ngram_lo", std::to_string(ngram.lo) },
    { "ngram_hi", std::to_string(ngram.hi) },
    { "stride", std::to_string(stride) },
    { "c", fmt(c) },
    { "alpha", fmt(alpha) },
    { "trees", std::to_string(trees) },
    { "min_leaf", std::to_string(min_leaf) },
    { "filters", std::to_string(cnn.filters) },
    { "regions", join_ints(cnn.regions) },
    { "embed", std::to_string(gru.embed) },
    { "hidden", std::to_string(gru.hidden) },
    { "max_length", std::to_string(gru.max_length) },
    { "optimizer", train.optimizer },
    { "lr", fmt(train.learning_rate) },
    { "batch_size", std::to_string(train.batch_size) },
    { "epochs", std::to_string(train.epochs) },
    { "patience", std::to_string(train.patience) },
    { "clip_norm", fmt(train.clip_norm) },
    { "augment", augment ? "on" : "off" },
    { "train_walks", std::to_string(train_walks) },
    { "predict_walks", std::to_string(predict_walks) },
    { "validation_walks", std::to_string(validation_walks) },
  };
  std::sort(out.begin(), out.end());
  return out;
}

EvalConfig EvalConfig::parse(std::string_view text) {
  EvalConfig cfg;
  std::map<std::string, std::string, std::less<>> seen;
  int line_no = 0;
  for (const auto &raw: split(text, '\n')) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no)
                                  + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no)
                                  + ": empty key or value");
    }
    if (!seen.emplace(key, value).second) {
      throw std::invalid_argument("config line " + std::to_string(line_no)
                                  + ": duplicate key '" + key + "'");
    }
    if (key == "dataset") {
      cfg.dataset = value;
    } else if (key == "outer_k") {
      cfg.outer_k = to_int(key, value);
    } else if (key == "inner_k") {
      cfg.inner_k = to_int(key, value);
    } else if (key == "small_inner_k") {
      cfg.small_inner_k = to_int(key, value);
    } else if (key == "small_class") {
      cfg.small_class = to_int(key, value);
    } else if (key.starts_with("grid.")) {
      const std::string name = key.substr(5);
      std::vector<std::string> values = split(value, ',');
      ModelSettings probe;
      for (const auto &v: values) {
        probe.set(name, v);  // rejects unknown keys and bad values early
      }
      cfg.grid.emplace_back(name, std::move(values));
    } else {
      ModelSettings probe;
      probe.set(key, value);
      cfg.settings.emplace_back(key, value);
    }
  }
  if (cfg.outer_k < 2 || cfg.inner_k < 2 || cfg.small_inner_k < 2) {
    throw std::invalid_argument("fold counts must be at least 2");
  }
  return cfg;
}

EvalConfig EvalConfig::load(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file '" + path + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

ModelSettings EvalConfig::base_settings(std::string_view model,
                                        std::string_view repr) const {
  ModelSettings s;
  s.model = std::string(model);
  s.repr = std::string(repr);
  for (const auto &[k, v]: settings) {
    s.set(k, v);
  }
  return s;
}

std::string EvalConfig::normalized() const {
  std::vector<std::string> lines = {
    "dataset=" + dataset,
    "outer_k=" + std::to_string(outer_k),
    "inner_k=" + std::to_string(inner_k),
    "small_inner_k=" + std::to_string(small_inner_k),
    "small_class=" + std::to_string(small_class),
  };
  for (const auto &[k, v]: settings) {
    lines.push_back(k + "=" + v);
  }
  for (const auto &[k, vs]: grid) {
    std::string joined;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      joined += (i ? "," : "") + vs[i];
    }
    lines.push_back("grid." + k + "=" + joined);
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto &l: lines) {
    out += l + "\n";
  }
  return out;
}

std::string EvalConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(normalized())));
  return buf;
}

void HyperGrid::validate() const {
  if (inner_k < 2) {
    throw std::invalid_argument("inner fold count must be at least 2");
  }
  for (const auto &[name, values]: params) {
    if (values.empty()) {
      throw std::invalid_argument("grid parameter '" + name + "' has no values");
    }
  }
}

int HyperGrid::size() const {
  int n = 1;
  for (const auto &p: params) {
    n *= static_cast<int>(p.second.size());
  }
  return n;
}

std::vector<std::pair<std::string, std::string>> HyperGrid::point(int i) const {
  if (i < 0 || i >= size()) {
    throw std::out_of_range("grid point out of range");
  }
  std::vector<std::pair<std::string, std::string>> out(params.size());
  for (int p = static_cast<int>(params.size()) - 1; p >= 0; --p) {
    const int n = static_cast<int>(params[p].second.size());
    out[p] = { params[p].first, params[p].second[i % n] };
    i /= n;
  }
  return out;
}

std::string HyperGrid::describe(
    const std::vector<std::pair<std::string, std::string>> &point) {
  if (point.empty()) {
    return "default";
  }
  std::string out;
  for (std::size_t i = 0; i < point.size(); ++i) {
    out += (i ? ";" : "") + point[i].first + "=" + point[i].second;
  }
  return out;
}

HyperGrid grid_for(const EvalConfig &config, std::string_view model) {
  HyperGrid g;
  g.model = std::string(model);
  g.inner_k = config.inner_k;
  for (const auto &[k, vs]: config.grid) {
    if (key_affects_model(k, model)) {
      g.params.emplace_back(k, vs);
    }
  }
  if (g.params.empty()) {
    if (model == "svm") {
      g.params = { { "c", { "0.1", "1", "10" } } };
    } else if (model == "nb") {
      g.params = { { "alpha", { "0.1", "1" } } };
    } else if (model == "rf") {
      g.params = { { "min_leaf", { "1", "3" } } };
    } else if (model == "cnn") {
      g.params = { { "lr", { "0.001", "0.0003" } }, { "filters", { "32", "64" } } };
    } else if (model == "gru" || model == "rnnlm") {
      g.params = { { "lr", { "0.001", "0.0003" } }, { "hidden", { "32", "64" } } };
    }
  }
  g.validate();
  return g;
}

}  // namespace sscreen
