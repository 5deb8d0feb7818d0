//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/evaluate.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "sscreen/metrics.h"

namespace sscreen {
namespace {

// Seed-derivation tags.
constexpr std::uint64_t kTagOuter = 0x6f75746572;
constexpr std::uint64_t kTagInner = 0x696e6e6572;
constexpr std::uint64_t kTagFit = 0x666974;

constexpr std::string_view kFailed = "—";

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) {
      return out;
    }
    start = pos + 1;
  }
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', '_');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

int model_order(const std::string &model) {
  const auto it = std::find(std::begin(kModelKinds), std::end(kModelKinds), model);
  return static_cast<int>(it - std::begin(kModelKinds));
}

std::vector<const EvalRow *> sorted_rows(std::span<const EvalRow> rows) {
  std::vector<const EvalRow *> out;
  for (const auto &r: rows) {
    out.push_back(&r);
  }
  std::stable_sort(out.begin(), out.end(), [](const EvalRow *a, const EvalRow *b) {
    if (a->repr != b->repr) {
      return a->repr < b->repr;
    }
    if (a->model != b->model) {
      return model_order(a->model) < model_order(b->model);
    }
    return a->dataset < b->dataset;
  });
  return out;
}

std::string join_folds(const std::vector<std::optional<double>> &v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += (i ? ";" : "") + (v[i] ? fmt(*v[i]) : std::string(kFailed));
  }
  return out;
}

std::vector<std::optional<double>> parse_folds(const std::string &text) {
  std::vector<std::optional<double>> out;
  for (const auto &part: split(text, ';')) {
    if (part == kFailed) {
      out.emplace_back();
      continue;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size()) {
      throw std::invalid_argument("malformed fold value '" + part + "'");
    }
    out.emplace_back(v);
  }
  return out;
}

std::optional<double> mean_of(const std::vector<std::optional<double>> &v) {
  if (v.empty()) {
    return std::nullopt;
  }
  double s = 0.0;
  for (const auto &x: v) {
    if (!x) {
      return std::nullopt;
    }
    s += *x;
  }
  return s / static_cast<double>(v.size());
}

// Pipeline fit and scored on the given rows.
double score_split(const PreparedData &data, const ModelSettings &settings,
                   std::span<const int> train, std::span<const int> test,
                   std::uint64_t seed) {
  assert_disjoint(data, train, test);
  auto pipeline = make_pipeline(settings);
  pipeline->fit(data, train, seed);
  std::vector<int> y;
  for (const int r: test) {
    y.push_back(data.label(r));
  }
  return log_loss(pipeline->predict(data, test), y);
}

}  // namespace

std::vector<int> FoldPlan::test_rows(int f) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(assignment.size()); ++i) {
    if (assignment[i] == f) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<int> FoldPlan::train_rows(int f) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(assignment.size()); ++i) {
    if (assignment[i] != f) {
      out.push_back(i);
    }
  }
  return out;
}

FoldPlan stratified_folds(const Dataset &dataset, int k, std::uint64_t seed) {
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignment = stratified_assignment(dataset.labels(), k, seed);
  return plan;
}

void assert_disjoint(const PreparedData &data, std::span<const int> train,
                     std::span<const int> test) {
  std::unordered_set<std::string> train_ids;
  for (const int r: train) {
    train_ids.insert(data.id(r));
  }
  for (const int r: test) {
    if (train_ids.contains(data.id(r))) {
      throw std::logic_error("leakage: record id '" + data.id(r)
                             + "' is in both the training and the test split");
    }
  }
}

int inner_fold_count(std::span<const int> labels, const EvalConfig &config) {
  const auto pos = std::count(labels.begin(), labels.end(), 1);
  const auto neg = static_cast<long>(labels.size()) - pos;
  return std::min(pos, neg) < config.small_class ? config.small_inner_k
                                                  : config.inner_k;
}

bool EvalRow::complete() const {
  return !fold_log_loss.empty()
         && std::all_of(fold_log_loss.begin(), fold_log_loss.end(),
                        [](const auto &v) { return v.has_value(); });
}

std::optional<double> EvalRow::mean_log_loss() const { return mean_of(fold_log_loss); }

std::optional<double> EvalRow::std_log_loss() const {
  const auto m = mean_log_loss();
  if (!m) {
    return std::nullopt;
  }
  double s = 0.0;
  for (const auto &x: fold_log_loss) {
    s += (*x - *m) * (*x - *m);
  }
  return std::sqrt(s / static_cast<double>(fold_log_loss.size()));
}

std::optional<double> EvalRow::mean_accuracy() const { return mean_of(fold_accuracy); }

FoldOutcome evaluate_fold(const PreparedData &data, std::span<const int> train,
                          std::span<const int> test, const ModelSettings &base,
                          const HyperGrid &grid, const EvalConfig &config,
                          std::uint64_t seed, int fold, const OuterFitHook &hook) {
  const auto start = std::chrono::steady_clock::now();
  FoldOutcome out;
  out.fold = fold;
  out.n_train = static_cast<int>(train.size());
  out.n_test = static_cast<int>(test.size());
  const auto f = static_cast<std::uint64_t>(fold);
  try {
    assert_disjoint(data, train, test);
    grid.validate();
    auto settings_for = [&](int g) {
      ModelSettings s = base;
      for (const auto &[k, v]: grid.point(g)) {
        s.set(k, v);
      }
      s.validate();
      return s;
    };

    int best = 0;
    if (grid.size() > 1) {
      std::vector<int> y_train;
      for (const int r: train) {
        y_train.push_back(data.label(r));
      }
      out.inner_k = inner_fold_count(y_train, config);
      const auto inner = stratified_assignment(y_train, out.inner_k,
                                               derive_seed(seed, { kTagInner, f }));
      for (int g = 0; g < grid.size(); ++g) {
        const ModelSettings s = settings_for(g);
        double total = 0.0;
        for (int i = 0; i < out.inner_k; ++i) {
          std::vector<int> itrain;
          std::vector<int> itest;
          for (std::size_t j = 0; j < train.size(); ++j) {
            (inner[j] == i ? itest : itrain).push_back(train[j]);
          }
          total += score_split(
              data, s, itrain, itest,
              derive_seed(seed, { kTagFit, f, static_cast<std::uint64_t>(g),
                                  static_cast<std::uint64_t>(i) + 1 }));
        }
        out.inner_scores.push_back(total / out.inner_k);
        if (out.inner_scores.back() < out.inner_scores[best]) {
          best = g;
        }
      }
    }
    out.selected = HyperGrid::describe(grid.point(best));

    auto pipeline = make_pipeline(settings_for(best));
    pipeline->fit(data, train,
                  derive_seed(seed, { kTagFit, f, static_cast<std::uint64_t>(best), 0 }));
    std::unordered_set<std::string> fitted(pipeline->training_ids().begin(),
                                           pipeline->training_ids().end());
    for (const int r: test) {
      if (fitted.contains(data.id(r))) {
        throw std::logic_error("leakage: test record '" + data.id(r)
                               + "' was used for fitting");
      }
    }
    const auto p = pipeline->predict(data, test);
    std::vector<int> y;
    for (const int r: test) {
      y.push_back(data.label(r));
    }
    out.log_loss = log_loss(p, y);
    out.accuracy = accuracy(p, y);
    out.diagnostics = pipeline->diagnostics();
    out.ok = true;
    if (hook) {
      hook(fold, *pipeline, test);
    }
  } catch (const std::exception &e) {
    out.ok = false;
    out.error = e.what();
  }
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

NestedCvResult nested_cv(const PreparedData &data, const std::string &model,
                         const std::string &repr, const EvalConfig &config,
                         std::uint64_t seed, const OuterFitHook &hook) {
  data.dataset.validate();
  const ModelSettings base = config.base_settings(model, repr);
  base.validate();
  const HyperGrid grid = grid_for(config, model);
  const FoldPlan plan =
      stratified_folds(data.dataset, config.outer_k, derive_seed(seed, { kTagOuter }));

  NestedCvResult result;
  EvalRow &row = result.row;
  row.dataset = config.dataset.empty() ? data.dataset.name : config.dataset;
  row.model = model;
  row.repr = repr;
  row.seed = seed;
  row.config_hash = config.hash();
  for (int f = 0; f < plan.k; ++f) {
    const auto train = plan.train_rows(f);
    const auto test = plan.test_rows(f);
    FoldOutcome outcome =
        evaluate_fold(data, train, test, base, grid, config, seed, f, hook);
    row.fold_log_loss.push_back(outcome.ok ? std::optional(outcome.log_loss)
                                           : std::nullopt);
    row.fold_accuracy.push_back(outcome.ok ? std::optional(outcome.accuracy)
                                           : std::nullopt);
    row.selected.push_back(outcome.ok ? outcome.selected : std::string(kFailed));
    row.seconds += outcome.seconds;
    result.folds.push_back(std::move(outcome));
  }
  return result;
}

std::string format_mean_std(double mean, double std) {
  return fixed3(mean) + "±" + fixed3(std);
}

std::string report_markdown(std::span<const EvalRow> rows) {
  const auto sorted = sorted_rows(rows);
  std::vector<std::string> datasets;
  for (const EvalRow *r: sorted) {
    if (std::find(datasets.begin(), datasets.end(), r->dataset) == datasets.end()) {
      datasets.push_back(r->dataset);
    }
  }
  std::sort(datasets.begin(), datasets.end());

  // One table line per (representation, model).
  std::vector<std::pair<std::string, std::string>> keys;
  for (const EvalRow *r: sorted) {
    const std::pair<std::string, std::string> key(r->repr, r->model);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      keys.push_back(key);
    }
  }
  auto find = [&](const auto &key, const std::string &dataset) -> const EvalRow * {
    for (const EvalRow *r: sorted) {
      if (r->repr == key.first && r->model == key.second && r->dataset == dataset) {
        return r;
      }
    }
    return nullptr;
  };

  auto table = [&](bool log_loss_table) {
    std::string out = "| representation | model |";
    std::string rule = "|---|---|";
    for (const auto &d: datasets) {
      out += " " + d + " |";
      rule += "---|";
    }
    out += "\n" + rule + "\n";
    std::map<std::string, double> best;
    for (const auto &d: datasets) {
      for (const auto &key: keys) {
        const EvalRow *r = find(key, d);
        if (!r || !r->complete()) {
          continue;
        }
        const double v = log_loss_table ? *r->mean_log_loss() : *r->mean_accuracy();
        const auto it = best.find(d);
        if (it == best.end() || (log_loss_table ? v < it->second : v > it->second)) {
          best[d] = v;
        }
      }
    }
    for (const auto &key: keys) {
      out += "| " + key.first + " | " + key.second + " |";
      for (const auto &d: datasets) {
        const EvalRow *r = find(key, d);
        if (!r || !r->complete()) {
          out += " " + std::string(kFailed) + " |";
          continue;
        }
        const double v = log_loss_table ? *r->mean_log_loss() : *r->mean_accuracy();
        std::string cell = log_loss_table ? format_mean_std(v, *r->std_log_loss())
                                          : fixed3(v);
        if (v == best[d]) {
          cell = "**" + cell + "**";
        }
        out += " " + cell + " |";
      }
      out += "\n";
    }
    return out;
  };

  std::string out = "# Evaluation report\n\n";
  std::set<std::pair<std::uint64_t, std::string>> runs;
  for (const EvalRow *r: sorted) {
    runs.emplace(r->seed, r->config_hash);
  }
  for (const auto &[seed, hash]: runs) {
    out += "- seed " + std::to_string(seed) + ", config hash " + hash + "\n";
  }
  out += "\n## Log-loss (mean±std over outer folds)\n\n" + table(true);
  out += "\n## Accuracy (mean over outer folds)\n\n" + table(false);
  out += "\n## Folds\n\n";
  for (const EvalRow *r: sorted) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.1f", r->seconds);
    out += "- " + r->dataset + " / " + r->repr + " / " + r->model + ": "
           + std::to_string(r->fold_log_loss.size()) + " folds, " + secs + " s\n";
    for (std::size_t f = 0; f < r->fold_log_loss.size(); ++f) {
      out += "  - fold " + std::to_string(f) + ": ";
      if (r->fold_log_loss[f]) {
        out += "log-loss " + fixed3(*r->fold_log_loss[f]) + ", accuracy "
               + fixed3(*r->fold_accuracy[f]) + ", selected " + r->selected[f] + "\n";
      } else {
        out += std::string(kFailed) + " (failed)\n";
      }
    }
  }
  return out;
}

std::string report_csv(std::span<const EvalRow> rows) {
  std::string out =
      "dataset,representation,model,logloss_mean,logloss_std,accuracy_mean,"
      "fold_logloss,fold_accuracy,selected,seed,config_hash\n";
  for (const EvalRow *r: sorted_rows(rows)) {
    const auto m = r->mean_log_loss();
    const auto s = r->std_log_loss();
    const auto a = r->mean_accuracy();
    std::string selected;
    for (std::size_t i = 0; i < r->selected.size(); ++i) {
      selected += (i ? "|" : "") + sanitize(r->selected[i]);
    }
    out += sanitize(r->dataset) + "," + r->repr + "," + r->model + ","
           + (m ? fmt(*m) : std::string(kFailed)) + ","
           + (s ? fmt(*s) : std::string(kFailed)) + ","
           + (a ? fmt(*a) : std::string(kFailed)) + "," + join_folds(r->fold_log_loss)
           + "," + join_folds(r->fold_accuracy) + "," + selected + ","
           + std::to_string(r->seed) + "," + r->config_hash + "\n";
  }
  return out;
}

std::vector<EvalRow> parse_report_csv(std::string_view text) {
  const auto lines = split(text, '\n');
  if (lines.empty() || !lines[0].starts_with("dataset,representation,model,")) {
    throw std::invalid_argument("not a report CSV");
  }
  std::vector<EvalRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) {
      continue;
    }
    const auto f = split(lines[i], ',');
    if (f.size() != 11) {
      throw std::invalid_argument("report line " + std::to_string(i + 1)
                                  + " has " + std::to_string(f.size()) + " fields");
    }
    EvalRow r;
    r.dataset = f[0];
    r.repr = f[1];
    r.model = f[2];
    r.fold_log_loss = parse_folds(f[6]);
    r.fold_accuracy = parse_folds(f[7]);
    r.selected = split(f[8], '|');
    r.seed = std::stoull(f[9]);
    r.config_hash = f[10];
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json fold_log(const EvalRow &row, const FoldOutcome &o) {
  nlohmann::json j = {
    { "dataset", row.dataset },
    { "model", row.model },
    { "representation", row.repr },
    { "fold", o.fold },
    { "ok", o.ok },
    { "n_train", o.n_train },
    { "n_test", o.n_test },
    { "seconds", o.seconds },
    { "seed", row.seed },
    { "config_hash", row.config_hash },
  };
  if (o.ok) {
    j["selected"] = o.selected;
    j["inner_k"] = o.inner_k;
    j["inner_scores"] = o.inner_scores;
    j["log_loss"] = o.log_loss;
    j["accuracy"] = o.accuracy;
    j["diagnostics"] = o.diagnostics;
  } else {
    j["error"] = o.error;
  }
  return j;
}

}  // namespace sscreen
