//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "sscreen/augment.h"
#include "sscreen/canonical.h"
#include "sscreen/evaluate.h"
#include "sscreen/smiles.h"
#include "sscreen/structure.h"
#include "sscreen/synth.h"

namespace fs = std::filesystem;
using namespace sscreen;

namespace {

std::vector<std::string> read_lines(const std::string &path) {
  std::ifstream file;
  std::istream *in = &std::cin;
  if (!path.empty() && path != "-") {
    file.open(path);
    if (!file) {
      throw std::runtime_error("cannot open '" + path + "'");
    }
    in = &file;
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(*in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    lines.push_back(line);
  }
  return lines;
}

void write_file(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  out << text;
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

bool blank(const std::string &s) {
  return s.find_first_not_of(" \t") == std::string::npos;
}

int cmd_parse(const std::string &input) {
  int bad = 0;
  for (const auto &line: read_lines(input)) {
    if (blank(line)) {
      continue;
    }
    const auto result = parse_smiles(line);
    if (result) {
      std::cout << line << "\tok\tatoms=" << result.value().size()
                << "\tbonds=" << result.value().num_bonds() << "\n";
    } else {
      std::cout << line << "\terror\t" << result.error().format() << "\n";
      ++bad;
    }
  }
  return bad == 0 ? 0 : 1;
}

int cmd_canonicalize(const std::string &input) {
  int bad = 0;
  for (const auto &line: read_lines(input)) {
    if (blank(line)) {
      continue;
    }
    const auto result = parse_smiles(line);
    if (!result) {
      std::cerr << line << ": " << result.error().format() << "\n";
      ++bad;
      continue;
    }
    std::cout << canonical_smiles(result.value()) << "\n";
  }
  return bad == 0 ? 0 : 1;
}

int cmd_augment(const std::string &input, int n, std::uint64_t seed) {
  AugmentConfig cfg;
  cfg.train_walks_per_molecule = n;
  cfg.seed = seed;
  cfg.validate();
  Rng rng(seed);
  int bad = 0;
  for (const auto &line: read_lines(input)) {
    if (blank(line)) {
      continue;
    }
    const auto result = parse_smiles(line);
    if (!result) {
      std::cerr << line << ": " << result.error().format() << "\n";
      ++bad;
      continue;
    }
    for (const auto &s: enumerate_smiles(result.value(), n, rng)) {
      std::cout << s << "\n";
    }
  }
  return bad == 0 ? 0 : 1;
}

int cmd_stats(const std::string &input, const std::string &csv_out) {
  const auto summary = diameter_report(read_lines(input));
  if (!csv_out.empty()) {
    write_file(csv_out, diameter_csv(summary));
  }
  std::cout << diameter_summary_text(summary);
  return summary.failures.empty() ? 0 : 1;
}

PreparedData load_data(const std::string &path, const fs::path &quarantine) {
  IngestResult ingested = ingest(path);
  if (!quarantine.empty()) {
    write_file(quarantine, quarantine_csv(ingested.quarantined));
  }
  if (!ingested.quarantined.empty()) {
    std::cerr << ingested.quarantined.size() << " row(s) quarantined\n";
  }
  return PreparedData(std::move(ingested.dataset));
}

struct EvaluateArgs {
  std::string data;
  std::string models;
  std::string repr;
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs &a) {
  const EvalConfig config = a.config.empty() ? EvalConfig{} : EvalConfig::load(a.config);
  const fs::path out(a.out);
  fs::create_directories(out);
  const PreparedData data = load_data(a.data, out / "quarantine.csv");

  std::vector<EvalRow> rows;
  std::ofstream log(out / "folds.jsonl", std::ios::binary);
  bool all_ok = true;
  for (const auto &model: split_list(a.models)) {
    const std::string repr = a.repr.empty() ? default_representation(model) : a.repr;
    check_representation(model, repr);
    std::cerr << "evaluating " << model << " (" << repr << ")\n";
    const NestedCvResult result = nested_cv(data, model, repr, config, a.seed);
    for (const auto &fold: result.folds) {
      log << fold_log(result.row, fold).dump() << "\n";
      if (!fold.ok) {
        all_ok = false;
        std::cerr << "  fold " << fold.fold << " failed: " << fold.error << "\n";
      }
    }
    rows.push_back(result.row);
  }
  write_file(out / "report.md", report_markdown(rows));
  write_file(out / "report.csv", report_csv(rows));
  std::cout << report_markdown(rows);
  return all_ok ? 0 : 1;
}

int cmd_train(const EvaluateArgs &a) {
  const EvalConfig config = a.config.empty() ? EvalConfig{} : EvalConfig::load(a.config);
  const PreparedData data = load_data(a.data, {});
  data.dataset.validate();
  const std::string repr = a.repr.empty() ? default_representation(a.models) : a.repr;
  auto pipeline = make_pipeline(config.base_settings(a.models, repr));
  std::vector<int> rows(data.size());
  std::iota(rows.begin(), rows.end(), 0);
  pipeline->fit(data, rows, a.seed);
  Archive ar;
  pipeline->save(ar);
  ar.header["pipeline"]["config_hash"] = config.hash();
  ar.header["pipeline"]["diagnostics"] = pipeline->diagnostics();
  ar.save(a.out);
  std::cerr << "saved " << a.models << " model to " << a.out << "\n";
  return 0;
}

int cmd_predict(const std::string &model_path, const std::string &input) {
  const auto pipeline = load_pipeline(Archive::load(model_path));
  Dataset ds;
  int bad = 0;
  std::vector<std::string> lines;
  for (const auto &line: read_lines(input)) {
    if (blank(line)) {
      continue;
    }
    if (!parse_smiles(line)) {
      std::cerr << line << ": " << parse_smiles(line).error().format() << "\n";
      ++bad;
      continue;
    }
    ds.records.push_back({ line, 0, std::to_string(ds.records.size() + 1) });
  }
  const PreparedData data(std::move(ds));
  std::vector<int> rows(data.size());
  std::iota(rows.begin(), rows.end(), 0);
  const auto p = pipeline->predict(data, rows);
  for (int i = 0; i < data.size(); ++i) {
    std::cout << data.dataset.records[i].smiles << "\t" << p[i] << "\n";
  }
  return bad == 0 ? 0 : 1;
}

int cmd_synth(const SynthConfig &cfg, const std::string &out) {
  const std::string text = dataset_csv(planted_motif_dataset(cfg));
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{ "SMILES-based ligand screening toolkit" };
  app.require_subcommand(1);

  std::string input;
  auto *parse = app.add_subcommand("parse", "Parse SMILES lines and report atoms and bonds");
  parse->add_option("input", input, "SMILES file, one per line (default stdin)");

  auto *canon = app.add_subcommand("canonicalize", "Print the canonical SMILES of each line");
  canon->add_option("input", input, "SMILES file (default stdin)");

  int n = 10;
  std::uint64_t seed = 0;
  auto *augment = app.add_subcommand("augment", "Emit random writings of each line");
  augment->add_option("input", input, "SMILES file (default stdin)");
  augment->add_option("-n", n, "Writings per molecule")->check(CLI::PositiveNumber);
  augment->add_option("--seed", seed, "Random seed");

  bool diameter = false;
  std::string csv_out;
  auto *stats = app.add_subcommand("stats", "Structure statistics of SMILES lines");
  stats->add_option("input", input, "SMILES file (default stdin)");
  stats->add_flag("--diameter", diameter, "Longest carbon chain and diameter")->required();
  stats->add_option("--csv", csv_out, "Write per-molecule rows to this file");

  EvaluateArgs ev;
  auto *evaluate = app.add_subcommand("evaluate", "Nested cross-validated evaluation");
  evaluate->add_option("--data", ev.data, "CSV or TSV dataset")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--model", ev.models, "svm, nb, rf, cnn, gru, rnnlm or prior (comma list)")
      ->required();
  evaluate->add_option("--repr", ev.repr, "ngram or symbols (default: the model's own)");
  evaluate->add_option("--config", ev.config, "key = value config file")->check(CLI::ExistingFile);
  evaluate->add_option("--seed", ev.seed, "Master seed");
  evaluate->add_option("--out", ev.out, "Output directory")->required();

  EvaluateArgs tr;
  auto *train = app.add_subcommand("train", "Fit one model on a whole dataset");
  train->add_option("--data", tr.data, "CSV or TSV dataset")->required()->check(CLI::ExistingFile);
  train->add_option("--model", tr.models, "Model kind")->required();
  train->add_option("--repr", tr.repr, "ngram or symbols");
  train->add_option("--config", tr.config, "key = value config file")->check(CLI::ExistingFile);
  train->add_option("--seed", tr.seed, "Seed");
  train->add_option("--out", tr.out, "Model file to write")->required();

  std::string model_file;
  auto *predict = app.add_subcommand("predict", "Score SMILES lines with a trained model");
  predict->add_option("--model-file", model_file, "Model written by train")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("input", input, "SMILES file (default stdin)");

  SynthConfig synth_cfg;
  std::string synth_out;
  auto *synth = app.add_subcommand("synth", "Write a planted-motif screening corpus");
  synth->add_option("-n,--size", synth_cfg.size, "Number of molecules");
  synth->add_option("--fraction", synth_cfg.active_fraction, "Fraction of actives");
  synth->add_option("--seed", synth_cfg.seed, "Seed");
  synth->add_option("--out", synth_out, "Output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*parse) {
      return cmd_parse(input);
    }
    if (*canon) {
      return cmd_canonicalize(input);
    }
    if (*augment) {
      return cmd_augment(input, n, seed);
    }
    if (*stats) {
      return cmd_stats(input, csv_out);
    }
    if (*evaluate) {
      return cmd_evaluate(ev);
    }
    if (*train) {
      return cmd_train(tr);
    }
    if (*predict) {
      return cmd_predict(model_file, input);
    }
    if (*synth) {
      return cmd_synth(synth_cfg, synth_out);
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
