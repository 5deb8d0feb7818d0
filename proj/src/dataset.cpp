//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/dataset.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "sscreen/canonical.h"
#include "sscreen/smiles.h"

namespace sscreen {
namespace {

std::vector<std::string> split_fields(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    std::string field(line.substr(start, pos - start));
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) {
      field.pop_back();
    }
    const auto first = field.find_first_not_of(' ');
    out.push_back(first == std::string::npos ? "" : field.substr(first));
    if (pos == std::string_view::npos) {
      return out;
    }
    start = pos + 1;
  }
}

std::string row_error(int line, const std::string &what) {
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto &r: records) {
    out.push_back(r.label);
  }
  return out;
}

void Dataset::validate() const {
  std::unordered_set<std::string> ids;
  int counts[2] = { 0, 0 };
  for (const auto &r: records) {
    if (r.label != 0 && r.label != 1) {
      throw std::invalid_argument("record '" + r.id + "' has label "
                                  + std::to_string(r.label));
    }
    ++counts[r.label];
    if (!ids.insert(r.id).second) {
      throw std::invalid_argument("duplicate record id '" + r.id + "'");
    }
  }
  if (counts[0] == 0 || counts[1] == 0) {
    throw std::invalid_argument("dataset '" + name + "' needs both classes (found "
                                + std::to_string(counts[1]) + " active, "
                                + std::to_string(counts[0]) + " inactive)");
  }
}

IngestResult ingest_text(std::string_view text, DataFormat format,
                         std::string name) {
  if (format == DataFormat::kAuto) {
    format = DataFormat::kCsv;
  }
  const char sep = format == DataFormat::kTsv ? '\t' : ',';

  std::vector<std::string> lines;
  {
    std::string s(text);
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) {
      lines.push_back(line);
    }
  }

  int smiles_col = 0;
  int label_col = 1;
  int id_col = -1;
  std::size_t first = 0;
  auto is_blank = [](const std::string &l) {
    return l.find_first_not_of(" \t\r") == std::string::npos;
  };
  while (first < lines.size() && is_blank(lines[first])) {
    ++first;
  }
  if (first == lines.size()) {
    throw IngestError("input has no rows");
  }
  const auto header = split_fields(lines[first], sep);
  const bool has_header =
      std::find(header.begin(), header.end(), "smiles") != header.end();
  if (format == DataFormat::kCsv && !has_header) {
    throw IngestError(row_error(static_cast<int>(first) + 1,
                                "CSV header must name 'smiles' and 'label' columns"));
  }
  if (has_header) {
    smiles_col = label_col = -1;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) {
      if (header[i] == "smiles") {
        smiles_col = i;
      } else if (header[i] == "label") {
        label_col = i;
      } else if (header[i] == "id") {
        id_col = i;
      }
    }
    if (label_col < 0) {
      throw IngestError(row_error(static_cast<int>(first) + 1,
                                  "header has no 'label' column"));
    }
    if (format == DataFormat::kTsv && (header.size() != 2 || smiles_col != 0)) {
      throw IngestError(row_error(static_cast<int>(first) + 1,
                                  "TSV header must be 'smiles<TAB>label'"));
    }
    ++first;
  }
  const std::size_t width = has_header ? header.size() : 2;

  IngestResult result;
  result.dataset.name = std::move(name);
  int data_rows = 0;
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (is_blank(lines[i])) {
      continue;
    }
    const int line_no = static_cast<int>(i) + 1;
    ++data_rows;
    const auto fields = split_fields(lines[i], sep);
    if (fields.size() != width) {
      throw IngestError(row_error(line_no, "expected " + std::to_string(width)
                                               + " fields, found "
                                               + std::to_string(fields.size())));
    }
    const std::string &label = fields[label_col];
    if (label != "0" && label != "1") {
      throw IngestError(row_error(line_no, "label must be 0 or 1, found '" + label
                                               + "'"));
    }
    Record rec;
    rec.smiles = fields[smiles_col];
    rec.label = label == "1" ? 1 : 0;
    rec.id = id_col >= 0 ? fields[id_col] : std::to_string(data_rows);
    if (rec.id.empty()) {
      throw IngestError(row_error(line_no, "empty id"));
    }
    const auto parsed = parse_smiles(rec.smiles);
    if (!parsed) {
      result.quarantined.push_back({ line_no, rec.smiles, parsed.error().format() });
      continue;
    }
    result.dataset.records.push_back(std::move(rec));
  }
  if (data_rows == 0) {
    throw IngestError("input has no data rows");
  }
  const double rejected = static_cast<double>(result.quarantined.size()) / data_rows;
  if (rejected > kMaxRejectFraction) {
    throw IngestError(std::to_string(result.quarantined.size()) + " of "
                      + std::to_string(data_rows)
                      + " rows have unparsable SMILES; probable format mismatch");
  }
  try {
    result.dataset.validate();
  } catch (const std::invalid_argument &e) {
    throw IngestError(e.what());
  }
  return result;
}

IngestResult ingest(const std::string &path, DataFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IngestError("cannot open data file '" + path + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const std::filesystem::path p(path);
  if (format == DataFormat::kAuto) {
    const auto ext = p.extension().string();
    format = ext == ".tsv" || ext == ".tab" ? DataFormat::kTsv : DataFormat::kCsv;
  }
  return ingest_text(ss.str(), format, p.stem().string());
}

std::string quarantine_csv(const std::vector<QuarantineEntry> &entries) {
  std::string out = "line,smiles,diagnostic\n";
  for (const auto &e: entries) {
    std::string diag = e.diagnostic;
    std::replace(diag.begin(), diag.end(), ',', ';');
    std::replace(diag.begin(), diag.end(), '\n', ' ');
    out += std::to_string(e.line) + "," + e.smiles + "," + diag + "\n";
  }
  return out;
}

std::string dataset_csv(const Dataset &dataset) {
  std::string out = "smiles,label,id\n";
  for (const auto &r: dataset.records) {
    out += r.smiles + "," + std::to_string(r.label) + "," + r.id + "\n";
  }
  return out;
}

PreparedData::PreparedData(Dataset data) : dataset(std::move(data)) {
  std::unordered_set<std::string> ids;
  for (const auto &r: dataset.records) {
    if (!ids.insert(r.id).second) {
      throw std::invalid_argument("duplicate record id '" + r.id + "'");
    }
  }
  molecules.reserve(dataset.records.size());
  for (const auto &r: dataset.records) {
    auto parsed = parse_smiles(r.smiles);
    if (!parsed) {
      throw std::invalid_argument("record '" + r.id + "': "
                                  + parsed.error().format());
    }
    molecules.push_back(std::move(parsed).value());
    canonical.push_back(canonical_smiles(molecules.back()));
  }
  // Tokens view into the canonical strings, so they are built only once
  // the strings are in their final place.
  for (const auto &text: canonical) {
    auto tokens = tokenize(text);
    if (!tokens) {
      throw std::logic_error("canonical SMILES failed to tokenize: " + text);
    }
    canonical_tokens.push_back(std::move(tokens).value());
  }
}

}  // namespace sscreen
