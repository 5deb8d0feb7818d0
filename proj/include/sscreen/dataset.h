//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_DATASET_H_
#define SSCREEN_DATASET_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sscreen/features.h"
#include "sscreen/molecule.h"

namespace sscreen {

struct Record {
  std::string smiles;
  int label = 0;
  std::string id;
};

struct Dataset {
  std::string name;
  std::vector<Record> records;

  int size() const { return static_cast<int>(records.size()); }
  std::vector<int> labels() const;
  /// Throws std::invalid_argument on duplicate ids, bad labels or a
  /// missing class.
  void validate() const;
};

enum class DataFormat {
  kAuto,  // by extension: .tsv / .tab is TSV, everything else CSV
  kCsv,
  kTsv,
};

struct QuarantineEntry {
  int line = 0;  // 1-based line in the input file
  std::string smiles;
  std::string diagnostic;
};

struct IngestResult {
  Dataset dataset;
  std::vector<QuarantineEntry> quarantined;
};

/// Thrown for format errors (bad header, bad label, too many rejects).
class IngestError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Largest tolerated fraction of rows with unparsable SMILES.
inline constexpr double kMaxRejectFraction = 0.10;

/// CSV needs a header naming `smiles` and `label` columns (an `id` column is
/// optional). TSV is two columns, smiles then label, with an optional
/// "smiles<TAB>label" header. Rows whose SMILES do not parse are
/// quarantined; ids default to the 1-based data row number.
IngestResult ingest_text(std::string_view text, DataFormat format,
                         std::string name);
IngestResult ingest(const std::string &path, DataFormat format = DataFormat::kAuto);

/// "line,smiles,diagnostic" rows with a header.
std::string quarantine_csv(const std::vector<QuarantineEntry> &entries);

/// "smiles,label,id" with a header; the inverse of CSV ingestion.
std::string dataset_csv(const Dataset &dataset);

/// Parsed molecules and canonical forms shared by every fold. Labels are
/// not checked here, so unlabelled inputs can be prepared for prediction.
struct PreparedData {
  Dataset dataset;
  std::vector<Molecule> molecules;
  std::vector<std::string> canonical;
  std::vector<std::vector<Token>> canonical_tokens;

  explicit PreparedData(Dataset data);
  // Tokens point into `canonical`; a copy would leave them dangling.
  PreparedData(const PreparedData &) = delete;
  PreparedData &operator=(const PreparedData &) = delete;
  PreparedData(PreparedData &&) = default;
  PreparedData &operator=(PreparedData &&) = default;

  int size() const { return dataset.size(); }
  int label(int row) const { return dataset.records[row].label; }
  const std::string &id(int row) const { return dataset.records[row].id; }
};

}  // namespace sscreen

#endif  // SSCREEN_DATASET_H_
