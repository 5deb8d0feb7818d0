//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_FEATURES_H_
#define SSCREEN_FEATURES_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "sscreen/smiles.h"

namespace sscreen {

/// Token list of a SMILES string; bracket atoms, two-letter organic atoms and
/// %nn ring labels are single tokens. Same lexer as the parser.
ParseResult<std::vector<Token>> tokenize(std::string_view text);

/// Symbol-to-index table with UNK and PAD reserved at 0 and 1. Once frozen
/// it is immutable and may be shared freely.
class Vocabulary {
public:
  static constexpr int kUnk = 0;
  static constexpr int kPad = 1;
  static constexpr std::string_view kUnkSymbol = "<unk>";
  static constexpr std::string_view kPadSymbol = "<pad>";

  Vocabulary();

  /// Index of the symbol, adding it if new. Throws std::logic_error when the
  /// vocabulary is frozen.
  int add(std::string_view symbol);

  /// Index of the symbol, or kUnk.
  int index_of(std::string_view symbol) const;
  bool contains(std::string_view symbol) const;
  const std::string &symbol(int index) const { return symbols_.at(index); }
  int size() const { return static_cast<int>(symbols_.size()); }

  void freeze();
  bool frozen() const { return frozen_; }

  /// FNV-1a over the symbols in index order; identifies the vocabulary in
  /// feature sets and model headers.
  std::uint64_t fingerprint() const;

  /// "symbol<TAB>index" lines in index order.
  std::string serialize() const;
  /// Inverse of serialize(); the result is frozen. Throws
  /// std::invalid_argument for malformed input.
  static Vocabulary deserialize(std::string_view text);

private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
  bool frozen_ = false;
  std::uint64_t fingerprint_ = 0;
};

enum class NGramMode {
  kSet,
  kCount,
};

struct NGramConfig {
  int lo = 1;
  int hi = 4;
  NGramMode mode = NGramMode::kSet;

  void validate() const;
};

/// Sparse n-gram features: sorted unique vocabulary indices with their
/// multiplicities (all 1 in set mode).
struct NGramSet {
  std::vector<std::uint32_t> indices;
  std::vector<std::uint32_t> counts;
  NGramMode mode = NGramMode::kSet;
  std::uint64_t vocabulary_ref = 0;

  int size() const { return static_cast<int>(indices.size()); }
  bool empty() const { return indices.empty(); }
};

/// Text of every contiguous token n-gram, lo <= n <= hi, in order of
/// appearance (with repeats).
std::vector<std::string> ngram_strings(std::span<const Token> tokens, int lo,
                                       int hi);

/// Adds the n-grams of one token list to an unfrozen vocabulary.
void fit_ngram_vocabulary(Vocabulary &vocab, std::span<const Token> tokens,
                          const NGramConfig &config);

/// Maps n-grams through the vocabulary; unseen grams become UNK. Never
/// modifies the vocabulary.
NGramSet ngram_featurize(std::span<const Token> tokens,
                         const NGramConfig &config, const Vocabulary &vocab);

/// Debug export: "row,col,value" for every nonzero entry.
std::string sparse_triplets_csv(std::span<const NGramSet> rows);

/// Pad character appended when a 2-char window runs past the end.
inline constexpr char kSymbolPadChar = '_';

/// Two-character windows of the raw string. Stride 1 gives overlapping
/// pairs, stride 2 disjoint chunks. Strings of length 1 (and the odd tail at
/// stride 2) are padded with kSymbolPadChar.
std::vector<std::string> symbol_windows(std::string_view text, int stride);

struct SymbolSeq {
  std::vector<int> symbols;

  int length() const { return static_cast<int>(symbols.size()); }
};

void fit_symbol_vocabulary(Vocabulary &vocab, std::string_view text,
                           int stride);

SymbolSeq symbol_encode(std::string_view text, int stride,
                        const Vocabulary &vocab);

/// Read-only L x V one-hot view of a symbol sequence. PAD rows are zero.
class OneHotView {
public:
  /// Throws std::out_of_range when an index is not below vocab_size.
  OneHotView(const SymbolSeq &seq, int vocab_size);

  int rows() const { return seq_->length(); }
  int cols() const { return vocab_size_; }
  double operator()(int row, int col) const;
  Eigen::MatrixXd to_dense() const;

private:
  const SymbolSeq *seq_;
  int vocab_size_;
};

OneHotView one_hot(const SymbolSeq &seq, int vocab_size);
OneHotView one_hot(SymbolSeq &&seq, int vocab_size) = delete;

}  // namespace sscreen

#endif  // SSCREEN_FEATURES_H_
