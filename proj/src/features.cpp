//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/features.h"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sscreen {
namespace {
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (const char c: bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

void check_stride(int stride) {
  if (stride != 1 && stride != 2) {
    throw std::invalid_argument("symbol stride must be 1 or 2");
  }
}
}  // namespace

ParseResult<std::vector<Token>> tokenize(std::string_view text) {
  return lex_smiles(text);
}

// ---- Vocabulary ----

Vocabulary::Vocabulary() {
  add(kUnkSymbol);
  add(kPadSymbol);
}

int Vocabulary::add(std::string_view symbol) {
  if (auto it = index_.find(std::string(symbol)); it != index_.end()) {
    return it->second;
  }
  if (frozen_) {
    throw std::logic_error("cannot add '" + std::string(symbol)
                           + "' to a frozen vocabulary");
  }
  if (symbol.find_first_of("\t\n") != std::string_view::npos) {
    throw std::invalid_argument("vocabulary symbols cannot contain tabs or newlines");
  }
  const int idx = size();
  symbols_.emplace_back(symbol);
  index_.emplace(symbols_.back(), idx);
  return idx;
}

int Vocabulary::index_of(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view symbol) const {
  return index_.find(std::string(symbol)) != index_.end();
}

void Vocabulary::freeze() {
  if (!frozen_) {
    fingerprint_ = fingerprint();
    frozen_ = true;
  }
}

std::uint64_t Vocabulary::fingerprint() const {
  if (frozen_) {
    return fingerprint_;
  }
  std::uint64_t h = kFnvOffset;
  for (const std::string &s: symbols_) {
    h = fnv1a(h, s);
    h = fnv1a(h, std::string_view("\n", 1));
  }
  return h;
}

std::string Vocabulary::serialize() const {
  std::string out;
  for (int i = 0; i < size(); ++i) {
    out += symbols_[i];
    out += '\t';
    out += std::to_string(i);
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::deserialize(std::string_view text) {
  Vocabulary vocab;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line.empty()) {
      continue;
    }

    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw std::invalid_argument("vocabulary line " + std::to_string(line_no)
                                  + ": expected symbol<TAB>index");
    }
    const std::string_view sym = line.substr(0, tab);
    int idx = -1;
    try {
      std::size_t used = 0;
      idx = std::stoi(std::string(line.substr(tab + 1)), &used);
      if (used != line.size() - tab - 1) {
        idx = -1;
      }
    } catch (const std::exception &) {
      idx = -1;
    }
    if (idx < 0) {
      throw std::invalid_argument("vocabulary line " + std::to_string(line_no)
                                  + ": bad index");
    }

    if (idx < 2) {
      if (sym != vocab.symbols_[idx]) {
        throw std::invalid_argument("vocabulary line "
                                    + std::to_string(line_no)
                                    + ": reserved index mismatch");
      }
      continue;
    }
    if (idx != vocab.size() || vocab.contains(sym)) {
      throw std::invalid_argument("vocabulary line " + std::to_string(line_no)
                                  + ": indices must be contiguous and unique");
    }
    vocab.add(sym);
  }
  vocab.freeze();
  return vocab;
}

// ---- n-grams ----

void NGramConfig::validate() const {
  if (lo < 1 || hi < lo) {
    throw std::invalid_argument("n-gram range must satisfy 1 <= lo <= hi");
  }
}

std::vector<std::string> ngram_strings(std::span<const Token> tokens, int lo,
                                       int hi) {
  std::vector<std::string> grams;
  const int n_tok = static_cast<int>(tokens.size());
  for (int n = lo; n <= hi; ++n) {
    for (int start = 0; start + n <= n_tok; ++start) {
      std::string gram;
      for (int k = 0; k < n; ++k) {
        gram += tokens[start + k].text;
      }
      grams.push_back(std::move(gram));
    }
  }
  return grams;
}

void fit_ngram_vocabulary(Vocabulary &vocab, std::span<const Token> tokens,
                          const NGramConfig &config) {
  config.validate();
  for (const std::string &gram: ngram_strings(tokens, config.lo, config.hi)) {
    vocab.add(gram);
  }
}

NGramSet ngram_featurize(std::span<const Token> tokens,
                         const NGramConfig &config, const Vocabulary &vocab) {
  config.validate();
  std::map<std::uint32_t, std::uint32_t> counts;
  for (const std::string &gram: ngram_strings(tokens, config.lo, config.hi)) {
    ++counts[static_cast<std::uint32_t>(vocab.index_of(gram))];
  }

  NGramSet out;
  out.mode = config.mode;
  out.vocabulary_ref = vocab.fingerprint();
  out.indices.reserve(counts.size());
  out.counts.reserve(counts.size());
  for (const auto &[idx, n]: counts) {
    out.indices.push_back(idx);
    out.counts.push_back(config.mode == NGramMode::kSet ? 1 : n);
  }
  return out;
}

std::string sparse_triplets_csv(std::span<const NGramSet> rows) {
  std::ostringstream os;
  os << "row,col,value\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int k = 0; k < rows[r].size(); ++k) {
      os << r << ',' << rows[r].indices[k] << ',' << rows[r].counts[k] << '\n';
    }
  }
  return os.str();
}

// ---- 2-char symbols ----

std::vector<std::string> symbol_windows(std::string_view text, int stride) {
  check_stride(stride);
  std::vector<std::string> out;
  if (text.empty()) {
    return out;
  }
  if (text.size() == 1) {
    out.push_back(std::string { text[0], kSymbolPadChar });
    return out;
  }

  for (std::size_t i = 0; i + 1 < text.size(); i += stride) {
    out.emplace_back(text.substr(i, 2));
  }
  if (stride == 2 && text.size() % 2 == 1) {
    out.push_back(std::string { text.back(), kSymbolPadChar });
  }
  return out;
}

void fit_symbol_vocabulary(Vocabulary &vocab, std::string_view text,
                           int stride) {
  for (const std::string &sym: symbol_windows(text, stride)) {
    vocab.add(sym);
  }
}

SymbolSeq symbol_encode(std::string_view text, int stride,
                        const Vocabulary &vocab) {
  SymbolSeq seq;
  for (const std::string &sym: symbol_windows(text, stride)) {
    seq.symbols.push_back(vocab.index_of(sym));
  }
  return seq;
}

OneHotView::OneHotView(const SymbolSeq &seq, int vocab_size)
    : seq_(&seq), vocab_size_(vocab_size) {
  for (const int s: seq.symbols) {
    if (s < 0 || s >= vocab_size) {
      throw std::out_of_range("symbol index " + std::to_string(s)
                              + " outside vocabulary of size "
                              + std::to_string(vocab_size));
    }
  }
}

double OneHotView::operator()(int row, int col) const {
  const int s = seq_->symbols.at(row);
  return s != Vocabulary::kPad && s == col ? 1.0 : 0.0;
}

Eigen::MatrixXd OneHotView::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows(), cols());
  for (int r = 0; r < rows(); ++r) {
    const int s = seq_->symbols[r];
    if (s != Vocabulary::kPad) {
      m(r, s) = 1.0;
    }
  }
  return m;
}

OneHotView one_hot(const SymbolSeq &seq, int vocab_size) {
  return OneHotView(seq, vocab_size);
}

}  // namespace sscreen
