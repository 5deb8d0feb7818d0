//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SSCREEN_SMILES_H_
#define SSCREEN_SMILES_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sscreen/molecule.h"

namespace sscreen {

enum class DiagnosticKind {
  kUnexpectedChar,
  kUnclosedRing,
  kUnclosedBranch,
  kUnclosedBracket,
  kBondConflict,
  kEmptyInput,
  kMultiFragment,
};

std::string_view to_string(DiagnosticKind kind);

struct ParseDiagnostic {
  std::size_t position = 0;
  std::string message;
  DiagnosticKind kind = DiagnosticKind::kUnexpectedChar;

  /// "ERROR <offset>: <kind>: <message>", the line format used by the CLI.
  std::string format() const;
};

/// Either a value or the diagnostic explaining why there is none.
template <class T>
class ParseResult {
public:
  ParseResult(T value): data_(std::move(value)) { }
  ParseResult(ParseDiagnostic diag): data_(std::move(diag)) { }

  bool ok() const { return data_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T &value() const & {
    if (!ok()) {
      throw std::runtime_error(error().format());
    }
    return std::get<0>(data_);
  }
  T &&value() && {
    if (!ok()) {
      throw std::runtime_error(error().format());
    }
    return std::get<0>(std::move(data_));
  }

  const ParseDiagnostic &error() const { return std::get<1>(data_); }

private:
  std::variant<T, ParseDiagnostic> data_;
};

enum class TokenKind {
  kAtom,
  kBracketAtom,
  kBond,
  kRingClosure,
  kBranchOpen,
  kBranchClose,
};

std::string_view to_string(TokenKind kind);

struct Token {
  std::string_view text;
  std::size_t offset;
  TokenKind kind;
};

/// Splits SMILES text into lexical tokens. The text is lexed exactly as
/// given (no trimming); joining the token texts reproduces it. Bracket atoms
/// are validated here so a successful lex only fails later on structural
/// errors (branches, rings, bond placement).
ParseResult<std::vector<Token>> lex_smiles(std::string_view text);

/// Parses one single-fragment SMILES string. Leading and trailing whitespace
/// is ignored; diagnostic positions are offsets into `text` itself.
ParseResult<Molecule> parse_smiles(std::string_view text);

/// A depth-first walk: the start atom and, per atom, the order in which its
/// neighbors are visited (a permutation of the atom's adjacency).
struct WalkOrder {
  int start_atom = 0;
  std::vector<std::vector<int>> neighbor_order;
};

/// The walk that visits neighbors in adjacency (bond creation) order.
WalkOrder natural_walk(const Molecule &mol, int start_atom = 0);

/// Throws std::invalid_argument describing the first problem found.
void validate_walk(const Molecule &mol, const WalkOrder &walk);

/// Writes the molecule along the given walk. Ring-closure digits are
/// allocated smallest-first; brackets are used only when an atom cannot be
/// written in the organic subset. Throws std::invalid_argument for an invalid
/// walk.
std::string write_smiles(const Molecule &mol, const WalkOrder &walk);

}  // namespace sscreen

#endif  // SSCREEN_SMILES_H_
