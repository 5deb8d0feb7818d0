//
// Project smiles-screen - Copyright 2026 The smiles-screen Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "sscreen/smiles.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sscreen {
namespace {
constexpr int kMaxCharge = 15;
constexpr int kMaxRingLabel = 99;

struct TokenInfo {
  Atom atom;
  BondOrder order = BondOrder::kSingle;
  int ring = -1;
};

ParseDiagnostic make_diag(std::size_t pos, DiagnosticKind kind,
                          std::string message) {
  return ParseDiagnostic { pos, std::move(message), kind };
}

std::string describe_char(char c) {
  const auto uc = static_cast<unsigned char>(c);
  if (std::isprint(uc) != 0) {
    return std::string("'") + c + "'";
  }
  static constexpr char kHex[] = "0123456789abcdef";
  return std::string("byte 0x") + kHex[uc >> 4] + kHex[uc & 0xF];
}

bool is_digit(char c) {
  return c >= '0' && c <= '9';
}

bool is_upper(char c) {
  return c >= 'A' && c <= 'Z';
}

bool is_lower(char c) {
  return c >= 'a' && c <= 'z';
}

ParseDiagnostic unexpected(std::string_view text, std::size_t i,
                           std::size_t base, std::string_view context) {
  if (i >= text.size()) {
    return make_diag(base + text.size(), DiagnosticKind::kUnexpectedChar,
                     std::string("unexpected end of input ")
                         + std::string(context));
  }
  return make_diag(base + i, DiagnosticKind::kUnexpectedChar,
                   "unexpected " + describe_char(text[i]) + " "
                       + std::string(context));
}

// text[open] == '[' and text[close] == ']'.
std::optional<ParseDiagnostic> parse_bracket(std::string_view text,
                                             std::size_t open,
                                             std::size_t close,
                                             std::size_t base, Atom &atom) {
  atom = Atom {};
  atom.bracket = true;
  atom.explicit_h = 0;

  std::size_t i = open + 1;

  if (i < close && is_digit(text[i])) {
    const std::size_t first = i;
    int iso = 0;
    while (i < close && is_digit(text[i])) {
      if (i - first >= 3) {
        return unexpected(text, i, base, "in isotope (at most 3 digits)");
      }
      iso = iso * 10 + (text[i] - '0');
      ++i;
    }
    if (iso == 0) {
      return make_diag(base + first, DiagnosticKind::kUnexpectedChar,
                       "isotope must be positive");
    }
    atom.isotope = iso;
  }

  if (i >= close) {
    return unexpected(text, i, base, "in bracket atom (expected element)");
  }

  const char c = text[i];
  if (c == '*') {
    atom.element = "*";
    ++i;
  } else if (is_lower(c)) {
    const std::string sym(1, static_cast<char>(std::toupper(c)));
    if (!is_organic_subset(sym, true)) {
      return unexpected(text, i, base, "(unsupported aromatic element)");
    }
    atom.element = sym;
    atom.aromatic = true;
    ++i;
  } else if (is_upper(c)) {
    std::string two;
    if (i + 1 < close && is_lower(text[i + 1])) {
      two = std::string { c, text[i + 1] };
    }
    if (!two.empty() && atomic_number(two) > 0) {
      atom.element = two;
      i += 2;
    } else if (atomic_number(std::string(1, c)) > 0) {
      atom.element = std::string(1, c);
      ++i;
    } else {
      return unexpected(text, i, base, "(unknown element)");
    }
  } else {
    return unexpected(text, i, base, "in bracket atom (expected element)");
  }

  // Chirality is accepted and dropped.
  if (i < close && text[i] == '@') {
    ++i;
    if (i < close && text[i] == '@') {
      ++i;
    }
  }

  if (i < close && text[i] == 'H') {
    ++i;
    int count = 1;
    if (i < close && is_digit(text[i])) {
      count = text[i] - '0';
      ++i;
    }
    atom.explicit_h = count;
  }

  if (i < close && (text[i] == '+' || text[i] == '-')) {
    const char sign = text[i];
    ++i;
    int magnitude = 1;
    if (i < close && is_digit(text[i])) {
      magnitude = text[i] - '0';
      ++i;
      if (i < close && is_digit(text[i])) {
        magnitude = magnitude * 10 + (text[i] - '0');
        ++i;
      }
    } else {
      while (i < close && text[i] == sign) {
        ++magnitude;
        ++i;
      }
    }
    if (magnitude > kMaxCharge) {
      return make_diag(base + i - 1, DiagnosticKind::kUnexpectedChar,
                       "charge magnitude exceeds 15");
    }
    atom.charge = sign == '+' ? magnitude : -magnitude;
  }

  if (i != close) {
    return unexpected(text, i, base, "in bracket atom");
  }
  return std::nullopt;
}

std::optional<ParseDiagnostic> lex_impl(std::string_view text,
                                        std::size_t base,
                                        std::vector<Token> &tokens,
                                        std::vector<TokenInfo> *infos) {
  auto push = [&](std::size_t begin, std::size_t len, TokenKind kind,
                  TokenInfo info) {
    tokens.push_back({ text.substr(begin, len), base + begin, kind });
    if (infos != nullptr) {
      infos->push_back(std::move(info));
    }
  };

  auto organic = [](std::string sym, bool aromatic) {
    TokenInfo info;
    info.atom.element = std::move(sym);
    info.atom.aromatic = aromatic;
    return info;
  };

  auto bond = [](BondOrder order) {
    TokenInfo info;
    info.order = order;
    return info;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    switch (c) {
    case 'C':
      if (i + 1 < text.size() && text[i + 1] == 'l') {
        push(i, 2, TokenKind::kAtom, organic("Cl", false));
        i += 2;
      } else {
        push(i, 1, TokenKind::kAtom, organic("C", false));
        ++i;
      }
      break;
    case 'B':
      if (i + 1 < text.size() && text[i + 1] == 'r') {
        push(i, 2, TokenKind::kAtom, organic("Br", false));
        i += 2;
      } else {
        push(i, 1, TokenKind::kAtom, organic("B", false));
        ++i;
      }
      break;
    case 'N':
    case 'O':
    case 'P':
    case 'S':
    case 'F':
    case 'I':
    case '*':
      push(i, 1, TokenKind::kAtom, organic(std::string(1, c), false));
      ++i;
      break;
    case 'b':
    case 'c':
    case 'n':
    case 'o':
    case 'p':
    case 's':
      push(i, 1, TokenKind::kAtom,
           organic(std::string(1, static_cast<char>(std::toupper(c))), true));
      ++i;
      break;
    case '[': {
      const std::size_t close = text.find(']', i + 1);
      if (close == std::string_view::npos) {
        return make_diag(base + i, DiagnosticKind::kUnclosedBracket,
                         "bracket atom is never closed");
      }
      TokenInfo info;
      if (auto err = parse_bracket(text, i, close, base, info.atom)) {
        return err;
      }
      push(i, close - i + 1, TokenKind::kBracketAtom, std::move(info));
      i = close + 1;
      break;
    }
    case '-':
    case '/':
    case '\\':
      push(i, 1, TokenKind::kBond, bond(BondOrder::kSingle));
      ++i;
      break;
    case '=':
      push(i, 1, TokenKind::kBond, bond(BondOrder::kDouble));
      ++i;
      break;
    case '#':
      push(i, 1, TokenKind::kBond, bond(BondOrder::kTriple));
      ++i;
      break;
    case ':':
      push(i, 1, TokenKind::kBond, bond(BondOrder::kAromatic));
      ++i;
      break;
    case '%': {
      if (i + 1 >= text.size() || !is_digit(text[i + 1])) {
        return unexpected(text, i + 1, base, "after '%' (expected 2 digits)");
      }
      if (i + 2 >= text.size() || !is_digit(text[i + 2])) {
        return unexpected(text, i + 2, base, "after '%' (expected 2 digits)");
      }
      TokenInfo info;
      info.ring = (text[i + 1] - '0') * 10 + (text[i + 2] - '0');
      push(i, 3, TokenKind::kRingClosure, std::move(info));
      i += 3;
      break;
    }
    case '(':
      push(i, 1, TokenKind::kBranchOpen, {});
      ++i;
      break;
    case ')':
      push(i, 1, TokenKind::kBranchClose, {});
      ++i;
      break;
    case '.':
      return make_diag(base + i, DiagnosticKind::kMultiFragment,
                       "multi-fragment SMILES are not supported");
    default:
      if (is_digit(c)) {
        TokenInfo info;
        info.ring = c - '0';
        push(i, 1, TokenKind::kRingClosure, std::move(info));
        ++i;
        break;
      }
      return unexpected(text, i, base, "");
    }
  }
  return std::nullopt;
}

enum class State {
  kStart,
  kAtom,
  kRing,
  kBond,
  kOpen,
  kClose,
};

struct OpenRing {
  int atom;
  std::optional<BondOrder> order;
  std::size_t offset;
};

BondOrder default_order(const Molecule &mol, int a, int b) {
  return mol.atom(a).aromatic && mol.atom(b).aromatic ? BondOrder::kAromatic
                                                      : BondOrder::kSingle;
}

ParseResult<Molecule> parse_tokens(std::string_view text, std::size_t base,
                                   const std::vector<Token> &tokens,
                                   std::vector<TokenInfo> &infos) {
  Molecule mol;
  int prev = -1;
  State state = State::kStart;
  State before_bond = State::kStart;
  std::optional<BondOrder> pending;
  std::vector<std::pair<int, std::size_t>> branches;
  std::map<int, OpenRing> rings;

  auto fail = [&](const Token &tok, std::string_view what) {
    return make_diag(tok.offset, DiagnosticKind::kUnexpectedChar,
                     "unexpected '" + std::string(tok.text) + "' "
                         + std::string(what));
  };

  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const Token &tok = tokens[t];
    TokenInfo &info = infos[t];

    switch (tok.kind) {
    case TokenKind::kAtom:
    case TokenKind::kBracketAtom: {
      const int idx = mol.add_atom(std::move(info.atom));
      if (prev >= 0) {
        mol.add_bond(prev, idx, pending.value_or(default_order(mol, prev, idx)));
      }
      pending.reset();
      prev = idx;
      state = State::kAtom;
      break;
    }
    case TokenKind::kBond:
      if (state == State::kStart || state == State::kBond) {
        return fail(tok, state == State::kStart ? "at start of SMILES"
                                                : "after a bond");
      }
      pending = info.order;
      before_bond = state;
      state = State::kBond;
      break;
    case TokenKind::kRingClosure: {
      const bool ok_after_bond = state == State::kBond
                                 && (before_bond == State::kAtom
                                     || before_bond == State::kRing);
      if (state != State::kAtom && state != State::kRing && !ok_after_bond) {
        return fail(tok, "(ring closure must follow an atom)");
      }

      auto it = rings.find(info.ring);
      if (it == rings.end()) {
        rings.emplace(info.ring, OpenRing { prev, pending, tok.offset });
      } else {
        const OpenRing &open = it->second;
        if (open.atom == prev) {
          return make_diag(tok.offset, DiagnosticKind::kBondConflict,
                           "ring closure bonds an atom to itself");
        }
        if (open.order && pending && *open.order != *pending) {
          return make_diag(tok.offset, DiagnosticKind::kBondConflict,
                           "ring closure bond symbols disagree");
        }
        if (mol.find_bond(open.atom, prev) >= 0) {
          return make_diag(tok.offset, DiagnosticKind::kBondConflict,
                           "ring closure duplicates an existing bond");
        }
        const BondOrder order = open.order ? *open.order
                                : pending  ? *pending
                                           : default_order(mol, open.atom, prev);
        mol.add_bond(open.atom, prev, order);
        rings.erase(it);
      }
      pending.reset();
      state = State::kRing;
      break;
    }
    case TokenKind::kBranchOpen:
      if (state != State::kAtom && state != State::kRing
          && state != State::kClose) {
        return fail(tok, "(branch must follow an atom)");
      }
      branches.emplace_back(prev, tok.offset);
      state = State::kOpen;
      break;
    case TokenKind::kBranchClose:
      if (branches.empty()) {
        return fail(tok, "(no open branch)");
      }
      if (state == State::kOpen) {
        return fail(tok, "(empty branch)");
      }
      if (state == State::kBond) {
        return fail(tok, "(bond without a following atom)");
      }
      prev = branches.back().first;
      branches.pop_back();
      state = State::kClose;
      break;
    }
  }

  if (state == State::kBond) {
    return make_diag(base + text.size(), DiagnosticKind::kUnexpectedChar,
                     "unexpected end of input after a bond");
  }
  if (!branches.empty()) {
    return make_diag(branches.back().second, DiagnosticKind::kUnclosedBranch,
                     "branch is never closed");
  }
  if (!rings.empty()) {
    std::size_t first = std::string_view::npos;
    int label = 0;
    for (const auto &[num, open]: rings) {
      if (open.offset < first) {
        first = open.offset;
        label = num;
      }
    }
    return make_diag(first, DiagnosticKind::kUnclosedRing,
                     "ring " + std::to_string(label) + " is never closed");
  }
  return mol;
}

// ---- writer ----

std::string ring_label(int digit) {
  if (digit < 10) {
    return std::string(1, static_cast<char>('0' + digit));
  }
  return "%" + std::to_string(digit);
}

std::string bond_symbol(const Molecule &mol, int bond_idx) {
  const Bond &b = mol.bond(bond_idx);
  const bool both_aromatic = mol.atom(b.src).aromatic && mol.atom(b.dst).aromatic;
  switch (b.order) {
  case BondOrder::kSingle:
    return both_aromatic ? "-" : "";
  case BondOrder::kDouble:
    return "=";
  case BondOrder::kTriple:
    return "#";
  case BondOrder::kAromatic:
    return both_aromatic ? "" : ":";
  }
  return "";
}

std::string atom_text(const Atom &atom) {
  const bool needs_bracket = atom.charge != 0 || atom.isotope.has_value()
                             || atom.explicit_h.has_value()
                             || !is_organic_subset(atom.element, atom.aromatic);

  std::string sym = atom.element;
  if (atom.aromatic && sym != "*") {
    sym[0] = static_cast<char>(std::tolower(sym[0]));
  }
  if (!needs_bracket) {
    return sym;
  }

  std::string out = "[";
  if (atom.isotope) {
    out += std::to_string(*atom.isotope);
  }
  out += sym;
  const int h = atom.explicit_h.value_or(0);
  if (h == 1) {
    out += 'H';
  } else if (h > 1) {
    out += 'H' + std::to_string(h);
  }
  if (atom.charge != 0) {
    out += atom.charge > 0 ? '+' : '-';
    const int mag = std::abs(atom.charge);
    if (mag > 1) {
      out += std::to_string(mag);
    }
  }
  out += ']';
  return out;
}

struct RingBond {
  int bond;
  int opener;
  int closer;
};

class SmilesWriter {
public:
  SmilesWriter(const Molecule &mol, const WalkOrder &walk)
      : mol_(mol), walk_(walk), children_(mol.size()), closings_(mol.size()),
        openings_(mol.size()), visited_(mol.size(), 0),
        bond_used_(mol.num_bonds(), 0), ring_digit_(mol.num_bonds(), -1),
        digit_busy_(kMaxRingLabel + 1, 0) { }

  std::string run() {
    discover(walk_.start_atom, -1);
    for (int v = 0; v < mol_.size(); ++v) {
      const auto &order = walk_.neighbor_order[v];
      std::sort(openings_[v].begin(), openings_[v].end(),
                [&](const RingBond &a, const RingBond &b) {
                  return position_of(order, a.closer)
                         < position_of(order, b.closer);
                });
    }
    emit(walk_.start_atom, -1);
    return std::move(out_);
  }

private:
  static std::size_t position_of(const std::vector<int> &order, int atom) {
    return static_cast<std::size_t>(
        std::find(order.begin(), order.end(), atom) - order.begin());
  }

  void discover(int v, int parent_bond) {
    visited_[v] = 1;
    for (const int u: walk_.neighbor_order[v]) {
      const int b = mol_.find_bond(v, u);
      if (b == parent_bond || bond_used_[b] != 0) {
        continue;
      }
      bond_used_[b] = 1;
      if (visited_[u] == 0) {
        children_[v].push_back({ u, b });
        discover(u, b);
      } else {
        // u is an ancestor of v: ring opens at u and closes here.
        const RingBond rb { b, u, v };
        closings_[v].push_back(rb);
        openings_[u].push_back(rb);
      }
    }
  }

  int allocate_digit() {
    for (int d = 1; d <= kMaxRingLabel; ++d) {
      if (digit_busy_[d] == 0) {
        digit_busy_[d] = 1;
        return d;
      }
    }
    throw std::invalid_argument("more than 99 simultaneously open rings");
  }

  void emit(int v, int in_bond) {
    if (in_bond >= 0) {
      out_ += bond_symbol(mol_, in_bond);
    }
    out_ += atom_text(mol_.atom(v));

    for (const RingBond &rb: closings_[v]) {
      out_ += ring_label(ring_digit_[rb.bond]);
    }
    for (const RingBond &rb: openings_[v]) {
      const int d = allocate_digit();
      ring_digit_[rb.bond] = d;
      out_ += bond_symbol(mol_, rb.bond);
      out_ += ring_label(d);
    }
    // Freed only after this atom's openings so a label is never closed and
    // reopened on the same atom.
    for (const RingBond &rb: closings_[v]) {
      digit_busy_[ring_digit_[rb.bond]] = 0;
    }

    const auto &kids = children_[v];
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i + 1 < kids.size()) {
        out_ += '(';
        emit(kids[i].atom, kids[i].bond);
        out_ += ')';
      } else {
        emit(kids[i].atom, kids[i].bond);
      }
    }
  }

  const Molecule &mol_;
  const WalkOrder &walk_;
  std::vector<std::vector<Neighbor>> children_;
  std::vector<std::vector<RingBond>> closings_;
  std::vector<std::vector<RingBond>> openings_;
  std::vector<char> visited_;
  std::vector<char> bond_used_;
  std::vector<int> ring_digit_;
  std::vector<char> digit_busy_;
  std::string out_;
};
}  // namespace

std::string_view to_string(DiagnosticKind kind) {
  switch (kind) {
  case DiagnosticKind::kUnexpectedChar:
    return "unexpected_char";
  case DiagnosticKind::kUnclosedRing:
    return "unclosed_ring";
  case DiagnosticKind::kUnclosedBranch:
    return "unclosed_branch";
  case DiagnosticKind::kUnclosedBracket:
    return "unclosed_bracket";
  case DiagnosticKind::kBondConflict:
    return "bond_conflict";
  case DiagnosticKind::kEmptyInput:
    return "empty_input";
  case DiagnosticKind::kMultiFragment:
    return "multi_fragment";
  }
  return "unknown";
}

std::string ParseDiagnostic::format() const {
  return "ERROR " + std::to_string(position) + ": "
         + std::string(to_string(kind)) + ": " + message;
}

std::string_view to_string(TokenKind kind) {
  switch (kind) {
  case TokenKind::kAtom:
    return "atom";
  case TokenKind::kBracketAtom:
    return "bracket_atom";
  case TokenKind::kBond:
    return "bond";
  case TokenKind::kRingClosure:
    return "ring_closure";
  case TokenKind::kBranchOpen:
    return "branch_open";
  case TokenKind::kBranchClose:
    return "branch_close";
  }
  return "unknown";
}

ParseResult<std::vector<Token>> lex_smiles(std::string_view text) {
  if (text.empty()) {
    return make_diag(0, DiagnosticKind::kEmptyInput, "empty SMILES");
  }
  std::vector<Token> tokens;
  if (auto err = lex_impl(text, 0, tokens, nullptr)) {
    return *err;
  }
  return tokens;
}

ParseResult<Molecule> parse_smiles(std::string_view text) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const std::size_t begin = text.find_first_not_of(kSpace);
  if (begin == std::string_view::npos) {
    return make_diag(0, DiagnosticKind::kEmptyInput, "empty SMILES");
  }
  const std::size_t end = text.find_last_not_of(kSpace) + 1;
  const std::string_view body = text.substr(begin, end - begin);

  std::vector<Token> tokens;
  std::vector<TokenInfo> infos;
  if (auto err = lex_impl(body, begin, tokens, &infos)) {
    return *err;
  }
  if (tokens.front().kind != TokenKind::kAtom
      && tokens.front().kind != TokenKind::kBracketAtom) {
    return make_diag(tokens.front().offset, DiagnosticKind::kUnexpectedChar,
                     "SMILES must start with an atom");
  }
  return parse_tokens(body, begin, tokens, infos);
}

WalkOrder natural_walk(const Molecule &mol, int start_atom) {
  WalkOrder walk;
  walk.start_atom = start_atom;
  walk.neighbor_order.resize(mol.size());
  for (int i = 0; i < mol.size(); ++i) {
    for (const Neighbor &nei: mol.neighbors(i)) {
      walk.neighbor_order[i].push_back(nei.atom);
    }
  }
  return walk;
}

void validate_walk(const Molecule &mol, const WalkOrder &walk) {
  if (mol.empty()) {
    throw std::invalid_argument("cannot walk an empty molecule");
  }
  if (walk.start_atom < 0 || walk.start_atom >= mol.size()) {
    throw std::invalid_argument("walk start atom out of range");
  }
  if (static_cast<int>(walk.neighbor_order.size()) != mol.size()) {
    throw std::invalid_argument("walk must give a neighbor order per atom");
  }
  for (int i = 0; i < mol.size(); ++i) {
    std::vector<int> expected;
    for (const Neighbor &nei: mol.neighbors(i)) {
      expected.push_back(nei.atom);
    }
    std::vector<int> given = walk.neighbor_order[i];
    std::sort(expected.begin(), expected.end());
    std::sort(given.begin(), given.end());
    if (expected != given) {
      throw std::invalid_argument("neighbor order of atom " + std::to_string(i)
                                  + " is not a permutation of its neighbors");
    }
  }
  if (!mol.is_connected()) {
    throw std::invalid_argument("walk cannot cover a disconnected molecule");
  }
}

std::string write_smiles(const Molecule &mol, const WalkOrder &walk) {
  validate_walk(mol, walk);
  return SmilesWriter(mol, walk).run();
}

}  // namespace sscreen
