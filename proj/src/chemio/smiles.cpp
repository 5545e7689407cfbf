//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/chemio/smiles.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <utility>

namespace molevers::chemio {
namespace {
bool is_bond_char(char c) {
  return c == '-' || c == '=' || c == '#' || c == ':';
}

bool is_digit(char c) {
  return c >= '0' && c <= '9';
}

bool is_lower(char c) {
  return c >= 'a' && c <= 'z';
}

bool is_upper(char c) {
  return c >= 'A' && c <= 'Z';
}

[[noreturn]] void fail(FormatErrorKind kind, std::size_t pos,
                       std::string detail) {
  throw FormatError(kind, std::move(detail), 0, pos);
}

std::optional<Element> aromatic_element(char c) {
  switch (c) {
  case 'c':
    return Element::kC;
  case 'n':
    return Element::kN;
  case 'o':
    return Element::kO;
  case 's':
    return Element::kS;
  default:
    return std::nullopt;
  }
}

struct RingOpen {
  std::size_t atom;
  char bond;  // '\0' when unspecified
  std::size_t pos;
};

struct Branch {
  std::size_t atom;
  std::size_t pos;
};

class SmilesParser {
public:
  explicit SmilesParser(std::string_view text): text_(text) { }

  SmilesGraph parse() {
    if (text_.empty()) {
      fail(FormatErrorKind::kEmptyInput, 0, "empty SMILES");
    }

    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (static_cast<unsigned char>(c) > 127) {
        fail(FormatErrorKind::kInvalidSyntax, pos_, "non-ASCII character");
      }

      if (c == '(') {
        open_branch();
      } else if (c == ')') {
        close_branch();
      } else if (is_bond_char(c)) {
        set_bond(c);
      } else if (is_digit(c) || c == '%') {
        ring_closure();
        continue;
      } else if (c == '[') {
        bracket_atom();
        continue;
      } else if (is_upper(c) || is_lower(c) || c == '*') {
        organic_atom();
        continue;
      } else if (c == '/' || c == '\\' || c == '@') {
        fail(FormatErrorKind::kInvalidSyntax, pos_,
             "stereochemistry is not supported");
      } else if (c == '.') {
        fail(FormatErrorKind::kInvalidSyntax, pos_,
             "disconnected components are not supported");
      } else {
        fail(FormatErrorKind::kInvalidSyntax, pos_,
             std::string("unexpected character '") + c + "'");
      }
      ++pos_;
    }

    if (pending_bond_ != '\0') {
      fail(FormatErrorKind::kInvalidSyntax, pending_pos_, "dangling bond");
    }
    if (!branches_.empty()) {
      fail(FormatErrorKind::kUnbalancedParenthesis, branches_.back().pos,
           "unclosed branch");
    }
    if (!rings_.empty()) {
      std::size_t first = text_.size();
      for (const auto &[num, open]: rings_) {
        first = std::min(first, open.pos);
      }
      fail(FormatErrorKind::kUnmatchedRingClosure, first,
           "ring bond never closed");
    }
    return std::move(graph_);
  }

private:
  void open_branch() {
    if (!prev_) {
      fail(FormatErrorKind::kInvalidSyntax, pos_,
           "branch without a preceding atom");
    }
    if (pending_bond_ != '\0') {
      fail(FormatErrorKind::kInvalidSyntax, pending_pos_,
           "bond before branch");
    }
    branches_.push_back({ *prev_, pos_ });
    branch_empty_ = true;
  }

  void close_branch() {
    if (branches_.empty()) {
      fail(FormatErrorKind::kUnbalancedParenthesis, pos_,
           "')' without matching '('");
    }
    if (pending_bond_ != '\0') {
      fail(FormatErrorKind::kInvalidSyntax, pending_pos_, "dangling bond");
    }
    if (branch_empty_) {
      fail(FormatErrorKind::kInvalidSyntax, pos_, "empty branch");
    }
    prev_ = branches_.back().atom;
    branches_.pop_back();
  }

  void set_bond(char c) {
    if (!prev_) {
      fail(FormatErrorKind::kInvalidSyntax, pos_,
           "bond without a preceding atom");
    }
    if (pending_bond_ != '\0') {
      fail(FormatErrorKind::kInvalidSyntax, pos_, "consecutive bonds");
    }
    pending_bond_ = c;
    pending_pos_ = pos_;
  }

  void ring_closure() {
    const std::size_t start = pos_;
    int number = 0;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size() || !is_digit(text_[pos_ + 1])
          || !is_digit(text_[pos_ + 2])) {
        fail(FormatErrorKind::kInvalidSyntax, pos_,
             "'%' must be followed by two digits");
      }
      number = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      number = text_[pos_] - '0';
      ++pos_;
    }

    if (!prev_) {
      fail(FormatErrorKind::kInvalidSyntax, start,
           "ring bond without a preceding atom");
    }

    auto it = rings_.find(number);
    if (it == rings_.end()) {
      rings_.emplace(number, RingOpen { *prev_, pending_bond_, start });
      pending_bond_ = '\0';
      return;
    }

    const RingOpen open = it->second;
    rings_.erase(it);
    if (open.atom == *prev_) {
      fail(FormatErrorKind::kInvalidSyntax, start, "ring bond to self");
    }
    char order = pending_bond_;
    if (order != '\0' && open.bond != '\0' && order != open.bond) {
      fail(FormatErrorKind::kInvalidSyntax, start,
           "conflicting ring bond orders");
    }
    if (order == '\0') {
      order = open.bond;
    }
    if (order == '\0') {
      order = default_bond(open.atom, *prev_);
    }
    graph_.bonds.push_back({ open.atom, *prev_, order });
    pending_bond_ = '\0';
  }

  void organic_atom() {
    const std::size_t start = pos_;
    const char c = text_[pos_];
    SmilesAtom atom;

    if (c == 'C' && peek(1) == 'l') {
      atom.element = Element::kCl;
      pos_ += 2;
    } else if (c == 'B' && peek(1) == 'r') {
      atom.element = Element::kBr;
      pos_ += 2;
    } else if (c == 'H') {
      fail(FormatErrorKind::kInvalidSyntax, start,
           "hydrogen must be written as a bracket atom");
    } else if (auto e = aromatic_element(c)) {
      atom.element = *e;
      atom.aromatic = true;
      ++pos_;
    } else if (c == 'C' || c == 'N' || c == 'O' || c == 'F' || c == 'S'
               || c == 'I') {
      atom.element = *element_from_symbol(std::string_view(&text_[pos_], 1));
      ++pos_;
    } else {
      fail(FormatErrorKind::kUnknownElement, start,
           std::string("'") + c + "' is not a supported element");
    }
    add_atom(atom);
  }

  void bracket_atom() {
    const std::size_t open = pos_;
    ++pos_;
    SmilesAtom atom;
    atom.bracket = true;

    if (pos_ >= text_.size()) {
      fail(FormatErrorKind::kInvalidSyntax, open, "unterminated bracket atom");
    }
    if (is_digit(text_[pos_])) {
      fail(FormatErrorKind::kInvalidSyntax, pos_,
           "isotopes are not supported");
    }

    const std::size_t sym_pos = pos_;
    if (is_upper(text_[pos_])) {
      std::size_t len = is_lower(peek(1)) ? 2 : 1;
      auto e = element_from_symbol(text_.substr(pos_, len));
      if (!e) {
        fail(FormatErrorKind::kUnknownElement, sym_pos,
             "'" + std::string(text_.substr(pos_, len))
                 + "' is not a supported element");
      }
      atom.element = *e;
      pos_ += len;
    } else if (is_lower(text_[pos_])) {
      auto e = aromatic_element(text_[pos_]);
      if (!e || is_lower(peek(1))) {
        fail(FormatErrorKind::kUnknownElement, sym_pos,
             "unsupported aromatic symbol");
      }
      atom.element = *e;
      atom.aromatic = true;
      ++pos_;
    } else {
      fail(FormatErrorKind::kUnknownElement, sym_pos,
           "bracket atom without a supported element symbol");
    }

    if (peek(0) == '@') {
      fail(FormatErrorKind::kInvalidSyntax, pos_,
           "stereochemistry is not supported");
    }
    if (peek(0) == 'H') {
      ++pos_;
      atom.hydrogens = 1;
      if (is_digit(peek(0))) {
        atom.hydrogens = peek(0) - '0';
        ++pos_;
      }
    }
    if (peek(0) == '+' || peek(0) == '-') {
      const char sign = peek(0);
      const int unit = sign == '+' ? 1 : -1;
      ++pos_;
      if (is_digit(peek(0))) {
        atom.charge = unit * (peek(0) - '0');
        ++pos_;
      } else {
        atom.charge = unit;
        while (peek(0) == sign) {
          atom.charge += unit;
          ++pos_;
        }
      }
    }
    if (peek(0) != ']') {
      if (pos_ >= text_.size()) {
        fail(FormatErrorKind::kInvalidSyntax, open,
             "unterminated bracket atom");
      }
      fail(FormatErrorKind::kInvalidSyntax, pos_,
           "unexpected character in bracket atom");
    }
    ++pos_;
    add_atom(atom);
  }

  void add_atom(const SmilesAtom &atom) {
    const std::size_t idx = graph_.atoms.size();
    graph_.atoms.push_back(atom);
    if (prev_) {
      char order = pending_bond_;
      if (order == '\0') {
        order = default_bond(*prev_, idx);
      }
      graph_.bonds.push_back({ *prev_, idx, order });
    }
    pending_bond_ = '\0';
    prev_ = idx;
    branch_empty_ = false;
  }

  char default_bond(std::size_t a, std::size_t b) const {
    return graph_.atoms[a].aromatic && graph_.atoms[b].aromatic ? ':' : '-';
  }

  char peek(std::size_t offset) const {
    return pos_ + offset < text_.size() ? text_[pos_ + offset] : '\0';
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  SmilesGraph graph_;
  std::optional<std::size_t> prev_;
  char pending_bond_ = '\0';
  std::size_t pending_pos_ = 0;
  bool branch_empty_ = false;
  std::vector<Branch> branches_;
  std::map<int, RingOpen> rings_;
};
}  // namespace

SmilesGraph parse_smiles_graph(std::string_view text) {
  return SmilesParser(text).parse();
}

Molecule parse_smiles(std::string_view text) {
  SmilesGraph graph = parse_smiles_graph(text);
  Molecule mol;
  mol.atoms.reserve(graph.atoms.size());
  for (const auto &a: graph.atoms) {
    mol.atoms.push_back(a.element);
  }
  mol.smiles = std::string(text);
  return mol;
}

}  // namespace molevers::chemio
