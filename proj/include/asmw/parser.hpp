#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "asmw/symbol.hpp"
#include "asmw/term.hpp"

namespace asmw {

// One table entry as written: argument tuple and value are ground terms,
// evaluated during elaboration.
struct TableEntryDecl {
  std::vector<TermPtr> args;
  TermPtr value;
};

struct TableDecl {
  std::string symbol;
  std::vector<TableEntryDecl> entries;  // kept sorted by printed argument tuple
  TermPtr default_value;                // null if the table is partial
};

struct EnumDecl {
  std::string name;
  std::vector<std::string> elements;
};

// A parsed .asm file: declarations plus the program rule. Declaration order is
// preserved and canonical.
struct SourceUnit {
  bool generated = false;        // "pragma generated": reserved '$' names allowed
  bool uses_arithmetic = false;  // "backend arithmetic"
  std::vector<EnumDecl> enums;
  std::vector<Symbol> decls;     // fn lines, in order
  std::vector<TableDecl> tables;
  RulePtr program;
};

bool unit_equal(const SourceUnit& a, const SourceUnit& b);

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line, int col, const std::string& message)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + message),
        line(line),
        col(col) {}
};

struct CheckError : std::runtime_error {
  explicit CheckError(const std::string& message)
      : std::runtime_error("check error: " + message) {}
};

// Parses a source unit; syntax errors only. Throws ParseError.
SourceUnit parse_unit(const std::string& text);

// Canonical pretty-print; parse_unit(print_unit(u)) is AST-identical to u.
std::string print_unit(const SourceUnit& u);

// Rule and term rendering used by the printer and diagnostics.
std::string print_rule(const RulePtr& r, int indent = 0);
std::string print_term(const TermPtr& t);

}  // namespace asmw
