#pragma once

#include <string>
#include <vector>

#include "asmw/parser.hpp"

namespace asmw {

// One separated dynamic symbol: reads of f become ITE(delta(x), d(x), s(x)),
// assignments to f update d and set delta; s is a fresh static holding f's
// initial interpretation (uninformative, so a total default table).
struct SeparationEntry {
  std::string f;
  std::string s;
  std::string d;
  std::string delta;
};

struct SeparationCert {
  std::vector<SeparationEntry> renamed;  // in application order
};

struct SeparationResult {
  SourceUnit unit;
  SeparationCert cert;
};

// Rewrites every occurrence of f in t (bottom-up) to ITE(delta, d, s) triples.
TermPtr separate_rewrite_term(const TermPtr& t, const SeparationEntry& entry);

// Separates one dynamic symbol. Throws CheckError when f is not a dynamic
// non-io, non-reserved symbol of the unit.
SeparationResult separate_one(const SourceUnit& unit, const std::string& f);

// Separates every non-input, non-output, non-reserved dynamic symbol, in
// declaration order. After this every such dynamic function is initially
// uninformative by construction.
SeparationResult separate_all(const SourceUnit& unit);

// Separates exactly the named symbols, in the given order.
SeparationResult separate_named(const SourceUnit& unit, const std::vector<std::string>& names);

}  // namespace asmw
