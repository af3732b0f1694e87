#pragma once

#include <string>
#include <vector>

#include "asmw/jsonio.hpp"
#include "asmw/normalize.hpp"

namespace asmw {

// Result of rewriting a program so that every step evaluates at most one
// extrinsic query. Oracle answers are staged into fresh '$' variables; a
// fresh relational variable (done_name) marks the steps at which one step of
// the source program has been fully reproduced. Any run of the output takes
// at most megastep_bound steps between consecutive such marks.
struct SerializeResult {
  SourceUnit unit;
  std::string done_name;
  long megastep_bound = 0;
  bool degenerate = false;  // source had no extrinsic occurrence
};

// Extrinsic-headed subterms of t in evaluation order (arguments before the
// application containing them), first occurrence of each distinct term only.
std::vector<TermPtr> order_extrinsic_terms(const TermPtr& t, const Vocabulary& vocab);

// Replaces every occurrence of `from` (by structural equality) with `to`.
TermPtr replace_subterm(const TermPtr& t, const TermPtr& from, const TermPtr& to);

// Normalizes the program, then rebuilds it as a query-serial cascade.
// Rejects programs that keep an extrinsic application inside either branch
// of a conditional term: such a query is evaluated lazily by the source but
// would be issued eagerly by the rewrite.
SerializeResult serialize_unit(const SourceUnit& unit);

// Shape of one cascade clause of a serialized program: free of extrinsic
// symbols, or querying exactly one, as the whole right-hand side of a single
// assignment.
struct ClauseShape {
  enum class Kind { Pure, Tainted, Invalid };
  Kind kind = Kind::Invalid;
  std::string query_symbol;  // Tainted: the extrinsic symbol queried
  std::string target;        // Tainted: dynamic symbol receiving the answer
};

struct Classification {
  bool wrapped = false;     // top-level done wrapper recognized
  bool conforming = false;  // wrapped and every clause Pure or Tainted
  std::string done_name;
  std::vector<ClauseShape> clauses;
};

// Syntactic scan of a (purportedly) serialized unit.
Classification classify_serialized(const SourceUnit& unit);
Json classification_to_json(const Classification& c);

}  // namespace asmw
