#pragma once

#include <vector>

#include "asmw/parser.hpp"

namespace asmw {

// One clause of a compound conditional: a guard and a list of assignments
// fired in parallel when the guard is the first true one.
struct NormalClause {
  TermPtr guard;
  std::vector<RulePtr> body;  // Assign rules only
};

using NormalForm = std::vector<NormalClause>;

// Rewrites an arbitrary rule into an equivalent ordered clause list. The
// vocabulary is consulted to decide when a plain conjunction of guards is
// safe; otherwise guards are combined with a short-circuiting conditional
// term so that evaluation visits exactly the subterms the original rule
// would visit.
NormalForm normalize_rule(const RulePtr& rule, const Vocabulary& vocab);

// Clause-list product for parallel composition: for every clause of p, the
// pairings with each clause of q, then the clause alone; finally the clauses
// of q alone.
NormalForm merge_parallel(const NormalForm& p, const NormalForm& q, const Vocabulary& vocab);

// Renders a clause list as an if/elseif cascade ending in skip. Singleton
// bodies stay bare assignments; others become parallel blocks.
RulePtr normal_form_to_rule(const NormalForm& nf);

// True when the rule already is such a cascade: conditionals chained through
// the else branch, each body an assignment or a parallel block of
// assignments, terminated by skip.
bool is_compound_conditional(const RulePtr& rule);

// Validates the unit and replaces its program by the normalized cascade.
SourceUnit normalize_unit(const SourceUnit& unit);

}  // namespace asmw
