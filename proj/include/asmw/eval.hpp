#pragma once

#include <optional>
#include <string>

#include "asmw/oracle.hpp"
#include "asmw/state.hpp"
#include "asmw/term.hpp"

namespace asmw {

// The ways a step can go wrong. Undefined and Contradiction are the two
// failure scenarios of the model; GuardNotBoolean is a declared extension for
// conditionals whose guard evaluates to a non-Boolean value. OracleNoAnswer is
// not a failure: the interpreter reports it as a distinct stuck-on-oracle
// outcome.
struct EvalProblem {
  enum class Kind { Undefined, Contradiction, GuardNotBoolean, OracleNoAnswer };
  Kind kind;
  std::string symbol;   // Undefined / OracleNoAnswer / Contradiction
  Args args;
  Value value;          // GuardNotBoolean: offending guard value
  Value second_value;   // Contradiction: the clashing value (value = first)
  std::string detail;

  std::string to_string() const;
};

// Evaluates a term; records every non-logic application in the trace. ITE is
// the only non-strict symbol: it evaluates its first argument, then exactly
// one branch if that value is Boolean and neither otherwise (yielding nil).
// Throws EvalProblem on undefined applications and unanswered extrinsic
// queries.
Value eval_term(const State& state, const OracleEnv& env, const TermPtr& term,
                EvalTrace& trace);

// Produces the rule's update set. Assign evaluates the lhs arguments and then
// the rhs; the lhs application itself is not evaluated. Cond evaluates the
// guard and fires one branch. Par fires all children left to right and takes
// the set union, consistent or not. Throws EvalProblem.
UpdateSet fire(const RulePtr& rule, const State& state, const OracleEnv& env,
               EvalTrace& trace);

// Applies a consistent update set in place; returns the witnessing
// contradiction otherwise (state untouched in that case).
std::optional<Contradiction> check_and_apply(State& state, const UpdateSet& us);

}  // namespace asmw
