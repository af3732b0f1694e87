#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asmw/eval.hpp"
#include "asmw/oracle.hpp"
#include "asmw/parser.hpp"
#include "asmw/state.hpp"

namespace asmw {

// An elaborated, checked algorithm. The vocabulary contains the declared
// symbols (in declaration order) followed by the backend-provided ones.
struct Algorithm {
  std::shared_ptr<const Vocabulary> vocab;
  std::shared_ptr<const Datastructure> data;
  RulePtr program;
  std::vector<Symbol> inputs;      // input variables by position
  std::optional<Symbol> output;    // absent for open-ended tasks
};

// Validates and elaborates a parsed unit. Throws CheckError on arity or flag
// violations, undeclared or reserved names, malformed io declarations,
// uninterpreted statics, and provably ill-sorted guards or assignments.
Algorithm elaborate(const SourceUnit& unit);

struct StepRecord {
  long index = 0;
  UpdateSet updates;
  EvalTrace trace;
  enum class Outcome { Advanced, Failed, StuckOnOracle };
  Outcome outcome = Outcome::Advanced;
  std::optional<EvalProblem> problem;
};

enum class RunStatus { OutputProduced, Failed, Stuck, BudgetExhausted };

std::string run_status_name(RunStatus s);
std::string outcome_name(StepRecord::Outcome o);

struct RunResult {
  RunStatus status = RunStatus::BudgetExhausted;
  std::optional<Value> output;
  long steps = 0;
  std::optional<EvalProblem> problem;
  State final_state;
  std::vector<StepRecord> records;  // filled when RunOptions::keep_records
  std::vector<State> states;        // filled when RunOptions::keep_states; states[i] precedes step i
};

struct RunOptions {
  long max_steps = 10000;
  bool keep_records = false;
  bool keep_states = false;
  // Called after each step with the pre-step state and its record.
  std::function<void(const State&, const StepRecord&)> observer;
};

// The state every run starts from: backends plus uninformative dynamic
// functions, with the input variables bound to the given values.
State initial_state(const Algorithm& alg, const std::vector<Value>& inputs);

// One step: fire the program and apply the update set. On a failed or stuck
// outcome the state is left unchanged.
StepRecord step(const Algorithm& alg, State& state, const OracleEnv& env, long index = 0);

// Iterates step until the output variable differs from its default, a step
// fails or sticks, or the budget runs out.
RunResult run(const Algorithm& alg, const std::vector<Value>& inputs, const OracleEnv& env,
              const RunOptions& options);

// A closed set of algorithms for reference-semantics dispatch: each covered
// extrinsic symbol is answered by recursively running the member that
// computes it.
struct DispatchBundle {
  std::vector<Algorithm> members;
  std::map<std::string, std::size_t> coverage;
  const OracleEnv* passthrough = nullptr;  // answers any uncovered symbol
};

struct DepthExceeded : std::runtime_error {
  DepthExceeded() : std::runtime_error("oracle dispatch recursion depth exceeded") {}
};

// Runs a member with every covered extrinsic query answered by a recursive
// dispatch run. An inner run that does not produce an output leaves the outer
// run stuck on that query. Throws DepthExceeded when max_depth nested runs are
// pending.
RunResult oracle_dispatch_run(const DispatchBundle& bundle, std::size_t entry,
                              const std::vector<Value>& inputs, long max_steps, int max_depth,
                              const RunOptions& options = {});

}  // namespace asmw
