#include "asmw/interp.hpp"

#include <algorithm>
#include <set>

namespace asmw {

namespace {

// "Provably" here means decidable from heads and literals alone; everything
// else is left to the runtime checks.
bool provably_non_boolean(const TermPtr& t, const Vocabulary& vocab) {
  if (t->is_literal) return !t->literal.is_boolean();
  if (t->head == logic::kIte) return false;
  if (logic::is_logic_name(t->head)) return false;
  const Symbol* s = vocab.lookup(t->head);
  if (!s) return false;
  return s->numerical;
}

bool provably_non_natural(const TermPtr& t, const Vocabulary& vocab) {
  if (t->is_literal) return !t->literal.is_natural();
  if (t->head == logic::kIte) return false;
  if (logic::is_logic_name(t->head)) return true;  // eq/and/or/not are Boolean
  const Symbol* s = vocab.lookup(t->head);
  if (!s) return false;
  return s->relational;
}

class Checker {
 public:
  Checker(const SourceUnit& unit, const Vocabulary& vocab) : unit_(unit), vocab_(vocab) {}

  void check_term(const TermPtr& t) {
    if (t->is_literal) return;
    check_name(t->head);
    int want = logic::logic_arity(t->head);
    if (want < 0) {
      const Symbol* s = vocab_.lookup(t->head);
      if (!s) throw CheckError("undeclared symbol '" + t->head + "'");
      want = s->arity;
    }
    if (static_cast<int>(t->args.size()) != want)
      throw CheckError("'" + t->head + "' takes " + std::to_string(want) + " arguments, got " +
                       std::to_string(t->args.size()));
    for (const auto& a : t->args) check_term(a);
  }

  void check_rule(const RulePtr& r) {
    switch (r->kind) {
      case Rule::Kind::Assign: {
        check_name(r->lhs_head);
        const Symbol* s = vocab_.lookup(r->lhs_head);
        if (!s) throw CheckError("undeclared symbol '" + r->lhs_head + "'");
        if (s->static_)
          throw CheckError("assignment target '" + s->name + "' is not dynamic");
        if (static_cast<int>(r->lhs_args.size()) != s->arity)
          throw CheckError("'" + s->name + "' takes " + std::to_string(s->arity) +
                           " arguments, got " + std::to_string(r->lhs_args.size()));
        for (const auto& a : r->lhs_args) check_term(a);
        check_term(r->rhs);
        if (s->relational && provably_non_boolean(r->rhs, vocab_))
          throw CheckError("non-Boolean term assigned to relational '" + s->name + "'");
        if (s->numerical && provably_non_natural(r->rhs, vocab_))
          throw CheckError("non-natural term assigned to numerical '" + s->name + "'");
        return;
      }
      case Rule::Kind::Cond: {
        check_term(r->guard);
        if (provably_non_boolean(r->guard, vocab_))
          throw CheckError("guard '" + term_to_string(r->guard) + "' is not Boolean");
        check_rule(r->then_rule);
        check_rule(r->else_rule);
        return;
      }
      case Rule::Kind::Par: {
        for (const auto& c : r->children) check_rule(c);
        return;
      }
    }
  }

  void check_name(const std::string& name) {
    if (!unit_.generated && is_reserved_name(name))
      throw CheckError("name '" + name + "' is reserved for pass-generated symbols");
  }

 private:
  const SourceUnit& unit_;
  const Vocabulary& vocab_;
};

Value eval_table_cell(const TermPtr& t, const Vocabulary& vocab, const Datastructure& data) {
  if (t->is_literal) return t->literal;
  const Symbol* s = vocab.lookup(t->head);
  if (s && s->static_ && !s->extrinsic && s->arity == 0 && t->args.empty()) {
    for (const auto& be : data.backends)
      for (const auto& provided : be->symbols())
        if (provided.name == s->name) return be->eval(provided, {});
  }
  throw CheckError("table cell '" + term_to_string(t) +
                   "' is not a literal or backend constant");
}

}  // namespace

Algorithm elaborate(const SourceUnit& unit) {
  auto data = std::make_shared<Datastructure>();
  if (unit.uses_arithmetic) data->backends.push_back(arithmetic_backend());
  for (const auto& e : unit.enums) {
    if (e.elements.empty()) throw CheckError("enum '" + e.name + "' has no elements");
    data->backends.push_back(enum_backend(e.name, e.elements));
  }

  auto vocab = std::make_shared<Vocabulary>();
  for (const auto& s : unit.decls) {
    if (!unit.generated && is_reserved_name(s.name))
      throw CheckError("name '" + s.name + "' is reserved for pass-generated symbols");
    if (s.relational && s.numerical)
      throw CheckError("'" + s.name + "' cannot be both relational and numerical");
    if (s.extrinsic && !s.static_)
      throw CheckError("extrinsic '" + s.name + "' must be static");
    if (s.io_role != IoRole::None) {
      if (s.static_) throw CheckError("io variable '" + s.name + "' must be dynamic");
      if (s.arity != 0) throw CheckError("io variable '" + s.name + "' must have arity 0");
    }
    if (s.io_role == IoRole::Output && (s.relational || s.numerical))
      throw CheckError("output variable '" + s.name +
                       "' must be plain so that any produced value differs from its default");
    if (s.arity < 0) throw CheckError("negative arity on '" + s.name + "'");
    if (!vocab->declare(s))
      throw CheckError("duplicate or logic-symbol name '" + s.name + "'");
  }
  for (const auto& be : data->backends)
    for (const auto& provided : be->symbols())
      if (!vocab->declare(provided))
        throw CheckError("backend symbol '" + provided.name + "' clashes with a declaration");

  // Input positions must be 1..r, each exactly once; at most one output.
  {
    auto ins = vocab->input_variables();
    for (std::size_t i = 0; i < ins.size(); ++i)
      if (ins[i].input_pos != static_cast<int>(i) + 1)
        throw CheckError("input positions must be 1.." + std::to_string(ins.size()) +
                         " without gaps");
    int outs = 0;
    for (const auto& s : vocab->symbols())
      if (s.io_role == IoRole::Output) ++outs;
    if (outs > 1) throw CheckError("more than one output variable");
  }

  for (const auto& t : unit.tables) {
    if (!unit.generated && is_reserved_name(t.symbol))
      throw CheckError("name '" + t.symbol + "' is reserved for pass-generated symbols");
    const Symbol* s = vocab->lookup(t.symbol);
    if (!s) throw CheckError("table for undeclared symbol '" + t.symbol + "'");
    if (!s->static_ || s->extrinsic)
      throw CheckError("table symbol '" + t.symbol + "' must be a static intrinsic");
    for (const auto& be : data->backends)
      for (const auto& provided : be->symbols())
        if (provided.name == t.symbol)
          throw CheckError("table symbol '" + t.symbol + "' is provided by a backend");
    if (data->tables.count(t.symbol))
      throw CheckError("duplicate table for '" + t.symbol + "'");
    StaticTable table;
    for (const auto& e : t.entries) {
      if (static_cast<int>(e.args.size()) != s->arity)
        throw CheckError("table entry arity mismatch for '" + t.symbol + "'");
      Args args;
      for (const auto& cell : e.args) args.push_back(eval_table_cell(cell, *vocab, *data));
      Value v = eval_table_cell(e.value, *vocab, *data);
      if (s->relational && !v.is_boolean())
        throw CheckError("relational table '" + t.symbol + "' has a non-Boolean value");
      if (s->numerical && !v.is_natural())
        throw CheckError("numerical table '" + t.symbol + "' has a non-natural value");
      if (table.entries.count(args))
        throw CheckError("duplicate table entry for '" + t.symbol + "'");
      table.entries[args] = v;
    }
    if (t.default_value) {
      Value v = eval_table_cell(t.default_value, *vocab, *data);
      if (s->relational && !v.is_boolean())
        throw CheckError("relational table '" + t.symbol + "' has a non-Boolean default");
      if (s->numerical && !v.is_natural())
        throw CheckError("numerical table '" + t.symbol + "' has a non-natural default");
      table.default_value = v;
    }
    data->tables[t.symbol] = std::move(table);
  }

  // Every declared static intrinsic needs an interpretation.
  for (const auto& s : unit.decls) {
    if (!s.static_ || s.extrinsic) continue;
    if (data->tables.count(s.name)) continue;
    bool provided = false;
    for (const auto& be : data->backends)
      for (const auto& sym : be->symbols())
        if (sym.name == s.name) provided = true;
    if (!provided)
      throw CheckError("static intrinsic '" + s.name + "' has no table or backend");
  }

  if (!unit.program) throw CheckError("missing program");
  Checker checker(unit, *vocab);
  checker.check_rule(unit.program);

  Algorithm alg;
  alg.vocab = vocab;
  alg.data = data;
  alg.program = unit.program;
  alg.inputs = vocab->input_variables();
  alg.output = vocab->output_variable();
  return alg;
}

std::string run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::OutputProduced:
      return "OutputProduced";
    case RunStatus::Failed:
      return "Failed";
    case RunStatus::Stuck:
      return "Stuck";
    case RunStatus::BudgetExhausted:
      return "BudgetExhausted";
  }
  return "?";
}

std::string outcome_name(StepRecord::Outcome o) {
  switch (o) {
    case StepRecord::Outcome::Advanced:
      return "Advanced";
    case StepRecord::Outcome::Failed:
      return "Failed";
    case StepRecord::Outcome::StuckOnOracle:
      return "StuckOnOracle";
  }
  return "?";
}

State initial_state(const Algorithm& alg, const std::vector<Value>& inputs) {
  if (inputs.size() != alg.inputs.size())
    throw CheckError("expected " + std::to_string(alg.inputs.size()) + " inputs, got " +
                     std::to_string(inputs.size()));
  State s(alg.vocab, alg.data);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Symbol& var = alg.inputs[i];
    if (var.relational && !inputs[i].is_boolean())
      throw CheckError("input '" + var.name + "' must be Boolean");
    if (var.numerical && !inputs[i].is_natural())
      throw CheckError("input '" + var.name + "' must be a natural number");
    s.write_dynamic(var, {}, inputs[i]);
  }
  return s;
}

StepRecord step(const Algorithm& alg, State& state, const OracleEnv& env, long index) {
  StepRecord rec;
  rec.index = index;
  try {
    rec.updates = fire(alg.program, state, env, rec.trace);
  } catch (const EvalProblem& p) {
    rec.outcome = p.kind == EvalProblem::Kind::OracleNoAnswer
                      ? StepRecord::Outcome::StuckOnOracle
                      : StepRecord::Outcome::Failed;
    rec.problem = p;
    return rec;
  }
  if (auto clash = check_and_apply(state, rec.updates)) {
    rec.outcome = StepRecord::Outcome::Failed;
    rec.problem = EvalProblem{EvalProblem::Kind::Contradiction, clash->loc.symbol,
                              clash->loc.args, clash->first, clash->second};
    return rec;
  }
  rec.outcome = StepRecord::Outcome::Advanced;
  return rec;
}

RunResult run(const Algorithm& alg, const std::vector<Value>& inputs, const OracleEnv& env,
              const RunOptions& options) {
  RunResult result;
  State state = initial_state(alg, inputs);
  if (options.keep_states) result.states.push_back(state);
  Value output_default = alg.output ? alg.output->default_value() : Value::nil();
  for (long i = 0; i < options.max_steps; ++i) {
    State before = options.observer ? state : State();
    StepRecord rec = step(alg, state, env, i);
    if (options.observer) options.observer(before, rec);
    if (rec.outcome != StepRecord::Outcome::Advanced) {
      result.status = rec.outcome == StepRecord::Outcome::Failed ? RunStatus::Failed
                                                                 : RunStatus::Stuck;
      result.problem = rec.problem;
      result.steps = i;
      if (options.keep_records) result.records.push_back(std::move(rec));
      result.final_state = std::move(state);
      return result;
    }
    if (options.keep_records) result.records.push_back(std::move(rec));
    if (options.keep_states) result.states.push_back(state);
    if (alg.output) {
      Value out = state.read_dynamic(*alg.output, {});
      if (!(out == output_default)) {
        result.status = RunStatus::OutputProduced;
        result.output = out;
        result.steps = i + 1;
        result.final_state = std::move(state);
        return result;
      }
    }
  }
  result.status = RunStatus::BudgetExhausted;
  result.steps = options.max_steps;
  result.final_state = std::move(state);
  return result;
}

RunResult oracle_dispatch_run(const DispatchBundle& bundle, std::size_t entry,
                              const std::vector<Value>& inputs, long max_steps, int max_depth,
                              const RunOptions& options) {
  if (max_depth <= 0) throw DepthExceeded();
  const Algorithm& alg = bundle.members.at(entry);
  OracleEnv env;
  for (const auto& sym : alg.vocab->symbols()) {
    if (!sym.static_ || !sym.extrinsic) continue;
    auto covered = bundle.coverage.find(sym.name);
    if (covered != bundle.coverage.end()) {
      std::size_t callee = covered->second;
      env.set_responder(sym.name, [&bundle, callee, max_steps,
                                   max_depth](const Args& args) -> std::optional<Value> {
        RunResult inner =
            oracle_dispatch_run(bundle, callee, args, max_steps, max_depth - 1);
        if (inner.status != RunStatus::OutputProduced) return std::nullopt;
        return inner.output;
      });
    } else if (bundle.passthrough) {
      const OracleEnv* outer = bundle.passthrough;
      std::string name = sym.name;
      env.set_responder(sym.name,
                        [outer, name](const Args& args) { return outer->query(name, args); });
    }
  }
  RunOptions opts = options;
  opts.max_steps = max_steps;
  return run(alg, inputs, env, opts);
}

}  // namespace asmw
