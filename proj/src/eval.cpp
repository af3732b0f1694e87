#include "asmw/eval.hpp"

#include <sstream>

namespace asmw {

std::string EvalProblem::to_string() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::Undefined:
      out << "undefined application: " << symbol << "(";
      for (std::size_t i = 0; i < args.size(); ++i) out << (i ? ", " : "") << args[i].to_string();
      out << ")";
      break;
    case Kind::Contradiction:
      out << "contradictory updates at " << symbol << "(";
      for (std::size_t i = 0; i < args.size(); ++i) out << (i ? ", " : "") << args[i].to_string();
      out << "): " << value.to_string() << " vs " << second_value.to_string();
      break;
    case Kind::GuardNotBoolean:
      out << "guard evaluated to non-Boolean value " << value.to_string();
      break;
    case Kind::OracleNoAnswer:
      out << "oracle gave no answer for " << symbol << "(";
      for (std::size_t i = 0; i < args.size(); ++i) out << (i ? ", " : "") << args[i].to_string();
      out << ")";
      break;
  }
  if (!detail.empty()) out << " [" << detail << "]";
  return out.str();
}

namespace {

Value require_boolean(const std::string& op, const Value& v) {
  if (!v.is_boolean())
    throw EvalProblem{EvalProblem::Kind::Undefined, op, {v}, {}, {},
                      "logic connective applied to a non-Boolean value"};
  return v;
}

Value eval_static(const State& state, const Symbol& sym, const Args& args) {
  const Datastructure& data = state.data();
  auto table = data.tables.find(sym.name);
  if (table != data.tables.end()) {
    auto v = table->second.eval(args);
    if (!v) throw EvalProblem{EvalProblem::Kind::Undefined, sym.name, args};
    return *v;
  }
  for (const auto& be : data.backends)
    for (const auto& provided : be->symbols())
      if (provided.name == sym.name) return be->eval(provided, args);
  throw EvalProblem{EvalProblem::Kind::Undefined, sym.name, args,
                    {}, {}, "static symbol has no interpretation"};
}

}  // namespace

Value eval_term(const State& state, const OracleEnv& env, const TermPtr& term,
                EvalTrace& trace) {
  if (term->is_literal) return term->literal;

  const std::string& head = term->head;
  if (head == logic::kIte) {
    Value c = eval_term(state, env, term->args[0], trace);
    if (c.is_true()) return eval_term(state, env, term->args[1], trace);
    if (c.is_false()) return eval_term(state, env, term->args[2], trace);
    return Value::nil();
  }
  if (logic::is_logic_name(head)) {
    Args vals;
    vals.reserve(term->args.size());
    for (const auto& a : term->args) vals.push_back(eval_term(state, env, a, trace));
    if (head == logic::kEq) return Value::boolean(vals[0] == vals[1]);
    if (head == logic::kAnd)
      return Value::boolean(require_boolean(head, vals[0]).is_true() &&
                            require_boolean(head, vals[1]).is_true());
    if (head == logic::kOr)
      return Value::boolean(require_boolean(head, vals[0]).is_true() ||
                            require_boolean(head, vals[1]).is_true());
    return Value::boolean(!require_boolean(head, vals[0]).is_true());
  }

  const Symbol* sym = state.vocab().lookup(head);
  if (!sym)
    throw EvalProblem{EvalProblem::Kind::Undefined, head, {}, {}, {}, "undeclared symbol"};

  Args vals;
  vals.reserve(term->args.size());
  for (const auto& a : term->args) vals.push_back(eval_term(state, env, a, trace));

  if (sym->dynamic()) {
    Value v = state.read_dynamic(*sym, vals);
    trace.record_dynamic(head, vals, v);
    return v;
  }
  if (sym->extrinsic) {
    auto answer = env.query(head, vals);
    if (!answer) throw EvalProblem{EvalProblem::Kind::OracleNoAnswer, head, vals};
    trace.record_static(head, vals, *answer, true);
    return *answer;
  }
  Value v = eval_static(state, *sym, vals);
  trace.record_static(head, vals, v, false);
  return v;
}

UpdateSet fire(const RulePtr& rule, const State& state, const OracleEnv& env,
               EvalTrace& trace) {
  switch (rule->kind) {
    case Rule::Kind::Assign: {
      Args lhs;
      lhs.reserve(rule->lhs_args.size());
      for (const auto& a : rule->lhs_args) lhs.push_back(eval_term(state, env, a, trace));
      Value rhs = eval_term(state, env, rule->rhs, trace);
      return UpdateSet{Update{Location{rule->lhs_head, std::move(lhs)}, std::move(rhs)}};
    }
    case Rule::Kind::Cond: {
      Value g = eval_term(state, env, rule->guard, trace);
      if (g.is_true()) return fire(rule->then_rule, state, env, trace);
      if (g.is_false()) return fire(rule->else_rule, state, env, trace);
      throw EvalProblem{EvalProblem::Kind::GuardNotBoolean, term_to_string(rule->guard),
                        {}, g};
    }
    case Rule::Kind::Par: {
      UpdateSet all;
      for (const auto& c : rule->children) {
        UpdateSet part = fire(c, state, env, trace);
        all.merge(part);
      }
      return all;
    }
  }
  return {};
}

std::optional<Contradiction> check_and_apply(State& state, const UpdateSet& us) {
  auto clash = find_contradiction(us);
  if (clash) return clash;
  for (const auto& u : us) {
    const Symbol* sym = state.vocab().lookup(u.loc.symbol);
    if (sym) state.write_dynamic(*sym, u.loc.args, u.value);
  }
  return std::nullopt;
}

}  // namespace asmw
