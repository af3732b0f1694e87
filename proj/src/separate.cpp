#include "asmw/separate.hpp"

#include <algorithm>

#include "asmw/symbol.hpp"

namespace asmw {

namespace {

const Symbol* find_decl(const SourceUnit& unit, const std::string& name) {
  for (const Symbol& s : unit.decls)
    if (s.name == name) return &s;
  return nullptr;
}

// Stage 2: assignments to f become parallel updates of d and delta. The lhs
// argument terms have already been rewritten by stage 1.
RulePtr split_assignments(const RulePtr& r, const SeparationEntry& e) {
  switch (r->kind) {
    case Rule::Kind::Assign: {
      if (r->lhs_head != e.f) return r;
      RulePtr set_d = Rule::assign(e.d, r->lhs_args, r->rhs);
      RulePtr set_delta = Rule::assign(e.delta, r->lhs_args, Term::true_lit());
      return Rule::par({set_d, set_delta});
    }
    case Rule::Kind::Cond: {
      RulePtr t = split_assignments(r->then_rule, e);
      RulePtr f_ = split_assignments(r->else_rule, e);
      if (t == r->then_rule && f_ == r->else_rule) return r;
      return Rule::cond(r->guard, t, f_);
    }
    case Rule::Kind::Par: {
      std::vector<RulePtr> kids;
      bool changed = false;
      kids.reserve(r->children.size());
      for (const RulePtr& c : r->children) {
        RulePtr c2 = split_assignments(c, e);
        changed = changed || c2 != c;
        kids.push_back(c2);
      }
      if (!changed) return r;
      return Rule::par(std::move(kids));
    }
  }
  return r;
}

TermPtr default_literal(const Symbol& sym) {
  if (sym.relational) return Term::false_lit();
  if (sym.numerical) return Term::nat(0);
  return Term::nil_lit();
}

}  // namespace

TermPtr separate_rewrite_term(const TermPtr& t, const SeparationEntry& e) {
  if (t->is_literal) return t;
  std::vector<TermPtr> args;
  bool changed = false;
  args.reserve(t->args.size());
  for (const TermPtr& a : t->args) {
    TermPtr a2 = separate_rewrite_term(a, e);
    changed = changed || a2 != a;
    args.push_back(a2);
  }
  if (t->head == e.f) {
    TermPtr del = Term::app(e.delta, args);
    TermPtr d = Term::app(e.d, args);
    TermPtr s = Term::app(e.s, args);
    return Term::ite(del, d, s);
  }
  if (!changed) return t;
  return Term::app(t->head, std::move(args));
}

SeparationResult separate_one(const SourceUnit& unit, const std::string& f) {
  const Symbol* sym = find_decl(unit, f);
  if (!sym) throw CheckError("cannot separate '" + f + "': not declared");
  if (sym->static_) throw CheckError("cannot separate '" + f + "': static symbol");
  if (sym->io_role != IoRole::None)
    throw CheckError("cannot separate '" + f + "': input/output variable");
  if (is_reserved_name(f)) throw CheckError("cannot separate '" + f + "': reserved name");

  SeparationEntry e;
  e.f = f;
  e.s = "$s_" + f;
  e.d = "$d_" + f;
  e.delta = "$delta_" + f;
  for (const std::string& fresh : {e.s, e.d, e.delta})
    if (find_decl(unit, fresh))
      throw CheckError("cannot separate '" + f + "': '" + fresh + "' already declared");

  SeparationResult out;
  out.unit = unit;
  out.unit.generated = true;
  out.cert.renamed.push_back(e);

  // Vocabulary: f is replaced in place by s, d, delta so declaration order
  // stays stable under iteration.
  std::vector<Symbol> decls;
  decls.reserve(unit.decls.size() + 2);
  for (const Symbol& old : unit.decls) {
    if (old.name != f) {
      decls.push_back(old);
      continue;
    }
    Symbol s = old;
    s.name = e.s;
    s.static_ = true;
    s.extrinsic = false;
    decls.push_back(s);
    Symbol d = old;
    d.name = e.d;
    decls.push_back(d);
    Symbol delta = old;
    delta.name = e.delta;
    delta.relational = true;
    delta.numerical = false;
    decls.push_back(delta);
  }
  out.unit.decls = std::move(decls);

  // s carries f's initial interpretation. Initial dynamic functions are
  // uninformative here, so s is total and constantly the default.
  TableDecl table;
  table.symbol = e.s;
  table.default_value = default_literal(*sym);
  out.unit.tables.push_back(table);

  RulePtr stage1 = map_rule_terms(unit.program, [&e](const TermPtr& t) {
    return separate_rewrite_term(t, e);
  });
  out.unit.program = split_assignments(stage1, e);
  return out;
}

SeparationResult separate_named(const SourceUnit& unit, const std::vector<std::string>& names) {
  SeparationResult acc;
  acc.unit = unit;
  for (const std::string& f : names) {
    SeparationResult step = separate_one(acc.unit, f);
    acc.unit = std::move(step.unit);
    acc.cert.renamed.push_back(step.cert.renamed.front());
  }
  return acc;
}

SeparationResult separate_all(const SourceUnit& unit) {
  std::vector<std::string> names;
  for (const Symbol& s : unit.decls)
    if (s.dynamic() && s.io_role == IoRole::None && !is_reserved_name(s.name))
      names.push_back(s.name);
  return separate_named(unit, names);
}

}  // namespace asmw
