#include "asmw/normalize.hpp"

#include "asmw/interp.hpp"

namespace asmw {

namespace {

bool is_true_literal(const TermPtr& t) { return t->is_literal && t->literal.is_true(); }

// A guard may appear as an operand of a strict conjunction only if its value
// can never fall outside {true, false}: the logic connectives are total or
// fail before the conjunction would, while dynamic and extrinsic symbols can
// yield nil at run time even when declared relational.
bool boolean_proof(const TermPtr& t, const Vocabulary& vocab) {
  if (t->is_literal) return t->literal.is_boolean();
  const std::string& h = t->head;
  if (h == logic::kEq || h == logic::kAnd || h == logic::kOr || h == logic::kNot) return true;
  const Symbol* sym = vocab.lookup(h);
  return sym != nullptr && sym->relational && sym->intrinsic();
}

// Conjunction of a clause guard from p with one from q. The plain `and` is
// strict in both operands, so it is only faithful when q has a single clause
// (whose guard the original parallel rule always evaluates) and neither
// operand can be non-Boolean. Everywhere else the conditional form evaluates
// h only after g held, matching the clause-scan of the cascade.
TermPtr conjoin_guards(const TermPtr& g, const TermPtr& h, std::size_t q_clauses,
                       const Vocabulary& vocab) {
  if (q_clauses == 1 && boolean_proof(g, vocab) && boolean_proof(h, vocab))
    return Term::conj(g, h);
  return Term::ite(g, h, Term::false_lit());
}

// Collects the assignment leaves of possibly nested parallel blocks into
// `assigns` and every conditional child into `conds`, preserving order.
void flatten_par(const RulePtr& r, std::vector<RulePtr>& assigns, std::vector<RulePtr>& conds) {
  switch (r->kind) {
    case Rule::Kind::Assign:
      assigns.push_back(r);
      break;
    case Rule::Kind::Par:
      for (const RulePtr& c : r->children) flatten_par(c, assigns, conds);
      break;
    case Rule::Kind::Cond:
      conds.push_back(r);
      break;
  }
}

}  // namespace

NormalForm merge_parallel(const NormalForm& p, const NormalForm& q, const Vocabulary& vocab) {
  NormalForm out;
  out.reserve(p.size() * (q.size() + 1) + q.size());
  for (const NormalClause& pc : p) {
    for (const NormalClause& qc : q) {
      NormalClause both;
      both.guard = conjoin_guards(pc.guard, qc.guard, q.size(), vocab);
      both.body = pc.body;
      both.body.insert(both.body.end(), qc.body.begin(), qc.body.end());
      out.push_back(std::move(both));
    }
    out.push_back(pc);
  }
  for (const NormalClause& qc : q) out.push_back(qc);
  return out;
}

NormalForm normalize_rule(const RulePtr& rule, const Vocabulary& vocab) {
  switch (rule->kind) {
    case Rule::Kind::Assign:
      return {NormalClause{Term::true_lit(), {rule}}};
    case Rule::Kind::Par: {
      std::vector<RulePtr> assigns;
      std::vector<RulePtr> conds;
      flatten_par(rule, assigns, conds);
      std::vector<NormalForm> parts;
      if (!assigns.empty()) parts.push_back({NormalClause{Term::true_lit(), assigns}});
      for (const RulePtr& c : conds) parts.push_back(normalize_rule(c, vocab));
      if (parts.empty()) return {NormalClause{Term::true_lit(), {}}};
      NormalForm acc = std::move(parts.front());
      for (std::size_t i = 1; i < parts.size(); ++i) acc = merge_parallel(acc, parts[i], vocab);
      return acc;
    }
    case Rule::Kind::Cond: {
      NormalForm np = normalize_rule(rule->then_rule, vocab);
      NormalForm nq = normalize_rule(rule->else_rule, vocab);
      // A then-branch that normalized to a single always-on clause keeps the
      // conditional's own guard, so existing cascades pass through verbatim.
      if (np.size() == 1 && is_true_literal(np.front().guard)) {
        NormalForm out;
        out.push_back(NormalClause{rule->guard, std::move(np.front().body)});
        out.insert(out.end(), nq.begin(), nq.end());
        return out;
      }
      NormalForm out;
      out.reserve(np.size() + nq.size());
      for (NormalClause& c : np)
        out.push_back(NormalClause{Term::ite(rule->guard, c.guard, Term::false_lit()),
                                   std::move(c.body)});
      for (NormalClause& c : nq)
        out.push_back(NormalClause{Term::ite(rule->guard, Term::false_lit(), c.guard),
                                   std::move(c.body)});
      if (out.empty())
        out.push_back(NormalClause{Term::ite(rule->guard, Term::false_lit(), Term::false_lit()),
                                   {}});
      return out;
    }
  }
  return {};
}

RulePtr normal_form_to_rule(const NormalForm& nf) {
  RulePtr rest = Rule::skip();
  for (auto it = nf.rbegin(); it != nf.rend(); ++it) {
    RulePtr body = it->body.size() == 1 ? it->body.front() : Rule::par(it->body);
    rest = Rule::cond(it->guard, body, rest);
  }
  return rest;
}

bool is_compound_conditional(const RulePtr& rule) {
  auto body_ok = [](const RulePtr& b) {
    if (b->kind == Rule::Kind::Assign) return true;
    if (b->kind != Rule::Kind::Par) return false;
    for (const RulePtr& c : b->children)
      if (c->kind != Rule::Kind::Assign) return false;
    return true;
  };
  RulePtr r = rule;
  while (r->kind == Rule::Kind::Cond) {
    if (!body_ok(r->then_rule)) return false;
    r = r->else_rule;
  }
  return r->kind == Rule::Kind::Par && r->children.empty();
}

SourceUnit normalize_unit(const SourceUnit& unit) {
  Algorithm alg = elaborate(unit);
  SourceUnit out = unit;
  out.program = normal_form_to_rule(normalize_rule(unit.program, *alg.vocab));
  return out;
}

}  // namespace asmw
