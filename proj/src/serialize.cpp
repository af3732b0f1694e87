#include "asmw/serialize.hpp"

#include <algorithm>
#include <set>

#include "asmw/interp.hpp"

namespace asmw {

namespace {

bool extrinsic_head(const TermPtr& t, const Vocabulary& vocab) {
  if (t->is_literal) return false;
  const Symbol* s = vocab.lookup(t->head);
  return s != nullptr && s->extrinsic;
}

bool mentions_extrinsic(const TermPtr& t, const Vocabulary& vocab) {
  if (t->is_literal) return false;
  if (extrinsic_head(t, vocab)) return true;
  for (const TermPtr& a : t->args)
    if (mentions_extrinsic(a, vocab)) return true;
  return false;
}

void collect_extrinsic(const TermPtr& t, const Vocabulary& vocab, std::set<std::string>& seen,
                       std::vector<TermPtr>& out) {
  if (t->is_literal) return;
  for (const TermPtr& a : t->args) collect_extrinsic(a, vocab, seen, out);
  if (extrinsic_head(t, vocab) && seen.insert(term_to_string(t)).second) out.push_back(t);
}

// A query under either branch of a conditional term is evaluated only when
// that branch is taken; the serialized program would issue it regardless.
void check_eager_queries(const TermPtr& t, const Vocabulary& vocab) {
  if (t->is_literal) return;
  if (t->head == logic::kIte) {
    check_eager_queries(t->args[0], vocab);
    for (std::size_t k = 1; k < 3; ++k)
      if (mentions_extrinsic(t->args[k], vocab))
        throw CheckError("cannot serialize: extrinsic query " + print_term(t->args[k]) +
                         " sits in a conditional branch of " + print_term(t));
    return;
  }
  for (const TermPtr& a : t->args) check_eager_queries(a, vocab);
}

// ite(x, y, false): a conjunction that evaluates y only after x held and
// passes a non-Boolean x through to the guard check unchanged.
TermPtr cg(const TermPtr& x, const TermPtr& y) { return Term::ite(x, y, Term::false_lit()); }

struct Builder {
  const Vocabulary* vocab = nullptr;
  std::set<std::string> taken;
  std::vector<Symbol> added;
  int next_query = 1;
  int next_level = 1;
  int next_flag = 1;

  std::string declare(const std::string& name, bool relational) {
    Symbol s;
    s.name = name;
    s.relational = relational;
    added.push_back(s);
    taken.insert(name);
    return name;
  }

  bool free_name(const std::string& n) const { return taken.find(n) == taken.end(); }

  std::pair<std::string, std::string> fresh_query() {
    for (;; ++next_query) {
      std::string d = "$d" + std::to_string(next_query);
      std::string q = "$q" + std::to_string(next_query);
      if (free_name(d) && free_name(q)) {
        ++next_query;
        return {declare(d, false), declare(q, true)};
      }
    }
  }

  std::pair<std::string, std::string> fresh_level() {
    for (;; ++next_level) {
      std::string a = "$a" + std::to_string(next_level);
      std::string b = "$b" + std::to_string(next_level);
      if (free_name(a) && free_name(b)) {
        ++next_level;
        return {declare(a, true), declare(b, false)};
      }
    }
  }

  std::string fresh_flag() {
    for (;; ++next_flag) {
      std::string f = "$D" + std::to_string(next_flag);
      if (free_name(f)) {
        ++next_flag;
        return declare(f, true);
      }
    }
  }

  std::string fresh_done() {
    if (free_name("$done")) return declare("$done", true);
    for (int k = 1;; ++k) {
      std::string f = "$done" + std::to_string(k);
      if (free_name(f)) return declare(f, true);
    }
  }

  struct Layer {
    NormalForm clauses;
    long steps = 0;  // worst-case steps to reach the layer's done clause
  };

  // Stages the distinct queries of the given terms one per step, rewriting
  // later terms to read staged answers, so every staged right-hand side
  // carries exactly one extrinsic application: its head.
  struct Staging {
    std::vector<std::string> q_names;
    NormalForm query_clauses;
  };

  Staging stage_queries(std::vector<TermPtr> queries, std::vector<TermPtr*> rewrite,
                        const TermPtr& extra_guard) {
    Staging st;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      auto [d, q] = fresh_query();
      TermPtr rhs = queries[i];
      TermPtr holder = Term::app(d);
      for (std::size_t j = i + 1; j < queries.size(); ++j)
        queries[j] = replace_subterm(queries[j], rhs, holder);
      for (TermPtr* target : rewrite) *target = replace_subterm(*target, rhs, holder);
      NormalClause c;
      c.guard = extra_guard ? Term::conj(extra_guard, Term::neg(Term::app(q)))
                            : Term::neg(Term::app(q));
      c.body = {Rule::assign(d, {}, rhs), Rule::assign(q, {}, Term::true_lit())};
      st.query_clauses.push_back(std::move(c));
      st.q_names.push_back(q);
    }
    return st;
  }

  // Reproduces one parallel block of assignments: its queries one per step,
  // then the block with staged answers, the done flag, and the query marks
  // cleared for the next pass.
  Layer build_basis(const std::vector<RulePtr>& body, const std::string& done_sym) {
    std::set<std::string> seen;
    std::vector<TermPtr> queries;
    std::vector<std::vector<TermPtr>> lhs(body.size());
    std::vector<TermPtr> rhs(body.size());
    for (std::size_t k = 0; k < body.size(); ++k) {
      lhs[k] = body[k]->lhs_args;
      rhs[k] = body[k]->rhs;
      for (const TermPtr& a : lhs[k]) collect_extrinsic(a, *vocab, seen, queries);
      collect_extrinsic(rhs[k], *vocab, seen, queries);
    }
    std::vector<TermPtr*> rewrite;
    for (std::size_t k = 0; k < body.size(); ++k) {
      for (TermPtr& a : lhs[k]) rewrite.push_back(&a);
      rewrite.push_back(&rhs[k]);
    }
    Staging st = stage_queries(std::move(queries), rewrite, nullptr);

    Layer out;
    out.clauses = std::move(st.query_clauses);
    NormalClause fire;
    fire.guard = Term::true_lit();
    for (std::size_t k = 0; k < body.size(); ++k)
      fire.body.push_back(Rule::assign(body[k]->lhs_head, lhs[k], rhs[k]));
    fire.body.push_back(Rule::assign(done_sym, {}, Term::true_lit()));
    for (const std::string& q : st.q_names)
      fire.body.push_back(Rule::assign(q, {}, Term::false_lit()));
    out.clauses.push_back(std::move(fire));
    out.steps = static_cast<long>(st.q_names.size()) + 1;
    return out;
  }

  // One cascade clause and everything below it. The guard's queries are
  // staged, its value lands in b, and the clause body or the rest of the
  // cascade proceeds under a / b while its own done flag is still clear.
  Layer build_level(const NormalForm& nf, std::size_t at, const std::string& done_sym) {
    if (at == nf.size()) {
      Layer out;
      out.clauses.push_back(
          NormalClause{Term::true_lit(), {Rule::assign(done_sym, {}, Term::true_lit())}});
      out.steps = 1;
      return out;
    }
    const NormalClause& clause = nf[at];
    auto [a, b] = fresh_level();
    TermPtr a_app = Term::app(a);
    TermPtr b_app = Term::app(b);

    TermPtr guard = clause.guard;
    std::vector<TermPtr*> rewrite{&guard};
    Staging st =
        stage_queries(order_extrinsic_terms(guard, *vocab), rewrite, Term::neg(a_app));

    Layer out;
    out.clauses = std::move(st.query_clauses);
    NormalClause eval;
    eval.guard = Term::neg(a_app);
    eval.body = {Rule::assign(b, {}, guard), Rule::assign(a, {}, Term::true_lit())};
    for (const std::string& q : st.q_names)
      eval.body.push_back(Rule::assign(q, {}, Term::false_lit()));
    out.clauses.push_back(std::move(eval));

    std::string fire_flag = fresh_flag();
    std::string rest_flag = fresh_flag();
    Layer fire = build_basis(clause.body, fire_flag);
    for (NormalClause& c : fire.clauses) {
      c.guard = cg(cg(cg(a_app, b_app), Term::neg(Term::app(fire_flag))), c.guard);
      out.clauses.push_back(std::move(c));
    }
    Layer rest = build_level(nf, at + 1, rest_flag);
    for (NormalClause& c : rest.clauses) {
      c.guard = cg(cg(cg(a_app, Term::neg(b_app)), Term::neg(Term::app(rest_flag))), c.guard);
      out.clauses.push_back(std::move(c));
    }

    NormalClause done;
    done.guard = Term::true_lit();
    done.body = {Rule::assign(done_sym, {}, Term::true_lit()),
                 Rule::assign(a, {}, Term::false_lit()),
                 Rule::assign(fire_flag, {}, Term::false_lit()),
                 Rule::assign(rest_flag, {}, Term::false_lit())};
    out.clauses.push_back(std::move(done));
    out.steps = static_cast<long>(st.q_names.size()) + 1 + std::max(fire.steps, rest.steps) + 1;
    return out;
  }
};

}  // namespace

std::vector<TermPtr> order_extrinsic_terms(const TermPtr& t, const Vocabulary& vocab) {
  std::set<std::string> seen;
  std::vector<TermPtr> out;
  collect_extrinsic(t, vocab, seen, out);
  return out;
}

TermPtr replace_subterm(const TermPtr& t, const TermPtr& from, const TermPtr& to) {
  if (term_equal(t, from)) return to;
  if (t->is_literal) return t;
  bool changed = false;
  std::vector<TermPtr> args;
  args.reserve(t->args.size());
  for (const TermPtr& a : t->args) {
    TermPtr r = replace_subterm(a, from, to);
    changed = changed || r != a;
    args.push_back(std::move(r));
  }
  if (!changed) return t;
  return Term::app(t->head, std::move(args));
}

SerializeResult serialize_unit(const SourceUnit& unit) {
  Algorithm alg = elaborate(unit);
  const Vocabulary& vocab = *alg.vocab;
  NormalForm nf = normalize_rule(unit.program, vocab);

  Builder builder;
  builder.vocab = &vocab;
  for (const Symbol& s : unit.decls) builder.taken.insert(s.name);

  bool any_query = false;
  for (const NormalClause& c : nf) {
    if (mentions_extrinsic(c.guard, vocab)) any_query = true;
    for (const RulePtr& asg : c.body) {
      for (const TermPtr& a : asg->lhs_args)
        if (mentions_extrinsic(a, vocab)) any_query = true;
      if (mentions_extrinsic(asg->rhs, vocab)) any_query = true;
    }
  }

  SerializeResult res;
  res.degenerate = !any_query;
  std::string done = builder.fresh_done();
  res.done_name = done;

  NormalForm cc;
  if (res.degenerate) {
    // Nothing to stage: mark every pass done, including the fall-through.
    for (const NormalClause& c : nf) {
      NormalClause pass = c;
      pass.body.push_back(Rule::assign(done, {}, Term::true_lit()));
      cc.push_back(std::move(pass));
    }
    cc.push_back(NormalClause{Term::true_lit(), {Rule::assign(done, {}, Term::true_lit())}});
    res.megastep_bound = 2;
  } else {
    for (const NormalClause& c : nf) {
      check_eager_queries(c.guard, vocab);
      for (const RulePtr& asg : c.body) {
        for (const TermPtr& a : asg->lhs_args) check_eager_queries(a, vocab);
        check_eager_queries(asg->rhs, vocab);
      }
    }
    Builder::Layer top = builder.build_level(nf, 0, done);
    cc = std::move(top.clauses);
    res.megastep_bound = top.steps + 1;
  }

  SourceUnit out = unit;
  out.generated = true;
  out.decls.insert(out.decls.end(), builder.added.begin(), builder.added.end());
  out.program = Rule::cond(Term::neg(Term::app(done)), normal_form_to_rule(cc),
                           Rule::assign(done, {}, Term::false_lit()));
  elaborate(out);  // construction sanity
  res.unit = std::move(out);
  return res;
}

namespace {

long count_extrinsic(const TermPtr& t, const Vocabulary& vocab) {
  if (t->is_literal) return 0;
  long n = extrinsic_head(t, vocab) ? 1 : 0;
  for (const TermPtr& a : t->args) n += count_extrinsic(a, vocab);
  return n;
}

bool assignment_list(const RulePtr& body, std::vector<RulePtr>& out) {
  if (body->kind == Rule::Kind::Assign) {
    out.push_back(body);
    return true;
  }
  if (body->kind != Rule::Kind::Par) return false;
  for (const RulePtr& c : body->children) {
    if (c->kind != Rule::Kind::Assign) return false;
    out.push_back(c);
  }
  return true;
}

ClauseShape classify_clause(const TermPtr& guard, const std::vector<RulePtr>& assigns,
                            const Vocabulary& vocab) {
  ClauseShape shape;
  long total = count_extrinsic(guard, vocab);
  for (const RulePtr& a : assigns) {
    for (const TermPtr& arg : a->lhs_args) total += count_extrinsic(arg, vocab);
    total += count_extrinsic(a->rhs, vocab);
  }
  if (total == 0) {
    shape.kind = ClauseShape::Kind::Pure;
    return shape;
  }
  if (total == 1) {
    for (const RulePtr& a : assigns) {
      if (extrinsic_head(a->rhs, vocab)) {
        shape.kind = ClauseShape::Kind::Tainted;
        shape.query_symbol = a->rhs->head;
        shape.target = a->lhs_head;
        return shape;
      }
    }
  }
  shape.kind = ClauseShape::Kind::Invalid;
  return shape;
}

}  // namespace

Classification classify_serialized(const SourceUnit& unit) {
  Algorithm alg = elaborate(unit);
  const Vocabulary& vocab = *alg.vocab;
  Classification out;

  const RulePtr& top = unit.program;
  if (top->kind != Rule::Kind::Cond) return out;
  const TermPtr& g = top->guard;
  if (g->is_literal || g->head != logic::kNot || g->args[0]->is_literal ||
      !g->args[0]->args.empty())
    return out;
  std::string done = g->args[0]->head;
  const Symbol* done_sym = vocab.lookup(done);
  if (done_sym == nullptr || !done_sym->dynamic() || !done_sym->relational ||
      done_sym->arity != 0)
    return out;
  const RulePtr& reset = top->else_rule;
  if (reset->kind != Rule::Kind::Assign || reset->lhs_head != done ||
      !reset->lhs_args.empty() || !reset->rhs->is_literal || !reset->rhs->literal.is_false())
    return out;
  out.done_name = done;

  RulePtr r = top->then_rule;
  std::vector<std::pair<TermPtr, std::vector<RulePtr>>> clauses;
  while (r->kind == Rule::Kind::Cond) {
    std::vector<RulePtr> assigns;
    if (!assignment_list(r->then_rule, assigns)) return out;
    clauses.emplace_back(r->guard, std::move(assigns));
    r = r->else_rule;
  }
  if (r->kind != Rule::Kind::Par || !r->children.empty()) return out;

  out.wrapped = true;
  out.conforming = true;
  for (const auto& [guard, assigns] : clauses) {
    out.clauses.push_back(classify_clause(guard, assigns, vocab));
    if (out.clauses.back().kind == ClauseShape::Kind::Invalid) out.conforming = false;
  }
  return out;
}

Json classification_to_json(const Classification& c) {
  Json j;
  j["wrapped"] = c.wrapped;
  j["conforming"] = c.conforming;
  j["done"] = c.done_name;
  Json arr = Json::array();
  for (const ClauseShape& s : c.clauses) {
    Json e;
    switch (s.kind) {
      case ClauseShape::Kind::Pure:
        e["kind"] = "pure";
        break;
      case ClauseShape::Kind::Tainted:
        e["kind"] = "tainted";
        e["query"] = s.query_symbol;
        e["target"] = s.target;
        break;
      case ClauseShape::Kind::Invalid:
        e["kind"] = "invalid";
        break;
    }
    arr.push_back(std::move(e));
  }
  j["clauses"] = std::move(arr);
  return j;
}

}  // namespace asmw
