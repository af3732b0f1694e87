#include "asmw/term.hpp"

#include <sstream>

#include "asmw/symbol.hpp"

namespace asmw {

TermPtr Term::lit(Value v) {
  auto t = std::make_shared<Term>();
  t->is_literal = true;
  t->literal = std::move(v);
  return t;
}

TermPtr Term::app(std::string head, std::vector<TermPtr> args) {
  auto t = std::make_shared<Term>();
  t->head = std::move(head);
  t->args = std::move(args);
  return t;
}

TermPtr Term::ite(TermPtr c, TermPtr t, TermPtr e) {
  return app(logic::kIte, {std::move(c), std::move(t), std::move(e)});
}
TermPtr Term::eq(TermPtr a, TermPtr b) { return app(logic::kEq, {std::move(a), std::move(b)}); }
TermPtr Term::conj(TermPtr a, TermPtr b) { return app(logic::kAnd, {std::move(a), std::move(b)}); }
TermPtr Term::disj(TermPtr a, TermPtr b) { return app(logic::kOr, {std::move(a), std::move(b)}); }
TermPtr Term::neg(TermPtr a) { return app(logic::kNot, {std::move(a)}); }
TermPtr Term::true_lit() { return lit(Value::true_value()); }
TermPtr Term::false_lit() { return lit(Value::false_value()); }
TermPtr Term::nil_lit() { return lit(Value::nil()); }
TermPtr Term::nat(std::uint64_t n) { return lit(Value::natural(n)); }

bool term_equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->is_literal != b->is_literal) return false;
  if (a->is_literal) return a->literal == b->literal;
  if (a->head != b->head || a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!term_equal(a->args[i], b->args[i])) return false;
  return true;
}

static void term_to_stream(const TermPtr& t, std::ostringstream& out) {
  if (t->is_literal) {
    out << t->literal.to_string();
    return;
  }
  out << t->head;
  if (!t->args.empty()) {
    out << '(';
    for (std::size_t i = 0; i < t->args.size(); ++i) {
      if (i) out << ", ";
      term_to_stream(t->args[i], out);
    }
    out << ')';
  }
}

std::string term_to_string(const TermPtr& t) {
  std::ostringstream out;
  term_to_stream(t, out);
  return out.str();
}

bool term_mentions(const TermPtr& t, const std::string& name) {
  if (t->is_literal) return false;
  if (t->head == name) return true;
  for (const auto& a : t->args)
    if (term_mentions(a, name)) return true;
  return false;
}

RulePtr Rule::assign(std::string head, std::vector<TermPtr> args, TermPtr rhs) {
  auto r = std::make_shared<Rule>();
  r->kind = Kind::Assign;
  r->lhs_head = std::move(head);
  r->lhs_args = std::move(args);
  r->rhs = std::move(rhs);
  return r;
}

RulePtr Rule::cond(TermPtr guard, RulePtr then_rule, RulePtr else_rule) {
  auto r = std::make_shared<Rule>();
  r->kind = Kind::Cond;
  r->guard = std::move(guard);
  r->then_rule = std::move(then_rule);
  r->else_rule = std::move(else_rule);
  return r;
}

RulePtr Rule::par(std::vector<RulePtr> children) {
  auto r = std::make_shared<Rule>();
  r->kind = Kind::Par;
  r->children = std::move(children);
  return r;
}

RulePtr Rule::skip() { return par({}); }

bool rule_equal(const RulePtr& a, const RulePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Rule::Kind::Assign: {
      if (a->lhs_head != b->lhs_head || a->lhs_args.size() != b->lhs_args.size()) return false;
      for (std::size_t i = 0; i < a->lhs_args.size(); ++i)
        if (!term_equal(a->lhs_args[i], b->lhs_args[i])) return false;
      return term_equal(a->rhs, b->rhs);
    }
    case Rule::Kind::Cond:
      return term_equal(a->guard, b->guard) && rule_equal(a->then_rule, b->then_rule) &&
             rule_equal(a->else_rule, b->else_rule);
    case Rule::Kind::Par: {
      if (a->children.size() != b->children.size()) return false;
      for (std::size_t i = 0; i < a->children.size(); ++i)
        if (!rule_equal(a->children[i], b->children[i])) return false;
      return true;
    }
  }
  return false;
}

bool rule_mentions(const RulePtr& r, const std::string& name) {
  switch (r->kind) {
    case Rule::Kind::Assign: {
      if (r->lhs_head == name) return true;
      for (const auto& a : r->lhs_args)
        if (term_mentions(a, name)) return true;
      return term_mentions(r->rhs, name);
    }
    case Rule::Kind::Cond:
      return term_mentions(r->guard, name) || rule_mentions(r->then_rule, name) ||
             rule_mentions(r->else_rule, name);
    case Rule::Kind::Par: {
      for (const auto& c : r->children)
        if (rule_mentions(c, name)) return true;
      return false;
    }
  }
  return false;
}

RulePtr map_rule_terms(const RulePtr& r, const std::function<TermPtr(const TermPtr&)>& fn) {
  switch (r->kind) {
    case Rule::Kind::Assign: {
      std::vector<TermPtr> args;
      args.reserve(r->lhs_args.size());
      for (const auto& a : r->lhs_args) args.push_back(fn(a));
      return Rule::assign(r->lhs_head, std::move(args), fn(r->rhs));
    }
    case Rule::Kind::Cond:
      return Rule::cond(fn(r->guard), map_rule_terms(r->then_rule, fn),
                        map_rule_terms(r->else_rule, fn));
    case Rule::Kind::Par: {
      std::vector<RulePtr> children;
      children.reserve(r->children.size());
      for (const auto& c : r->children) children.push_back(map_rule_terms(c, fn));
      return Rule::par(std::move(children));
    }
  }
  return r;
}

}  // namespace asmw
