#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "asmw/value.hpp"

namespace asmw {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// A term is a literal (true/false/nil/numeral) or the application of a
// declared or logic function symbol. Terms are immutable and shared.
struct Term {
  bool is_literal = false;
  Value literal;           // valid when is_literal
  std::string head;        // valid when !is_literal
  std::vector<TermPtr> args;

  static TermPtr lit(Value v);
  static TermPtr app(std::string head, std::vector<TermPtr> args = {});

  // Convenience constructors for the logic symbols.
  static TermPtr ite(TermPtr c, TermPtr t, TermPtr e);
  static TermPtr eq(TermPtr a, TermPtr b);
  static TermPtr conj(TermPtr a, TermPtr b);
  static TermPtr disj(TermPtr a, TermPtr b);
  static TermPtr neg(TermPtr a);
  static TermPtr true_lit();
  static TermPtr false_lit();
  static TermPtr nil_lit();
  static TermPtr nat(std::uint64_t n);
};

bool term_equal(const TermPtr& a, const TermPtr& b);

// Canonical fully-parenthesized rendering; injective on well-formed terms, so
// it also serves as an ordering key in term-indexed maps.
std::string term_to_string(const TermPtr& t);

// True if t contains an application of `name` anywhere.
bool term_mentions(const TermPtr& t, const std::string& name);

struct Rule;
using RulePtr = std::shared_ptr<const Rule>;

// The three rule forms: assignment, conditional, n-ary parallel composition.
// Par with zero children is the no-op rule (empty update set); `skip` in the
// surface syntax.
struct Rule {
  enum class Kind { Assign, Cond, Par };
  Kind kind = Kind::Par;

  // Assign
  std::string lhs_head;
  std::vector<TermPtr> lhs_args;
  TermPtr rhs;

  // Cond
  TermPtr guard;
  RulePtr then_rule;
  RulePtr else_rule;

  // Par
  std::vector<RulePtr> children;

  static RulePtr assign(std::string head, std::vector<TermPtr> args, TermPtr rhs);
  static RulePtr cond(TermPtr guard, RulePtr then_rule, RulePtr else_rule);
  static RulePtr par(std::vector<RulePtr> children);
  static RulePtr skip();
};

bool rule_equal(const RulePtr& a, const RulePtr& b);
bool rule_mentions(const RulePtr& r, const std::string& name);

// Applies fn to every term of the rule (guards, lhs args, rhs), rebuilding
// only what changes.
RulePtr map_rule_terms(const RulePtr& r, const std::function<TermPtr(const TermPtr&)>& fn);

}  // namespace asmw
