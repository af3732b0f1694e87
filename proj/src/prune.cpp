#include "asmw/prune.hpp"

#include <algorithm>
#include <functional>

#include "asmw/interp.hpp"
#include "asmw/serialize.hpp"

namespace asmw {

std::string member_prefix(std::size_t index) { return "$m" + std::to_string(index) + "_"; }

std::string call_flag_name(std::size_t member, std::size_t clause) {
  return "$call" + std::to_string(member) + "_" + std::to_string(clause);
}

BundleSpec bundle_spec_from_json(const Json& j) {
  BundleSpec spec;
  if (!j.is_object() || !j.contains("members") || !j["members"].is_array())
    throw CheckError("bundle: expected an object with a \"members\" array");
  for (const Json& m : j["members"]) {
    if (!m.is_string()) throw CheckError("bundle: member paths must be strings");
    spec.member_paths.push_back(m.get<std::string>());
  }
  if (j.contains("coverage")) {
    if (!j["coverage"].is_object()) throw CheckError("bundle: \"coverage\" must be an object");
    for (const auto& [sym, idx] : j["coverage"].items()) {
      if (!idx.is_number_unsigned()) throw CheckError("bundle: coverage of " + sym +
                                                      " must be a member index");
      spec.coverage[sym] = idx.get<std::size_t>();
    }
  }
  if (j.contains("passthrough")) {
    if (!j["passthrough"].is_array()) throw CheckError("bundle: \"passthrough\" must be an array");
    for (const Json& s : j["passthrough"]) {
      if (!s.is_string()) throw CheckError("bundle: passthrough entries must be strings");
      spec.passthrough.insert(s.get<std::string>());
    }
  }
  for (const auto& [sym, idx] : spec.coverage) {
    if (idx >= spec.member_paths.size())
      throw CheckError("bundle: coverage of " + sym + " names member " + std::to_string(idx) +
                       " but there are only " + std::to_string(spec.member_paths.size()));
    if (spec.passthrough.count(sym))
      throw CheckError("bundle: " + sym + " is both covered and passthrough");
  }
  return spec;
}

namespace {

TermPtr default_literal(const Symbol& s) {
  if (s.relational) return Term::false_lit();
  if (s.numerical) return Term::nat(0);
  return Term::nil_lit();
}

TermPtr succ_of(const TermPtr& t) { return Term::app("succ", {t}); }

bool occurs_in_unit(const SourceUnit& u, const std::string& name) {
  return rule_mentions(u.program, name);
}

// Session-indexed renaming of a member's dynamic symbols: d(args) becomes
// <prefix>d($n, args). Static and extrinsic symbols keep their names.
struct Renamer {
  std::map<std::string, std::string> map;
  TermPtr session = Term::app(machinery::kSession);

  TermPtr term(const TermPtr& t) const {
    if (t->is_literal) return t;
    std::vector<TermPtr> args;
    args.reserve(t->args.size() + 1);
    for (const TermPtr& a : t->args) args.push_back(term(a));
    auto it = map.find(t->head);
    if (it == map.end()) return Term::app(t->head, std::move(args));
    args.insert(args.begin(), session);
    return Term::app(it->second, std::move(args));
  }

  RulePtr rule(const RulePtr& r) const {
    switch (r->kind) {
      case Rule::Kind::Assign: {
        std::vector<TermPtr> largs;
        largs.reserve(r->lhs_args.size() + 1);
        for (const TermPtr& a : r->lhs_args) largs.push_back(term(a));
        TermPtr rhs = term(r->rhs);
        auto it = map.find(r->lhs_head);
        if (it == map.end()) return Rule::assign(r->lhs_head, std::move(largs), std::move(rhs));
        largs.insert(largs.begin(), session);
        return Rule::assign(it->second, std::move(largs), std::move(rhs));
      }
      case Rule::Kind::Cond:
        return Rule::cond(term(r->guard), rule(r->then_rule), rule(r->else_rule));
      case Rule::Kind::Par: {
        std::vector<RulePtr> children;
        children.reserve(r->children.size());
        for (const RulePtr& c : r->children) children.push_back(rule(c));
        return Rule::par(std::move(children));
      }
    }
    return r;
  }
};

std::vector<RulePtr> assigns_of(const RulePtr& body) {
  std::vector<RulePtr> out;
  if (body->kind == Rule::Kind::Assign) {
    out.push_back(body);
    return out;
  }
  for (const RulePtr& c : body->children) out.push_back(c);
  return out;
}

struct MemberInfo {
  SourceUnit unit;  // serialized
  Algorithm alg;
  Classification shape;
};

}  // namespace

PruneResult prune_bundle(const std::vector<SourceUnit>& members,
                         const std::map<std::string, std::size_t>& coverage,
                         const std::set<std::string>& passthrough,
                         const PruneOptions& options) {
  if (members.empty()) throw CheckError("bundle: no members");
  for (const auto& [sym, idx] : coverage) {
    if (idx >= members.size())
      throw CheckError("bundle: coverage of " + sym + " names a missing member");
    if (passthrough.count(sym))
      throw CheckError("bundle: " + sym + " is both covered and passthrough");
  }

  // Serialize (or verify) every member, then merge equal ones, keeping the
  // lowest index, and drop members no query resolves to.
  std::vector<SourceUnit> serial(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (options.assume_serialized) {
      serial[i] = members[i];
      Classification c = classify_serialized(members[i]);
      if (!c.wrapped || !c.conforming)
        throw CheckError("bundle: member " + std::to_string(i) +
                         " is not a query-serial cascade");
    } else {
      serial[i] = serialize_unit(members[i]).unit;
    }
  }
  std::vector<std::size_t> rep(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    rep[i] = i;
    for (std::size_t j = 0; j < i; ++j) {
      if (rep[j] == j && unit_equal(serial[j], serial[i])) {
        rep[i] = j;
        break;
      }
    }
  }
  std::set<std::size_t> live{0};
  for (const auto& [sym, idx] : coverage) live.insert(rep[idx]);
  std::map<std::size_t, std::size_t> new_index;
  PruneResult res;
  for (std::size_t orig : live) {
    new_index[orig] = res.member_origin.size();
    res.member_origin.push_back(orig);
  }
  for (const auto& [sym, idx] : coverage) res.coverage[sym] = new_index.at(rep[idx]);

  std::vector<MemberInfo> info;
  for (std::size_t orig : res.member_origin) {
    MemberInfo m;
    m.unit = serial[orig];
    m.alg = elaborate(m.unit);
    m.shape = classify_serialized(m.unit);
    info.push_back(std::move(m));
  }

  // Every query must be resolvable, every callee must take the queried
  // arguments as inputs and announce its result through an output variable.
  for (std::size_t i = 0; i < info.size(); ++i) {
    for (const Symbol& d : info[i].unit.decls) {
      if (!d.extrinsic) continue;
      bool covered = res.coverage.count(d.name) != 0;
      if (!covered && !passthrough.count(d.name) && occurs_in_unit(info[i].unit, d.name))
        throw CheckError("bundle: no member covers extrinsic " + d.name +
                         " queried by member " + std::to_string(i));
      if (covered) {
        const MemberInfo& callee = info[res.coverage.at(d.name)];
        if (static_cast<int>(callee.alg.inputs.size()) != d.arity)
          throw CheckError("bundle: " + d.name + " has arity " + std::to_string(d.arity) +
                           " but its member takes " +
                           std::to_string(callee.alg.inputs.size()) + " inputs");
      }
    }
  }
  if (!info[0].alg.output.has_value())
    throw CheckError("bundle: the entry member has no output variable");
  for (const auto& [sym, idx] : res.coverage) {
    if (!info[idx].alg.output.has_value())
      throw CheckError("bundle: member covering " + sym + " has no output variable");
  }

  // Combined vocabulary: the entry's own interface, the shared statics, the
  // session-indexed dynamics, and the call-stack bookkeeping.
  SourceUnit out;
  out.generated = true;
  out.uses_arithmetic = true;

  for (const MemberInfo& m : info) {
    for (const EnumDecl& e : m.unit.enums) {
      auto it = std::find_if(out.enums.begin(), out.enums.end(),
                             [&](const EnumDecl& o) { return o.name == e.name; });
      if (it == out.enums.end())
        out.enums.push_back(e);
      else if (it->elements != e.elements)
        throw CheckError("bundle: enum " + e.name + " declared with different elements");
    }
  }

  std::set<std::string> names;
  auto declare = [&](const Symbol& s) {
    if (!names.insert(s.name).second)
      throw CheckError("bundle: name clash on " + s.name);
    out.decls.push_back(s);
  };

  const Symbol entry_out = *info[0].alg.output;
  for (const Symbol& in : info[0].alg.inputs) declare(in);
  declare(entry_out);

  std::map<std::string, Symbol> statics;
  for (const MemberInfo& m : info) {
    for (const Symbol& d : m.unit.decls) {
      if (!d.static_) continue;
      if (d.extrinsic && !passthrough.count(d.name)) continue;  // resolved by calls or unused
      auto it = statics.find(d.name);
      if (it != statics.end()) {
        if (!it->second.same_declaration(d))
          throw CheckError("bundle: static " + d.name + " declared inconsistently");
        continue;
      }
      statics[d.name] = d;
      declare(d);
    }
  }

  auto table_repr = [](const TableDecl& t) {
    std::string s = t.default_value ? print_term(t.default_value) : "<partial>";
    for (const TableEntryDecl& e : t.entries) {
      s += "|";
      for (const TermPtr& a : e.args) s += print_term(a) + ",";
      s += "=" + print_term(e.value);
    }
    return s;
  };
  std::map<std::string, std::string> tables_seen;
  for (const MemberInfo& m : info) {
    for (const TableDecl& t : m.unit.tables) {
      auto it = tables_seen.find(t.symbol);
      if (it != tables_seen.end()) {
        if (it->second != table_repr(t))
          throw CheckError("bundle: table for " + t.symbol + " declared inconsistently");
        continue;
      }
      tables_seen[t.symbol] = table_repr(t);
      out.tables.push_back(t);
    }
  }

  std::vector<Renamer> renamers(info.size());
  for (std::size_t i = 0; i < info.size(); ++i) {
    for (const Symbol& d : info[i].unit.decls) {
      if (d.static_) continue;
      Symbol s;
      s.name = member_prefix(i) + d.name;
      s.arity = d.arity + 1;
      s.relational = d.relational;
      s.numerical = d.numerical;
      declare(s);
      renamers[i].map[d.name] = s.name;
    }
  }

  auto numerical0 = [](const char* name, int arity) {
    Symbol s;
    s.name = name;
    s.arity = arity;
    s.numerical = true;
    return s;
  };
  declare(numerical0(machinery::kTop, 0));
  declare(numerical0(machinery::kSession, 0));
  declare(numerical0(machinery::kMax, 0));
  {
    Symbol s;
    s.name = machinery::kInit;
    s.relational = true;
    declare(s);
  }
  declare(numerical0(machinery::kActive, 1));
  declare(numerical0(machinery::kTopAt, 1));
  declare(numerical0(machinery::kReturnTo, 1));
  {
    Symbol s;
    s.name = machinery::kAnswer;
    s.arity = 1;
    declare(s);
  }
  for (std::size_t i = 0; i < info.size(); ++i) {
    for (std::size_t k = 0; k < info[i].shape.clauses.size(); ++k) {
      const ClauseShape& c = info[i].shape.clauses[k];
      if (c.kind == ClauseShape::Kind::Tainted && res.coverage.count(c.query_symbol)) {
        Symbol s;
        s.name = call_flag_name(i, k);
        s.arity = 1;
        s.relational = true;
        declare(s);
      }
    }
  }

  TermPtr n_app = Term::app(machinery::kSession);
  TermPtr top_app = Term::app(machinery::kTop);
  TermPtr max_app = Term::app(machinery::kMax);

  // A pending query suspends the session: push the covering member, open a
  // fresh session with the query's arguments as inputs, and remember where
  // to deliver the answer. On resume, the staged oracle variable takes the
  // delivered answer instead and the clause completes as serialized.
  auto make_call = [&](const RulePtr& renamed_body, std::size_t caller, std::size_t clause,
                       std::size_t callee) -> RulePtr {
    const std::string& query_symbol = info[caller].shape.clauses[clause].query_symbol;
    std::vector<RulePtr> assigns = assigns_of(renamed_body);
    std::size_t query_at = assigns.size();
    for (std::size_t k = 0; k < assigns.size(); ++k) {
      const TermPtr& rhs = assigns[k]->rhs;
      if (!rhs->is_literal && rhs->head == query_symbol) {
        query_at = k;
        break;
      }
    }
    if (query_at == assigns.size())
      throw CheckError("bundle: lost track of the query in member " + std::to_string(caller));
    const RulePtr& query = assigns[query_at];
    const std::vector<TermPtr>& call_args = query->rhs->args;
    std::string flag = call_flag_name(caller, clause);

    std::vector<RulePtr> push;
    push.push_back(Rule::assign(machinery::kTop, {}, succ_of(top_app)));
    push.push_back(Rule::assign(machinery::kActive, {succ_of(top_app)},
                                Term::nat(static_cast<std::uint64_t>(callee))));
    push.push_back(Rule::assign(machinery::kSession, {}, succ_of(max_app)));
    push.push_back(Rule::assign(machinery::kMax, {}, succ_of(max_app)));
    push.push_back(Rule::assign(machinery::kTopAt, {succ_of(max_app)}, succ_of(top_app)));
    const std::vector<Symbol>& callee_inputs = info[callee].alg.inputs;
    for (std::size_t m = 0; m < callee_inputs.size(); ++m)
      push.push_back(Rule::assign(member_prefix(callee) + callee_inputs[m].name,
                                  {succ_of(max_app)}, call_args[m]));
    push.push_back(Rule::assign(machinery::kReturnTo, {succ_of(max_app)}, n_app));
    push.push_back(Rule::assign(flag, {n_app}, Term::true_lit()));

    std::vector<RulePtr> resume;
    resume.push_back(Rule::assign(query->lhs_head, query->lhs_args,
                                  Term::app(machinery::kAnswer, {n_app})));
    for (std::size_t k = 0; k < assigns.size(); ++k)
      if (k != query_at) resume.push_back(assigns[k]);
    resume.push_back(Rule::assign(flag, {n_app}, Term::false_lit()));

    RulePtr resumed = Rule::cond(Term::eq(Term::app(machinery::kTopAt, {n_app}), top_app),
                                 Rule::par(std::move(resume)), Rule::skip());
    return Rule::cond(Term::neg(Term::app(flag, {n_app})), Rule::par(std::move(push)),
                      std::move(resumed));
  };

  std::vector<RulePtr> member_programs;
  for (std::size_t i = 0; i < info.size(); ++i) {
    RulePtr renamed = renamers[i].rule(info[i].unit.program);
    // renamed = if not(done($n)) then cascade else done($n) := false
    const Classification& shape = info[i].shape;
    std::function<RulePtr(const RulePtr&, std::size_t)> walk =
        [&](const RulePtr& r, std::size_t k) -> RulePtr {
      if (r->kind != Rule::Kind::Cond) return r;
      RulePtr body = r->then_rule;
      const ClauseShape& c = shape.clauses.at(k);
      if (c.kind == ClauseShape::Kind::Tainted && res.coverage.count(c.query_symbol))
        body = make_call(body, i, k, res.coverage.at(c.query_symbol));
      return Rule::cond(r->guard, std::move(body), walk(r->else_rule, k + 1));
    };
    RulePtr cascade = walk(renamed->then_rule, 0);

    std::string done_renamed = renamers[i].map.at(shape.done_name);
    res.done_names.push_back(done_renamed);
    const Symbol member_out = *info[i].alg.output;
    TermPtr out_at_n = Term::app(renamers[i].map.at(member_out.name), {n_app});
    std::vector<RulePtr> pop;
    pop.push_back(Rule::assign(machinery::kTop, {}, Term::app("pred", {top_app})));
    pop.push_back(Rule::assign(machinery::kSession, {},
                               Term::app(machinery::kReturnTo, {n_app})));
    pop.push_back(Rule::assign(machinery::kAnswer,
                               {Term::app(machinery::kReturnTo, {n_app})}, out_at_n));
    RulePtr pop_rule = Rule::par(std::move(pop));
    RulePtr boundary;
    if (options.return_on_done) {
      boundary = pop_rule;
    } else {
      boundary = Rule::cond(Term::eq(out_at_n, default_literal(member_out)),
                            Rule::assign(done_renamed, {n_app}, Term::false_lit()), pop_rule);
    }
    member_programs.push_back(Rule::cond(renamed->guard, cascade, boundary));
  }

  std::vector<RulePtr> toil_members;
  for (std::size_t i = 0; i < info.size(); ++i)
    toil_members.push_back(Rule::cond(
        Term::eq(Term::app(machinery::kActive, {top_app}),
                 Term::nat(static_cast<std::uint64_t>(i))),
        member_programs[i], Rule::skip()));
  RulePtr toil = Rule::par(std::move(toil_members));

  std::vector<RulePtr> init;
  for (const Symbol& in : info[0].alg.inputs)
    init.push_back(Rule::assign(member_prefix(0) + in.name, {Term::nat(0)},
                                Term::app(in.name)));
  init.push_back(Rule::assign(machinery::kInit, {}, Term::true_lit()));

  TermPtr out0 = Term::app(renamers[0].map.at(entry_out.name), {Term::nat(0)});
  RulePtr finish = Rule::assign(entry_out.name, {}, out0);
  out.program = Rule::cond(
      Term::neg(Term::app(machinery::kInit)), Rule::par(std::move(init)),
      Rule::cond(Term::eq(out0, default_literal(entry_out)), toil, finish));

  Algorithm combined = elaborate(out);  // construction sanity
  res.effective = is_means_fit_effective(*combined.vocab);
  res.unit = std::move(out);
  return res;
}

}  // namespace asmw
