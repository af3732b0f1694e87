#include "asmw/generate.hpp"

#include "asmw/interp.hpp"

namespace asmw {

namespace {

struct Fnv {
  std::uint64_t h = 14695981039346656037ULL;
  void byte(std::uint8_t b) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  void word(std::uint64_t w) {
    for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(w >> (8 * i)));
  }
  void str(const std::string& s) {
    for (char c : s) byte(static_cast<std::uint8_t>(c));
    byte(0);
  }
  void value(const Value& v) {
    byte(static_cast<std::uint8_t>(v.kind()));
    switch (v.kind()) {
      case Value::Kind::Natural:
        word(v.natural_value());
        break;
      case Value::Kind::Enum:
        str(v.enum_type());
        str(v.enum_element());
        break;
      default:
        break;
    }
  }
};

struct Gen {
  GenConfig cfg;
  std::mt19937_64 rng;

  std::vector<std::string> nat_vars;    // arity-0 numerical reads (inputs + scratch)
  std::vector<std::string> bool_vars;   // arity-0 relational scratch
  std::vector<std::string> plain_vars;  // arity-0 plain scratch
  std::vector<Symbol> nat_tables;
  std::vector<Symbol> bool_tables;
  std::vector<Symbol> dyn_unary;  // arity-1 scratch
  std::vector<Symbol> scratch;    // all writable dynamics
  std::vector<Symbol> extrinsics;

  explicit Gen(const GenConfig& c) : cfg(c), rng(c.seed) {}

  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  }
  bool coin(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

  TermPtr nat_term(int depth, bool ext);
  TermPtr bool_term(int depth, bool ext);
  TermPtr any_term(int depth, bool ext);
  TermPtr args_applied(const Symbol& s, int depth, bool ext) {
    std::vector<TermPtr> args;
    for (int i = 0; i < s.arity; ++i) args.push_back(nat_term(depth - 1, ext));
    return Term::app(s.name, std::move(args));
  }
  const Symbol* pick_extrinsic(bool relational, bool numerical) {
    std::vector<const Symbol*> fits;
    for (const Symbol& e : extrinsics)
      if (e.relational == relational && e.numerical == numerical) fits.push_back(&e);
    if (fits.empty()) return nullptr;
    return fits[pick(fits.size())];
  }
  RulePtr assign_rule(bool ext);
  RulePtr mixed_rule(int depth);
  RulePtr cascade_rule();
};

TermPtr Gen::nat_term(int depth, bool ext) {
  for (;;) {
    int c = depth <= 0 ? static_cast<int>(pick(2)) : static_cast<int>(pick(8));
    switch (c) {
      case 0:
        return Term::nat(pick(5));
      case 1:
        if (nat_vars.empty()) break;
        return Term::app(nat_vars[pick(nat_vars.size())]);
      case 2:
        return Term::app("succ", {nat_term(depth - 1, ext)});
      case 3:
        return Term::app("pred", {nat_term(depth - 1, ext)});
      case 4:
        if (nat_tables.empty()) break;
        return args_applied(nat_tables[pick(nat_tables.size())], depth, ext);
      case 5: {
        std::vector<const Symbol*> fits;
        for (const Symbol& d : dyn_unary)
          if (d.numerical) fits.push_back(&d);
        if (fits.empty()) break;
        return args_applied(*fits[pick(fits.size())], depth, ext);
      }
      case 6:
        return Term::ite(bool_term(depth - 1, ext), nat_term(depth - 1, false),
                         nat_term(depth - 1, false));
      case 7: {
        const Symbol* e = ext ? pick_extrinsic(false, true) : nullptr;
        if (e == nullptr) break;
        return args_applied(*e, depth, ext);
      }
    }
  }
}

TermPtr Gen::bool_term(int depth, bool ext) {
  for (;;) {
    int c = depth <= 0 ? static_cast<int>(pick(2)) : static_cast<int>(pick(9));
    switch (c) {
      case 0:
        return coin(0.5) ? Term::true_lit() : Term::false_lit();
      case 1:
        if (bool_vars.empty()) break;
        return Term::app(bool_vars[pick(bool_vars.size())]);
      case 2:
        return Term::eq(nat_term(depth - 1, ext), nat_term(depth - 1, ext));
      case 3: {
        TermPtr a = bool_term(depth - 1, ext);
        TermPtr b = bool_term(depth - 1, ext);
        return coin(0.5) ? Term::conj(a, b) : Term::disj(a, b);
      }
      case 4:
        return Term::neg(bool_term(depth - 1, ext));
      case 5:
        if (bool_tables.empty()) break;
        return args_applied(bool_tables[pick(bool_tables.size())], depth, ext);
      case 6: {
        std::vector<const Symbol*> fits;
        for (const Symbol& d : dyn_unary)
          if (d.relational) fits.push_back(&d);
        if (fits.empty()) break;
        return args_applied(*fits[pick(fits.size())], depth, ext);
      }
      case 7:
        return Term::ite(bool_term(depth - 1, ext), bool_term(depth - 1, false),
                         bool_term(depth - 1, false));
      case 8: {
        const Symbol* e = ext ? pick_extrinsic(true, false) : nullptr;
        if (e == nullptr) break;
        return args_applied(*e, depth, ext);
      }
    }
  }
}

TermPtr Gen::any_term(int depth, bool ext) {
  for (;;) {
    int c = static_cast<int>(pick(6));
    switch (c) {
      case 0:
      case 1:
        return nat_term(depth, ext);
      case 2:
        return bool_term(depth, ext);
      case 3:
        if (coin(0.5)) return Term::nil_lit();
        if (plain_vars.empty()) break;
        return Term::app(plain_vars[pick(plain_vars.size())]);
      case 4: {
        const Symbol* e = ext ? pick_extrinsic(false, false) : nullptr;
        if (e == nullptr) break;
        return args_applied(*e, depth, ext);
      }
      case 5:
        if (depth <= 0) break;
        return Term::ite(bool_term(depth - 1, ext), any_term(depth - 1, false),
                         any_term(depth - 1, false));
    }
  }
}

RulePtr Gen::assign_rule(bool ext) {
  const Symbol& s = scratch[pick(scratch.size())];
  std::vector<TermPtr> lhs;
  for (int i = 0; i < s.arity; ++i) lhs.push_back(nat_term(1, ext && coin(0.3)));
  TermPtr rhs;
  if (s.relational)
    rhs = bool_term(cfg.max_term_depth, ext);
  else if (s.numerical)
    rhs = nat_term(cfg.max_term_depth, ext);
  else
    rhs = any_term(cfg.max_term_depth, ext);
  return Rule::assign(s.name, std::move(lhs), std::move(rhs));
}

RulePtr Gen::mixed_rule(int depth) {
  if (depth <= 0 || coin(0.35)) return assign_rule(!extrinsics.empty());
  if (coin(0.5)) {
    TermPtr guard = bool_term(cfg.max_term_depth, cfg.guard_extrinsics && !extrinsics.empty());
    RulePtr then_rule = mixed_rule(depth - 1);
    RulePtr else_rule = coin(0.3) ? Rule::skip() : mixed_rule(depth - 1);
    return Rule::cond(std::move(guard), std::move(then_rule), std::move(else_rule));
  }
  std::vector<RulePtr> children;
  std::size_t width = 1 + pick(static_cast<std::size_t>(cfg.par_width));
  for (std::size_t i = 0; i < width; ++i) children.push_back(mixed_rule(depth - 1));
  return Rule::par(std::move(children));
}

RulePtr Gen::cascade_rule() {
  std::size_t clauses = 2 + pick(3);
  std::vector<std::pair<TermPtr, RulePtr>> list;
  for (std::size_t k = 0; k < clauses; ++k) {
    TermPtr guard = bool_term(cfg.max_term_depth, cfg.guard_extrinsics && !extrinsics.empty());
    std::vector<RulePtr> body;
    std::size_t width = 1 + pick(static_cast<std::size_t>(cfg.par_width));
    for (std::size_t i = 0; i < width; ++i) body.push_back(assign_rule(!extrinsics.empty()));
    RulePtr block = body.size() == 1 ? body.front() : Rule::par(std::move(body));
    list.emplace_back(std::move(guard), std::move(block));
  }
  RulePtr rest = Rule::skip();
  for (auto it = list.rbegin(); it != list.rend(); ++it)
    rest = Rule::cond(it->first, it->second, rest);
  return rest;
}

}  // namespace

SourceUnit generate_unit(const GenConfig& config) {
  Gen g(config);
  SourceUnit unit;
  unit.uses_arithmetic = true;

  for (int i = 1; i <= config.n_inputs; ++i) {
    Symbol s;
    s.name = "x" + std::to_string(i);
    s.numerical = true;
    s.io_role = IoRole::Input;
    s.input_pos = i;
    unit.decls.push_back(s);
    g.nat_vars.push_back(s.name);
  }
  if (config.with_output) {
    Symbol s;
    s.name = "out";
    s.io_role = IoRole::Output;
    unit.decls.push_back(s);
  }
  for (int i = 0; i < config.n_dynamic; ++i) {
    Symbol s;
    s.name = "d" + std::to_string(i);
    switch (i % 3) {
      case 0:
        s.numerical = true;
        break;
      case 1:
        s.relational = true;
        break;
      default:
        break;
    }
    s.arity = g.coin(0.4) ? 1 : 0;
    unit.decls.push_back(s);
    g.scratch.push_back(s);
    if (s.arity == 1) {
      g.dyn_unary.push_back(s);
    } else if (s.numerical) {
      g.nat_vars.push_back(s.name);
    } else if (s.relational) {
      g.bool_vars.push_back(s.name);
    } else {
      g.plain_vars.push_back(s.name);
    }
  }
  if (g.scratch.empty()) {
    Symbol s;
    s.name = "d0";
    unit.decls.push_back(s);
    g.scratch.push_back(s);
    g.plain_vars.push_back(s.name);
  }
  for (int i = 0; i < config.n_static_tables; ++i) {
    Symbol s;
    s.name = "s" + std::to_string(i);
    s.arity = 1;
    s.static_ = true;
    bool relational = i % 2 == 1;
    s.relational = relational;
    s.numerical = !relational;
    unit.decls.push_back(s);
    (relational ? g.bool_tables : g.nat_tables).push_back(s);

    TableDecl t;
    t.symbol = s.name;
    for (std::uint64_t a = 0; a < 5; ++a) {
      TableEntryDecl e;
      e.args = {Term::nat(a)};
      e.value = relational ? (g.coin(0.5) ? Term::true_lit() : Term::false_lit())
                           : Term::nat(g.pick(5));
      t.entries.push_back(std::move(e));
    }
    if (!(config.allow_partial_tables && g.coin(0.25)))
      t.default_value = relational ? Term::false_lit() : Term::nat(0);
    unit.tables.push_back(std::move(t));
  }
  for (int i = 0; i < config.n_extrinsic; ++i) {
    Symbol s;
    s.name = "e" + std::to_string(i);
    s.arity = 1 + static_cast<int>(g.pick(2));
    s.static_ = true;
    s.extrinsic = true;
    switch (i % 3) {
      case 0:
        s.numerical = true;
        break;
      case 1:
        s.relational = true;
        break;
      default:
        break;
    }
    unit.decls.push_back(s);
    g.extrinsics.push_back(s);
  }

  unit.program = config.cascade ? g.cascade_rule() : g.mixed_rule(config.max_rule_depth);
  elaborate(unit);  // generated units must always check
  return unit;
}

void add_scripted_responders(OracleEnv& env, const Vocabulary& vocab, std::uint64_t seed) {
  for (const Symbol& sym : vocab.symbols()) {
    if (!sym.extrinsic) continue;
    std::string name = sym.name;
    bool relational = sym.relational;
    bool numerical = sym.numerical;
    env.set_responder(name, [seed, name, relational, numerical](
                                const Args& args) -> std::optional<Value> {
      Fnv f;
      f.word(seed);
      f.str(name);
      for (const Value& v : args) f.value(v);
      if (relational) return Value::boolean((f.h & 1) != 0);
      if (numerical) return Value::natural(f.h % 5);
      switch (f.h % 7) {
        case 4:
          return Value::true_value();
        case 5:
          return Value::false_value();
        case 6:
          return Value::nil();
        default:
          return Value::natural((f.h >> 8) % 5);
      }
    });
  }
}

std::vector<Value> generate_inputs(const std::vector<Symbol>& inputs, std::mt19937_64& rng) {
  std::vector<Value> out;
  for (const Symbol& in : inputs) {
    if (in.relational) {
      out.push_back(Value::boolean(std::uniform_int_distribution<int>(0, 1)(rng) == 1));
    } else if (in.numerical) {
      out.push_back(Value::natural(std::uniform_int_distribution<std::uint64_t>(0, 6)(rng)));
    } else {
      out.push_back(Value::natural(std::uniform_int_distribution<std::uint64_t>(0, 6)(rng)));
    }
  }
  return out;
}

}  // namespace asmw
