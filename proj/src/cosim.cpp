#include "asmw/cosim.hpp"

#include <cctype>
#include <optional>
#include <random>
#include <utility>

#include "asmw/eval.hpp"
#include "asmw/interp.hpp"
#include "asmw/normalize.hpp"

namespace asmw {

namespace {

using TraceKey = std::pair<std::string, Args>;
using TraceMap = std::map<TraceKey, Value>;

Json key_json(const TraceKey& key) {
  Json args = Json::array();
  for (const Value& v : key.second) args.push_back(value_to_json(v));
  return Json{{"symbol", key.first}, {"args", args}};
}

Json trace_map_json(const TraceMap& m) {
  Json out = Json::array();
  for (const auto& [key, value] : m) {
    Json e = key_json(key);
    e["value"] = value_to_json(value);
    out.push_back(e);
  }
  return out;
}

Json problem_json(const std::optional<EvalProblem>& p) {
  if (!p) return Json();
  return Json(p->to_string());
}

struct Evald {
  std::optional<Value> value;
  std::optional<EvalProblem> problem;
};

Evald try_eval(const State& state, const OracleEnv& env, const TermPtr& term) {
  Evald out;
  EvalTrace scratch;
  try {
    out.value = eval_term(state, env, term, scratch);
  } catch (const EvalProblem& p) {
    out.problem = p;
  }
  return out;
}

void collect_program_terms(const RulePtr& r, std::vector<TermPtr>& out) {
  if (!r) return;
  switch (r->kind) {
    case Rule::Kind::Assign:
      for (const TermPtr& a : r->lhs_args) out.push_back(a);
      out.push_back(r->rhs);
      break;
    case Rule::Kind::Cond:
      out.push_back(r->guard);
      collect_program_terms(r->then_rule, out);
      collect_program_terms(r->else_rule, out);
      break;
    case Rule::Kind::Par:
      for (const RulePtr& c : r->children) collect_program_terms(c, out);
      break;
  }
}

}  // namespace

void VerifyReport::fail(const std::string& what, Json info) {
  if (!ok) return;
  ok = false;
  details["what"] = what;
  details["info"] = std::move(info);
}

VerifyReport verify_separation(const SourceUnit& original, const SeparationResult& sep,
                               const std::vector<Value>& inputs, const OracleEnv& env,
                               long max_steps) {
  VerifyReport rep;
  Algorithm a = elaborate(original);
  Algorithm b = elaborate(sep.unit);

  std::map<std::string, const SeparationEntry*> by_f;
  for (const SeparationEntry& e : sep.cert.renamed) by_f[e.f] = &e;

  // Probe pool: every term of the source program paired with its image.
  std::vector<TermPtr> raw;
  collect_program_terms(original.program, raw);
  std::vector<std::pair<TermPtr, TermPtr>> probes;
  {
    std::set<std::string> seen;
    for (const TermPtr& t : raw) {
      if (!seen.insert(term_to_string(t)).second) continue;
      TermPtr image = t;
      for (const SeparationEntry& e : sep.cert.renamed) image = separate_rewrite_term(image, e);
      probes.emplace_back(t, image);
      if (probes.size() >= 200) break;
    }
  }

  State sa = initial_state(a, inputs);
  State sb = initial_state(b, inputs);

  auto mapped_updates = [&](const UpdateSet& us) {
    UpdateSet out;
    for (const Update& u : us) {
      auto it = by_f.find(u.loc.symbol);
      if (it == by_f.end()) {
        out.insert(u);
        continue;
      }
      out.insert(Update{Location{it->second->d, u.loc.args}, u.value});
      out.insert(Update{Location{it->second->delta, u.loc.args}, Value::true_value()});
    }
    return out;
  };

  // On every tuple touched on either side, claim(x) must pick the branch that
  // equals the source function.
  auto pointwise_ok = [&](long at) {
    for (const SeparationEntry& e : sep.cert.renamed) {
      const Symbol* fs = a.vocab->lookup(e.f);
      const Symbol* ds = b.vocab->lookup(e.d);
      const Symbol* cs = b.vocab->lookup(e.delta);
      auto ti = b.data->tables.find(e.s);
      if (!fs || !ds || !cs || ti == b.data->tables.end()) {
        rep.fail("separation: renamed symbol missing", Json{{"function", e.f}, {"step", at}});
        return false;
      }
      std::set<Args> touched;
      for (const auto& [args, v] : sa.overrides(e.f)) touched.insert(args);
      for (const auto& [args, v] : sb.overrides(e.d)) touched.insert(args);
      for (const auto& [args, v] : sb.overrides(e.delta)) touched.insert(args);
      for (const Args& args : touched) {
        Value fv = sa.read_dynamic(*fs, args);
        Value cv = sb.read_dynamic(*cs, args);
        if (!cv.is_boolean()) {
          rep.fail("separation: claim flag holds a non-boolean",
                   Json{{"function", e.f}, {"step", at}, {"value", value_to_json(cv)}});
          return false;
        }
        Value split;
        if (cv.is_true()) {
          split = sb.read_dynamic(*ds, args);
        } else {
          auto sv = ti->second.eval(args);
          if (!sv) {
            rep.fail("separation: snapshot table is not total",
                     Json{{"function", e.f}, {"step", at}});
            return false;
          }
          split = *sv;
        }
        if (!(split == fv)) {
          Json jargs = Json::array();
          for (const Value& v : args) jargs.push_back(value_to_json(v));
          rep.fail("separation: split disagrees with the source function",
                   Json{{"function", e.f},
                        {"step", at},
                        {"args", jargs},
                        {"source", value_to_json(fv)},
                        {"split", value_to_json(split)}});
          return false;
        }
      }
    }
    return true;
  };

  auto probes_ok = [&](long at) {
    for (const auto& [ta, tb] : probes) {
      Evald ea = try_eval(sa, env, ta);
      Evald eb = try_eval(sb, env, tb);
      bool same;
      if (ea.value && eb.value) {
        same = *ea.value == *eb.value;
      } else if (ea.problem && eb.problem) {
        same = ea.problem->kind == eb.problem->kind && ea.problem->symbol == eb.problem->symbol &&
               ea.problem->args == eb.problem->args;
      } else {
        same = false;
      }
      if (!same) {
        rep.fail("separation: a program term evaluates differently after the rewrite",
                 Json{{"step", at},
                      {"term", print_term(ta)},
                      {"image", print_term(tb)},
                      {"source", ea.value ? value_to_json(*ea.value) : problem_json(ea.problem)},
                      {"renamed", eb.value ? value_to_json(*eb.value) : problem_json(eb.problem)}});
        return false;
      }
    }
    return true;
  };

  // Footprint correspondence: reads of f become claim reads plus exactly one
  // branch read; everything else matches verbatim.
  auto traces_ok = [&](const EvalTrace& ta, const EvalTrace& tb, long at) {
    std::set<std::string> snapshot_names;
    std::set<std::string> branch_names;
    for (const SeparationEntry& e : sep.cert.renamed) {
      snapshot_names.insert(e.s);
      branch_names.insert(e.d);
      branch_names.insert(e.delta);
    }

    TraceMap da, db;
    for (const auto& kv : ta.dynamic_reads)
      if (!by_f.count(kv.first.first)) da.insert(kv);
    for (const auto& kv : tb.dynamic_reads)
      if (!branch_names.count(kv.first.first)) db.insert(kv);
    if (!(da == db)) {
      rep.fail("separation: residual dynamic reads differ", Json{{"step", at}});
      return false;
    }

    TraceMap ea, eb;
    for (const auto& kv : ta.static_evals) ea.insert(kv);
    for (const auto& kv : tb.static_evals)
      if (!snapshot_names.count(kv.first.first)) eb.insert(kv);
    if (!(ea == eb)) {
      rep.fail("separation: residual static evaluations differ", Json{{"step", at}});
      return false;
    }

    if (!(ta.extrinsic_queries == tb.extrinsic_queries)) {
      rep.fail("separation: query footprints differ",
               Json{{"step", at},
                    {"source", trace_map_json(ta.extrinsic_queries)},
                    {"renamed", trace_map_json(tb.extrinsic_queries)}});
      return false;
    }

    for (const SeparationEntry& e : sep.cert.renamed) {
      std::map<Args, Value> fa, dr, cr, sr;
      for (const auto& kv : ta.dynamic_reads)
        if (kv.first.first == e.f) fa[kv.first.second] = kv.second;
      for (const auto& kv : tb.dynamic_reads) {
        if (kv.first.first == e.d) dr[kv.first.second] = kv.second;
        if (kv.first.first == e.delta) cr[kv.first.second] = kv.second;
      }
      for (const auto& kv : tb.static_evals)
        if (kv.first.first == e.s) sr[kv.first.second] = kv.second;

      auto keys = [](const std::map<Args, Value>& m) {
        std::set<Args> k;
        for (const auto& kv : m) k.insert(kv.first);
        return k;
      };
      if (keys(cr) != keys(fa)) {
        rep.fail("separation: claim reads do not match source reads",
                 Json{{"function", e.f}, {"step", at}});
        return false;
      }
      std::size_t branch_reads = 0;
      for (const auto& [args, fv] : fa) {
        const Value& cv = cr.at(args);
        if (cv.is_true()) {
          auto di = dr.find(args);
          if (di == dr.end() || !(di->second == fv)) {
            rep.fail("separation: claimed read did not come from the dynamic part",
                     Json{{"function", e.f}, {"step", at}});
            return false;
          }
          ++branch_reads;
        } else {
          auto si = sr.find(args);
          if (si == sr.end() || !(si->second == fv)) {
            rep.fail("separation: unclaimed read did not come from the snapshot",
                     Json{{"function", e.f}, {"step", at}});
            return false;
          }
          ++branch_reads;
        }
      }
      if (dr.size() + sr.size() != branch_reads) {
        rep.fail("separation: stray branch reads", Json{{"function", e.f}, {"step", at}});
        return false;
      }
    }
    return true;
  };

  auto failures_match = [&](const StepRecord& ra, const StepRecord& rb) {
    if (!ra.problem || !rb.problem) return false;
    const EvalProblem& pa = *ra.problem;
    const EvalProblem& pb = *rb.problem;
    if (pa.kind != pb.kind) return false;
    switch (pa.kind) {
      case EvalProblem::Kind::Undefined:
      case EvalProblem::Kind::OracleNoAnswer:
        return pa.symbol == pb.symbol && pa.args == pb.args;
      case EvalProblem::Kind::GuardNotBoolean:
        return pa.value == pb.value;
      case EvalProblem::Kind::Contradiction:
        return mapped_updates(ra.updates) == rb.updates;
    }
    return false;
  };

  for (long i = 0; i < max_steps; ++i) {
    if (!pointwise_ok(i) || !probes_ok(i)) return rep;
    StepRecord ra = step(a, sa, env, i);
    StepRecord rb = step(b, sb, env, i);
    rep.cases += 1;
    if (ra.outcome != rb.outcome) {
      rep.fail("separation: step outcomes differ",
               Json{{"step", i},
                    {"source", outcome_name(ra.outcome)},
                    {"renamed", outcome_name(rb.outcome)}});
      return rep;
    }
    if (ra.outcome == StepRecord::Outcome::Advanced) {
      UpdateSet want = mapped_updates(ra.updates);
      if (!(want == rb.updates)) {
        rep.fail("separation: update sets do not correspond",
                 Json{{"step", i},
                      {"expected", update_set_to_json(want)},
                      {"renamed", update_set_to_json(rb.updates)}});
        return rep;
      }
      if (!traces_ok(ra.trace, rb.trace, i)) return rep;
      if (a.output) {
        Value av = sa.read_dynamic(*a.output, {});
        if (av != a.output->default_value()) {
          Value bv = sb.read_dynamic(*a.output, {});
          if (!(av == bv)) {
            rep.fail("separation: outputs differ",
                     Json{{"step", i},
                          {"source", value_to_json(av)},
                          {"renamed", value_to_json(bv)}});
            return rep;
          }
          break;
        }
      }
    } else {
      if (!failures_match(ra, rb)) {
        rep.fail("separation: failures differ",
                 Json{{"step", i},
                      {"source", problem_json(ra.problem)},
                      {"renamed", problem_json(rb.problem)}});
      }
      return rep;
    }
  }
  if (rep.ok) {
    if (pointwise_ok(max_steps)) probes_ok(max_steps);
  }
  return rep;
}

VerifyReport verify_normalization(const SourceUnit& original, const SourceUnit& normalized,
                                  const OracleEnv& env, std::uint64_t seed, int state_budget) {
  VerifyReport rep;
  if (state_budget < 1) state_budget = 1;
  Algorithm a = elaborate(original);
  Algorithm n = elaborate(normalized);
  std::mt19937_64 rng(seed);

  struct Dim {
    Symbol sym;
    std::vector<Value> domain;
  };
  std::vector<Dim> dims;
  std::vector<Symbol> applied;
  for (const Symbol& s : a.vocab->symbols()) {
    if (s.static_) continue;
    if (!rule_mentions(original.program, s.name) && !rule_mentions(normalized.program, s.name))
      continue;
    if (s.arity == 0) {
      Dim d{s, {}};
      if (s.relational)
        d.domain = {Value::false_value(), Value::true_value()};
      else if (s.numerical)
        d.domain = {Value::natural(0), Value::natural(1), Value::natural(2)};
      else
        d.domain = {Value::nil(), Value::natural(0), Value::true_value()};
      dims.push_back(std::move(d));
    } else {
      applied.push_back(s);
    }
  }

  double total = 1;
  for (const Dim& d : dims) total *= static_cast<double>(d.domain.size());
  std::vector<std::vector<std::size_t>> tuples;
  if (total <= static_cast<double>(state_budget)) {
    std::vector<std::size_t> cur(dims.size(), 0);
    while (true) {
      tuples.push_back(cur);
      std::size_t i = 0;
      for (; i < dims.size(); ++i) {
        if (++cur[i] < dims[i].domain.size()) break;
        cur[i] = 0;
      }
      if (i == dims.size()) break;
    }
  } else {
    std::set<std::vector<std::size_t>> chosen;
    int attempts = 0;
    while (static_cast<int>(chosen.size()) < state_budget && attempts < state_budget * 20) {
      std::vector<std::size_t> t;
      t.reserve(dims.size());
      for (const Dim& d : dims) t.push_back(rng() % d.domain.size());
      chosen.insert(std::move(t));
      ++attempts;
    }
    tuples.assign(chosen.begin(), chosen.end());
  }

  for (const auto& tuple : tuples) {
    State base(a.vocab, a.data);
    for (std::size_t i = 0; i < dims.size(); ++i)
      base.write_dynamic(dims[i].sym, {}, dims[i].domain[tuple[i]]);
    for (const Symbol& s : applied) {
      for (std::uint64_t arg = 0; arg <= 2; ++arg) {
        if (rng() % 2 == 0) continue;
        Args args(static_cast<std::size_t>(s.arity), Value::natural(arg));
        Value v = s.relational  ? Value::boolean(rng() % 2 == 0)
                  : s.numerical ? Value::natural(rng() % 5)
                                : Value::natural(rng() % 3);
        base.write_dynamic(s, args, v);
      }
    }

    State sa = base;
    State sn = base;
    StepRecord ra = step(a, sa, env, 0);
    StepRecord rn = step(n, sn, env, 0);
    rep.cases += 1;

    auto state_json = [&]() {
      Json st = Json::object();
      for (const std::string& name : base.informative_symbols()) {
        Json locs = Json::array();
        for (const auto& [args, v] : base.overrides(name)) {
          Json jargs = Json::array();
          for (const Value& av : args) jargs.push_back(value_to_json(av));
          locs.push_back(Json{{"args", jargs}, {"value", value_to_json(v)}});
        }
        st[name] = locs;
      }
      return st;
    };

    if (ra.outcome == StepRecord::Outcome::Advanced) {
      if (rn.outcome != StepRecord::Outcome::Advanced) {
        rep.fail("normalization: flat program did not advance where the source did",
                 Json{{"state", state_json()}, {"problem", problem_json(rn.problem)}});
        return rep;
      }
      if (!(ra.updates == rn.updates)) {
        rep.fail("normalization: update sets differ",
                 Json{{"state", state_json()},
                      {"source", update_set_to_json(ra.updates)},
                      {"flat", update_set_to_json(rn.updates)}});
        return rep;
      }
      if (!(ra.trace.static_evals == rn.trace.static_evals) ||
          !(ra.trace.extrinsic_queries == rn.trace.extrinsic_queries) ||
          !(ra.trace.dynamic_reads == rn.trace.dynamic_reads)) {
        rep.fail("normalization: evaluation footprints differ",
                 Json{{"state", state_json()},
                      {"source", trace_to_json(ra.trace)},
                      {"flat", trace_to_json(rn.trace)}});
        return rep;
      }
    } else {
      if (rn.outcome == StepRecord::Outcome::Advanced) {
        rep.fail("normalization: flat program advanced where the source did not",
                 Json{{"state", state_json()}, {"problem", problem_json(ra.problem)}});
        return rep;
      }
      if (ra.outcome != rn.outcome) {
        rep.fail("normalization: abnormal outcome classes differ",
                 Json{{"state", state_json()},
                      {"source", outcome_name(ra.outcome)},
                      {"flat", outcome_name(rn.outcome)}});
        return rep;
      }
      if (ra.outcome == StepRecord::Outcome::StuckOnOracle) {
        if (!ra.problem || !rn.problem || ra.problem->symbol != rn.problem->symbol ||
            !(ra.problem->args == rn.problem->args)) {
          rep.fail("normalization: stuck on different queries",
                   Json{{"state", state_json()},
                        {"source", problem_json(ra.problem)},
                        {"flat", problem_json(rn.problem)}});
          return rep;
        }
      }
      // Failure kinds may differ: guard merging can surface a different
      // witness of the same bad state.
    }
  }
  return rep;
}

VerifyReport verify_serialization(const SourceUnit& original, const SerializeResult& ser,
                                  const std::vector<Value>& inputs, const OracleEnv& env,
                                  long megasteps) {
  VerifyReport rep;
  Algorithm a = elaborate(original);
  Algorithm s = elaborate(ser.unit);
  const Symbol* done = s.vocab->lookup(ser.done_name);
  if (!done) {
    rep.fail("serialization: round flag not declared", Json{{"name", ser.done_name}});
    return rep;
  }

  State sa = initial_state(a, inputs);
  State ss = initial_state(s, inputs);

  for (long m = 0; m < megasteps; ++m) {
    StepRecord ra = step(a, sa, env, m);

    TraceMap queries;
    std::optional<StepRecord> bad;
    bool boundary = false;
    long used = 0;
    while (used < ser.megastep_bound) {
      StepRecord r = step(s, ss, env, used);
      ++used;
      if (r.trace.extrinsic_queries.size() > 1) {
        rep.fail("serialization: more than one distinct query in a single step",
                 Json{{"round", m},
                      {"substep", used},
                      {"queries", trace_map_json(r.trace.extrinsic_queries)}});
        return rep;
      }
      if (r.outcome != StepRecord::Outcome::Advanced) {
        bad = r;
        break;
      }
      for (const auto& kv : r.trace.extrinsic_queries) queries.insert(kv);
      if (ss.read_dynamic(*done, {}).is_true()) {
        boundary = true;
        break;
      }
    }

    rep.cases += 1;
    if (ra.outcome == StepRecord::Outcome::Advanced) {
      if (bad) {
        rep.fail("serialization: round broke down where the source advanced",
                 Json{{"round", m}, {"problem", problem_json(bad->problem)}});
        return rep;
      }
      if (!boundary) {
        rep.fail("serialization: round did not finish within the declared bound",
                 Json{{"round", m}, {"bound", ser.megastep_bound}});
        return rep;
      }
      for (const Symbol& sym : a.vocab->symbols()) {
        if (sym.static_) continue;
        if (!(sa.overrides(sym.name) == ss.overrides(sym.name))) {
          rep.fail("serialization: states differ at the round boundary",
                   Json{{"round", m}, {"symbol", sym.name}});
          return rep;
        }
      }
      if (!(queries == ra.trace.extrinsic_queries)) {
        rep.fail("serialization: per-round queries differ",
                 Json{{"round", m},
                      {"source", trace_map_json(ra.trace.extrinsic_queries)},
                      {"round_union", trace_map_json(queries)}});
        return rep;
      }
      if (a.output) {
        Value av = sa.read_dynamic(*a.output, {});
        if (av != a.output->default_value()) break;
      }
    } else {
      if (!bad) {
        rep.fail("serialization: round ran to completion where the source did not",
                 Json{{"round", m}, {"source", problem_json(ra.problem)}});
        return rep;
      }
      if (ra.outcome != bad->outcome) {
        rep.fail("serialization: abnormal outcome classes differ",
                 Json{{"round", m},
                      {"source", outcome_name(ra.outcome)},
                      {"combined", outcome_name(bad->outcome)}});
        return rep;
      }
      if (ra.outcome == StepRecord::Outcome::Failed) {
        const EvalProblem& pa = *ra.problem;
        const EvalProblem& pb = *bad->problem;
        bool same = pa.kind == pb.kind;
        if (same && pa.kind == EvalProblem::Kind::Contradiction)
          same = pa.symbol == pb.symbol && pa.args == pb.args && pa.value == pb.value &&
                 pa.second_value == pb.second_value;
        if (same && pa.kind == EvalProblem::Kind::GuardNotBoolean) same = pa.value == pb.value;
        if (!same) {
          rep.fail("serialization: failures differ",
                   Json{{"round", m},
                        {"source", problem_json(ra.problem)},
                        {"combined", problem_json(bad->problem)}});
        }
      } else {
        if (!ra.problem || !bad->problem || ra.problem->symbol != bad->problem->symbol ||
            !(ra.problem->args == bad->problem->args)) {
          rep.fail("serialization: stuck on different queries",
                   Json{{"round", m},
                        {"source", problem_json(ra.problem)},
                        {"combined", problem_json(bad->problem)}});
        }
      }
      return rep;
    }
  }
  return rep;
}

namespace {

bool member_indexed_name(const std::string& name, std::size_t& index) {
  if (name.size() < 4 || name[0] != '$' || name[1] != 'm') return false;
  std::size_t i = 2;
  while (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i]))) ++i;
  if (i == 2 || i >= name.size() || name[i] != '_') return false;
  index = std::stoull(name.substr(2, i - 2));
  return true;
}

}  // namespace

VerifyReport verify_pruning(const std::vector<SourceUnit>& members,
                            const std::map<std::string, std::size_t>& coverage,
                            const std::set<std::string>& passthrough, const PruneResult& pruned,
                            const std::vector<Value>& inputs, const OracleEnv& outside,
                            long ref_steps, int max_depth, long combined_steps) {
  (void)passthrough;
  VerifyReport rep;

  DispatchBundle bundle;
  for (const SourceUnit& u : members) bundle.members.push_back(elaborate(u));
  bundle.coverage = coverage;
  bundle.passthrough = &outside;

  RunResult ref;
  try {
    ref = oracle_dispatch_run(bundle, 0, inputs, ref_steps, max_depth);
  } catch (const DepthExceeded&) {
    rep.skipped += 1;
    rep.details["note"] = "reference dispatch exceeded its recursion depth";
    return rep;
  }
  if (ref.status == RunStatus::BudgetExhausted) {
    rep.skipped += 1;
    rep.details["note"] = "reference dispatch exhausted its step budget";
    return rep;
  }

  Algorithm b = elaborate(pruned.unit);
  if (!bundle.members[0].output) {
    rep.fail("pruning: entry member declares no output");
    return rep;
  }
  std::string entry_out = member_prefix(0) + bundle.members[0].output->name;
  const Symbol* out0 = b.vocab->lookup(entry_out);
  const Symbol* top_s = b.vocab->lookup(machinery::kTop);
  const Symbol* n_s = b.vocab->lookup(machinery::kSession);
  const Symbol* max_s = b.vocab->lookup(machinery::kMax);
  const Symbol* init_s = b.vocab->lookup(machinery::kInit);
  const Symbol* active_s = b.vocab->lookup(machinery::kActive);
  const Symbol* topat_s = b.vocab->lookup(machinery::kTopAt);
  if (!out0 || !top_s || !n_s || !max_s || !init_s || !active_s || !topat_s) {
    rep.fail("pruning: combined unit lacks the stack machinery");
    return rep;
  }
  Value out_default = bundle.members[0].output->default_value();
  std::size_t member_count = pruned.member_origin.size();

  std::vector<std::string> violations;
  RunOptions opts;
  opts.max_steps = combined_steps;
  opts.observer = [&](const State& pre, const StepRecord& rec) {
    if (violations.size() >= 5) return;
    Value vt = pre.read_dynamic(*top_s, {});
    Value vm = pre.read_dynamic(*max_s, {});
    Value vn = pre.read_dynamic(*n_s, {});
    std::string at = " at step " + std::to_string(rec.index);
    if (!vt.is_natural() || !vm.is_natural() || !vn.is_natural()) {
      violations.push_back("stack counters hold non-numbers" + at);
      return;
    }
    if (vt.natural_value() > vm.natural_value())
      violations.push_back("stack level above the session high-water mark" + at);
    if (pre.read_dynamic(*init_s, {}).is_true()) {
      Value delivered = pre.read_dynamic(*out0, {Value::natural(0)});
      if (!(delivered == out_default)) {
        if (vt.natural_value() != 0)
          violations.push_back("stack not empty while delivering the output" + at);
      } else {
        Value act = pre.read_dynamic(*active_s, {vt});
        if (!act.is_natural() || act.natural_value() >= member_count)
          violations.push_back("active member out of range" + at);
        Value ta = pre.read_dynamic(*topat_s, {vn});
        if (!(ta == vt)) violations.push_back("current session detached from the stack top" + at);
      }
    }
    for (const auto& kv : rec.trace.dynamic_reads) {
      std::size_t idx = 0;
      if (!member_indexed_name(kv.first.first, idx)) continue;
      if (kv.first.second.empty()) continue;
      const Value& session = kv.first.second[0];
      if (session == vn) continue;
      if (kv.first.first == entry_out && session == Value::natural(0)) continue;
      violations.push_back("read of " + kv.first.first + " outside the current session" + at);
      break;
    }
  };

  RunResult got = run(b, inputs, outside, opts);
  rep.cases += 1;

  if (!violations.empty()) {
    Json list = Json::array();
    for (const std::string& v : violations) list.push_back(v);
    rep.fail("pruning: stack bookkeeping violated", Json{{"violations", list}});
    return rep;
  }

  switch (ref.status) {
    case RunStatus::OutputProduced:
      if (got.status != RunStatus::OutputProduced) {
        rep.fail("pruning: combined machine missed the reference output",
                 Json{{"reference", value_to_json(*ref.output)},
                      {"combined", run_status_name(got.status)},
                      {"combined_problem", problem_json(got.problem)},
                      {"combined_steps", got.steps}});
      } else if (!got.output || !(*got.output == *ref.output)) {
        rep.fail("pruning: outputs differ",
                 Json{{"reference", value_to_json(*ref.output)},
                      {"combined", got.output ? value_to_json(*got.output) : Json()}});
      }
      break;
    case RunStatus::Failed:
      if (got.status != RunStatus::Failed) {
        rep.fail("pruning: reference failure not reproduced",
                 Json{{"reference", problem_json(ref.problem)},
                      {"combined", run_status_name(got.status)}});
      } else if (ref.problem && got.problem && ref.problem->kind != got.problem->kind) {
        rep.fail("pruning: failure kinds differ", Json{{"reference", problem_json(ref.problem)},
                                                       {"combined", problem_json(got.problem)}});
      }
      break;
    case RunStatus::Stuck: {
      std::string sym = ref.problem ? ref.problem->symbol : std::string();
      if (coverage.count(sym)) {
        // The member computing this query never delivered; the combined
        // machine must not produce an output, but its terminal shape is
        // unconstrained (it may fail inside the inlined member or spin).
        if (got.status == RunStatus::OutputProduced) {
          rep.fail("pruning: output produced although a covered query never got an answer",
                   Json{{"query", sym},
                        {"combined", got.output ? value_to_json(*got.output) : Json()}});
        } else {
          rep.skipped += 1;
        }
      } else {
        if (got.status != RunStatus::Stuck || !got.problem || !ref.problem ||
            got.problem->symbol != ref.problem->symbol ||
            !(got.problem->args == ref.problem->args)) {
          rep.fail("pruning: stuck queries differ", Json{{"reference", problem_json(ref.problem)},
                                                         {"combined", problem_json(got.problem)}});
        }
      }
      break;
    }
    case RunStatus::BudgetExhausted:
      break;
  }
  return rep;
}

namespace {

long rule_node_count(const RulePtr& r) {
  if (!r) return 0;
  switch (r->kind) {
    case Rule::Kind::Assign:
      return 1;
    case Rule::Kind::Cond:
      return 1 + rule_node_count(r->then_rule) + rule_node_count(r->else_rule);
    case Rule::Kind::Par: {
      long n = 1;
      for (const RulePtr& c : r->children) n += rule_node_count(c);
      return n;
    }
  }
  return 1;
}

// Replaces preorder node k with skip; k drops below zero once replaced.
RulePtr replace_rule_node(const RulePtr& r, long& k) {
  if (k < 0 || !r) return r;
  if (k == 0) {
    k = -1;
    return Rule::skip();
  }
  --k;
  switch (r->kind) {
    case Rule::Kind::Assign:
      return r;
    case Rule::Kind::Cond: {
      RulePtr t = replace_rule_node(r->then_rule, k);
      if (k < 0) return Rule::cond(r->guard, t, r->else_rule);
      RulePtr e = replace_rule_node(r->else_rule, k);
      if (k < 0) return Rule::cond(r->guard, r->then_rule, e);
      return r;
    }
    case Rule::Kind::Par: {
      for (std::size_t i = 0; i < r->children.size(); ++i) {
        RulePtr c = replace_rule_node(r->children[i], k);
        if (k < 0) {
          std::vector<RulePtr> ch = r->children;
          ch[i] = c;
          return Rule::par(std::move(ch));
        }
      }
      return r;
    }
  }
  return r;
}

}  // namespace

SourceUnit shrink_unit(const SourceUnit& unit,
                       const std::function<bool(const SourceUnit&)>& still_fails, int budget) {
  SourceUnit cur = unit;
  bool progress = true;
  while (progress && budget > 0) {
    progress = false;
    long n = rule_node_count(cur.program);
    for (long idx = 0; idx < n && budget > 0; ++idx) {
      long k = idx;
      RulePtr replaced = replace_rule_node(cur.program, k);
      if (k >= 0) continue;
      if (rule_equal(replaced, cur.program)) continue;
      SourceUnit cand = cur;
      cand.program = replaced;
      --budget;
      bool fails = false;
      try {
        fails = still_fails(cand);
      } catch (...) {
        fails = false;
      }
      if (fails) {
        cur = std::move(cand);
        progress = true;
        break;
      }
    }
  }
  return cur;
}

namespace {

GenConfig config_for_case(std::uint64_t seed, int index, bool cascade) {
  GenConfig gc;
  gc.seed = seed;
  gc.cascade = cascade;
  gc.n_dynamic = 2 + index % 3;
  gc.n_static_tables = 1 + index % 2;
  gc.n_extrinsic = 1 + index % 3;
  gc.n_inputs = 1 + index % 2;
  gc.max_rule_depth = 2 + index % 3;
  gc.max_term_depth = 2 + index % 2;
  gc.par_width = 2 + index % 3;
  return gc;
}

Json driver_frame(const char* pass, const DriverConfig& config) {
  return Json{{"pass", pass},
              {"seed", config.seed},
              {"count", config.count},
              {"steps", config.steps},
              {"state_budget", config.state_budget}};
}

Json run_driver(const char* pass, const DriverConfig& config,
                const std::function<VerifyReport(const SourceUnit&, std::uint64_t)>& check,
                bool cascade) {
  std::mt19937_64 rng(config.seed);
  Json failures = Json::array();
  long cases = 0;
  long skipped = 0;
  int failed = 0;

  for (int i = 0; i < config.count; ++i) {
    std::uint64_t cs = rng();
    try {
      GenConfig gc = config_for_case(cs, i, cascade);
      SourceUnit unit = generate_unit(gc);
      VerifyReport rep = check(unit, cs);
      cases += rep.cases;
      skipped += rep.skipped;
      if (!rep.ok) {
        ++failed;
        if (failures.size() < 3) {
          SourceUnit small = shrink_unit(
              unit,
              [&](const SourceUnit& u) {
                try {
                  return !check(u, cs).ok;
                } catch (...) {
                  return false;
                }
              },
              200);
          failures.push_back(Json{{"case", i},
                                  {"case_seed", cs},
                                  {"detail", rep.details},
                                  {"unit", print_unit(unit)},
                                  {"shrunk", print_unit(small)}});
        }
      }
    } catch (const std::exception& e) {
      ++failed;
      if (failures.size() < 3)
        failures.push_back(Json{{"case", i}, {"case_seed", cs}, {"error", e.what()}});
    }
  }

  Json out = driver_frame(pass, config);
  out["cases"] = cases;
  out["skipped"] = skipped;
  out["failed"] = failed;
  out["ok"] = failed == 0;
  out["failures"] = failures;
  return out;
}

}  // namespace

Json drive_separation(const DriverConfig& config) {
  return run_driver(
      "separate", config,
      [&](const SourceUnit& unit, std::uint64_t cs) {
        Algorithm alg = elaborate(unit);
        std::mt19937_64 ir(cs ^ 0x9e3779b97f4a7c15ULL);
        std::vector<Value> inputs = generate_inputs(alg.inputs, ir);
        OracleEnv env;
        add_scripted_responders(env, *alg.vocab, cs);
        SeparationResult sep = separate_all(unit);
        return verify_separation(unit, sep, inputs, env, config.steps);
      },
      false);
}

Json drive_normalization(const DriverConfig& config) {
  return run_driver(
      "normalize", config,
      [&](const SourceUnit& unit, std::uint64_t cs) {
        Algorithm alg = elaborate(unit);
        OracleEnv env;
        add_scripted_responders(env, *alg.vocab, cs);
        SourceUnit flat = normalize_unit(unit);
        return verify_normalization(unit, flat, env, cs, config.state_budget);
      },
      false);
}

Json drive_serialization(const DriverConfig& config) {
  return run_driver(
      "serialize", config,
      [&](const SourceUnit& unit, std::uint64_t cs) {
        Algorithm alg = elaborate(unit);
        std::mt19937_64 ir(cs ^ 0x9e3779b97f4a7c15ULL);
        std::vector<Value> inputs = generate_inputs(alg.inputs, ir);
        OracleEnv env;
        add_scripted_responders(env, *alg.vocab, cs);
        SerializeResult ser = serialize_unit(unit);
        return verify_serialization(unit, ser, inputs, env, config.steps);
      },
      true);
}

namespace {

Symbol plain_var(const std::string& name) {
  Symbol s;
  s.name = name;
  return s;
}

Symbol numerical_var(const std::string& name) {
  Symbol s;
  s.name = name;
  s.numerical = true;
  return s;
}

// A terminating callee: counts d0 up to a small threshold, then answers.
SourceUnit template_callee(std::mt19937_64& rng) {
  SourceUnit u;
  u.uses_arithmetic = true;
  Symbol x1 = numerical_var("x1");
  x1.io_role = IoRole::Input;
  x1.input_pos = 1;
  Symbol out = plain_var("out");
  out.io_role = IoRole::Output;
  u.decls = {x1, numerical_var("d0"), out};

  std::uint64_t k = 1 + rng() % 3;
  TermPtr x = Term::app("x1");
  TermPtr d0 = Term::app("d0");
  TermPtr answer;
  switch (rng() % 3) {
    case 0:
      answer = Term::app("succ", {Term::app("succ", {x})});
      break;
    case 1:
      answer = Term::ite(Term::eq(x, Term::nat(0)), Term::nat(3 + k), Term::app("succ", {d0}));
      break;
    default:
      answer = Term::app("succ", {Term::app("pred", {x})});
      break;
  }
  u.program = Rule::cond(Term::eq(d0, Term::nat(k)), Rule::assign("out", {}, answer),
                         Rule::assign("d0", {}, Term::app("succ", {d0})));
  return u;
}

// An entry that stages two queries through a counter cascade and then
// combines the answers.
SourceUnit template_entry(std::mt19937_64& rng, bool with_passthrough) {
  SourceUnit u;
  u.uses_arithmetic = true;
  Symbol x1 = numerical_var("x1");
  x1.io_role = IoRole::Input;
  x1.input_pos = 1;
  Symbol out = plain_var("out");
  out.io_role = IoRole::Output;
  Symbol e0;
  e0.name = "e0";
  e0.arity = 1;
  e0.static_ = true;
  e0.extrinsic = true;
  e0.numerical = true;
  u.decls = {x1, numerical_var("d0"), plain_var("d1"), plain_var("d2"), out, e0};
  if (with_passthrough) {
    Symbol e1 = e0;
    e1.name = "e1";
    u.decls.push_back(e1);
  }

  TermPtr x = Term::app("x1");
  TermPtr d0 = Term::app("d0");
  TermPtr d1 = Term::app("d1");
  TermPtr d2 = Term::app("d2");
  TermPtr arg1 = rng() % 2 == 0 ? x : Term::app("succ", {x});
  TermPtr q1 = Term::app("e0", {arg1});
  TermPtr q2 = with_passthrough ? Term::app("e1", {x})
                                : Term::app("e0", {Term::app("succ", {Term::app("succ", {x})})});
  TermPtr combine;
  switch (rng() % 3) {
    case 0:
      combine = Term::ite(Term::eq(d1, d2), Term::app("succ", {d1}),
                          Term::app("succ", {Term::app("succ", {d2})}));
      break;
    case 1:
      combine = Term::app("succ", {d2});
      break;
    default:
      combine = Term::ite(Term::eq(d1, Term::nat(0)), Term::nat(7), Term::app("succ", {d1}));
      break;
  }

  RulePtr first = Rule::par({Rule::assign("d1", {}, q1),
                             Rule::assign("d0", {}, Term::app("succ", {d0}))});
  RulePtr second = Rule::par({Rule::assign("d2", {}, q2),
                              Rule::assign("d0", {}, Term::app("succ", {d0}))});
  u.program = Rule::cond(Term::eq(d0, Term::nat(0)), first,
                         Rule::cond(Term::eq(d0, Term::nat(1)), second,
                                    Rule::assign("out", {}, combine)));
  return u;
}

}  // namespace

Json drive_pruning(const DriverConfig& config) {
  std::mt19937_64 rng(config.seed);
  Json failures = Json::array();
  long cases = 0;
  long skipped = 0;
  int failed = 0;

  for (int i = 0; i < config.count; ++i) {
    std::uint64_t cs = rng();
    try {
      std::mt19937_64 cr(cs);
      bool with_passthrough = i % 3 == 2;
      SourceUnit entry = template_entry(cr, with_passthrough);
      SourceUnit callee = template_callee(cr);
      std::vector<SourceUnit> members = {entry, callee};
      std::map<std::string, std::size_t> coverage = {{"e0", 1}};
      std::set<std::string> passthrough;
      if (with_passthrough) passthrough.insert("e1");

      Algorithm alg = elaborate(entry);
      std::mt19937_64 ir(cs ^ 0x9e3779b97f4a7c15ULL);
      std::vector<Value> inputs = generate_inputs(alg.inputs, ir);
      OracleEnv env;
      add_scripted_responders(env, *alg.vocab, cs);

      std::vector<SourceUnit> serialized;
      for (const SourceUnit& member : members) serialized.push_back(serialize_unit(member).unit);
      PruneOptions popts;
      popts.assume_serialized = true;
      PruneResult pruned = prune_bundle(serialized, coverage, passthrough, popts);

      VerifyReport rep =
          verify_pruning(members, coverage, passthrough, pruned, inputs, env, 4000, 6, 200000);
      cases += rep.cases;
      skipped += rep.skipped;
      if (!rep.ok) {
        ++failed;
        if (failures.size() < 3) {
          failures.push_back(Json{{"case", i},
                                  {"case_seed", cs},
                                  {"detail", rep.details},
                                  {"entry", print_unit(entry)},
                                  {"callee", print_unit(callee)}});
        }
      }
    } catch (const std::exception& e) {
      ++failed;
      if (failures.size() < 3)
        failures.push_back(Json{{"case", i}, {"case_seed", cs}, {"error", e.what()}});
    }
  }

  Json out = driver_frame("prune", config);
  out["cases"] = cases;
  out["skipped"] = skipped;
  out["failed"] = failed;
  out["ok"] = failed == 0;
  out["failures"] = failures;
  return out;
}

Json drive_pass(const std::string& pass, const DriverConfig& config) {
  if (pass == "separate") return drive_separation(config);
  if (pass == "normalize") return drive_normalization(config);
  if (pass == "serialize") return drive_serialization(config);
  if (pass == "prune") return drive_pruning(config);
  throw CheckError("unknown pass: " + pass);
}

}  // namespace asmw
