#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "asmw/interp.hpp"
#include "asmw/jsonio.hpp"
#include "asmw/parser.hpp"

using namespace asmw;

namespace {

Algorithm make(const std::string& src) { return elaborate(parse_unit(src)); }

StepRecord one_step(const Algorithm& alg, State& st, const OracleEnv& env) {
  return step(alg, st, env, 0);
}

}  // namespace

TEST_CASE("branch selection evaluates exactly one branch") {
  Algorithm alg = make(
      "backend arithmetic\n"
      "fn p/1 static numeric\n"
      "table p { 0 -> 1 }\n"  // partial: p(5) is undefined
      "fn out/0 dynamic out\n"
      "program out := ite(true, succ(0), p(5))\n");
  OracleEnv env;
  State st = initial_state(alg, {});
  StepRecord rec = one_step(alg, st, env);
  CHECK(rec.outcome == StepRecord::Outcome::Advanced);
  CHECK(st.read_dynamic(*alg.output, {}) == Value::natural(1));
  // The untaken branch was never evaluated, and logic heads leave no trace.
  CHECK(rec.trace.static_evals.count({"p", {Value::natural(5)}}) == 0);
  CHECK(rec.trace.static_evals.count({"succ", {Value::natural(0)}}) == 1);
  for (const auto& kv : rec.trace.static_evals) CHECK_FALSE(logic::is_logic_name(kv.first.first));
}

TEST_CASE("branch selection on a non-boolean picks neither branch") {
  Algorithm alg = make(
      "backend arithmetic\n"
      "fn d/0 dynamic\n"
      "fn p/1 static numeric\n"
      "table p { 0 -> 1 }\n"
      "fn out/0 dynamic out\n"
      "program out := ite(d, p(5), p(6))\n");
  OracleEnv env;
  State st = initial_state(alg, {});
  StepRecord rec = one_step(alg, st, env);  // d defaults to nil
  CHECK(rec.outcome == StepRecord::Outcome::Advanced);
  REQUIRE(rec.updates.size() == 1);
  CHECK(rec.updates.begin()->value == Value::nil());
  CHECK(rec.trace.static_evals.empty());
}

TEST_CASE("connectives are strict and fail on non-booleans") {
  Algorithm alg = make(
      "backend arithmetic\n"
      "fn out/0 dynamic out\n"
      "program if and(true, 3) then out := 1 else out := 2\n");
  OracleEnv env;
  State st = initial_state(alg, {});
  StepRecord rec = one_step(alg, st, env);
  CHECK(rec.outcome == StepRecord::Outcome::Failed);
  REQUIRE(rec.problem.has_value());
  CHECK(rec.problem->kind == EvalProblem::Kind::Undefined);
  State fresh = initial_state(alg, {});
  CHECK(st == fresh);  // failed steps leave the state unchanged
}

TEST_CASE("equality is total across sorts") {
  Algorithm alg = make(
      "backend arithmetic\n"
      "fn f/1 dynamic numeric\n"
      "fn out/0 dynamic out\n"
      "program out := ite(eq(nil, 0), 1, ite(eq(f(7), 0), 2, 3))\n");
  OracleEnv env;
  State st = initial_state(alg, {});
  one_step(alg, st, env);
  // eq(nil, 0) is false, not an error; fresh f(7) holds its default 0.
  CHECK(st.read_dynamic(*alg.output, {}) == Value::natural(2));
}

TEST_CASE("non-boolean guards fail with the offending value") {
  Algorithm alg = make(
      "fn d/0 dynamic\n"
      "fn out/0 dynamic out\n"
      "program if d then out := 1 else out := 2\n");
  OracleEnv env;
  State st = initial_state(alg, {});
  StepRecord rec = one_step(alg, st, env);
  CHECK(rec.outcome == StepRecord::Outcome::Failed);
  REQUIRE(rec.problem.has_value());
  CHECK(rec.problem->kind == EvalProblem::Kind::GuardNotBoolean);
  CHECK(rec.problem->value == Value::nil());
}

TEST_CASE("clashing parallel writes fail as a contradiction") {
  Algorithm alg = make(
      "backend arithmetic\n"
      "fn out/0 dynamic out\n"
      "program par { out := 1; out := 2 }\n");
  OracleEnv env;
  State st = initial_state(alg, {});
  StepRecord rec = one_step(alg, st, env);
  CHECK(rec.outcome == StepRecord::Outcome::Failed);
  REQUIRE(rec.problem.has_value());
  CHECK(rec.problem->kind == EvalProblem::Kind::Contradiction);
  CHECK(rec.problem->symbol == "out");
  CHECK(rec.problem->value == Value::natural(1));
  CHECK(rec.problem->second_value == Value::natural(2));
  CHECK(rec.updates.size() == 2);  // the inconsistent set is still recorded
  CHECK(st.read_dynamic(*alg.output, {}) == Value::nil());
}

TEST_CASE("equal parallel writes are consistent") {
  Algorithm alg = make(
      "backend arithmetic\n"
      "fn out/0 dynamic out\n"
      "program par { out := 1; out := 1 }\n");
  OracleEnv env;
  State st = initial_state(alg, {});
  StepRecord rec = one_step(alg, st, env);
  CHECK(rec.outcome == StepRecord::Outcome::Advanced);
  CHECK(rec.updates.size() == 1);
}

TEST_CASE("unanswered queries stick rather than fail") {
  Algorithm alg = make(
      "backend arithmetic\n"
      "fn e/1 extrinsic numeric\n"
      "fn out/0 dynamic out\n"
      "program out := e(4)\n");
  OracleEnv env;
  State st = initial_state(alg, {});
  StepRecord rec = one_step(alg, st, env);
  CHECK(rec.outcome == StepRecord::Outcome::StuckOnOracle);
  REQUIRE(rec.problem.has_value());
  CHECK(rec.problem->kind == EvalProblem::Kind::OracleNoAnswer);
  CHECK(rec.problem->symbol == "e");
  CHECK(rec.problem->args == Args{Value::natural(4)});

  OracleEnv answering;
  answering.set_table("e", {{{Value::natural(4)}, Value::natural(9)}});
  State st2 = initial_state(alg, {});
  StepRecord rec2 = one_step(alg, st2, answering);
  CHECK(rec2.outcome == StepRecord::Outcome::Advanced);
  CHECK(st2.read_dynamic(*alg.output, {}) == Value::natural(9));
  CHECK(rec2.trace.extrinsic_queries.count({"e", {Value::natural(4)}}) == 1);
}

TEST_CASE("assignment targets are written, not read") {
  Algorithm alg = make(
      "backend arithmetic\n"
      "fn f/1 dynamic numeric\n"
      "fn out/0 dynamic out\n"
      "program f(succ(0)) := 3\n");
  OracleEnv env;
  State st = initial_state(alg, {});
  StepRecord rec = one_step(alg, st, env);
  CHECK(rec.outcome == StepRecord::Outcome::Advanced);
  CHECK(rec.trace.dynamic_reads.count({"f", {Value::natural(1)}}) == 0);
  CHECK(st.read_dynamic(*alg.vocab->lookup("f"), {Value::natural(1)}) == Value::natural(3));
}

TEST_CASE("runs stop as soon as the output leaves its default") {
  Algorithm alg = make(
      "backend arithmetic\n"
      "fn x/0 dynamic numeric in 1\n"
      "fn i/0 dynamic numeric\n"
      "fn acc/0 dynamic numeric\n"
      "fn out/0 dynamic out\n"
      "program if eq(i, x) then out := acc else par { i := succ(i); acc := succ(succ(acc)) }\n");
  OracleEnv env;
  RunOptions opts;
  opts.keep_records = true;
  opts.keep_states = true;
  RunResult res = run(alg, {Value::natural(5)}, env, opts);
  CHECK(res.status == RunStatus::OutputProduced);
  REQUIRE(res.output.has_value());
  CHECK(*res.output == Value::natural(10));
  CHECK(res.steps == 6);
  CHECK(res.records.size() == 6);
  // One state per step boundary: the initial state plus one after each step.
  REQUIRE(res.states.size() == 7);
  CHECK(res.states[0].overrides("i").empty());
  const Symbol& out_sym = *alg.vocab->lookup("out");
  CHECK(res.states[5].read_dynamic(out_sym, {}) == Value::nil());
  CHECK(res.states[6].read_dynamic(out_sym, {}) == Value::natural(10));

  // Producing zero works for a plain output: 0 differs from nil.
  RunResult zero = run(alg, {Value::natural(0)}, env, RunOptions{});
  CHECK(zero.status == RunStatus::OutputProduced);
  CHECK(*zero.output == Value::natural(0));

  RunOptions tight;
  tight.max_steps = 3;
  RunResult cut = run(alg, {Value::natural(5)}, env, tight);
  CHECK(cut.status == RunStatus::BudgetExhausted);
  CHECK(cut.steps == 3);
}

TEST_CASE("observers see the state before each step") {
  Algorithm alg = make(
      "backend arithmetic\n"
      "fn x/0 dynamic numeric in 1\n"
      "fn i/0 dynamic numeric\n"
      "fn out/0 dynamic out\n"
      "program if eq(i, x) then out := i else i := succ(i)\n");
  OracleEnv env;
  std::vector<std::uint64_t> seen;
  RunOptions opts;
  opts.observer = [&](const State& pre, const StepRecord& rec) {
    seen.push_back(pre.read_dynamic(*pre.vocab().lookup("i"), {}).natural_value());
    CHECK(rec.index == static_cast<long>(seen.size()) - 1);
  };
  run(alg, {Value::natural(3)}, env, opts);
  CHECK(seen == std::vector<std::uint64_t>{0, 1, 2, 3});
}

TEST_CASE("initial states validate their inputs") {
  Algorithm alg = make(
      "backend arithmetic\n"
      "fn x/0 dynamic numeric in 1\n"
      "fn b/0 dynamic relational in 2\n"
      "fn out/0 dynamic out\n"
      "program out := ite(b, x, 0)\n");
  State ok = initial_state(alg, {Value::natural(2), Value::true_value()});
  CHECK(ok.read_dynamic(*alg.vocab->lookup("x"), {}) == Value::natural(2));
  CHECK_THROWS_AS(initial_state(alg, {Value::natural(2)}), CheckError);
  CHECK_THROWS_AS(initial_state(alg, {Value::natural(2), Value::natural(0)}), CheckError);
  CHECK_THROWS_AS(initial_state(alg, {Value::nil(), Value::true_value()}), CheckError);
}

TEST_CASE("dispatch answers covered queries by running members") {
  const char* even_src =
      "backend arithmetic\n"
      "fn n/0 dynamic numeric in 1\n"
      "fn out/0 dynamic out\n"
      "fn odd_ext/1 extrinsic relational\n"
      "program if eq(n, 0) then out := true else out := odd_ext(pred(n))\n";
  const char* odd_src =
      "backend arithmetic\n"
      "fn n/0 dynamic numeric in 1\n"
      "fn out/0 dynamic out\n"
      "fn even_ext/1 extrinsic relational\n"
      "program if eq(n, 0) then out := false else out := even_ext(pred(n))\n";
  DispatchBundle bundle;
  bundle.members.push_back(make(even_src));
  bundle.members.push_back(make(odd_src));
  bundle.coverage = {{"odd_ext", 1}, {"even_ext", 0}};

  RunResult r6 = oracle_dispatch_run(bundle, 0, {Value::natural(6)}, 100, 16);
  CHECK(r6.status == RunStatus::OutputProduced);
  CHECK(*r6.output == Value::true_value());
  RunResult r7 = oracle_dispatch_run(bundle, 0, {Value::natural(7)}, 100, 16);
  CHECK(*r7.output == Value::false_value());
  RunResult r3 = oracle_dispatch_run(bundle, 1, {Value::natural(3)}, 100, 16);
  CHECK(*r3.output == Value::true_value());

  CHECK_THROWS_AS(oracle_dispatch_run(bundle, 0, {Value::natural(9)}, 100, 4), DepthExceeded);

  // Without coverage the query falls through to the outside oracle.
  DispatchBundle open;
  open.members.push_back(make(even_src));
  OracleEnv outside;
  outside.set_table("odd_ext", {{{Value::natural(5)}, Value::true_value()}});
  open.passthrough = &outside;
  RunResult r = oracle_dispatch_run(open, 0, {Value::natural(6)}, 100, 4);
  CHECK(*r.output == Value::true_value());

  // And without either, the run sticks at the query.
  DispatchBundle closed;
  closed.members.push_back(make(even_src));
  RunResult stuck = oracle_dispatch_run(closed, 0, {Value::natural(6)}, 100, 4);
  CHECK(stuck.status == RunStatus::Stuck);
  REQUIRE(stuck.problem.has_value());
  CHECK(stuck.problem->symbol == "odd_ext");
}

TEST_CASE("json rendering of values, updates, and terminals") {
  CHECK(value_to_json(Value::natural(3)) == Json(3));
  CHECK(value_to_json(Value::true_value()) == Json(true));
  CHECK(value_to_json(Value::nil()).is_null());
  CHECK(value_to_json(Value::enum_element("color", "red")) == Json("red"));

  Datastructure data;
  data.backends.push_back(enum_backend("color", {"red", "blue"}));
  data.backends.push_back(arithmetic_backend());
  CHECK(value_from_json(Json(true), data) == Value::true_value());
  CHECK(value_from_json(Json(4), data) == Value::natural(4));
  CHECK(value_from_json(Json("red"), data) == Value::enum_element("color", "red"));
  CHECK(parse_value_token("12", data) == Value::natural(12));
  CHECK(parse_value_token("nil", data) == Value::nil());
  CHECK(parse_value_token("blue", data) == Value::enum_element("color", "blue"));

  Algorithm alg = make(
      "backend arithmetic\n"
      "fn out/0 dynamic out\n"
      "program out := 1\n");
  OracleEnv env;
  RunResult res = run(alg, {}, env, RunOptions{});
  Json j = run_terminal_to_json(res);
  CHECK(j["status"] == Json("OutputProduced"));
  CHECK(j["output"] == Json(1));
  CHECK(j["steps"] == Json(1));
}
