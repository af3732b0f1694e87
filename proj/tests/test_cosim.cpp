#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "asmw/cosim.hpp"
#include "asmw/generate.hpp"
#include "asmw/interp.hpp"
#include "asmw/parser.hpp"

using namespace asmw;

TEST_CASE("all four batch drivers accept their own constructions") {
  DriverConfig config;
  config.seed = 404;
  config.count = 15;
  config.steps = 10;
  config.state_budget = 30;
  for (const char* pass : {"separate", "normalize", "serialize"}) {
    Json report = drive_pass(pass, config);
    INFO(pass, ": ", report.dump(2));
    CHECK(report["ok"] == Json(true));
    CHECK(report["failed"] == Json(0));
    CHECK(report["pass"] == Json(pass));
    CHECK(report["cases"].get<long>() > 0);
  }
  config.count = 5;
  Json report = drive_pass("prune", config);
  INFO(report.dump(2));
  CHECK(report["ok"] == Json(true));
  CHECK(report["cases"].get<long>() > 0);
}

TEST_CASE("an unknown pass name is rejected") {
  CHECK_THROWS_AS(drive_pass("fuse", DriverConfig{}), CheckError);
}

TEST_CASE("reports are byte-identical for a fixed seed") {
  DriverConfig config;
  config.seed = 99;
  config.count = 8;
  config.steps = 8;
  config.state_budget = 24;
  for (const char* pass : {"separate", "normalize", "serialize"}) {
    std::string once = drive_pass(pass, config).dump();
    std::string twice = drive_pass(pass, config).dump();
    CHECK(once == twice);
  }
  config.count = 3;
  CHECK(drive_pass("prune", config).dump() == drive_pass("prune", config).dump());

  DriverConfig other = config;
  other.seed = 100;
  CHECK(drive_pass("separate", config).dump() != drive_pass("separate", other).dump());
}

TEST_CASE("failure shrinking keeps the predicate and drops the rest") {
  SourceUnit u = parse_unit(
      "backend arithmetic\n"
      "fn a/0 dynamic numeric\n"
      "fn b/0 dynamic numeric\n"
      "fn c/0 dynamic numeric\n"
      "fn out/0 dynamic out\n"
      "program par { a := succ(a); par { b := succ(b); c := succ(c) }; out := nil }\n");
  auto wants_b = [](const SourceUnit& s) { return rule_mentions(s.program, "b"); };
  SourceUnit small = shrink_unit(u, wants_b, 100);
  CHECK(rule_mentions(small.program, "b"));
  CHECK_FALSE(rule_mentions(small.program, "a"));
  CHECK_FALSE(rule_mentions(small.program, "c"));
  CHECK_FALSE(rule_mentions(small.program, "out"));

  // A predicate nothing satisfies returns the unit unchanged.
  SourceUnit same = shrink_unit(u, [](const SourceUnit&) { return false; }, 100);
  CHECK(unit_equal(same, u));

  // Predicate exceptions count as unsatisfied rather than escaping.
  SourceUnit guarded = shrink_unit(
      u,
      [](const SourceUnit& s) {
        if (!rule_mentions(s.program, "b")) throw std::runtime_error("gone");
        return true;
      },
      100);
  CHECK(rule_mentions(guarded.program, "b"));
}

TEST_CASE("generated units elaborate and respond deterministically") {
  GenConfig gc;
  gc.seed = 2024;
  gc.n_extrinsic = 2;
  SourceUnit u = generate_unit(gc);
  SourceUnit v = generate_unit(gc);
  CHECK(unit_equal(u, v));
  Algorithm alg = elaborate(u);

  OracleEnv env;
  add_scripted_responders(env, *alg.vocab, 7);
  OracleEnv env2;
  add_scripted_responders(env2, *alg.vocab, 7);
  for (const Symbol& s : alg.vocab->symbols()) {
    if (!s.extrinsic) continue;
    Args args(static_cast<std::size_t>(s.arity), Value::natural(2));
    auto a = env.query(s.name, args);
    auto b = env2.query(s.name, args);
    REQUIRE(a.has_value());
    CHECK(*a == *b);
    if (s.relational) CHECK(a->is_boolean());
  }

  std::mt19937_64 r1(5), r2(5);
  CHECK(generate_inputs(alg.inputs, r1) == generate_inputs(alg.inputs, r2));
}

TEST_CASE("the verification report keeps its first failure") {
  VerifyReport rep;
  CHECK(rep.ok);
  rep.fail("first", Json{{"where", 3}});
  rep.fail("second");
  CHECK_FALSE(rep.ok);
  CHECK(rep.details["what"] == Json("first"));
  CHECK(rep.details["info"]["where"] == Json(3));
}
