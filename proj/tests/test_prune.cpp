#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "asmw/cosim.hpp"
#include "asmw/interp.hpp"
#include "asmw/parser.hpp"
#include "asmw/prune.hpp"
#include "asmw/serialize.hpp"

using namespace asmw;

namespace {

const char* kEven =
    "backend arithmetic\n"
    "fn n/0 dynamic numeric in 1\n"
    "fn out/0 dynamic out\n"
    "fn odd_ext/1 extrinsic relational\n"
    "program if eq(n, 0) then out := true else out := odd_ext(pred(n))\n";

const char* kOdd =
    "backend arithmetic\n"
    "fn n/0 dynamic numeric in 1\n"
    "fn out/0 dynamic out\n"
    "fn even_ext/1 extrinsic relational\n"
    "program if eq(n, 0) then out := false else out := even_ext(pred(n))\n";

const char* kFact =
    "backend arithmetic\n"
    "fn n/0 dynamic numeric in 1\n"
    "fn f1/0 dynamic numeric\n"
    "fn got/0 dynamic relational\n"
    "fn i/0 dynamic numeric\n"
    "fn j/0 dynamic numeric\n"
    "fn acc/0 dynamic numeric\n"
    "fn out/0 dynamic out\n"
    "fn fact_ext/1 extrinsic numeric\n"
    "program\n"
    "if eq(n, 0) then out := succ(0)\n"
    "else if not(got) then par { f1 := fact_ext(pred(n)); got := true }\n"
    "else if eq(i, n) then out := acc\n"
    "else if eq(j, f1) then par { i := succ(i); j := 0 }\n"
    "else par { acc := succ(acc); j := succ(j) }\n";

const Symbol* find_decl(const SourceUnit& u, const std::string& name) {
  for (const Symbol& s : u.decls)
    if (s.name == name) return &s;
  return nullptr;
}

Value run_pruned(const Algorithm& alg, unsigned n, const OracleEnv& env = {}) {
  RunOptions opts;
  opts.max_steps = 200000;
  RunResult r = run(alg, {Value::natural(n)}, env, opts);
  REQUIRE(r.status == RunStatus::OutputProduced);
  return *r.output;
}

}  // namespace

TEST_CASE("bundle descriptions are validated field by field") {
  Json good = Json::parse(R"({
    "members": ["even.asm", "odd.asm"],
    "coverage": {"odd_ext": 1, "even_ext": 0},
    "passthrough": []
  })");
  BundleSpec spec = bundle_spec_from_json(good);
  CHECK(spec.member_paths == std::vector<std::string>{"even.asm", "odd.asm"});
  CHECK(spec.coverage.at("odd_ext") == 1);
  CHECK(spec.passthrough.empty());

  CHECK_THROWS_AS(bundle_spec_from_json(Json::parse(R"({"coverage": {}})")), CheckError);
  CHECK_THROWS_AS(bundle_spec_from_json(Json::parse(R"({"members": "x"})")), CheckError);
  CHECK_THROWS_AS(bundle_spec_from_json(Json::parse(R"({"members": [3]})")), CheckError);
  CHECK_THROWS_AS(
      bundle_spec_from_json(Json::parse(R"({"members": ["a"], "coverage": {"e": 1}})")),
      CheckError);
  CHECK_THROWS_AS(
      bundle_spec_from_json(Json::parse(R"({"members": ["a"], "coverage": {"e": -1}})")),
      CheckError);
  CHECK_THROWS_AS(bundle_spec_from_json(Json::parse(
                      R"({"members": ["a"], "coverage": {"e": 0}, "passthrough": ["e"]})")),
                  CheckError);
}

TEST_CASE("bookkeeping names are stable") {
  CHECK(member_prefix(0) == "$m0_");
  CHECK(member_prefix(12) == "$m12_");
  CHECK(call_flag_name(1, 4) == "$call1_4");
}

TEST_CASE("a mutual-recursion bundle collapses to one oracle-free machine") {
  std::vector<SourceUnit> members = {parse_unit(kEven), parse_unit(kOdd)};
  std::map<std::string, std::size_t> coverage = {{"odd_ext", 1}, {"even_ext", 0}};
  PruneResult res = prune_bundle(members, coverage, {});

  CHECK(res.effective);
  CHECK(res.member_origin == std::vector<std::size_t>{0, 1});
  CHECK(res.coverage == coverage);
  REQUIRE(res.done_names.size() == 2);
  CHECK(res.done_names[0] == "$m0_$done");
  CHECK(res.done_names[1] == "$m1_$done");

  // Bookkeeping symbols with their sorts.
  const Symbol* top = find_decl(res.unit, "$top");
  REQUIRE(top != nullptr);
  CHECK(top->numerical);
  CHECK(top->arity == 0);
  CHECK(top->dynamic());
  const Symbol* init = find_decl(res.unit, "$init");
  REQUIRE(init != nullptr);
  CHECK(init->relational);
  const Symbol* active = find_decl(res.unit, "$active");
  REQUIRE(active != nullptr);
  CHECK(active->arity == 1);
  CHECK(active->numerical);
  const Symbol* answer = find_decl(res.unit, "$to");
  REQUIRE(answer != nullptr);
  CHECK(answer->arity == 1);
  CHECK_FALSE(answer->relational);
  CHECK_FALSE(answer->numerical);

  // Session-indexed copies: one extra argument, io stripped.
  const Symbol* m0n = find_decl(res.unit, "$m0_n");
  REQUIRE(m0n != nullptr);
  CHECK(m0n->arity == 1);
  CHECK(m0n->numerical);
  CHECK(m0n->io_role == IoRole::None);
  CHECK(m0n->dynamic());
  const Symbol* entry_n = find_decl(res.unit, "n");
  REQUIRE(entry_n != nullptr);
  CHECK(entry_n->io_role == IoRole::Input);

  // No extrinsic declarations survive, and a call flag exists per call site.
  for (const Symbol& s : res.unit.decls) CHECK_FALSE(s.extrinsic);
  bool call_flag = std::any_of(res.unit.decls.begin(), res.unit.decls.end(), [](const Symbol& s) {
    return s.name.rfind("$call0_", 0) == 0 && s.relational && s.arity == 1;
  });
  CHECK(call_flag);

  Algorithm alg = elaborate(res.unit);
  for (unsigned n = 0; n <= 9; ++n) {
    Value expect = Value::boolean(n % 2 == 0);
    CHECK(run_pruned(alg, n) == expect);
  }

  VerifyReport rep = verify_pruning(members, coverage, {}, res,
                                    {Value::natural(6)}, OracleEnv{}, 4000, 16, 200000);
  INFO(rep.details.dump(2));
  CHECK(rep.ok);
}

TEST_CASE("a self-recursive member calls fresh sessions of itself") {
  std::vector<SourceUnit> members = {parse_unit(kFact)};
  std::map<std::string, std::size_t> coverage = {{"fact_ext", 0}};
  PruneResult res = prune_bundle(members, coverage, {});
  CHECK(res.effective);
  CHECK(res.member_origin == std::vector<std::size_t>{0});

  Algorithm alg = elaborate(res.unit);
  unsigned expect = 1;
  for (unsigned n = 0; n <= 5; ++n) {
    if (n > 0) expect *= n;
    CHECK(run_pruned(alg, n) == Value::natural(expect));
  }

  VerifyReport rep = verify_pruning(members, coverage, {}, res,
                                    {Value::natural(4)}, OracleEnv{}, 100000, 10, 200000);
  INFO(rep.details.dump(2));
  CHECK(rep.ok);
}

TEST_CASE("equal members are merged and coverage remapped") {
  std::vector<SourceUnit> members = {parse_unit(kEven), parse_unit(kEven), parse_unit(kOdd)};
  std::map<std::string, std::size_t> coverage = {{"even_ext", 1}, {"odd_ext", 2}};
  PruneResult res = prune_bundle(members, coverage, {});
  CHECK(res.member_origin == std::vector<std::size_t>{0, 2});
  CHECK(res.coverage.at("even_ext") == 0);
  CHECK(res.coverage.at("odd_ext") == 1);
  Algorithm alg = elaborate(res.unit);
  CHECK(run_pruned(alg, 7) == Value::boolean(false));
}

TEST_CASE("a passthrough symbol stays extrinsic and answerable") {
  std::vector<SourceUnit> members = {parse_unit(kEven)};
  PruneResult res = prune_bundle(members, {}, {"odd_ext"});
  CHECK_FALSE(res.effective);
  const Symbol* kept = find_decl(res.unit, "odd_ext");
  REQUIRE(kept != nullptr);
  CHECK(kept->extrinsic);

  OracleEnv env;
  std::map<Args, Value> odd;
  for (unsigned k = 0; k <= 12; ++k) odd[{Value::natural(k)}] = Value::boolean(k % 2 == 1);
  env.set_table("odd_ext", std::move(odd));
  Algorithm alg = elaborate(res.unit);
  for (unsigned n = 0; n <= 6; ++n) CHECK(run_pruned(alg, n, env) == Value::boolean(n % 2 == 0));

  VerifyReport rep = verify_pruning(members, {}, {"odd_ext"}, res,
                                    {Value::natural(5)}, env, 4000, 8, 200000);
  INFO(rep.details.dump(2));
  CHECK(rep.ok);
}

TEST_CASE("closure violations are reported") {
  // A query nobody covers.
  CHECK_THROWS_WITH_AS(prune_bundle({parse_unit(kEven)}, {}, {}),
                       doctest::Contains("no member covers"), CheckError);

  // Covered, but the callee's input row does not fit the query arity.
  SourceUnit wide = parse_unit(
      "backend arithmetic\n"
      "fn x/0 dynamic numeric in 1\n"
      "fn e2/2 extrinsic numeric\n"
      "fn out/0 dynamic out\n"
      "program out := e2(x, x)\n");
  CHECK_THROWS_WITH_AS(prune_bundle({wide, parse_unit(kEven)}, {{"e2", 1}}, {}),
                       doctest::Contains("arity"), CheckError);

  // An entry that never announces a result.
  SourceUnit mute = parse_unit(
      "backend arithmetic\n"
      "fn x/0 dynamic numeric in 1\n"
      "fn a/0 dynamic numeric\n"
      "program a := succ(x)\n");
  CHECK_THROWS_WITH_AS(prune_bundle({mute}, {}, {}), doctest::Contains("output"), CheckError);

  // No members at all.
  CHECK_THROWS_AS(prune_bundle({}, {}, {}), CheckError);
}

TEST_CASE("an unused extrinsic declaration is dropped silently") {
  SourceUnit u = parse_unit(
      "backend arithmetic\n"
      "fn x/0 dynamic numeric in 1\n"
      "fn unused/1 extrinsic numeric\n"
      "fn out/0 dynamic out\n"
      "program out := succ(x)\n");
  PruneResult res = prune_bundle({u}, {}, {});
  CHECK(res.effective);
  CHECK(find_decl(res.unit, "unused") == nullptr);
  Algorithm alg = elaborate(res.unit);
  CHECK(run_pruned(alg, 3) == Value::natural(4));
}

TEST_CASE("members can be supplied pre-serialized") {
  SourceUnit even_ser = serialize_unit(parse_unit(kEven)).unit;
  SourceUnit odd_ser = serialize_unit(parse_unit(kOdd)).unit;
  PruneOptions opts;
  opts.assume_serialized = true;
  std::map<std::string, std::size_t> coverage = {{"odd_ext", 1}, {"even_ext", 0}};
  PruneResult res = prune_bundle({even_ser, odd_ser}, coverage, {}, opts);
  Algorithm alg = elaborate(res.unit);
  CHECK(run_pruned(alg, 8) == Value::boolean(true));
  CHECK(run_pruned(alg, 3) == Value::boolean(false));

  // Raw cascades are refused under the same flag.
  CHECK_THROWS_WITH_AS(prune_bundle({parse_unit(kEven), parse_unit(kOdd)}, coverage, {}, opts),
                       doctest::Contains("query-serial"), CheckError);
}

TEST_CASE("returning on the pass mark instead of the output still elaborates") {
  PruneOptions opts;
  opts.return_on_done = true;
  std::map<std::string, std::size_t> coverage = {{"odd_ext", 1}, {"even_ext", 0}};
  PruneResult res = prune_bundle({parse_unit(kEven), parse_unit(kOdd)}, coverage, {}, opts);
  Algorithm alg = elaborate(res.unit);
  // Here every callee finishes within its first pass, so both return rules agree.
  CHECK(run_pruned(alg, 2) == Value::boolean(true));
  CHECK(run_pruned(alg, 5) == Value::boolean(false));
}

TEST_CASE("batch driver passes over generated bundles") {
  DriverConfig config;
  config.seed = 31;
  config.count = 6;
  Json report = drive_pruning(config);
  INFO(report.dump(2));
  CHECK(report["ok"] == Json(true));
  CHECK(report["cases"].get<long>() > 0);
}
