#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "asmw/interp.hpp"
#include "asmw/parser.hpp"

using namespace asmw;

namespace {

const char* kSmall = R"(# a comment
backend arithmetic
fn x/0 dynamic numeric in 1
fn f/1 dynamic numeric
fn out/0 dynamic out
fn s/1 static intrinsic numeric
table s { 0 -> 1; 1 -> 2; default -> 0 }
program
if eq(f(x), 0) then
  par { f(x) := succ(f(x)); out := nil }
else
  skip
)";

}  // namespace

TEST_CASE("parsing fills in declarations, tables, and the program") {
  SourceUnit u = parse_unit(kSmall);
  CHECK(u.uses_arithmetic);
  CHECK_FALSE(u.generated);
  REQUIRE(u.decls.size() == 4);
  CHECK(u.decls[0].name == "x");
  CHECK(u.decls[0].io_role == IoRole::Input);
  CHECK(u.decls[0].input_pos == 1);
  CHECK(u.decls[0].numerical);
  CHECK_FALSE(u.decls[0].static_);
  CHECK(u.decls[2].io_role == IoRole::Output);
  CHECK(u.decls[3].static_);
  CHECK_FALSE(u.decls[3].extrinsic);
  REQUIRE(u.tables.size() == 1);
  CHECK(u.tables[0].symbol == "s");
  CHECK(u.tables[0].entries.size() == 2);
  REQUIRE(u.tables[0].default_value != nullptr);
  REQUIRE(u.program != nullptr);
  CHECK(u.program->kind == Rule::Kind::Cond);
  CHECK(u.program->then_rule->kind == Rule::Kind::Par);
  CHECK(u.program->else_rule->children.empty());
}

TEST_CASE("printing and reparsing is the identity on the tree") {
  SourceUnit u = parse_unit(kSmall);
  SourceUnit again = parse_unit(print_unit(u));
  CHECK(unit_equal(u, again));

  // The generated pragma survives the round trip.
  SourceUnit gen = u;
  gen.generated = true;
  SourceUnit gen2 = parse_unit(print_unit(gen));
  CHECK(gen2.generated);
  CHECK(unit_equal(gen, gen2));
}

TEST_CASE("enum backends parse and round-trip") {
  const char* src = R"(backend enum color { red, blue }
fn x/0 dynamic in 1
fn out/0 dynamic out
program
out := ite(eq(x, red), blue, red)
)";
  SourceUnit u = parse_unit(src);
  REQUIRE(u.enums.size() == 1);
  CHECK(u.enums[0].name == "color");
  CHECK(u.enums[0].elements == std::vector<std::string>{"red", "blue"});
  CHECK(unit_equal(u, parse_unit(print_unit(u))));
  elaborate(u);  // backend constants resolve
}

TEST_CASE("parse errors carry position and context") {
  try {
    parse_unit("fn x/0 dynamic\nprogram x = 1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("expected") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_unit(""), ParseError);
  CHECK_THROWS_AS(parse_unit("banana x/0\nprogram skip\n"), ParseError);
  CHECK_THROWS_AS(parse_unit("pragma fast\nprogram skip\n"), ParseError);
  CHECK_THROWS_AS(parse_unit("program skip extra\n"), ParseError);
  CHECK_THROWS_AS(parse_unit("program out := if\n"), ParseError);
  CHECK_THROWS_AS(parse_unit("fn s/1 static\ntable s { default -> 0; default -> 1 }\nprogram skip\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_unit("program out := eq(1)\n"), ParseError);  // logic arity is syntax
}

TEST_CASE("elaboration accepts the small program") {
  Algorithm alg = elaborate(parse_unit(kSmall));
  CHECK(alg.inputs.size() == 1);
  REQUIRE(alg.output.has_value());
  CHECK(alg.output->name == "out");
  CHECK(alg.vocab->lookup("succ") != nullptr);  // backend symbols joined in
  CHECK(alg.data->tables.count("s") == 1);
}

TEST_CASE("elaboration rejects undeclared and misused symbols") {
  auto bad = [](const char* src) {
    CHECK_THROWS_AS(elaborate(parse_unit(src)), CheckError);
  };

  // undeclared symbol in the program
  bad("fn out/0 dynamic out\nprogram out := mystery\n");
  // arity mismatch
  bad("fn f/1 dynamic\nfn out/0 dynamic out\nprogram out := f\n");
  // assignment to a static
  bad("fn s/0 static\ntable s { default -> 0 }\nfn out/0 dynamic out\nprogram s := 1\n");
  // provably non-boolean guard
  bad("fn out/0 dynamic out\nprogram if 0 then out := 1\n");
  // relational target given a provably non-boolean right side
  bad("fn r/0 dynamic relational\nfn out/0 dynamic out\nprogram r := 3\n");
  // numerical target given a provably non-numerical right side
  bad("fn n/0 dynamic numeric\nfn out/0 dynamic out\nprogram n := true\n");
  // output variables must be plain
  bad("fn out/0 dynamic numeric out\nprogram out := 1\n");
  // input positions must be contiguous from 1
  bad("fn x/0 dynamic in 2\nfn out/0 dynamic out\nprogram out := x\n");
  // io variables must be nullary
  bad("fn x/1 dynamic in 1\nfn out/0 dynamic out\nprogram out := x(0)\n");
  // statics need an interpretation
  bad("fn s/0 static\nfn out/0 dynamic out\nprogram out := s\n");
  // tables may only interpret intrinsic statics
  bad("fn d/0 dynamic\ntable d { default -> 0 }\nfn out/0 dynamic out\nprogram out := d\n");
  // extrinsics cannot be declared dynamic
  bad("fn e/1 dynamic extrinsic\nfn out/0 dynamic out\nprogram out := e(0)\n");
  // extrinsics carry no table
  bad("fn e/1 extrinsic\ntable e { default -> 0 }\nfn out/0 dynamic out\nprogram out := e(0)\n");
  // reserved names require the generated pragma
  bad("fn $f/0 dynamic\nfn out/0 dynamic out\nprogram out := $f\n");
  // arithmetic terms need the arithmetic backend
  bad("fn out/0 dynamic out\nprogram out := succ(0)\n");
}

TEST_CASE("the generated pragma admits reserved names") {
  const char* src = R"(pragma generated
fn $f/0 dynamic numeric
fn out/0 dynamic out
backend arithmetic
program
par { $f := succ($f); out := nil }
)";
  Algorithm alg = elaborate(parse_unit(src));
  CHECK(alg.vocab->lookup("$f") != nullptr);
}

TEST_CASE("table entries are evaluated and sort-checked") {
  // value of the wrong sort for a relational table
  CHECK_THROWS_AS(elaborate(parse_unit("backend arithmetic\n"
                                       "fn s/1 static relational\n"
                                       "table s { 0 -> 5 }\n"
                                       "fn out/0 dynamic out\n"
                                       "program out := s(0)\n")),
                  CheckError);
  // duplicate argument tuples
  CHECK_THROWS_AS(elaborate(parse_unit("backend arithmetic\n"
                                       "fn s/1 static numeric\n"
                                       "table s { 0 -> 1; 0 -> 2 }\n"
                                       "fn out/0 dynamic out\n"
                                       "program out := s(0)\n")),
                  CheckError);
  // entry arity must match the declaration
  CHECK_THROWS_AS(elaborate(parse_unit("backend arithmetic\n"
                                       "fn s/2 static numeric\n"
                                       "table s { 0 -> 1 }\n"
                                       "fn out/0 dynamic out\n"
                                       "program out := s(0, 0)\n")),
                  CheckError);
  // non-ground terms are not table cells
  CHECK_THROWS_AS(elaborate(parse_unit("backend arithmetic\n"
                                       "fn s/1 static numeric\n"
                                       "table s { 0 -> succ(0); default -> 0 }\n"
                                       "fn out/0 dynamic out\n"
                                       "program out := s(0)\n")),
                  CheckError);
  // nullary backend constants are fine as table cells
  Algorithm alg = elaborate(parse_unit("backend arithmetic\n"
                                       "fn s/1 static numeric\n"
                                       "table s { 0 -> zero; default -> 5 }\n"
                                       "fn out/0 dynamic out\n"
                                       "program out := s(0)\n"));
  CHECK(alg.data->tables.at("s").eval({Value::natural(0)}) == Value::natural(0));
  CHECK(alg.data->tables.at("s").eval({Value::natural(9)}) == Value::natural(5));
}
