#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "asmw/cosim.hpp"
#include "asmw/interp.hpp"
#include "asmw/normalize.hpp"
#include "asmw/parser.hpp"

using namespace asmw;

namespace {

// Vocabulary shared by the merge tests: three selector variables feeding a
// static relation, three targets to assign.
const char* kMergeUnit =
    "backend arithmetic\n"
    "fn x1/0 dynamic numeric\n"
    "fn x2/0 dynamic numeric\n"
    "fn x3/0 dynamic numeric\n"
    "fn a/0 dynamic numeric\n"
    "fn b/0 dynamic numeric\n"
    "fn c/0 dynamic numeric\n"
    "fn p/1 static relational\n"
    "table p { 0 -> true; default -> false }\n"
    "program skip\n";

struct MergeParts {
  Algorithm alg;
  TermPtr g1, g2, h1;
  RulePtr p1, p2, q1;
  NormalForm pnf, qnf;
};

MergeParts merge_parts() {
  MergeParts m;
  m.alg = elaborate(parse_unit(kMergeUnit));
  m.g1 = Term::app("p", {Term::app("x1")});
  m.g2 = Term::app("p", {Term::app("x2")});
  m.h1 = Term::app("p", {Term::app("x3")});
  m.p1 = Rule::assign("a", {}, Term::nat(1));
  m.p2 = Rule::assign("b", {}, Term::nat(2));
  m.q1 = Rule::assign("c", {}, Term::nat(3));
  m.pnf = {NormalClause{m.g1, {m.p1}}, NormalClause{m.g2, {m.p2}}};
  m.qnf = {NormalClause{m.h1, {m.q1}}};
  return m;
}

bool bodies_equal(const std::vector<RulePtr>& a, const std::vector<RulePtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!rule_equal(a[i], b[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("two-against-one merge yields the five clause product in order") {
  MergeParts m = merge_parts();
  NormalForm out = merge_parallel(m.pnf, m.qnf, *m.alg.vocab);
  REQUIRE(out.size() == 5);
  CHECK(term_equal(out[0].guard, Term::conj(m.g1, m.h1)));
  CHECK(bodies_equal(out[0].body, {m.p1, m.q1}));
  CHECK(term_equal(out[1].guard, m.g1));
  CHECK(bodies_equal(out[1].body, {m.p1}));
  CHECK(term_equal(out[2].guard, Term::conj(m.g2, m.h1)));
  CHECK(bodies_equal(out[2].body, {m.p2, m.q1}));
  CHECK(term_equal(out[3].guard, m.g2));
  CHECK(bodies_equal(out[3].body, {m.p2}));
  CHECK(term_equal(out[4].guard, m.h1));
  CHECK(bodies_equal(out[4].body, {m.q1}));
}

TEST_CASE("every guard-truth category produces the same updates and evaluations") {
  MergeParts m = merge_parts();
  RulePtr combined = Rule::par({normal_form_to_rule(m.pnf), normal_form_to_rule(m.qnf)});
  RulePtr merged = normal_form_to_rule(merge_parallel(m.pnf, m.qnf, *m.alg.vocab));

  const Symbol* x1 = m.alg.vocab->lookup("x1");
  const Symbol* x2 = m.alg.vocab->lookup("x2");
  const Symbol* x3 = m.alg.vocab->lookup("x3");
  OracleEnv env;
  // All eight selector settings; they cover the six ways the five guards can
  // resolve (first true guard or none on each side).
  for (unsigned bits = 0; bits < 8; ++bits) {
    State base(m.alg.vocab, m.alg.data);
    base.write_dynamic(*x1, {}, Value::natural((bits >> 0) & 1));
    base.write_dynamic(*x2, {}, Value::natural((bits >> 1) & 1));
    base.write_dynamic(*x3, {}, Value::natural((bits >> 2) & 1));

    Algorithm left = m.alg;
    left.program = combined;
    Algorithm right = m.alg;
    right.program = merged;
    State sl = base;
    State sr = base;
    StepRecord rl = step(left, sl, env);
    StepRecord rr = step(right, sr, env);
    INFO("selector bits ", bits);
    CHECK(rl.outcome == StepRecord::Outcome::Advanced);
    CHECK(rr.outcome == StepRecord::Outcome::Advanced);
    CHECK(rl.updates == rr.updates);
    CHECK(rl.trace.static_evals == rr.trace.static_evals);
    CHECK(rl.trace.dynamic_reads == rr.trace.dynamic_reads);
    CHECK(sl == sr);
  }
}

TEST_CASE("a cascade passes through with guards and bodies untouched") {
  SourceUnit u = parse_unit(
      "backend arithmetic\n"
      "fn n/0 dynamic numeric in 1\n"
      "fn got/0 dynamic relational\n"
      "fn acc/0 dynamic numeric\n"
      "fn f1/0 dynamic numeric\n"
      "fn out/0 dynamic out\n"
      "program\n"
      "if eq(n, 0) then out := succ(0)\n"
      "else if not(got) then par { f1 := n; got := true }\n"
      "else par { acc := succ(acc); f1 := acc }\n");
  Algorithm alg = elaborate(u);
  NormalForm nf = normalize_rule(u.program, *alg.vocab);
  REQUIRE(nf.size() == 3);
  CHECK(term_equal(nf[0].guard, u.program->guard));
  CHECK(bodies_equal(nf[0].body, {u.program->then_rule}));
  CHECK(term_equal(nf[1].guard, u.program->else_rule->guard));
  CHECK(nf[1].body.size() == 2);
  CHECK(term_equal(nf[2].guard, Term::true_lit()));
  CHECK(nf[2].body.size() == 2);
  CHECK(rule_equal(nf[2].body[1], u.program->else_rule->else_rule->children[1]));
}

TEST_CASE("nested parallel blocks flatten into one always-on clause") {
  RulePtr r = Rule::par({Rule::assign("a", {}, Term::nat(1)),
                         Rule::par({Rule::assign("b", {}, Term::nat(2)),
                                    Rule::assign("c", {}, Term::nat(3))})});
  Algorithm alg = elaborate(parse_unit(kMergeUnit));
  NormalForm nf = normalize_rule(r, *alg.vocab);
  REQUIRE(nf.size() == 1);
  CHECK(term_equal(nf[0].guard, Term::true_lit()));
  REQUIRE(nf[0].body.size() == 3);
  CHECK(nf[0].body[0]->lhs_head == "a");
  CHECK(nf[0].body[1]->lhs_head == "b");
  CHECK(nf[0].body[2]->lhs_head == "c");

  NormalForm empty = normalize_rule(Rule::skip(), *alg.vocab);
  REQUIRE(empty.size() == 1);
  CHECK(term_equal(empty[0].guard, Term::true_lit()));
  CHECK(empty[0].body.empty());
}

TEST_CASE("guard combination stays short-circuiting unless provably safe") {
  Algorithm alg = elaborate(parse_unit(
      "backend arithmetic\n"
      "fn d/0 dynamic relational\n"
      "fn a/0 dynamic numeric\n"
      "fn c/0 dynamic numeric\n"
      "fn p/1 static relational\n"
      "table p { 0 -> true; default -> false }\n"
      "program skip\n"));
  TermPtr g1 = Term::app("p", {Term::nat(0)});
  TermPtr h1 = Term::app("p", {Term::nat(1)});
  TermPtr d = Term::app("d");
  NormalClause pa{g1, {Rule::assign("a", {}, Term::nat(1))}};
  NormalClause qa{h1, {Rule::assign("c", {}, Term::nat(3))}};

  // Singleton q with provably Boolean guards: a plain conjunction.
  NormalForm plain = merge_parallel({pa}, {qa}, *alg.vocab);
  REQUIRE(plain.size() == 3);
  CHECK(term_equal(plain[0].guard, Term::conj(g1, h1)));

  // A dynamic guard may hold nil, so the combination must not force it.
  NormalForm guarded = merge_parallel({NormalClause{d, pa.body}}, {qa}, *alg.vocab);
  CHECK(term_equal(guarded[0].guard, Term::ite(d, h1, Term::false_lit())));

  // Two q clauses: the scan of q must not be forced either.
  NormalForm two = merge_parallel({pa}, {qa, NormalClause{Term::true_lit(), {}}}, *alg.vocab);
  REQUIRE(two.size() == 5);
  CHECK(term_equal(two[0].guard, Term::ite(g1, h1, Term::false_lit())));
}

TEST_CASE("a conditional whose branch is itself conditional wraps its guards") {
  Algorithm alg = elaborate(parse_unit(kMergeUnit));
  TermPtr g = Term::app("p", {Term::app("x1")});
  TermPtr h = Term::app("p", {Term::app("x2")});
  RulePtr a1 = Rule::assign("a", {}, Term::nat(1));
  RulePtr b2 = Rule::assign("b", {}, Term::nat(2));
  RulePtr r = Rule::cond(g, Rule::cond(h, a1, Rule::skip()), b2);
  NormalForm nf = normalize_rule(r, *alg.vocab);
  REQUIRE(nf.size() == 3);
  CHECK(term_equal(nf[0].guard, Term::ite(g, h, Term::false_lit())));
  CHECK(bodies_equal(nf[0].body, {a1}));
  CHECK(term_equal(nf[1].guard, Term::ite(g, Term::true_lit(), Term::false_lit())));
  CHECK(nf[1].body.empty());
  CHECK(term_equal(nf[2].guard, Term::ite(g, Term::false_lit(), Term::true_lit())));
  CHECK(bodies_equal(nf[2].body, {b2}));
}

TEST_CASE("cascade recognition accepts exactly rendered clause lists") {
  Algorithm alg = elaborate(parse_unit(kMergeUnit));
  MergeParts m = merge_parts();
  RulePtr rendered = normal_form_to_rule(merge_parallel(m.pnf, m.qnf, *alg.vocab));
  CHECK(is_compound_conditional(rendered));
  CHECK(is_compound_conditional(Rule::skip()));
  CHECK_FALSE(is_compound_conditional(Rule::assign("a", {}, Term::nat(1))));
  CHECK_FALSE(is_compound_conditional(Rule::par({Rule::assign("a", {}, Term::nat(1))})));
  // A conditional then-branch disqualifies the body.
  RulePtr bad = Rule::cond(m.g1, Rule::cond(m.h1, m.p1, Rule::skip()), Rule::skip());
  CHECK_FALSE(is_compound_conditional(bad));
  // A chain must bottom out in skip, not an assignment.
  RulePtr tail = Rule::cond(m.g1, m.p1, m.p2);
  CHECK_FALSE(is_compound_conditional(tail));
}

TEST_CASE("rendering singleton bodies keeps them bare") {
  NormalForm nf = {NormalClause{Term::true_lit(), {Rule::assign("a", {}, Term::nat(1))}},
                   NormalClause{Term::false_lit(),
                                {Rule::assign("b", {}, Term::nat(2)),
                                 Rule::assign("c", {}, Term::nat(3))}}};
  RulePtr r = normal_form_to_rule(nf);
  REQUIRE(r->kind == Rule::Kind::Cond);
  CHECK(r->then_rule->kind == Rule::Kind::Assign);
  CHECK(r->else_rule->then_rule->kind == Rule::Kind::Par);
  CHECK(r->else_rule->then_rule->children.size() == 2);
  CHECK(r->else_rule->else_rule->kind == Rule::Kind::Par);
  CHECK(r->else_rule->else_rule->children.empty());
}

TEST_CASE("whole-unit normalization is checked and equivalent") {
  SourceUnit u = parse_unit(
      "backend arithmetic\n"
      "fn x/0 dynamic numeric in 1\n"
      "fn i/0 dynamic numeric\n"
      "fn flag/0 dynamic relational\n"
      "fn out/0 dynamic out\n"
      "program par {\n"
      "  if eq(i, x) then out := i else i := succ(i);\n"
      "  if flag then skip else flag := true\n"
      "}\n");
  SourceUnit norm = normalize_unit(u);
  CHECK(is_compound_conditional(norm.program));
  elaborate(norm);
  VerifyReport rep = verify_normalization(u, norm, OracleEnv{}, 77, 60);
  INFO(rep.details.dump(2));
  CHECK(rep.ok);
  CHECK(rep.cases > 0);
}

TEST_CASE("batch driver passes over generated rules") {
  DriverConfig config;
  config.seed = 5;
  config.count = 40;
  config.state_budget = 40;
  Json report = drive_normalization(config);
  INFO(report.dump(2));
  CHECK(report["ok"] == Json(true));
  CHECK(report["cases"].get<long>() > 0);
}
