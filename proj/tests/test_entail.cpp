#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "alk/entail.hpp"
#include "alk/syntax.hpp"

using namespace alk;

namespace {

Theory two_actions() {
  return parse_theory(
      "sit A;\n"
      "act f : A -> A;\n"
      "act g : A -> A;\n");
}

VarTuple one_var(const std::string& s = "A") {
  VarTuple v;
  v.entries = {{"x", s}};
  return v;
}

PVFormula pv(const Theory& th, const VarTuple& vars, const std::string& text) {
  return parse_pv_constraint(th.sig, vars, text);
}

HPVPtr hpv(const Theory& th, const VarTuple& vars, const std::string& text) {
  return parse_constraint(th.sig, vars, text);
}

void expect_valid_cm(const Theory& th, const PVFormula& hyp, const PVFormula& goal,
                     const PVJudgement& j) {
  REQUIRE(j.cm.has_value());
  const auto& cm = *j.cm;
  CHECK(cm.interp.satisfies_axioms(th));
  CHECK(cm.interp.satisfies(hyp, cm.assignment));
  CHECK_FALSE(cm.interp.satisfies(goal, cm.assignment));
}

}  // namespace

TEST_CASE("an equation entails definedness of both sides") {
  Theory th = two_actions();
  auto vars = one_var();
  auto j = pv_entails(th, vars, pv(th, vars, "f(x) == g(x)"), pv(th, vars, "def f(x)"));
  REQUIRE(j.verdict == Verdict::Proved);
  auto res = check_pv_derivation(th, j.derivation);
  INFO(res.error);
  CHECK(res.ok);

  auto j2 = pv_entails(th, vars, pv(th, vars, "f(x) == g(x)"), pv(th, vars, "def g(x)"));
  CHECK(j2.verdict == Verdict::Proved);
  CHECK(check_pv_derivation(th, j2.derivation).ok);
}

TEST_CASE("definedness of an application is not free") {
  Theory th = parse_theory("sit A;\nact f : A -> A;\n");
  auto vars = one_var();
  PVFormula hyp = PVFormula::top();
  PVFormula goal = pv(th, vars, "def f(x)");
  auto j = pv_entails(th, vars, hyp, goal);
  REQUIRE(j.verdict == Verdict::Refuted);
  expect_valid_cm(th, hyp, goal, j);
}

TEST_CASE("conjunction projects") {
  Theory th = two_actions();
  auto vars = one_var();
  auto hyp = pv(th, vars, "f(x) == g(x) & def f(f(x))");
  auto j = pv_entails(th, vars, hyp, pv(th, vars, "def f(f(x))"));
  REQUIRE(j.verdict == Verdict::Proved);
  CHECK(check_pv_derivation(th, j.derivation).ok);
}

TEST_CASE("applying an action to equals stays equal only where defined") {
  Theory th = parse_theory(
      "sit A;\n"
      "act f : A -> A;\n"
      "act g : A -> A;\n"
      "act h : A -> A;\n");
  auto vars = one_var();

  // without knowing h is defined at the common value this must fail
  auto hyp1 = pv(th, vars, "f(x) == g(x)");
  auto goal = pv(th, vars, "h(f(x)) == h(g(x))");
  auto j1 = pv_entails(th, vars, hyp1, goal, Budget{4, 2, 200000});
  REQUIRE(j1.verdict == Verdict::Refuted);
  expect_valid_cm(th, hyp1, goal, j1);

  // with it, congruence closes the gap and the derivation is checkable
  auto hyp2 = pv(th, vars, "f(x) == g(x) & def h(f(x))");
  auto j2 = pv_entails(th, vars, hyp2, goal);
  REQUIRE(j2.verdict == Verdict::Proved);
  auto res = check_pv_derivation(th, j2.derivation);
  INFO(res.error);
  CHECK(res.ok);
}

TEST_CASE("equality chains combine transitively and symmetrically") {
  Theory th = parse_theory(
      "sit A;\n"
      "act f : A -> A;\n"
      "act g : A -> A;\n"
      "act h : A -> A;\n");
  auto vars = one_var();
  auto hyp = pv(th, vars, "f(x) == g(x) & h(x) == g(x)");
  auto j = pv_entails(th, vars, hyp, pv(th, vars, "h(x) == f(x)"));
  REQUIRE(j.verdict == Verdict::Proved);
  auto res = check_pv_derivation(th, j.derivation);
  INFO(res.error);
  CHECK(res.ok);
}

TEST_CASE("theory axioms fire only at defined instances") {
  Theory th = parse_theory(
      "sit A;\n"
      "act f : A -> A;\n"
      "act h : A -> A;\n"
      "act k : A -> A;\n"
      "axiom (y:A) h(y) == k(y);\n");
  auto vars = one_var();
  auto goal = pv(th, vars, "h(f(x)) == k(f(x))");

  // f(x) may be undefined, and then nothing guarantees the instance
  auto j1 = pv_entails(th, vars, PVFormula::top(), goal, Budget{4, 2, 200000});
  REQUIRE(j1.verdict == Verdict::Refuted);
  expect_valid_cm(th, PVFormula::top(), goal, j1);

  auto j2 = pv_entails(th, vars, pv(th, vars, "def f(x)"), goal);
  REQUIRE(j2.verdict == Verdict::Proved);
  auto res = check_pv_derivation(th, j2.derivation);
  INFO(res.error);
  CHECK(res.ok);
}

TEST_CASE("axiom rounds chain through new terms") {
  Theory th = parse_theory(
      "sit A;\n"
      "act f : A -> A;\n"
      "axiom (y:A) f(y) == y;\n");
  auto vars = one_var();
  auto j = pv_entails(th, vars, PVFormula::top(), pv(th, vars, "f(f(x)) == x"));
  REQUIRE(j.verdict == Verdict::Proved);
  auto res = check_pv_derivation(th, j.derivation);
  INFO(res.error);
  CHECK(res.ok);
}

TEST_CASE("starved budgets give an honest unknown") {
  Theory th = parse_theory(
      "sit A;\n"
      "act f : A -> A;\n"
      "axiom (y:A) f(y) == y;\n");
  auto vars = one_var();
  Budget b;
  b.depth = 0;    // no axiom instantiation
  b.carrier = 0;  // no countermodel search
  auto j = pv_entails(th, vars, PVFormula::top(), pv(th, vars, "f(x) == x"), b);
  CHECK(j.verdict == Verdict::Unknown);
}

TEST_CASE("saturation state answers repeated queries consistently") {
  Theory th = two_actions();
  auto vars = one_var();
  auto cc = cc_saturate(th, vars, pv(th, vars, "f(x) == g(x)"), {}, 4);
  CHECK(cc.holds(pv(th, vars, "def f(x)")));
  CHECK(cc.holds(pv(th, vars, "def f(x)")));
  CHECK(cc.holds(pv(th, vars, "f(x) == g(x) & def x")));
  CHECK_FALSE(cc.holds(pv(th, vars, "f(f(x)) == f(g(x))")));
  Term fx{"x", {"f"}}, gx{"x", {"g"}};
  CHECK(cc.canon(fx) == cc.canon(gx));
}

TEST_CASE("broken derivations are rejected") {
  Theory th = two_actions();
  auto vars = one_var();
  Term x{"x", {}};
  Term fx{"x", {"f"}}, gx{"x", {"g"}};

  auto bad_ax = std::make_shared<PVDerivation>();
  bad_ax->tag = PVTag::Ax;
  bad_ax->vars = vars;
  bad_ax->hyp = PVFormula::eq(fx, gx);
  bad_ax->concl = PVFormula::eq(gx, fx);  // flip is not identity
  CHECK_FALSE(check_pv_derivation(th, PVDerivPtr(bad_ax)).ok);

  auto bad_eq = std::make_shared<PVDerivation>();
  bad_eq->tag = PVTag::Equality;
  bad_eq->vars = vars;
  bad_eq->eq_x = "x";
  bad_eq->eq_y = "x";
  bad_eq->hyp = PVFormula::eq(x, x).conj(PVFormula::eq(fx, fx));
  bad_eq->concl = PVFormula::eq(fx, gx);  // changes the action, not the variable
  CHECK_FALSE(check_pv_derivation(th, PVDerivPtr(bad_eq)).ok);

  auto kid = std::make_shared<PVDerivation>();
  kid->tag = PVTag::Reflexivity;
  kid->vars = one_var();
  kid->hyp = PVFormula::top();
  kid->concl = PVFormula::def(x);
  auto bad_sub = std::make_shared<PVDerivation>();
  bad_sub->tag = PVTag::Substitution;
  bad_sub->vars = vars;
  bad_sub->sigma = {{"x", fx}};
  bad_sub->kids = {PVDerivPtr(kid)};
  bad_sub->hyp = PVFormula::top();  // missing the definedness of f(x)
  bad_sub->concl = PVFormula::def(fx);
  CHECK_FALSE(check_pv_derivation(th, PVDerivPtr(bad_sub)).ok);

  auto ill = std::make_shared<PVDerivation>();
  ill->tag = PVTag::Top;
  ill->vars = vars;
  ill->hyp = PVFormula::eq(Term{"y", {}}, Term{"y", {}});  // y is not in the tuple
  ill->concl = PVFormula::top();
  CHECK_FALSE(check_pv_derivation(th, PVDerivPtr(ill)).ok);
}

TEST_CASE("arrow goals are proved by implication introduction") {
  Theory th = two_actions();
  auto vars = one_var();
  auto j = hpv_entails(th, vars, HPVFormula::top(), hpv(th, vars, "f(x) == g(x) => def f(x)"));
  REQUIRE(j.verdict == Verdict::Proved);
  auto res = check_hpv_derivation(th, j.derivation);
  INFO(res.error);
  CHECK(res.ok);
}

TEST_CASE("the converse arrow is refuted classically") {
  Theory th = two_actions();
  auto vars = one_var();
  auto goal = hpv(th, vars, "def f(x) => f(x) == g(x)");
  auto j = hpv_entails(th, vars, HPVFormula::top(), goal);
  REQUIRE(j.verdict == Verdict::Refuted);
  const auto& cm = *j.cm;
  CHECK(cm.interp.satisfies_axioms(th));
  CHECK_FALSE(cm.interp.satisfies(goal, cm.assignment));
}

TEST_CASE("arrows in the hypothesis can be eliminated") {
  Theory th = two_actions();
  auto vars = one_var();
  auto hyp = hpv(th, vars, "(def f(x) => f(x) == g(x)) & def f(x)");
  auto j = hpv_entails(th, vars, hyp, hpv(th, vars, "f(x) == g(x)"));
  REQUIRE(j.verdict == Verdict::Proved);
  auto res = check_hpv_derivation(th, j.derivation);
  INFO(res.error);
  CHECK(res.ok);

  // and through a further equational consequence
  auto j2 = hpv_entails(th, vars, hyp, hpv(th, vars, "def g(x)"));
  REQUIRE(j2.verdict == Verdict::Proved);
  CHECK(check_hpv_derivation(th, j2.derivation).ok);
}

TEST_CASE("anything entails the empty conjunction") {
  Theory th = two_actions();
  auto vars = one_var();
  auto j = hpv_entails(th, vars, hpv(th, vars, "f(x) == g(x)"), HPVFormula::top());
  REQUIRE(j.verdict == Verdict::Proved);
  CHECK(check_hpv_derivation(th, j.derivation).ok);

  auto jp = pv_entails(th, vars, pv(th, vars, "f(x) == g(x)"), PVFormula::top());
  REQUIRE(jp.verdict == Verdict::Proved);
  CHECK(check_pv_derivation(th, jp.derivation).ok);
}

TEST_CASE("nested arrow goals") {
  Theory th = two_actions();
  auto vars = one_var();
  auto goal = hpv(th, vars, "f(x) == g(x) => (def f(x) & def g(x))");
  auto j = hpv_entails(th, vars, HPVFormula::top(), goal);
  REQUIRE(j.verdict == Verdict::Proved);
  auto res = check_hpv_derivation(th, j.derivation);
  INFO(res.error);
  CHECK(res.ok);
}

TEST_CASE("independent search agrees on simple judgements") {
  Theory th = two_actions();
  auto vars = one_var();

  CHECK(pv_oracle_search(th, vars, pv(th, vars, "f(x) == g(x)"), pv(th, vars, "def g(x)"), 8));
  CHECK(pv_oracle_search(th, vars, pv(th, vars, "f(x) == g(x)"), pv(th, vars, "g(x) == f(x)"), 8));
  CHECK_FALSE(pv_oracle_search(th, vars, PVFormula::top(), pv(th, vars, "def f(x)"), 8));

  Theory ax = parse_theory(
      "sit A;\n"
      "act f : A -> A;\n"
      "act h : A -> A;\n"
      "act k : A -> A;\n"
      "axiom (y:A) h(y) == k(y);\n");
  CHECK(pv_oracle_search(ax, vars, pv(ax, vars, "def f(x)"),
                         pv(ax, vars, "h(f(x)) == k(f(x))"), 8));
  CHECK_FALSE(pv_oracle_search(ax, vars, PVFormula::top(),
                               pv(ax, vars, "h(f(x)) == k(f(x))"), 4));
}

TEST_CASE("derivations stay well formed under embedding") {
  Theory th = two_actions();
  auto vars = one_var();
  auto j = pv_entails(th, vars, pv(th, vars, "f(x) == g(x)"), pv(th, vars, "def f(x) & def g(x)"));
  REQUIRE(j.verdict == Verdict::Proved);
  auto hd = embed_pv_derivation(j.derivation);
  auto res = check_hpv_derivation(th, hd);
  INFO(res.error);
  CHECK(res.ok);
  CHECK(derivation_size(j.derivation) > 0);
}
