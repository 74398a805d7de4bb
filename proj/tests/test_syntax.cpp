#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "alk/syntax.hpp"

using namespace alk;

static Theory davidson_like() {
  return parse_theory("sit A; act pt: A -> A; act sh: A -> A; axiom (x:A) pt(x) == sh(x);");
}

TEST_CASE("theory parsing denotes declarations") {
  Theory t = parse_theory("sit S T; act f: S -> T;");
  CHECK(t.sig.situations == std::vector<std::string>{"S", "T"});
  REQUIRE(t.sig.actions.size() == 1);
  CHECK(t.sig.actions[0].name == "f");
  CHECK(t.sig.actions[0].src == "S");
  CHECK(t.sig.actions[0].dst == "T");
}

TEST_CASE("davidson-style theory parses with axiom") {
  Theory t = davidson_like();
  REQUIRE(t.axioms.size() == 1);
  CHECK(t.axioms[0].vars.entries.size() == 1);
  CHECK(hpv_imp_free(t.axioms[0].formula));
  CHECK(print_hpv(t.axioms[0].formula) == "pt(x) == sh(x)");
}

TEST_CASE("undeclared situation is a type error") {
  CHECK_THROWS_AS(parse_theory("act f: S -> T;"), TypeError);
}

TEST_CASE("syntax errors carry position") {
  try {
    parse_theory("sit A;\nact f A -> A;");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("round trip print/parse") {
  Theory t = parse_theory(
      "sit A B;\n"
      "act f : A -> B;\n"
      "act g : A -> B;\n"
      "axiom (x:A) def f(x) & f(x) == g(x);\n"
      "axiom (x:A, y:A) x == y => f(x) == f(y);\n");
  std::string printed = print_theory(t);
  Theory t2 = parse_theory(printed);
  CHECK(print_theory(t2) == printed);
}

TEST_CASE("constraint parser handles precedence and def") {
  Theory t = davidson_like();
  VarTuple vt{{{"x", "A"}}};
  auto f = parse_constraint(t.sig, vt, "def pt(x) & pt(x) == sh(x) => def sh(x) => def x");
  // & binds tighter than =>, => is right associative
  CHECK(f->kind == HPVFormula::Kind::Imp);
  CHECK(f->a->kind == HPVFormula::Kind::And);
  CHECK(f->b->kind == HPVFormula::Kind::Imp);
  CHECK(print_hpv(parse_constraint(t.sig, vt, print_hpv(f))) == print_hpv(f));
}

TEST_CASE("terms type check along action chains") {
  Theory t = parse_theory("sit A B C; act f: A -> B; act g: B -> C;");
  VarTuple vt{{{"x", "A"}}};
  Term gfx{"x", {"f", "g"}};
  CHECK(type_of_term(t.sig, vt, gfx) == "C");
  Term bad{"x", {"g"}};
  CHECK_THROWS_AS(type_of_term(t.sig, vt, bad), TypeError);
  CHECK(print_term(gfx) == "g(f(x))");
}

TEST_CASE("substitution splices terms and checks types") {
  Theory t = parse_theory("sit A; act f: A -> A; act g: A -> A; act h: A -> A;");
  VarTuple from{{{"y", "A"}}}, to{{{"x", "A"}}};
  PVFormula phi = PVFormula::eq(Term{"y", {"f"}}, Term{"y", {"g"}});
  std::map<std::string, Term> repl{{"y", Term{"x", {"h"}}}};
  PVFormula got = substitute(t.sig, from, phi, repl, to);
  REQUIRE(got.eqs.size() == 1);
  CHECK(print_term(got.eqs[0].lhs) == "f(h(x))");
  CHECK(print_term(got.eqs[0].rhs) == "g(h(x))");

  CHECK(substitute(t.sig, from, PVFormula::top(), repl, to).is_top());
  PVFormula down = substitute(t.sig, from, PVFormula::def(Term{"y", {}}), repl, to);
  CHECK(print_pv(down) == "def h(x)");
}

TEST_CASE("substitution distributes over conjunction") {
  Theory t = parse_theory("sit A; act f: A -> A; act g: A -> A;");
  VarTuple from{{{"y", "A"}}}, to{{{"x", "A"}}};
  std::map<std::string, Term> repl{{"y", Term{"x", {"g"}}}};
  PVFormula a = PVFormula::def(Term{"y", {"f"}});
  PVFormula b = PVFormula::eq(Term{"y", {}}, Term{"y", {"f"}});
  PVFormula lhs = substitute(t.sig, from, a.conj(b), repl, to);
  PVFormula rhs = substitute(t.sig, from, a, repl, to).conj(substitute(t.sig, from, b, repl, to));
  CHECK(multiset_eq(lhs, rhs));
}

TEST_CASE("subterms close under arguments") {
  Theory t = parse_theory("sit A; act f: A -> A; act g: A -> A; act h: A -> A;");
  VarTuple vt{{{"x", "A"}}};
  PVFormula phi = PVFormula::eq(Term{"x", {"g", "f"}}, Term{"x", {}});
  auto st = subterms(phi);
  CHECK(st == std::set<Term>{Term{"x", {}}, Term{"x", {"g"}}, Term{"x", {"g", "f"}}});
  CHECK(subterms(PVFormula::top()).empty());
  PVFormula psi = parse_pv_constraint(t.sig, vt, "f(x) == g(x) & def h(x)");
  CHECK(subterms(psi) ==
        std::set<Term>{Term{"x", {}}, Term{"x", {"f"}}, Term{"x", {"g"}}, Term{"x", {"h"}}});
}

TEST_CASE("multiset comparison ignores order") {
  PVFormula a, b;
  Term x{"x", {}}, fx{"x", {"f"}};
  a.add(x, fx).add(x, x);
  b.add(x, x).add(x, fx);
  CHECK(multiset_eq(a, b));
  b.add(x, x);
  CHECK_FALSE(multiset_eq(a, b));
  CHECK(multiset_leq(a, b));
}
