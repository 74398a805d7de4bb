#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "alk/fib.hpp"
#include "alk/fibres.hpp"
#include "alk/parmaps.hpp"

using namespace alk;

namespace {

// A = {a0,a1,a2}, B = {b0,b1}.
//   f : A -> B total        a0,a1 -> b0, a2 -> b1
//   p : A -> B partial      a0 -> b0           (p ⊑ f)
//   g : B -> B partial      b0 -> b0
struct Fix {
  FinBase base;
  ObjId A, B;
  MorId f, p, g;
  KripkeModel m;

  Fix() {
    FinSet cA = named_carrier("a", 3);
    FinSet cB = named_carrier("b", 2);
    A = base.add_object("A", cA);
    B = base.add_object("B", cB);
    f = base.add_map("f", A, B, FinPMap{cA, cB, {{"a0", "b0"}, {"a1", "b0"}, {"a2", "b1"}}});
    p = base.add_map("p", A, B, FinPMap{cA, cB, {{"a0", "b0"}}});
    g = base.add_map("g", B, B, FinPMap{cB, cB, {{"b0", "b0"}}});
    m = identity_model(base);
  }

  FibPtr at(const std::string& n, ObjId t) { return FibFormula::mk_atom(n, t); }
  Subset ev(const Assignment& asg, const FibPtr& phi) {
    return eval_formula(m, asg, phi, phi->type).worlds;
  }
};

Subset setof(std::initializer_list<std::string> xs) { return Subset(xs); }

}  // namespace

TEST_CASE("negated starred falsum carves out the domain of the action") {
  Fix F;
  Assignment asg;
  FibPtr perf = FibFormula::neg(FibFormula::star(F.base, F.p, FibFormula::bot(F.B)));
  CHECK(F.ev(asg, perf) == setof({"a0"}));
  // a total action is performable everywhere
  FibPtr perff = FibFormula::neg(FibFormula::star(F.base, F.f, FibFormula::bot(F.B)));
  CHECK(F.ev(asg, perff) == setof({"a0", "a1", "a2"}));
  // and its starred falsum is falsum on the nose
  CHECK(F.ev(asg, FibFormula::star(F.base, F.f, FibFormula::bot(F.B))).empty());
}

TEST_CASE("pullback preserves verum, conjunction and disjunction") {
  Fix F;
  Rng rng(7);
  FibPtr P = F.at("P", F.B), Q = F.at("Q", F.B);
  for (int i = 0; i < 20; ++i) {
    Assignment asg = random_assignment(rng, F.m, {"P", "Q"});
    for (MorId h : {F.f, F.p}) {
      auto st = [&](FibPtr x) { return FibFormula::star(F.base, h, std::move(x)); };
      CHECK(F.ev(asg, st(FibFormula::top(F.B))) == F.ev(asg, FibFormula::top(F.A)));
      CHECK(F.ev(asg, st(FibFormula::conj(P, Q))) ==
            F.ev(asg, FibFormula::conj(st(P), st(Q))));
      CHECK(F.ev(asg, st(FibFormula::disj(P, Q))) ==
            F.ev(asg, FibFormula::disj(st(P), st(Q))));
    }
  }
}

TEST_CASE("pullback commutes with negation exactly for total actions") {
  Fix F;
  Assignment asg;
  asg.set("P", F.B, setof({"b0"}));
  FibPtr P = F.at("P", F.B);
  FibPtr lhs_f = FibFormula::star(F.base, F.f, FibFormula::neg(P));
  FibPtr rhs_f = FibFormula::neg(FibFormula::star(F.base, F.f, P));
  CHECK(F.ev(asg, lhs_f) == F.ev(asg, rhs_f));
  // p is undefined on a1, a2: the implication reading keeps them on the
  // left-hand side but the negation on the right drops them
  FibPtr lhs_p = FibFormula::star(F.base, F.p, FibFormula::neg(P));
  FibPtr rhs_p = FibFormula::neg(FibFormula::star(F.base, F.p, P));
  CHECK(F.ev(asg, lhs_p) == setof({"a1", "a2"}));
  CHECK(F.ev(asg, rhs_p).empty());
}

TEST_CASE("existential Frobenius identity holds for all subsets") {
  Fix F;
  FibPtr P = F.at("P", F.A), Q = F.at("Q", F.B);
  for (MorId h : {F.f, F.p}) {
    for (const Subset& sp : all_subsets(F.base.carrier(F.A))) {
      for (const Subset& sq : all_subsets(F.base.carrier(F.B))) {
        Assignment asg;
        asg.set("P", F.A, sp);
        asg.set("Q", F.B, sq);
        FibPtr lhs = FibFormula::coprod(
            F.base, h, FibFormula::conj(P, FibFormula::star(F.base, h, Q)));
        FibPtr rhs = FibFormula::conj(FibFormula::coprod(F.base, h, P), Q);
        CHECK(F.ev(asg, lhs) == F.ev(asg, rhs));
      }
    }
  }
}

TEST_CASE("universal Frobenius checker passes and the corrupted pullback fails") {
  Fix F;
  LawReport tot = check_frobenius(F.m, F.f, {});
  CHECK(tot.ok);
  CHECK(tot.cases > 0);
  // corollary along p ⊑ f
  LawReport cor = check_frobenius(F.m, F.p, {F.f});
  CHECK(cor.ok);
  CHECK(cor.cases > 0);
  // the strict inverse image breaks the corollary on a non-total action
  LawReport bad = check_frobenius(F.m, F.p, {F.f}, true);
  CHECK_FALSE(bad.ok);
  CHECK(bad.failures > 0);
  CHECK_FALSE(bad.first_failure.empty());
  // but not on a total one, where both pullbacks agree
  LawReport still = check_frobenius(F.m, F.f, {F.f}, true);
  CHECK(still.ok);
}

TEST_CASE("Beck-Chevalley holds over the comma square") {
  Fix F;
  for (MorId a : {F.f, F.p})
    for (MorId b : {F.f, F.p, F.g}) {
      LawReport r = check_beck_chevalley(F.m, a, b);
      CHECK(r.ok);
      CHECK(r.cases > 0);
    }
  MorId idB = F.base.identity(F.B);
  LawReport r = check_beck_chevalley(F.m, idB, idB);
  CHECK(r.ok);
}

TEST_CASE("image and pullback form a Galois connection") {
  Fix F;
  for (MorId h : {F.f, F.p, F.g}) {
    LawReport r = check_adjunctions(F.m, h, {});
    CHECK(r.ok);
    CHECK(r.cases > 0);
  }
  LawReport ord = check_adjunctions(F.m, F.p, {F.f});
  CHECK(ord.ok);
}

TEST_CASE("quantifier formulas evaluate to image and dual image") {
  Fix F;
  Assignment asg;
  asg.set("P", F.A, setof({"a0", "a2"}));
  FibPtr P = F.at("P", F.A);
  CHECK(F.ev(asg, FibFormula::coprod(F.base, F.f, P)) == setof({"b0", "b1"}));
  CHECK(F.ev(asg, FibFormula::coprod(F.base, F.p, P)) == setof({"b0"}));
  // b0 has preimage {a0,a1} under f, and a1 is missing from P
  CHECK(F.ev(asg, FibFormula::prod(F.base, F.f, P)) == setof({"b1"}));
  asg.set("P", F.A, setof({"a0", "a1", "a2"}));
  CHECK(F.ev(asg, FibFormula::prod(F.base, F.f, P)) == setof({"b0", "b1"}));
  // the dual image needs a total action
  CHECK_THROWS_AS(F.ev(asg, FibFormula::prod(F.base, F.p, P)), TypeError);
}

TEST_CASE("sequent evaluation follows the meet-join convention") {
  Fix F;
  Assignment asg;
  asg.set("P", F.B, setof({"b0"}));
  asg.set("Q", F.B, setof({"b1"}));
  FibPtr P = F.at("P", F.B), Q = F.at("Q", F.B);
  CHECK(eval_sequent(F.m, asg, Sequent{F.B, {P}, {P}}));
  CHECK_FALSE(eval_sequent(F.m, asg, Sequent{F.B, {P}, {Q}}));
  // empty left is everything, empty right is nothing
  CHECK(eval_sequent(F.m, asg, Sequent{F.B, {}, {FibFormula::top(F.B)}}));
  CHECK_FALSE(eval_sequent(F.m, asg, Sequent{F.B, {}, {P}}));
  CHECK(eval_sequent(F.m, asg, Sequent{F.B, {FibFormula::bot(F.B)}, {}}));
  CHECK_FALSE(eval_sequent(F.m, asg, Sequent{F.B, {FibFormula::top(F.B)}, {}}));
  // meets and joins across several formulas
  CHECK(eval_sequent(F.m, asg, Sequent{F.B, {P, Q}, {FibFormula::bot(F.B)}}));
  CHECK(eval_sequent(F.m, asg, Sequent{F.B, {FibFormula::top(F.B)}, {P, Q}}));
}

TEST_CASE("evaluation rejects type mismatches") {
  Fix F;
  Assignment asg;
  FibPtr P = F.at("P", F.B);
  CHECK_THROWS_AS(eval_formula(F.m, asg, P, F.A), TypeError);
  // star lands at the source of the cell
  FibPtr st = FibFormula::star(F.base, F.f, P);
  CHECK(eval_formula(F.m, asg, st, F.A).type == F.A);
  CHECK_THROWS_AS(eval_formula(F.m, asg, st, F.B), TypeError);
}

TEST_CASE("random assignments stay inside the carriers") {
  Fix F;
  Rng rng(99);
  for (int i = 0; i < 10; ++i) {
    Assignment asg = random_assignment(rng, F.m, {"P", "Q", "R"});
    for (ObjId t : {F.A, F.B}) {
      const FinSet& car = F.base.carrier(t);
      for (const char* nm : {"P", "Q", "R"})
        for (const std::string& w : asg.at(nm, t)) CHECK(car.contains(w));
    }
  }
}
