// Signatures, typed variable tuples, terms, and the two constraint languages
// (conjunctions of partial equations, and the variant closed under a Heyting
// arrow). All values are immutable after construction.
#ifndef ALK_SYNTAX_HPP
#define ALK_SYNTAX_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alk/common.hpp"

namespace alk {

struct ActionDecl {
  std::string name;
  std::string src;
  std::string dst;
  bool operator==(const ActionDecl&) const = default;
};

struct Signature {
  std::vector<std::string> situations;
  std::vector<ActionDecl> actions;

  bool has_situation(const std::string& s) const;
  const ActionDecl* find_action(const std::string& a) const;
  void validate() const;  // throws TypeError on bad declarations
};

struct VarTuple {
  // ordered (variable, situation) entries; names pairwise distinct
  std::vector<std::pair<std::string, std::string>> entries;

  std::optional<std::string> type_of(const std::string& var) const;
  bool operator==(const VarTuple&) const = default;
  auto operator<=>(const VarTuple&) const = default;
};

// Actions are unary, so a term is a variable under a stack of applications,
// stored innermost-first: g(f(x)) is {var="x", apps={"f","g"}}.
struct Term {
  std::string var;
  std::vector<std::string> apps;

  bool operator==(const Term&) const = default;
  auto operator<=>(const Term&) const = default;
  std::size_t depth() const { return apps.size(); }
};

std::string print_term(const Term& t);
// situation of the term, checking each application; throws TypeError
std::string type_of_term(const Signature& sig, const VarTuple& vars, const Term& t);

// lhs ≐ rhs. `def t` is stored as t ≐ t.
struct PVEquation {
  Term lhs, rhs;
  bool operator==(const PVEquation&) const = default;
  auto operator<=>(const PVEquation&) const = default;
};

// A multiset of atomic partial equations; empty means ⊤. Insertion order is
// kept, comparisons are up to multiset equality.
struct PVFormula {
  std::vector<PVEquation> eqs;

  bool is_top() const { return eqs.empty(); }
  PVFormula& add(Term l, Term r);
  static PVFormula top() { return {}; }
  static PVFormula def(Term t) { return PVFormula{}.add(t, t); }
  static PVFormula eq(Term l, Term r) { return PVFormula{}.add(std::move(l), std::move(r)); }
  PVFormula conj(const PVFormula& other) const;
};

bool multiset_eq(const PVFormula& a, const PVFormula& b);
bool multiset_leq(const PVFormula& a, const PVFormula& b);  // a ⊆ b as multisets

struct HPVFormula;
using HPVPtr = std::shared_ptr<const HPVFormula>;

struct HPVFormula {
  enum class Kind { Top, Eq, And, Imp };
  Kind kind = Kind::Top;
  Term lhs, rhs;  // Eq
  HPVPtr a, b;    // And / Imp

  static HPVPtr top();
  static HPVPtr eq(Term l, Term r);
  static HPVPtr def(Term t) { return eq(t, t); }
  static HPVPtr conj(HPVPtr x, HPVPtr y);
  static HPVPtr imp(HPVPtr x, HPVPtr y);
  static HPVPtr embed(const PVFormula& pv);
};

bool hpv_equal(const HPVPtr& a, const HPVPtr& b);        // structural
bool hpv_conjuncts_eq(const HPVPtr& a, const HPVPtr& b);  // top-level multiset comparison
bool hpv_imp_free(const HPVPtr& f);
std::optional<PVFormula> hpv_to_pv(const HPVPtr& f);      // flattens; fails on Imp
// top-level conjunct list (And flattened, Top dropped); elements are Eq or Imp nodes
std::vector<HPVPtr> hpv_conjuncts(const HPVPtr& f);
HPVPtr hpv_of_conjuncts(const std::vector<HPVPtr>& cs);

struct Axiom {
  VarTuple vars;
  HPVPtr formula;  // PV axioms are the Imp-free ones
};

struct Theory {
  Signature sig;
  std::vector<Axiom> axioms;
};

Theory parse_theory(const std::string& text);
std::string print_theory(const Theory& t);

std::string print_pv(const PVFormula& f);
std::string print_hpv(const HPVPtr& f);

// Standalone constraint parser over a given tuple (used by the CLI and tests):
// grammar `top | def t | t == t | c & c | c => c` with parentheses.
HPVPtr parse_constraint(const Signature& sig, const VarTuple& vars, const std::string& text);
PVFormula parse_pv_constraint(const Signature& sig, const VarTuple& vars, const std::string& text);

// Capture-free simultaneous substitution; every variable of `from_vars` must
// be mapped, every replacement must be typed over `to_vars` with the variable's
// situation. Throws TypeError on mismatch.
Term substitute(const Term& t, const std::map<std::string, Term>& repl);
PVFormula substitute(const Signature& sig, const VarTuple& from_vars, const PVFormula& f,
                     const std::map<std::string, Term>& repl, const VarTuple& to_vars);
HPVPtr substitute(const Signature& sig, const VarTuple& from_vars, const HPVPtr& f,
                  const std::map<std::string, Term>& repl, const VarTuple& to_vars);

// All terms of the formula together with their subterms.
std::set<Term> subterms(const Term& t);
std::set<Term> subterms(const PVFormula& f);
std::set<Term> subterms(const HPVPtr& f);

}  // namespace alk

#endif
