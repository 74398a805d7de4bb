// Decision and semi-decision procedures for entailment between partial
// equations, with explicit checkable derivations and countermodel search over
// finite partial-map interpretations.
#ifndef ALK_ENTAIL_HPP
#define ALK_ENTAIL_HPP

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alk/parmaps.hpp"
#include "alk/syntax.hpp"

namespace alk {

// ---------------------------------------------------------------------------
// Finite interpretations of a signature (carriers + one partial map per action)

struct Interp {
  std::map<std::string, FinSet> sits;
  std::map<std::string, FinPMap> acts;

  std::optional<std::string> eval(const Term& t,
                                  const std::map<std::string, std::string>& asg) const;
  bool satisfies(const PVFormula& f, const std::map<std::string, std::string>& asg) const;
  bool satisfies(const HPVPtr& f, const std::map<std::string, std::string>& asg) const;
  bool satisfies_axioms(const Theory& th) const;
  std::string describe(const Signature& sig) const;
};

// All assignments of the tuple's variables into the interpretation's carriers.
std::vector<std::map<std::string, std::string>> enumerate_assignments(const Interp& in,
                                                                      const VarTuple& vars);

// Calls fn for each interpretation with carriers of size 1..max_carrier until
// fn returns true (found) or the step budget runs out. Returns: found flag and
// whether enumeration was exhausted.
struct EnumResult {
  bool found = false;
  bool exhausted = false;
};
EnumResult enumerate_interps(const Signature& sig, int max_carrier, long max_steps,
                             const std::function<bool(const Interp&)>& fn);

struct Countermodel {
  Interp interp;
  std::map<std::string, std::string> assignment;
};

// ---------------------------------------------------------------------------
// Derivations

enum class PVTag {
  Ax,
  Cut,
  Substitution,
  Reflexivity,
  Equality,
  Strictness1,
  Strictness2,
  Top,
  AndIntro,
  Proj1,
  Proj2,
  AxiomOfTheory,
  HeytingI,  // the two extra tags are only legal in HPV derivations
  HeytingE,
};
const char* to_string(PVTag t);

struct PVDerivation;
using PVDerivPtr = std::shared_ptr<const PVDerivation>;

struct PVDerivation {
  PVTag tag;
  VarTuple vars;
  PVFormula hyp, concl;
  std::vector<PVDerivPtr> kids;
  // side data
  std::string eq_x, eq_y;                 // Equality: replace some x by y
  std::map<std::string, Term> sigma;      // Substitution: kid var -> term over vars
  int axiom_index = -1;                   // AxiomOfTheory
};

struct HPVDerivation;
using HPVDerivPtr = std::shared_ptr<const HPVDerivation>;

struct HPVDerivation {
  PVTag tag;
  VarTuple vars;
  HPVPtr hyp, concl;
  std::vector<HPVDerivPtr> kids;
  std::string eq_x, eq_y;
  std::map<std::string, Term> sigma;
  int axiom_index = -1;
};

struct CheckResult {
  bool ok = true;
  std::string error;  // first failing node: rule tag + reason
};

CheckResult check_pv_derivation(const Theory& th, const PVDerivPtr& d);
CheckResult check_hpv_derivation(const Theory& th, const HPVDerivPtr& d);
HPVDerivPtr embed_pv_derivation(const PVDerivPtr& d);

std::size_t derivation_size(const PVDerivPtr& d);

// ---------------------------------------------------------------------------
// Congruence closure with a definedness mark and explanation recording

class CongruenceState {
 public:
  CongruenceState(const Theory& th, VarTuple vars);

  // post: least fixpoint of definedness marking, equation assertion,
  // congruence on defined terms, and axiom instantiation at defined universe
  // terms for up to `depth` rounds.
  void saturate(const PVFormula& hypothesis, const std::set<Term>& extra_universe, int depth);

  bool contains(const Term& t) const { return idx_.count(t) != 0; }
  bool is_defined(const Term& t) const;
  bool same_class(const Term& a, const Term& b) const;
  // least member of t's class (by depth, then print); t itself if undefined
  Term canon(const Term& t) const;
  const std::vector<Term>& universe() const { return universe_; }
  bool holds(const PVFormula& goal) const;

  // explicit derivation of (hypothesis ⊢ goal); requires holds(goal)
  PVDerivPtr reconstruct(const PVFormula& goal) const;

 private:
  struct EdgeReason {
    enum class Kind { Hyp, AxInst, Cong } kind = Kind::Hyp;
    int hyp_eq = -1;
    int ax = -1;
    int ax_eq = -1;
    std::map<std::string, Term> sigma;
    int sub_a = -1, sub_b = -1;  // Cong: child terms, one application below
    bool fwd = true;             // reason proves from ≐ to (else flipped)
  };
  struct DefReason {
    enum class Kind { Var, Subterm, SideOfHyp, SideOfAx, Propagate } kind = Kind::Var;
    int super_term = -1;  // Subterm
    int hyp_eq = -1;      // SideOfHyp
    int ax = -1;
    int ax_eq = -1;
    std::map<std::string, Term> sigma;  // SideOfAx
    int from_term = -1;                 // Propagate: defined equal term (Cong source)
    int sub_a = -1, sub_b = -1;         // Propagate: justifying child pair
  };

  int intern(const Term& t);
  void mark_defined(int t, DefReason r);
  int find(int a) const;
  void merge(int a, int b, EdgeReason r);
  void reroot(int a);
  bool cc_round();
  void close();

  // derivation builders
  PVDerivPtr d_hyp() const;
  PVDerivPtr d_proj(const PVFormula& big, const PVFormula& small) const;
  PVDerivPtr d_cut(const PVDerivPtr& a, const PVDerivPtr& b) const;
  PVDerivPtr d_and(const PVDerivPtr& a, const PVDerivPtr& b) const;
  PVDerivPtr d_def(int t) const;                 // hyp ⊢ ↓t
  PVDerivPtr d_eq(int a, int b) const;           // hyp ⊢ a ≐ b (same class)
  PVDerivPtr d_edge(int from, int to, const EdgeReason& r) const;
  PVDerivPtr d_sym(const PVDerivPtr& ab) const;  // from hyp ⊢ a≐b to hyp ⊢ b≐a
  PVDerivPtr d_axinst(int ax, const std::map<std::string, Term>& sigma) const;

  const Theory& th_;
  VarTuple vars_;
  PVFormula hyp_;
  std::vector<Term> universe_;
  std::map<Term, int> idx_;
  mutable std::vector<int> uf_;
  std::vector<int> forest_parent_;
  std::vector<EdgeReason> forest_reason_;
  std::vector<std::optional<DefReason>> def_;
  mutable std::map<int, PVDerivPtr> def_memo_;
};

CongruenceState cc_saturate(const Theory& th, const VarTuple& vars, const PVFormula& hypothesis,
                            const std::set<Term>& universe, int depth);

// ---------------------------------------------------------------------------
// Entailment judgements

struct PVJudgement {
  Verdict verdict = Verdict::Unknown;
  PVDerivPtr derivation;            // Proved
  std::optional<Countermodel> cm;   // Refuted
};

struct HPVJudgement {
  Verdict verdict = Verdict::Unknown;
  HPVDerivPtr derivation;
  std::optional<Countermodel> cm;
};

PVJudgement pv_entails(const Theory& th, const VarTuple& vars, const PVFormula& hyp,
                       const PVFormula& goal, const Budget& budget = {});
HPVJudgement hpv_entails(const Theory& th, const VarTuple& vars, const HPVPtr& hyp,
                         const HPVPtr& goal, const Budget& budget = {});

// Independent bounded backward proof search over the entailment rules
// (iterative deepening on content-rule count; used as a test oracle).
bool pv_oracle_search(const Theory& th, const VarTuple& vars, const PVFormula& hyp,
                      const PVFormula& goal, int size_bound);

}  // namespace alk

#endif
