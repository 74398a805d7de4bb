// Kripke models over a partial-map base and the powerset semantics of
// fibred formulas, plus machine checks for the Frobenius, Beck-Chevalley
// and adjunction laws.
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "alk/fib.hpp"
#include "alk/parmaps.hpp"

namespace alk {

// A covariant functor from the base into sets and partial functions.
// world_of / map_of list the action explicitly; for cells interned later
// (composites, identities, restrictions) psi() falls back to the base's own
// partial maps when the base is a FinBase carrying the identity model.
struct KripkeModel {
  BaseOracle* base = nullptr;
  FinBase* fin = nullptr;  // set when base is a FinBase (enables the fallback)
  std::map<ObjId, FinSet> world_of;
  std::map<MorId, FinPMap> map_of;

  const FinSet& worlds(ObjId a) const;
  FinPMap psi(MorId f) const;
};

// The canonical model where every object denotes its own carrier and every
// 1-cell denotes its own partial map.
KripkeModel identity_model(FinBase& fb);

// Valuation of atomic propositions; unlisted atoms denote the empty set.
struct Assignment {
  std::map<std::pair<std::string, ObjId>, Subset> val;

  Subset at(const std::string& name, ObjId a) const;
  void set(const std::string& name, ObjId a, Subset s);
};

struct SemValue {
  ObjId type = -1;
  Subset worlds;
};

SemValue eval_formula(const KripkeModel& m, const Assignment& asg, const FibPtr& phi,
                      ObjId t);
bool eval_sequent(const KripkeModel& m, const Assignment& asg, const Sequent& s);

// Law-check outcome; `cases` counts instances tried, `failures` those that
// broke the law, `first_failure` describes one witness.
struct LawReport {
  bool ok = true;
  long cases = 0;
  long failures = 0;
  std::string first_failure;
};

// Exhaustive over subsets of the relevant fibres:
//   - when psi(f) is total, the co-Heyting identity
//     (forall_f P) ∪ Q = forall_f (P ∪ f*Q);
//   - for each g in uppers with f ⊑ g, the corollary f*P = g*P ∪ f*⊥.
// With corrupt_pullback the strict inverse image replaces f* in the
// corollary; on a non-total f this is expected to produce failures (the
// negative control).
LawReport check_frobenius(const KripkeModel& m, MorId f, const std::vector<MorId>& uppers,
                          bool corrupt_pullback = false);

// g* ∐_f P = ∐_{f̂}(ĝ* P ∧ dom(f∘ĝ)) ∨ g*⊥ over the comma square of (f, g),
// exhaustively in P.  The two meet/join corrections vanish for total f and g;
// they are the same bookkeeping the coproduct-left rule does with its starred
// falsum convention.
LawReport check_beck_chevalley(const KripkeModel& m, MorId f, MorId g);

// Galois connection ∐_f ⊣ f* over all subset pairs, monotonicity of both
// sides, and the order reversal f ⊑ g ⇒ g*Q ⊆ f*Q for each g in uppers.
LawReport check_adjunctions(const KripkeModel& m, MorId f,
                            const std::vector<MorId>& uppers = {});

Assignment random_assignment(Rng& rng, const KripkeModel& m,
                             const std::vector<std::string>& atoms);

}  // namespace alk
