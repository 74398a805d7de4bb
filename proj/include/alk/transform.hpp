// Proof transformations over the fibred sequent calculus: admissible
// weakening, pullback of whole proofs along a base 1-cell, the inversion
// lemma, expansions of the admissible rules, and a random proof generator
// for the property harnesses.
#pragma once

#include <vector>

#include "alk/calculus.hpp"

namespace alk {

// Inserts X into the conclusion of p (left or right side), reusing leaf
// slack wherever possible so the height never increases; falls back to a
// plain weakening node (height +1) when the proof root blocks absorption.
// Throws TransformError when even that is impossible (inserting a formula
// of the wrong pullback shape into an f*-style root with empty premise
// right side would change the f*bot bookkeeping).
ProofPtr weaken_proof(BaseOracle& base, const ProofPtr& p, const FibPtr& X,
                      bool left);
// Absorbing variant that refuses to spend height: throws instead of
// wrapping a weakening node.
ProofPtr weaken_proof_strict(BaseOracle& base, const ProofPtr& p, const FibPtr& X,
                             bool left);

// Reindexes a cut-free proof of Γ ⊢ Δ at target(phi) along phi: returns a
// cut-free proof of phi*Γ ⊢ phi*Δ at source(phi) (right side per the
// star_context convention) with height ≤ height(p).
ProofPtr pullback_proof(BaseOracle& base, const ProofPtr& p, MorId phi);

// Inversion targets. `formula` designates the occurrence to invert, as it
// appears in the conclusion of p.
//
//   1  left P∧Q       ⇒ Γ, P, Q ⊢ Δ            right P∨Q ⇒ Γ ⊢ P, Q, Δ
//   2  left f*(P∧Q)   ⇒ Γ, f*P, f*Q ⊢ Δ        right f*(P∨Q) ⇒ Γ ⊢ f*P, f*Q, Δ
//   3  right ¬P       ⇒ Γ, P ⊢ Δ
//   4  right f*(¬P)   ⇒ Γ, f*P ⊢ f*⊥, Δ
//   5  left ¬P        ⇒ Γ ⊢ P, Δ
//   6  left f*(¬P)    ⇒ Γ ⊢ f*P, Δ
//   7  right P∧Q      ⇒ Γ ⊢ P_component, Δ      (also right f*(P∧Q))
//   8  left P∨Q       ⇒ Γ, P_component ⊢ Δ      (also left f*(P∨Q))
//   9  left f*∐_g P, cells h, k with f∘h ⊑ g∘k
//                     ⇒ h*Γ, k*P ⊢ h*Δ
//  10  left f*P       ⇒ Γ, f*⊥ ⊢ Δ
//
// Starred shapes may nest pullbacks (f*g*… chains); the implementation
// tracks the chain through StarRule / Comp / Id / Leq / CoprodL steps.
//
// Documented preconditions (violations raise TransformError with
// `precondition() == true`; the construction is otherwise impossible
// without raising the height or changing the end-sequent):
//   - case 3 fails when the occurrence crosses a CoprodL inference (the
//     comma bookkeeping pins an extra ĝ*⊥ on the right);
//   - case 9 needs the mediator of (h, k) into each principal comma square
//     it meets to reproduce h on the nose, and the tracked occurrence must
//     not sit inside an f*⊥-style leaf;
//   - case 10 fails when the tracked formula under the pullback chain is
//     itself a ∐ that gets opened by CoprodL.
struct InvTarget {
  int number = 0;
  FibPtr formula;
  bool left = true;
  int component = 0;   // cases 7/8: 0 keeps the first component, 1 the second
  MorId h = -1, k = -1;  // case 9
};

ProofPtr invert(BaseOracle& base, const ProofPtr& p, const InvTarget& t);

// Admissible-rule expansions (cut-free, pass check_proof).
//   coprodL': p proves f*Γ, P ⊢ f*Δ at source(f)  ⇒  Γ, ∐_f P ⊢ Δ
//   coprodR': p proves Γ ⊢ P, Δ at source(f)      ⇒  Γ ⊢ f*∐_f P, Δ
//   fg_weaken (f ⊑ g), P designated in p's conclusion:
//     left:  p proves Γ, P ⊢ Δ   ⇒  f*Γ, g*P ⊢ f*Δ
//     right: p proves Γ ⊢ P, Δ   ⇒  g*Γ ⊢ f*P, g*Δ
ProofPtr derived_coprodL_prime(BaseOracle& base, const ProofPtr& p, MorId f,
                               const FibPtr& P);
ProofPtr derived_coprodR_prime(BaseOracle& base, const ProofPtr& p, MorId f,
                               const FibPtr& P);
ProofPtr derived_fg_weaken(BaseOracle& base, const ProofPtr& p, MorId f, MorId g,
                           const FibPtr& P, bool left);

// ------------------------------------------------------------------ random
// Deterministic generation for the property harnesses. The generator only
// produces proofs that check_proof accepts, keeps every right side
// nonempty, and uses atomic axiom formulas; cut formulas (when maxCuts > 0)
// are introduced by weakening or linked to axioms so they stay eliminable.

struct GenOptions {
  int steps = 10;      // growth moves attempted per proof
  int maxCuts = 0;
  int maxHeight = 5;   // give-up bound; the result may be lower
  int atoms = 3;       // distinct atom names per object
};

// A small random finite partial-map base: 2-4 objects, a handful of maps
// including at least one total map, one proper partial map, and one
// composable/comparable pair.
struct RandomBase {
  FinBase base;
  std::vector<ObjId> objs;
  std::vector<MorId> mors;            // declared maps only
  std::vector<std::pair<MorId, MorId>> leq_pairs;  // f ⊑ g, f ≠ g, proved
};
RandomBase make_random_base(Rng& rng, int max_carrier);

FibPtr random_formula(Rng& rng, const RandomBase& rb, ObjId at, int depth);
ProofPtr random_proof(Rng& rng, RandomBase& rb, const GenOptions& opt);

}  // namespace alk
