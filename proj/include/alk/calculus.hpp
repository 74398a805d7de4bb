// Sequent calculus over a base oracle: proof trees, a shape checker for every
// inference rule, and the structural measures the proof transformations use.
#ifndef ALK_CALCULUS_HPP
#define ALK_CALCULUS_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "alk/fib.hpp"

namespace alk {

enum class Rule {
  Ax, LW, RW, LC, RC, BotL, TopR, FBotL, FTopR,
  OrL, OrR, FOrL, FOrR, AndL, AndR, FAndL, FAndR,
  NegL, NegR, FNegL, FNegR, Cut, StarRule,
  CoprodL, CoprodR, LeqL, LeqR, LeqLR,
  CompL, CompR, CompInvL, CompInvR, IdL, IdR, IdInvL, IdInvR,
};

std::string rule_name(Rule r);
std::optional<Rule> rule_by_name(const std::string& n);

struct ProofNode;
using ProofPtr = std::shared_ptr<const ProofNode>;

// Side data conventions per rule:
//   principal        the formula occurrence the rule introduces or rewrites
//                    (as it appears in the conclusion)
//   f, g             the 1-cells named by the rule (LeqL/R/LR: f ⊑ g;
//                    Cut: premise 0 ends in Γ ⊢ f*P, Δ and premise 1 in
//                    Γ', g*P ⊢ Δ' with g ⊑ f; Comp rules: the two factors,
//                    principal pulled back along compose(g, f); CoprodL:
//                    the cospan of the comma square)
//   tau              CoprodR's witness leg, with f ⊑ g∘tau
//   lctx, rctx       LeqLR's designated sub-contexts (typed at target(f))
struct ProofNode {
  Rule rule = Rule::Ax;
  Sequent concl;
  std::vector<ProofPtr> premises;

  FibPtr principal;
  MorId f = -1, g = -1, tau = -1;
  std::vector<FibPtr> lctx, rctx;
};

ProofPtr mk_leaf(Rule r, Sequent concl, FibPtr principal = nullptr, MorId f = -1);
ProofPtr mk_node(ProofNode n);

// f* applied to a whole context. On the right of a sequent an empty context
// collapses to {f*bot}: pulling back "no alternatives" must keep tracking
// where f is defined.
std::vector<FibPtr> star_context(const BaseOracle& base, MorId f,
                                 const std::vector<FibPtr>& ctx, bool right_side);

struct CheckReport {
  bool ok = true;
  std::string rule;    // tag of the first failing node
  std::string reason;  // empty when ok
  const ProofNode* where = nullptr;
};

CheckReport check_proof(BaseOracle& base, const ProofPtr& p);

// Height ignores the rules that only reshuffle base-cell bookkeeping
// (⊑, ∘, ∘⁻¹, Id, Id⁻¹, f*); leaves have height 0.
int proof_height(const ProofPtr& p);
bool rule_is_height_neutral(Rule r);
int count_rules(const ProofPtr& p);
int count_cuts(const ProofPtr& p);
std::string print_proof(const BaseOracle& base, const ProofPtr& p);

}  // namespace alk

#endif
