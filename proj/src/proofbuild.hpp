// Internal proof-node builders. Each builder computes the conclusion of one
// rule application from its premises plus side data, mirroring the shapes
// check_proof expects. Shared by the transform and cut-elimination passes;
// not part of the public headers.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "alk/calculus.hpp"

namespace alk::detail {

inline std::vector<FibPtr> ctx_plus(std::vector<FibPtr> xs, const FibPtr& x) {
  xs.push_back(x);
  return xs;
}

inline std::vector<FibPtr> ctx_plus(std::vector<FibPtr> xs, const std::vector<FibPtr>& ys) {
  xs.insert(xs.end(), ys.begin(), ys.end());
  return xs;
}

inline std::vector<FibPtr> ctx_minus(const std::vector<FibPtr>& xs, const FibPtr& x,
                                     const char* what) {
  auto r = fib_remove(xs, x);
  if (!r) throw TransformError(cat("missing formula while building ", what));
  return *r;
}

inline std::vector<FibPtr> ctx_minus(std::vector<FibPtr> xs, const std::vector<FibPtr>& ys,
                                     const char* what) {
  for (const auto& y : ys) xs = ctx_minus(xs, y, what);
  return xs;
}

inline bool is_star_of(const FibPtr& p, FibFormula::Kind inner) {
  return p && p->kind == FibFormula::Kind::Star && p->a && p->a->kind == inner;
}

// Star chains, outermost first: chain_apply([c1,c2], X) = c1*(c2*(X)), and the
// equivalent single pullback is along c2.c1 (fold left under composition).
inline FibPtr chain_apply(const BaseOracle& base, const std::vector<MorId>& chain, FibPtr x) {
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    x = FibFormula::star(base, *it, std::move(x));
  return x;
}

inline MorId chain_composite(BaseOracle& base, const std::vector<MorId>& chain, ObjId at) {
  if (chain.empty()) return base.identity(at);
  MorId f = chain.front();
  for (std::size_t i = 1; i < chain.size(); ++i) f = base.compose(chain[i], f);
  return f;
}

struct Build {
  BaseOracle& base;

  void need_leq(MorId f, MorId g, const char* what) const {
    Verdict v = base.leq(f, g);
    if (v == Verdict::Proved) return;
    throw TransformError(cat(what, ": could not establish ", base.mor_name(f),
                             " below ", base.mor_name(g)),
                         v == Verdict::Unknown);
  }

  FibPtr star(MorId f, FibPtr x) const { return FibFormula::star(base, f, std::move(x)); }
  FibPtr bot_at(ObjId a) const { return FibFormula::bot(a); }

  static ProofPtr node(Rule r, Sequent concl, std::vector<ProofPtr> prems, FibPtr principal,
                       MorId f = -1, MorId g = -1, MorId tau = -1) {
    ProofNode n;
    n.rule = r;
    n.concl = std::move(concl);
    n.premises = std::move(prems);
    n.principal = std::move(principal);
    n.f = f;
    n.g = g;
    n.tau = tau;
    return mk_node(std::move(n));
  }

  ProofPtr lw(ProofPtr p, FibPtr x) const {
    Sequent s = p->concl;
    s.left = ctx_plus(std::move(s.left), x);
    return node(Rule::LW, std::move(s), {std::move(p)}, std::move(x));
  }

  ProofPtr rw(ProofPtr p, FibPtr x) const {
    Sequent s = p->concl;
    s.right = ctx_plus(std::move(s.right), x);
    return node(Rule::RW, std::move(s), {std::move(p)}, std::move(x));
  }

  // Contraction conclusions keep one copy; the premise carries two.
  ProofPtr lc(ProofPtr p, const FibPtr& x) const {
    Sequent s = p->concl;
    s.left = ctx_minus(s.left, x, "LC");
    if (fib_count(s.left, x) == 0) throw TransformError("LC needs a second copy");
    return node(Rule::LC, std::move(s), {std::move(p)}, x);
  }

  ProofPtr rc(ProofPtr p, const FibPtr& x) const {
    Sequent s = p->concl;
    s.right = ctx_minus(s.right, x, "RC");
    if (fib_count(s.right, x) == 0) throw TransformError("RC needs a second copy");
    return node(Rule::RC, std::move(s), {std::move(p)}, x);
  }

  ProofPtr andl(ProofPtr p, const FibPtr& pr) const {
    Sequent s = p->concl;
    s.left = ctx_minus(s.left, pr->a, "AndL");
    s.left = ctx_plus(ctx_minus(s.left, pr->b, "AndL"), pr);
    return node(Rule::AndL, std::move(s), {std::move(p)}, pr);
  }

  ProofPtr fandl(ProofPtr p, const FibPtr& pr) const {
    Sequent s = p->concl;
    s.left = ctx_minus(s.left, star(pr->mor, pr->a->a), "FAndL");
    s.left = ctx_plus(ctx_minus(s.left, star(pr->mor, pr->a->b), "FAndL"), pr);
    return node(Rule::FAndL, std::move(s), {std::move(p)}, pr, pr->mor);
  }

  ProofPtr orr(ProofPtr p, const FibPtr& pr) const {
    Sequent s = p->concl;
    s.right = ctx_minus(s.right, pr->a, "OrR");
    s.right = ctx_plus(ctx_minus(s.right, pr->b, "OrR"), pr);
    return node(Rule::OrR, std::move(s), {std::move(p)}, pr);
  }

  ProofPtr forr(ProofPtr p, const FibPtr& pr) const {
    Sequent s = p->concl;
    s.right = ctx_minus(s.right, star(pr->mor, pr->a->a), "FOrR");
    s.right = ctx_plus(ctx_minus(s.right, star(pr->mor, pr->a->b), "FOrR"), pr);
    return node(Rule::FOrR, std::move(s), {std::move(p)}, pr, pr->mor);
  }

  ProofPtr orl(ProofPtr p0, ProofPtr p1, const FibPtr& pr) const {
    Sequent s = p0->concl;
    s.left = ctx_plus(ctx_minus(s.left, pr->a, "OrL"), pr);
    return node(Rule::OrL, std::move(s), {std::move(p0), std::move(p1)}, pr);
  }

  ProofPtr forl(ProofPtr p0, ProofPtr p1, const FibPtr& pr) const {
    Sequent s = p0->concl;
    s.left = ctx_plus(ctx_minus(s.left, star(pr->mor, pr->a->a), "FOrL"), pr);
    return node(Rule::FOrL, std::move(s), {std::move(p0), std::move(p1)}, pr, pr->mor);
  }

  ProofPtr andr(ProofPtr p0, ProofPtr p1, const FibPtr& pr) const {
    Sequent s = p0->concl;
    s.right = ctx_plus(ctx_minus(s.right, pr->a, "AndR"), pr);
    return node(Rule::AndR, std::move(s), {std::move(p0), std::move(p1)}, pr);
  }

  ProofPtr fandr(ProofPtr p0, ProofPtr p1, const FibPtr& pr) const {
    Sequent s = p0->concl;
    s.right = ctx_plus(ctx_minus(s.right, star(pr->mor, pr->a->a), "FAndR"), pr);
    return node(Rule::FAndR, std::move(s), {std::move(p0), std::move(p1)}, pr, pr->mor);
  }

  ProofPtr negl(ProofPtr p, const FibPtr& pr) const {
    Sequent s = p->concl;
    s.left = ctx_plus(std::move(s.left), pr);
    s.right = ctx_minus(s.right, pr->a, "NegL");
    return node(Rule::NegL, std::move(s), {std::move(p)}, pr);
  }

  ProofPtr negr(ProofPtr p, const FibPtr& pr) const {
    Sequent s = p->concl;
    s.left = ctx_minus(s.left, pr->a, "NegR");
    s.right = ctx_plus(std::move(s.right), pr);
    return node(Rule::NegR, std::move(s), {std::move(p)}, pr);
  }

  // p0 proves the refutation premise (with f*false on the left), p1 the
  // witness premise (with f*Q on the right).
  ProofPtr fnegl(ProofPtr p0, ProofPtr p1, const FibPtr& pr) const {
    Sequent s = p0->concl;
    s.left = ctx_plus(ctx_minus(s.left, star(pr->mor, bot_at(pr->a->type)), "FNegL"), pr);
    return node(Rule::FNegL, std::move(s), {std::move(p0), std::move(p1)}, pr, pr->mor);
  }

  ProofPtr fnegr(ProofPtr p, const FibPtr& pr) const {
    Sequent s = p->concl;
    s.left = ctx_minus(s.left, star(pr->mor, pr->a->a), "FNegR");
    s.right = ctx_plus(ctx_minus(s.right, star(pr->mor, bot_at(pr->a->type)), "FNegR"), pr);
    return node(Rule::FNegR, std::move(s), {std::move(p)}, pr, pr->mor);
  }

  ProofPtr starrule(ProofPtr p, MorId f) const {
    Sequent s;
    s.type = base.source(f);
    s.left = star_context(base, f, p->concl.left, false);
    s.right = star_context(base, f, p->concl.right, true);
    return node(Rule::StarRule, std::move(s), {std::move(p)}, nullptr, f);
  }

  ProofPtr coprodl(ProofPtr p, MorId f, MorId g, const FibPtr& inner,
                   std::vector<FibPtr> restl, std::vector<FibPtr> right) const {
    FibPtr pr = star(f, FibFormula::coprod(base, g, inner));
    Sequent s;
    s.type = base.source(f);
    s.left = ctx_plus(std::move(restl), pr);
    s.right = std::move(right);
    return node(Rule::CoprodL, std::move(s), {std::move(p)}, pr, f, g);
  }

  ProofPtr coprodr(ProofPtr p, MorId fprime, MorId g, const FibPtr& inner, MorId tau) const {
    need_leq(fprime, base.compose(g, tau), "CoprodR side");
    FibPtr pr = star(fprime, FibFormula::coprod(base, g, inner));
    Sequent s = p->concl;
    s.right = ctx_plus(ctx_minus(s.right, star(tau, inner), "CoprodR"), pr);
    return node(Rule::CoprodR, std::move(s), {std::move(p)}, pr, fprime, g, tau);
  }

  ProofPtr leql(ProofPtr p, MorId f, MorId g, const FibPtr& inner) const {
    need_leq(f, g, "LeqL side");
    FibPtr pr = star(g, inner);
    Sequent s = p->concl;
    s.left = ctx_plus(ctx_minus(s.left, star(f, inner), "LeqL"), pr);
    return node(Rule::LeqL, std::move(s), {std::move(p)}, pr, f, g);
  }

  ProofPtr leqr(ProofPtr p, MorId f, MorId g, const FibPtr& inner) const {
    need_leq(f, g, "LeqR side");
    FibPtr pr = star(f, inner);
    Sequent s = p->concl;
    s.right = ctx_plus(ctx_minus(s.right, star(g, inner), "LeqR"), pr);
    return node(Rule::LeqR, std::move(s), {std::move(p)}, pr, f, g);
  }

  ProofPtr leqlr(ProofPtr p, MorId f, MorId g, std::vector<FibPtr> lctx,
                 std::vector<FibPtr> rctx) const {
    need_leq(f, g, "LeqLR side");
    Sequent s = p->concl;
    s.left = ctx_plus(ctx_minus(s.left, star_context(base, g, lctx, false), "LeqLR"),
                      star_context(base, f, lctx, false));
    s.right = ctx_plus(ctx_minus(s.right, star_context(base, g, rctx, true), "LeqLR"),
                       star_context(base, f, rctx, true));
    ProofNode n;
    n.rule = Rule::LeqLR;
    n.concl = std::move(s);
    n.premises = {std::move(p)};
    n.f = f;
    n.g = g;
    n.lctx = std::move(lctx);
    n.rctx = std::move(rctx);
    return mk_node(std::move(n));
  }

  ProofPtr compl_(ProofPtr p, MorId f, MorId g, const FibPtr& inner) const {
    FibPtr fused = star(base.compose(g, f), inner);
    Sequent s = p->concl;
    s.left = ctx_plus(ctx_minus(s.left, star(f, star(g, inner)), "CompL"), fused);
    return node(Rule::CompL, std::move(s), {std::move(p)}, fused, f, g);
  }

  ProofPtr compr(ProofPtr p, MorId f, MorId g, const FibPtr& inner) const {
    FibPtr fused = star(base.compose(g, f), inner);
    Sequent s = p->concl;
    s.right = ctx_plus(ctx_minus(s.right, star(f, star(g, inner)), "CompR"), fused);
    return node(Rule::CompR, std::move(s), {std::move(p)}, fused, f, g);
  }

  ProofPtr compinvl(ProofPtr p, MorId f, MorId g, const FibPtr& inner) const {
    FibPtr nested = star(f, star(g, inner));
    Sequent s = p->concl;
    s.left = ctx_plus(ctx_minus(s.left, star(base.compose(g, f), inner), "CompInvL"), nested);
    return node(Rule::CompInvL, std::move(s), {std::move(p)}, nested, f, g);
  }

  ProofPtr compinvr(ProofPtr p, MorId f, MorId g, const FibPtr& inner) const {
    FibPtr nested = star(f, star(g, inner));
    Sequent s = p->concl;
    s.right = ctx_plus(ctx_minus(s.right, star(base.compose(g, f), inner), "CompInvR"), nested);
    return node(Rule::CompInvR, std::move(s), {std::move(p)}, nested, f, g);
  }

  ProofPtr idl(ProofPtr p, const FibPtr& inner) const {
    FibPtr pr = star(base.identity(inner->type), inner);
    Sequent s = p->concl;
    s.left = ctx_plus(ctx_minus(s.left, inner, "IdL"), pr);
    return node(Rule::IdL, std::move(s), {std::move(p)}, pr);
  }

  ProofPtr idr(ProofPtr p, const FibPtr& inner) const {
    FibPtr pr = star(base.identity(inner->type), inner);
    Sequent s = p->concl;
    s.right = ctx_plus(ctx_minus(s.right, inner, "IdR"), pr);
    return node(Rule::IdR, std::move(s), {std::move(p)}, pr);
  }

  ProofPtr idinvl(ProofPtr p, const FibPtr& inner) const {
    Sequent s = p->concl;
    s.left = ctx_plus(ctx_minus(s.left, star(base.identity(inner->type), inner), "IdInvL"),
                      inner);
    return node(Rule::IdInvL, std::move(s), {std::move(p)}, inner);
  }

  ProofPtr idinvr(ProofPtr p, const FibPtr& inner) const {
    Sequent s = p->concl;
    s.right = ctx_plus(ctx_minus(s.right, star(base.identity(inner->type), inner), "IdInvR"),
                       inner);
    return node(Rule::IdInvR, std::move(s), {std::move(p)}, inner);
  }

  // p0 provides the cut formula on the right as f*P, p1 consumes it on the
  // left as g*P with g below f.
  ProofPtr cut(ProofPtr p0, ProofPtr p1, const FibPtr& inner, MorId f, MorId g) const {
    need_leq(g, f, "Cut side");
    Sequent s;
    s.type = p0->concl.type;
    std::vector<FibPtr> lrest = ctx_minus(p0->concl.right, star(f, inner), "Cut");
    std::vector<FibPtr> rrest = ctx_minus(p1->concl.left, star(g, inner), "Cut");
    s.left = ctx_plus(p0->concl.left, rrest);
    s.right = ctx_plus(std::move(lrest), p1->concl.right);
    return node(Rule::Cut, std::move(s), {std::move(p0), std::move(p1)}, inner, f, g);
  }
};

// Recompute a node's rule over replacement premises, deriving the conclusion
// from the new premises plus the node's own side data. Works for every rule
// whose conclusion is determined that way; CoprodL is not (its conclusion
// context cannot be read off the premise), so callers rebuild it explicitly.
inline ProofPtr rebuild(const Build& b, const ProofNode& n, std::vector<ProofPtr> ps) {
  switch (n.rule) {
    case Rule::Ax:
    case Rule::BotL:
    case Rule::TopR:
    case Rule::FBotL:
    case Rule::FTopR:
      return mk_leaf(n.rule, n.concl, n.principal, n.f);
    case Rule::LW:
      return b.lw(std::move(ps[0]), n.principal);
    case Rule::RW:
      return b.rw(std::move(ps[0]), n.principal);
    case Rule::LC:
      return b.lc(std::move(ps[0]), n.principal);
    case Rule::RC:
      return b.rc(std::move(ps[0]), n.principal);
    case Rule::AndL:
      return b.andl(std::move(ps[0]), n.principal);
    case Rule::FAndL:
      return b.fandl(std::move(ps[0]), n.principal);
    case Rule::OrR:
      return b.orr(std::move(ps[0]), n.principal);
    case Rule::FOrR:
      return b.forr(std::move(ps[0]), n.principal);
    case Rule::OrL:
      return b.orl(std::move(ps[0]), std::move(ps[1]), n.principal);
    case Rule::FOrL:
      return b.forl(std::move(ps[0]), std::move(ps[1]), n.principal);
    case Rule::AndR:
      return b.andr(std::move(ps[0]), std::move(ps[1]), n.principal);
    case Rule::FAndR:
      return b.fandr(std::move(ps[0]), std::move(ps[1]), n.principal);
    case Rule::NegL:
      return b.negl(std::move(ps[0]), n.principal);
    case Rule::NegR:
      return b.negr(std::move(ps[0]), n.principal);
    case Rule::FNegL:
      return b.fnegl(std::move(ps[0]), std::move(ps[1]), n.principal);
    case Rule::FNegR:
      return b.fnegr(std::move(ps[0]), n.principal);
    case Rule::StarRule:
      return b.starrule(std::move(ps[0]), n.f);
    case Rule::CoprodR:
      return b.coprodr(std::move(ps[0]), n.f, n.g, n.principal->a->a, n.tau);
    case Rule::LeqL:
      return b.leql(std::move(ps[0]), n.f, n.g, n.principal->a);
    case Rule::LeqR:
      return b.leqr(std::move(ps[0]), n.f, n.g, n.principal->a);
    case Rule::LeqLR:
      return b.leqlr(std::move(ps[0]), n.f, n.g, n.lctx, n.rctx);
    case Rule::CompL:
      return b.compl_(std::move(ps[0]), n.f, n.g, n.principal->a);
    case Rule::CompR:
      return b.compr(std::move(ps[0]), n.f, n.g, n.principal->a);
    case Rule::CompInvL:
      return b.compinvl(std::move(ps[0]), n.f, n.g, n.principal->a->a);
    case Rule::CompInvR:
      return b.compinvr(std::move(ps[0]), n.f, n.g, n.principal->a->a);
    case Rule::IdL:
      return b.idl(std::move(ps[0]), n.principal->a);
    case Rule::IdR:
      return b.idr(std::move(ps[0]), n.principal->a);
    case Rule::IdInvL:
      return b.idinvl(std::move(ps[0]), n.principal);
    case Rule::IdInvR:
      return b.idinvr(std::move(ps[0]), n.principal);
    case Rule::Cut:
      return b.cut(std::move(ps[0]), std::move(ps[1]), n.principal, n.f, n.g);
    case Rule::CoprodL:
      break;
  }
  throw TransformError("rebuild cannot derive this rule's conclusion");
}

}  // namespace alk::detail
