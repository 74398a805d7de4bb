#include "alk/calculus.hpp"

#include <algorithm>
#include <sstream>

namespace alk {

namespace {

constexpr std::pair<Rule, const char*> kRuleNames[] = {
    {Rule::Ax, "Ax"},           {Rule::LW, "LW"},
    {Rule::RW, "RW"},           {Rule::LC, "LC"},
    {Rule::RC, "RC"},           {Rule::BotL, "BotL"},
    {Rule::TopR, "TopR"},       {Rule::FBotL, "fBotL"},
    {Rule::FTopR, "fTopR"},     {Rule::OrL, "OrL"},
    {Rule::OrR, "OrR"},         {Rule::FOrL, "fOrL"},
    {Rule::FOrR, "fOrR"},       {Rule::AndL, "AndL"},
    {Rule::AndR, "AndR"},       {Rule::FAndL, "fAndL"},
    {Rule::FAndR, "fAndR"},     {Rule::NegL, "NegL"},
    {Rule::NegR, "NegR"},       {Rule::FNegL, "fNegL"},
    {Rule::FNegR, "fNegR"},     {Rule::Cut, "Cut"},
    {Rule::StarRule, "Star"},   {Rule::CoprodL, "CoprodL"},
    {Rule::CoprodR, "CoprodR"}, {Rule::LeqL, "LeqL"},
    {Rule::LeqR, "LeqR"},       {Rule::LeqLR, "LeqLR"},
    {Rule::CompL, "CompL"},     {Rule::CompR, "CompR"},
    {Rule::CompInvL, "CompInvL"}, {Rule::CompInvR, "CompInvR"},
    {Rule::IdL, "IdL"},         {Rule::IdR, "IdR"},
    {Rule::IdInvL, "IdInvL"},   {Rule::IdInvR, "IdInvR"},
};

}  // namespace

std::string rule_name(Rule r) {
  for (const auto& [tag, name] : kRuleNames)
    if (tag == r) return name;
  return "?";
}

std::optional<Rule> rule_by_name(const std::string& n) {
  for (const auto& [tag, name] : kRuleNames)
    if (n == name) return tag;
  return std::nullopt;
}

ProofPtr mk_leaf(Rule r, Sequent concl, FibPtr principal, MorId f) {
  ProofNode n;
  n.rule = r;
  n.concl = std::move(concl);
  n.principal = std::move(principal);
  n.f = f;
  return mk_node(std::move(n));
}

ProofPtr mk_node(ProofNode n) { return std::make_shared<const ProofNode>(std::move(n)); }

std::vector<FibPtr> star_context(const BaseOracle& base, MorId f,
                                 const std::vector<FibPtr>& ctx, bool right_side) {
  std::vector<FibPtr> out;
  if (right_side && ctx.empty()) {
    out.push_back(FibFormula::star(base, f, FibFormula::bot(base.target(f))));
    return out;
  }
  out.reserve(ctx.size());
  for (const auto& p : ctx) out.push_back(FibFormula::star(base, f, p));
  return out;
}

bool rule_is_height_neutral(Rule r) {
  switch (r) {
    case Rule::StarRule:
    case Rule::LeqL:
    case Rule::LeqR:
    case Rule::LeqLR:
    case Rule::CompL:
    case Rule::CompR:
    case Rule::CompInvL:
    case Rule::CompInvR:
    case Rule::IdL:
    case Rule::IdR:
    case Rule::IdInvL:
    case Rule::IdInvR:
      return true;
    default:
      return false;
  }
}

int proof_height(const ProofPtr& p) {
  int h = 0;
  for (const auto& q : p->premises) h = std::max(h, proof_height(q));
  if (!p->premises.empty() && !rule_is_height_neutral(p->rule)) ++h;
  return h;
}

int count_rules(const ProofPtr& p) {
  int n = 1;
  for (const auto& q : p->premises) n += count_rules(q);
  return n;
}

int count_cuts(const ProofPtr& p) {
  int n = p->rule == Rule::Cut ? 1 : 0;
  for (const auto& q : p->premises) n += count_cuts(q);
  return n;
}

static void print_proof_rec(const BaseOracle& base, const ProofPtr& p, int depth,
                            std::ostringstream& os) {
  for (int i = 0; i < depth; ++i) os << "  ";
  os << rule_name(p->rule) << ": " << print_sequent(base, p->concl) << "\n";
  for (const auto& q : p->premises) print_proof_rec(base, q, depth + 1, os);
}

std::string print_proof(const BaseOracle& base, const ProofPtr& p) {
  std::ostringstream os;
  print_proof_rec(base, p, 0, os);
  return os.str();
}

namespace {

using Ctx = std::vector<FibPtr>;
using K = FibFormula::Kind;

Ctx plus(Ctx v, const FibPtr& p) {
  v.push_back(p);
  return v;
}

struct Checker {
  BaseOracle& base;
  CheckReport rep;

  bool fail(const ProofNode* n, const std::string& reason) {
    if (rep.ok) {
      rep.ok = false;
      rep.where = n;
      rep.rule = rule_name(n->rule);
      rep.reason = reason;
    }
    return false;
  }

  bool formulas_at(const ProofNode* n, const Ctx& v, ObjId t) {
    for (const auto& p : v) {
      if (!p) return fail(n, "null formula in a context");
      if (p->type != t) return fail(n, "formula typed over the wrong object");
    }
    return true;
  }

  bool need(const ProofNode* n, bool cond, const char* reason) {
    return cond ? true : fail(n, reason);
  }

  // premise i matches the expected sequent exactly (as multisets)
  bool match(const ProofNode* n, std::size_t i, ObjId type, const Ctx& left,
             const Ctx& right) {
    const Sequent& s = n->premises[i]->concl;
    if (s.type != type) return fail(n, "premise typed over the wrong object");
    if (!fib_mset_eq(s.left, left)) return fail(n, "premise left context mismatch");
    if (!fib_mset_eq(s.right, right)) return fail(n, "premise right context mismatch");
    return true;
  }

  bool side_leq(const ProofNode* n, MorId f, MorId g, const char* what) {
    Verdict v = base.leq(f, g);
    if (v == Verdict::Proved) return true;
    return fail(n, cat(what, v == Verdict::Refuted ? ": refuted" : ": undecided"));
  }

  // removes one occurrence of the node's principal from ctx
  bool strip(const ProofNode* n, const Ctx& ctx, Ctx& out, const char* where) {
    if (!n->principal) return fail(n, "rule needs a principal formula");
    auto rest = fib_remove(ctx, n->principal);
    if (!rest) return fail(n, cat("principal formula not found on the ", where));
    out = std::move(*rest);
    return true;
  }

  bool is_star_of(const FibPtr& p, K inner) {
    return p && p->kind == K::Star && p->a && p->a->kind == inner;
  }

  bool check(const ProofPtr& p) {
    if (!p) {
      rep.ok = false;
      rep.reason = "null proof node";
      return false;
    }
    const ProofNode* n = p.get();
    for (const auto& q : n->premises)
      if (!check(q)) return false;
    if (!formulas_at(n, n->concl.left, n->concl.type) ||
        !formulas_at(n, n->concl.right, n->concl.type))
      return false;
    try {
      return check_node(n);
    } catch (const TypeError& e) {
      return fail(n, e.what());
    } catch (const CategoryError& e) {
      return fail(n, e.what());
    } catch (const ValidityUnknown& e) {
      return fail(n, e.what());
    } catch (const ValidityRefuted& e) {
      return fail(n, e.what());
    }
  }

  bool premcount(const ProofNode* n, std::size_t k) {
    return need(n, n->premises.size() == k, "wrong number of premises");
  }

  bool check_node(const ProofNode* n) {
    const Sequent& C = n->concl;
    const FibPtr& pr = n->principal;
    switch (n->rule) {
      case Rule::Ax: {
        if (!premcount(n, 0)) return false;
        if (!pr) return fail(n, "axiom needs its shared formula designated");
        if (fib_count(C.left, pr) < 1 || fib_count(C.right, pr) < 1)
          return fail(n, "axiom formula must occur on both sides");
        return true;
      }
      case Rule::BotL: {
        if (!premcount(n, 0)) return false;
        for (const auto& q : C.left)
          if (q->kind == K::Bot) return true;
        return fail(n, "no falsum on the left");
      }
      case Rule::TopR: {
        if (!premcount(n, 0)) return false;
        for (const auto& q : C.right)
          if (q->kind == K::Top) return true;
        return fail(n, "no verum on the right");
      }
      case Rule::FBotL: {
        if (!premcount(n, 0)) return false;
        if (!is_star_of(pr, K::Bot)) return fail(n, "principal must be f*bot");
        MorId f = pr->mor;
        Ctx rest;
        if (!strip(n, C.left, rest, "left")) return false;
        for (const auto& q : rest)
          if (q->kind != K::Star || q->mor != f)
            return fail(n, "left context must be pulled back along the same cell");
        if (C.right.empty()) return fail(n, "right context may not be empty");
        for (const auto& q : C.right)
          if (q->kind != K::Star || q->mor != f)
            return fail(n, "right context must be pulled back along the same cell");
        return true;
      }
      case Rule::FTopR: {
        if (!premcount(n, 0)) return false;
        if (!is_star_of(pr, K::Top)) return fail(n, "principal must be f*top");
        if (fib_count(C.right, pr) < 1) return fail(n, "f*top must occur on the right");
        return true;
      }
      case Rule::LW: {
        if (!premcount(n, 1)) return false;
        Ctx rest;
        if (!strip(n, C.left, rest, "left")) return false;
        return match(n, 0, C.type, rest, C.right);
      }
      case Rule::RW: {
        if (!premcount(n, 1)) return false;
        Ctx rest;
        if (!strip(n, C.right, rest, "right")) return false;
        return match(n, 0, C.type, C.left, rest);
      }
      case Rule::LC: {
        if (!premcount(n, 1)) return false;
        if (!pr) return fail(n, "rule needs a principal formula");
        if (fib_count(C.left, pr) < 1)
          return fail(n, "contracted formula must remain on the left");
        return match(n, 0, C.type, plus(C.left, pr), C.right);
      }
      case Rule::RC: {
        if (!premcount(n, 1)) return false;
        if (!pr) return fail(n, "rule needs a principal formula");
        if (fib_count(C.right, pr) < 1)
          return fail(n, "contracted formula must remain on the right");
        return match(n, 0, C.type, C.left, plus(C.right, pr));
      }
      case Rule::OrL: {
        if (!premcount(n, 2)) return false;
        if (!pr || pr->kind != K::Or) return fail(n, "principal must be a disjunction");
        Ctx rest;
        if (!strip(n, C.left, rest, "left")) return false;
        return match(n, 0, C.type, plus(rest, pr->a), C.right) &&
               match(n, 1, C.type, plus(rest, pr->b), C.right);
      }
      case Rule::OrR: {
        if (!premcount(n, 1)) return false;
        if (!pr || pr->kind != K::Or) return fail(n, "principal must be a disjunction");
        Ctx rest;
        if (!strip(n, C.right, rest, "right")) return false;
        return match(n, 0, C.type, C.left, plus(plus(rest, pr->a), pr->b));
      }
      case Rule::FOrL: {
        if (!premcount(n, 2)) return false;
        if (!is_star_of(pr, K::Or)) return fail(n, "principal must be f*(P or Q)");
        Ctx rest;
        if (!strip(n, C.left, rest, "left")) return false;
        FibPtr sa = FibFormula::star(base, pr->mor, pr->a->a);
        FibPtr sb = FibFormula::star(base, pr->mor, pr->a->b);
        return match(n, 0, C.type, plus(rest, sa), C.right) &&
               match(n, 1, C.type, plus(rest, sb), C.right);
      }
      case Rule::FOrR: {
        if (!premcount(n, 1)) return false;
        if (!is_star_of(pr, K::Or)) return fail(n, "principal must be f*(P or Q)");
        Ctx rest;
        if (!strip(n, C.right, rest, "right")) return false;
        FibPtr sa = FibFormula::star(base, pr->mor, pr->a->a);
        FibPtr sb = FibFormula::star(base, pr->mor, pr->a->b);
        return match(n, 0, C.type, C.left, plus(plus(rest, sa), sb));
      }
      case Rule::AndL: {
        if (!premcount(n, 1)) return false;
        if (!pr || pr->kind != K::And) return fail(n, "principal must be a conjunction");
        Ctx rest;
        if (!strip(n, C.left, rest, "left")) return false;
        return match(n, 0, C.type, plus(plus(rest, pr->a), pr->b), C.right);
      }
      case Rule::AndR: {
        if (!premcount(n, 2)) return false;
        if (!pr || pr->kind != K::And) return fail(n, "principal must be a conjunction");
        Ctx rest;
        if (!strip(n, C.right, rest, "right")) return false;
        return match(n, 0, C.type, C.left, plus(rest, pr->a)) &&
               match(n, 1, C.type, C.left, plus(rest, pr->b));
      }
      case Rule::FAndL: {
        if (!premcount(n, 1)) return false;
        if (!is_star_of(pr, K::And)) return fail(n, "principal must be f*(P and Q)");
        Ctx rest;
        if (!strip(n, C.left, rest, "left")) return false;
        FibPtr sa = FibFormula::star(base, pr->mor, pr->a->a);
        FibPtr sb = FibFormula::star(base, pr->mor, pr->a->b);
        return match(n, 0, C.type, plus(plus(rest, sa), sb), C.right);
      }
      case Rule::FAndR: {
        if (!premcount(n, 2)) return false;
        if (!is_star_of(pr, K::And)) return fail(n, "principal must be f*(P and Q)");
        Ctx rest;
        if (!strip(n, C.right, rest, "right")) return false;
        FibPtr sa = FibFormula::star(base, pr->mor, pr->a->a);
        FibPtr sb = FibFormula::star(base, pr->mor, pr->a->b);
        return match(n, 0, C.type, C.left, plus(rest, sa)) &&
               match(n, 1, C.type, C.left, plus(rest, sb));
      }
      case Rule::NegL: {
        if (!premcount(n, 1)) return false;
        if (!pr || pr->kind != K::Neg) return fail(n, "principal must be a negation");
        Ctx rest;
        if (!strip(n, C.left, rest, "left")) return false;
        return match(n, 0, C.type, rest, plus(C.right, pr->a));
      }
      case Rule::NegR: {
        if (!premcount(n, 1)) return false;
        if (!pr || pr->kind != K::Neg) return fail(n, "principal must be a negation");
        Ctx rest;
        if (!strip(n, C.right, rest, "right")) return false;
        return match(n, 0, C.type, plus(C.left, pr->a), rest);
      }
      case Rule::FNegL: {
        if (!premcount(n, 2)) return false;
        if (!is_star_of(pr, K::Neg)) return fail(n, "principal must be f*(neg Q)");
        Ctx rest;
        if (!strip(n, C.left, rest, "left")) return false;
        FibPtr fbot = FibFormula::star(base, pr->mor, FibFormula::bot(pr->a->type));
        FibPtr fq = FibFormula::star(base, pr->mor, pr->a->a);
        return match(n, 0, C.type, plus(rest, fbot), C.right) &&
               match(n, 1, C.type, rest, plus(C.right, fq));
      }
      case Rule::FNegR: {
        if (!premcount(n, 1)) return false;
        if (!is_star_of(pr, K::Neg)) return fail(n, "principal must be f*(neg Q)");
        Ctx rest;
        if (!strip(n, C.right, rest, "right")) return false;
        FibPtr fbot = FibFormula::star(base, pr->mor, FibFormula::bot(pr->a->type));
        FibPtr fq = FibFormula::star(base, pr->mor, pr->a->a);
        return match(n, 0, C.type, plus(C.left, fq), plus(rest, fbot));
      }
      case Rule::Cut: {
        if (!premcount(n, 2)) return false;
        if (!pr) return fail(n, "cut needs its cut formula designated");
        if (n->f < 0 || n->g < 0) return fail(n, "cut needs both cells");
        if (base.source(n->f) != C.type || base.source(n->g) != C.type)
          return fail(n, "cut cells must start at the sequent object");
        if (base.target(n->f) != pr->type || base.target(n->g) != pr->type)
          return fail(n, "cut formula must live over the cells' target");
        if (!side_leq(n, n->g, n->f, "cut side condition")) return false;
        FibPtr sf = FibFormula::star(base, n->f, pr);
        FibPtr sg = FibFormula::star(base, n->g, pr);
        const Sequent& L = n->premises[0]->concl;
        const Sequent& R = n->premises[1]->concl;
        if (L.type != C.type || R.type != C.type)
          return fail(n, "premise typed over the wrong object");
        auto lrest = fib_remove(L.right, sf);
        if (!lrest) return fail(n, "first premise lacks the starred cut formula");
        auto rrest = fib_remove(R.left, sg);
        if (!rrest) return fail(n, "second premise lacks the starred cut formula");
        Ctx wantl = L.left;
        wantl.insert(wantl.end(), rrest->begin(), rrest->end());
        Ctx wantr = *lrest;
        wantr.insert(wantr.end(), R.right.begin(), R.right.end());
        if (!fib_mset_eq(C.left, wantl)) return fail(n, "conclusion left mismatch");
        if (!fib_mset_eq(C.right, wantr)) return fail(n, "conclusion right mismatch");
        return true;
      }
      case Rule::StarRule: {
        if (!premcount(n, 1)) return false;
        if (n->f < 0) return fail(n, "rule needs a cell");
        if (base.source(n->f) != C.type)
          return fail(n, "cell must start at the conclusion object");
        const Sequent& S = n->premises[0]->concl;
        if (S.type != base.target(n->f))
          return fail(n, "premise must live over the cell's target");
        if (!fib_mset_eq(C.left, star_context(base, n->f, S.left, false)))
          return fail(n, "left context is not the starred premise context");
        if (!fib_mset_eq(C.right, star_context(base, n->f, S.right, true)))
          return fail(n, "right context is not the starred premise context");
        return true;
      }
      case Rule::CoprodL: {
        if (!premcount(n, 1)) return false;
        if (!is_star_of(pr, K::Coprod)) return fail(n, "principal must be f*(coprod g P)");
        if (pr->mor != n->f || pr->a->mor != n->g)
          return fail(n, "rule cells must match the principal formula");
        Ctx rest;
        if (!strip(n, C.left, rest, "left")) return false;
        CommaCell cc = base.comma(n->f, n->g);
        Ctx wantl = star_context(base, cc.to_source, rest, false);
        wantl.push_back(FibFormula::star(base, cc.to_other, pr->a->a));
        Ctx wantr = star_context(base, cc.to_source, C.right, true);
        return match(n, 0, cc.apex, wantl, wantr);
      }
      case Rule::CoprodR: {
        if (!premcount(n, 1)) return false;
        if (!is_star_of(pr, K::Coprod)) return fail(n, "principal must be f*(coprod g Q)");
        if (n->tau < 0) return fail(n, "rule needs a witness cell");
        MorId f = pr->mor, g = pr->a->mor;
        if (base.source(n->tau) != C.type || base.target(n->tau) != base.source(g))
          return fail(n, "witness cell has the wrong boundary");
        if (!side_leq(n, f, base.compose(g, n->tau), "coproduct witness condition"))
          return false;
        Ctx rest;
        if (!strip(n, C.right, rest, "right")) return false;
        return match(n, 0, C.type, C.left,
                     plus(rest, FibFormula::star(base, n->tau, pr->a->a)));
      }
      case Rule::LeqL: {
        if (!premcount(n, 1)) return false;
        if (n->f < 0 || n->g < 0) return fail(n, "rule needs both cells");
        if (!pr || pr->kind != K::Star || pr->mor != n->g)
          return fail(n, "principal must be pulled back along the larger cell");
        if (!side_leq(n, n->f, n->g, "order side condition")) return false;
        Ctx rest;
        if (!strip(n, C.left, rest, "left")) return false;
        return match(n, 0, C.type, plus(rest, FibFormula::star(base, n->f, pr->a)),
                     C.right);
      }
      case Rule::LeqR: {
        if (!premcount(n, 1)) return false;
        if (n->f < 0 || n->g < 0) return fail(n, "rule needs both cells");
        if (!pr || pr->kind != K::Star || pr->mor != n->f)
          return fail(n, "principal must be pulled back along the smaller cell");
        if (!side_leq(n, n->f, n->g, "order side condition")) return false;
        Ctx rest;
        if (!strip(n, C.right, rest, "right")) return false;
        return match(n, 0, C.type, C.left,
                     plus(rest, FibFormula::star(base, n->g, pr->a)));
      }
      case Rule::LeqLR: {
        if (!premcount(n, 1)) return false;
        if (n->f < 0 || n->g < 0) return fail(n, "rule needs both cells");
        if (!side_leq(n, n->f, n->g, "order side condition")) return false;
        ObjId tgt = base.target(n->f);
        if (!formulas_at(n, n->lctx, tgt) || !formulas_at(n, n->rctx, tgt)) return false;
        Ctx restl = C.left;
        for (const auto& q : star_context(base, n->f, n->lctx, false)) {
          auto r = fib_remove(restl, q);
          if (!r) return fail(n, "designated left context missing in the conclusion");
          restl = std::move(*r);
        }
        Ctx restr = C.right;
        for (const auto& q : star_context(base, n->f, n->rctx, true)) {
          auto r = fib_remove(restr, q);
          if (!r) return fail(n, "designated right context missing in the conclusion");
          restr = std::move(*r);
        }
        Ctx wantl = restl;
        for (const auto& q : star_context(base, n->g, n->lctx, false)) wantl.push_back(q);
        Ctx wantr = restr;
        for (const auto& q : star_context(base, n->g, n->rctx, true)) wantr.push_back(q);
        return match(n, 0, C.type, wantl, wantr);
      }
      case Rule::CompL:
      case Rule::CompR: {
        if (!premcount(n, 1)) return false;
        if (n->f < 0 || n->g < 0) return fail(n, "rule needs both factors");
        MorId c = base.compose(n->g, n->f);
        if (!pr || pr->kind != K::Star || pr->mor != c)
          return fail(n, "principal must be pulled back along the composite");
        FibPtr nested =
            FibFormula::star(base, n->f, FibFormula::star(base, n->g, pr->a));
        bool left = n->rule == Rule::CompL;
        Ctx rest;
        if (!strip(n, left ? C.left : C.right, rest, left ? "left" : "right"))
          return false;
        return left ? match(n, 0, C.type, plus(rest, nested), C.right)
                    : match(n, 0, C.type, C.left, plus(rest, nested));
      }
      case Rule::CompInvL:
      case Rule::CompInvR: {
        if (!premcount(n, 1)) return false;
        if (n->f < 0 || n->g < 0) return fail(n, "rule needs both factors");
        if (!pr || pr->kind != K::Star || pr->mor != n->f || !pr->a ||
            pr->a->kind != K::Star || pr->a->mor != n->g)
          return fail(n, "principal must be the nested pullback f*g*P");
        FibPtr fused = FibFormula::star(base, base.compose(n->g, n->f), pr->a->a);
        bool left = n->rule == Rule::CompInvL;
        Ctx rest;
        if (!strip(n, left ? C.left : C.right, rest, left ? "left" : "right"))
          return false;
        return left ? match(n, 0, C.type, plus(rest, fused), C.right)
                    : match(n, 0, C.type, C.left, plus(rest, fused));
      }
      case Rule::IdL:
      case Rule::IdR: {
        if (!premcount(n, 1)) return false;
        MorId idc = base.identity(C.type);
        if (!pr || pr->kind != K::Star || pr->mor != idc)
          return fail(n, "principal must be pulled back along the identity");
        bool left = n->rule == Rule::IdL;
        Ctx rest;
        if (!strip(n, left ? C.left : C.right, rest, left ? "left" : "right"))
          return false;
        return left ? match(n, 0, C.type, plus(rest, pr->a), C.right)
                    : match(n, 0, C.type, C.left, plus(rest, pr->a));
      }
      case Rule::IdInvL:
      case Rule::IdInvR: {
        if (!premcount(n, 1)) return false;
        if (!pr) return fail(n, "rule needs a principal formula");
        MorId idc = base.identity(C.type);
        FibPtr wrapped = FibFormula::star(base, idc, pr);
        bool left = n->rule == Rule::IdInvL;
        Ctx rest;
        if (!strip(n, left ? C.left : C.right, rest, left ? "left" : "right"))
          return false;
        return left ? match(n, 0, C.type, plus(rest, wrapped), C.right)
                    : match(n, 0, C.type, C.left, plus(rest, wrapped));
      }
    }
    return fail(n, "unknown rule tag");
  }
};

}  // namespace

CheckReport check_proof(BaseOracle& base, const ProofPtr& p) {
  Checker c{base, {}};
  c.check(p);
  return c.rep;
}

}  // namespace alk
