#include "alk/fibres.hpp"

#include <algorithm>
#include <iterator>

#include "alk/common.hpp"

namespace alk {

namespace {

using Kind = FibFormula::Kind;

Subset set_and(const Subset& a, const Subset& b) {
  Subset out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.end()));
  return out;
}

Subset set_or(const Subset& a, const Subset& b) {
  Subset out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

bool subset_leq(const Subset& a, const Subset& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

Subset full_set(const FinSet& c) { return Subset(c.elems.begin(), c.elems.end()); }

// right adjoint to the strict inverse image along a total map
Subset forall_total(const FinPMap& f, const Subset& u) {
  Subset out = full_set(f.dst);
  for (const auto& [x, fx] : f.graph)
    if (!u.count(x)) out.erase(fx);
  return out;
}

}  // namespace

const FinSet& KripkeModel::worlds(ObjId a) const {
  auto it = world_of.find(a);
  if (it != world_of.end()) return it->second;
  if (fin) return fin->carrier(a);
  throw TypeError(cat("model has no world set for object ", a));
}

FinPMap KripkeModel::psi(MorId f) const {
  auto it = map_of.find(f);
  if (it != map_of.end()) return it->second;
  if (fin) return fin->pmap(f);
  throw TypeError(cat("model has no action for 1-cell ", f));
}

KripkeModel identity_model(FinBase& fb) {
  KripkeModel m;
  m.base = &fb;
  m.fin = &fb;
  for (ObjId a : fb.objects()) m.world_of[a] = fb.carrier(a);
  for (MorId f : fb.generators()) m.map_of[f] = fb.pmap(f);
  return m;
}

Subset Assignment::at(const std::string& name, ObjId a) const {
  auto it = val.find({name, a});
  return it == val.end() ? Subset{} : it->second;
}

void Assignment::set(const std::string& name, ObjId a, Subset s) {
  val[{name, a}] = std::move(s);
}

SemValue eval_formula(const KripkeModel& m, const Assignment& asg, const FibPtr& phi,
                      ObjId t) {
  if (!phi) throw TypeError("eval of a null formula");
  if (phi->type != t)
    throw TypeError(cat("formula lives over object ", phi->type, ", expected ", t));
  const FinSet& carrier = m.worlds(t);
  SemValue out;
  out.type = t;
  switch (phi->kind) {
    case Kind::Atom:
      out.worlds = asg.at(phi->atom, t);
      break;
    case Kind::Top:
      out.worlds = full_set(carrier);
      break;
    case Kind::Bot:
      break;
    case Kind::Neg:
      out.worlds = complement(carrier, eval_formula(m, asg, phi->a, t).worlds);
      break;
    case Kind::And:
      out.worlds = set_and(eval_formula(m, asg, phi->a, t).worlds,
                           eval_formula(m, asg, phi->b, t).worlds);
      break;
    case Kind::Or:
      out.worlds = set_or(eval_formula(m, asg, phi->a, t).worlds,
                          eval_formula(m, asg, phi->b, t).worlds);
      break;
    case Kind::Star: {
      FinPMap f = m.psi(phi->mor);
      SemValue inner = eval_formula(m, asg, phi->a, phi->a->type);
      out.worlds = dom_con_pullback(f, inner.worlds);
      break;
    }
    case Kind::Coprod: {
      FinPMap f = m.psi(phi->mor);
      SemValue inner = eval_formula(m, asg, phi->a, phi->a->type);
      out.worlds = exists_along(f, inner.worlds);
      break;
    }
    case Kind::Prod: {
      FinPMap f = m.psi(phi->mor);
      if (!pm_total(f))
        throw TypeError("product formulas evaluate only along total 1-cells");
      SemValue inner = eval_formula(m, asg, phi->a, phi->a->type);
      out.worlds = forall_total(f, inner.worlds);
      break;
    }
  }
  return out;
}

bool eval_sequent(const KripkeModel& m, const Assignment& asg, const Sequent& s) {
  Subset lhs = full_set(m.worlds(s.type));
  for (const auto& x : s.left) lhs = set_and(lhs, eval_formula(m, asg, x, s.type).worlds);
  Subset rhs;
  for (const auto& x : s.right) rhs = set_or(rhs, eval_formula(m, asg, x, s.type).worlds);
  return subset_leq(lhs, rhs);
}

namespace {

void tally(LawReport& r, bool holds, const std::string& desc) {
  ++r.cases;
  if (!holds) {
    ++r.failures;
    r.ok = false;
    if (r.first_failure.empty()) r.first_failure = desc;
  }
}

std::string show_subset(const Subset& s) {
  std::string out = "{";
  for (const auto& e : s) {
    if (out.size() > 1) out += ",";
    out += e;
  }
  return out + "}";
}

}  // namespace

LawReport check_frobenius(const KripkeModel& m, MorId f, const std::vector<MorId>& uppers,
                          bool corrupt_pullback) {
  LawReport r;
  BaseOracle& B = *m.base;
  FinPMap fm = m.psi(f);
  const FinSet& src = m.worlds(B.source(f));
  const FinSet& dst = m.worlds(B.target(f));
  auto pull = [&](const FinPMap& pm, const Subset& v) {
    return corrupt_pullback ? dom_co_pullback(pm, v) : dom_con_pullback(pm, v);
  };
  if (pm_total(fm) && !corrupt_pullback) {
    for (const auto& P : all_subsets(src))
      for (const auto& Q : all_subsets(dst)) {
        Subset lhs = set_or(forall_total(fm, P), Q);
        Subset rhs = forall_total(fm, set_or(P, dom_con_pullback(fm, Q)));
        tally(r, lhs == rhs,
              cat("forall-or identity at P=", show_subset(P), " Q=", show_subset(Q)));
      }
  }
  for (MorId g : uppers) {
    if (B.leq(f, g) != Verdict::Proved)
      throw TypeError("frobenius corollary needs f below g");
    FinPMap gm = m.psi(g);
    Subset fbot = pull(fm, {});
    for (const auto& P : all_subsets(dst)) {
      Subset lhs = pull(fm, P);
      Subset rhs = set_or(pull(gm, P), fbot);
      tally(r, lhs == rhs, cat("corollary at P=", show_subset(P), " for cell ", g));
    }
  }
  return r;
}

LawReport check_beck_chevalley(const KripkeModel& m, MorId f, MorId g) {
  LawReport r;
  BaseOracle& B = *m.base;
  if (B.target(f) != B.target(g))
    throw TypeError("beck-chevalley needs a shared target");
  FinPMap fm = m.psi(f);
  FinPMap gm = m.psi(g);
  CommaSquare cs = pm_comma(fm, gm);
  // With implication-form pullbacks the raw mate of the comma square fails
  // twice over: the apex keeps a vacuous pair (a,c) whenever f(a) is
  // undefined, and g* of an empty image keeps everything outside dom(g).
  // Both corrections belong to the law itself,
  //   g* coprod_f P  =  coprod_fhat( ghat* P  /\  dom(f.ghat) )  \/  g* bot
  // and they vanish when f and g are total, leaving the pullback identity.
  FinPMap fghat = pm_compose(fm, cs.to_src_f);
  Subset fgdom = fghat.domain();
  Subset gbot = dom_con_pullback(gm, {});
  for (const auto& P : all_subsets(m.worlds(B.source(f)))) {
    Subset lhs = dom_con_pullback(gm, exists_along(fm, P));
    Subset inner;
    for (const auto& x : dom_con_pullback(cs.to_src_f, P))
      if (fgdom.count(x)) inner.insert(x);
    Subset rhs = exists_along(cs.to_src_g, inner);
    rhs.insert(gbot.begin(), gbot.end());
    tally(r, lhs == rhs, cat("P=", show_subset(P)));
  }
  return r;
}

LawReport check_adjunctions(const KripkeModel& m, MorId f,
                            const std::vector<MorId>& uppers) {
  LawReport r;
  BaseOracle& B = *m.base;
  FinPMap fm = m.psi(f);
  auto srcSubs = all_subsets(m.worlds(B.source(f)));
  auto dstSubs = all_subsets(m.worlds(B.target(f)));
  for (const auto& P : srcSubs)
    for (const auto& Q : dstSubs) {
      bool lower = subset_leq(exists_along(fm, P), Q);
      bool upper = subset_leq(P, dom_con_pullback(fm, Q));
      tally(r, lower == upper,
            cat("galois at P=", show_subset(P), " Q=", show_subset(Q)));
    }
  for (const auto& P : srcSubs)
    for (const auto& P2 : srcSubs)
      if (subset_leq(P, P2))
        tally(r, subset_leq(exists_along(fm, P), exists_along(fm, P2)),
              cat("direct image monotone at ", show_subset(P)));
  for (const auto& Q : dstSubs)
    for (const auto& Q2 : dstSubs)
      if (subset_leq(Q, Q2))
        tally(r, subset_leq(dom_con_pullback(fm, Q), dom_con_pullback(fm, Q2)),
              cat("pullback monotone at ", show_subset(Q)));
  for (MorId g : uppers) {
    if (B.leq(f, g) != Verdict::Proved)
      throw TypeError("order-reversal check needs f below g");
    FinPMap gm = m.psi(g);
    for (const auto& Q : dstSubs)
      tally(r, subset_leq(dom_con_pullback(gm, Q), dom_con_pullback(fm, Q)),
            cat("order reversal at Q=", show_subset(Q), " for cell ", g));
  }
  return r;
}

Assignment random_assignment(Rng& rng, const KripkeModel& m,
                             const std::vector<std::string>& atoms) {
  Assignment a;
  for (const auto& [obj, carrier] : m.world_of)
    for (const auto& name : atoms) a.set(name, obj, random_subset(rng, carrier));
  return a;
}

}  // namespace alk
