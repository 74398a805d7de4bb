#include "alk/freecat.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

namespace alk {

namespace {

std::map<std::string, Term> tuple_subst(const VarTuple& from, const std::vector<Term>& terms) {
  std::map<std::string, Term> m;
  for (std::size_t i = 0; i < from.entries.size(); ++i) m[from.entries[i].first] = terms[i];
  return m;
}

std::vector<Term> vars_as_terms(const VarTuple& v) {
  std::vector<Term> out;
  out.reserve(v.entries.size());
  for (const auto& [n, s] : v.entries) out.push_back(Term{n, {}});
  return out;
}

HPVPtr defs_of(const std::vector<Term>& ts) {
  HPVPtr out = HPVFormula::top();
  for (const auto& t : ts) out = HPVFormula::conj(out, HPVFormula::def(t));
  return out;
}

HPVPtr eq_tuple(const std::vector<Term>& a, const std::vector<Term>& b) {
  HPVPtr out = HPVFormula::top();
  for (std::size_t i = 0; i < a.size(); ++i)
    out = HPVFormula::conj(out, HPVFormula::eq(a[i], b[i]));
  return out;
}

Term rename_term(const Term& t, const std::map<std::string, std::string>& r) {
  auto it = r.find(t.var);
  if (it == r.end()) return t;
  Term out = t;
  out.var = it->second;
  return out;
}

// simultaneous head-variable renaming; cannot break typing when the rename
// is situation-preserving, so no signature needed
HPVPtr rename_hpv(const HPVPtr& f, const std::map<std::string, std::string>& r) {
  switch (f->kind) {
    case HPVFormula::Kind::Top: return f;
    case HPVFormula::Kind::Eq:
      return HPVFormula::eq(rename_term(f->lhs, r), rename_term(f->rhs, r));
    case HPVFormula::Kind::And:
      return HPVFormula::conj(rename_hpv(f->a, r), rename_hpv(f->b, r));
    case HPVFormula::Kind::Imp:
      return HPVFormula::imp(rename_hpv(f->a, r), rename_hpv(f->b, r));
  }
  return f;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
  if (!taken.count(base)) return base;
  for (int k = 2;; ++k) {
    std::string cand = base + "_" + std::to_string(k);
    if (!taken.count(cand)) return cand;
  }
}

// b's variables renamed away from a's; the map covers every b variable
std::map<std::string, std::string> align_names(const VarTuple& a, const VarTuple& b) {
  std::set<std::string> taken;
  for (const auto& [n, s] : a.entries) taken.insert(n);
  std::map<std::string, std::string> rn;
  for (const auto& [n, s] : b.entries) {
    std::string nn = fresh_name(n, taken);
    taken.insert(nn);
    rn[n] = nn;
  }
  return rn;
}

// positional rename of o's variables onto the names of `onto`
std::map<std::string, std::string> positional_rename(const VarTuple& o, const VarTuple& onto) {
  std::map<std::string, std::string> rn;
  for (std::size_t i = 0; i < o.entries.size(); ++i)
    rn[o.entries[i].first] = onto.entries[i].first;
  return rn;
}

}  // namespace

bool obj_equal(const CtxObject& a, const CtxObject& b) {
  if (a.vars.entries.size() != b.vars.entries.size()) return false;
  for (std::size_t i = 0; i < a.vars.entries.size(); ++i)
    if (a.vars.entries[i].second != b.vars.entries[i].second) return false;
  auto rn = positional_rename(b.vars, a.vars);
  return hpv_conjuncts_eq(a.constraint, rename_hpv(b.constraint, rn));
}

std::string print_object(const CtxObject& o) {
  std::string s = "{";
  for (std::size_t i = 0; i < o.vars.entries.size(); ++i) {
    if (i) s += ", ";
    s += o.vars.entries[i].first + ":" + o.vars.entries[i].second;
  }
  s += " | " + print_hpv(o.constraint) + "}";
  return s;
}

std::string print_morphism(const CtxMorphism& m) {
  std::string s = "{";
  for (std::size_t i = 0; i < m.terms.size(); ++i) {
    if (i) s += ", ";
    s += print_term(m.terms[i]);
  }
  s += " | " + print_hpv(m.constraint) + "} : " + print_object(m.src) + " -> " +
       print_object(m.dst);
  return s;
}

FreeCat::FreeCat(Theory th, LogicMode mode, Budget budget)
    : th_(std::move(th)), mode_(mode), budget_(budget) {
  th_.sig.validate();
}

void FreeCat::check_object(const CtxObject& o) const {
  std::set<std::string> seen;
  for (const auto& [n, s] : o.vars.entries) {
    if (!th_.sig.has_situation(s)) throw TypeError("unknown situation " + s);
    if (!seen.insert(n).second) throw TypeError("duplicate context variable " + n);
  }
  if (!o.constraint) throw TypeError("object has no constraint");
  if (mode_ == LogicMode::PV && !hpv_imp_free(o.constraint))
    throw TypeError("implication in an object constraint needs HPV mode");
  for (const auto& t : subterms(o.constraint)) (void)type_of_term(th_.sig, o.vars, t);
}

CtxObject FreeCat::mk_object(VarTuple vars, HPVPtr constraint) const {
  CtxObject o{std::move(vars), constraint ? std::move(constraint) : HPVFormula::top()};
  check_object(o);
  return o;
}

CtxObject FreeCat::unit_object() const { return CtxObject{VarTuple{}, HPVFormula::top()}; }

Verdict FreeCat::entails(const VarTuple& vars, const HPVPtr& hyp, const HPVPtr& goal) const {
  if (mode_ == LogicMode::PV) {
    auto h = hpv_to_pv(hyp);
    auto g = hpv_to_pv(goal);
    if (!h || !g) throw TypeError("implication reached the PV entailment backend");
    return pv_entails(th_, vars, *h, *g, budget_).verdict;
  }
  return hpv_entails(th_, vars, hyp, goal, budget_).verdict;
}

CtxMorphism FreeCat::raw(CtxObject src, CtxObject dst, std::vector<Term> terms,
                         HPVPtr constraint) const {
  CtxMorphism m;
  m.src = std::move(src);
  m.dst = std::move(dst);
  m.terms = std::move(terms);
  m.constraint = constraint ? std::move(constraint) : HPVFormula::top();
  return m;
}

CtxMorphism FreeCat::mk_morphism(CtxObject src, CtxObject dst, std::vector<Term> terms,
                                 HPVPtr constraint) const {
  check_object(src);
  check_object(dst);
  if (!constraint) constraint = HPVFormula::top();
  if (terms.size() != dst.vars.entries.size())
    throw TypeError(cat("morphism has ", terms.size(), " terms for ",
                        dst.vars.entries.size(), " target variables"));
  for (std::size_t i = 0; i < terms.size(); ++i) {
    std::string ty = type_of_term(th_.sig, src.vars, terms[i]);
    if (ty != dst.vars.entries[i].second)
      throw TypeError(cat("component ", i, " has situation ", ty, ", expected ",
                          dst.vars.entries[i].second));
  }
  if (mode_ == LogicMode::PV && !hpv_imp_free(constraint))
    throw TypeError("implication in a morphism constraint needs HPV mode");
  for (const auto& t : subterms(constraint)) (void)type_of_term(th_.sig, src.vars, t);

  HPVPtr target_inst =
      substitute(th_.sig, dst.vars, dst.constraint, tuple_subst(dst.vars, terms), src.vars);
  HPVPtr hyp =
      HPVFormula::conj(HPVFormula::conj(src.constraint, constraint), defs_of(terms));
  switch (entails(src.vars, hyp, target_inst)) {
    case Verdict::Proved: break;
    case Verdict::Refuted:
      throw ValidityRefuted("target constraint fails where the morphism is defined");
    case Verdict::Unknown:
      throw ValidityUnknown("could not decide the target constraint within budget");
  }
  return raw(std::move(src), std::move(dst), std::move(terms), std::move(constraint));
}

CtxMorphism FreeCat::identity(const CtxObject& a) const {
  return raw(a, a, vars_as_terms(a.vars), a.constraint);
}

CtxMorphism FreeCat::compose(const CtxMorphism& g, const CtxMorphism& f) const {
  if (!obj_equal(f.dst, g.src)) throw CategoryError("composition boundary mismatch");
  auto rn = positional_rename(g.src.vars, f.dst.vars);
  auto sub = tuple_subst(f.dst.vars, f.terms);
  std::vector<Term> ts;
  ts.reserve(g.terms.size());
  for (const auto& t : g.terms) ts.push_back(substitute(rename_term(t, rn), sub));
  HPVPtr eta =
      substitute(th_.sig, f.dst.vars, rename_hpv(g.constraint, rn), sub, f.src.vars);
  return raw(f.src, g.dst, std::move(ts), HPVFormula::conj(eta, f.constraint));
}

Verdict FreeCat::leq_2cell(const CtxMorphism& f, const CtxMorphism& g) const {
  if (!obj_equal(f.src, g.src) || !obj_equal(f.dst, g.dst))
    throw CategoryError("2-cells need a parallel pair");
  auto rn = positional_rename(g.src.vars, f.src.vars);
  std::vector<Term> gts;
  gts.reserve(g.terms.size());
  for (const auto& t : g.terms) gts.push_back(rename_term(t, rn));
  HPVPtr hyp = HPVFormula::conj(HPVFormula::conj(f.src.constraint, f.constraint),
                                defs_of(f.terms));
  HPVPtr goal = HPVFormula::conj(eq_tuple(f.terms, gts), rename_hpv(g.constraint, rn));
  return entails(f.src.vars, hyp, goal);
}

Verdict FreeCat::eq_morphism(const CtxMorphism& f, const CtxMorphism& g) const {
  Verdict a = leq_2cell(f, g);
  if (a == Verdict::Refuted) return Verdict::Refuted;
  Verdict b = leq_2cell(g, f);
  if (b == Verdict::Refuted) return Verdict::Refuted;
  return (a == Verdict::Proved && b == Verdict::Proved) ? Verdict::Proved : Verdict::Unknown;
}

CtxObject FreeCat::tensor(const CtxObject& a, const CtxObject& b) const {
  auto rn = align_names(a.vars, b.vars);
  VarTuple vt = a.vars;
  for (const auto& [n, s] : b.vars.entries) vt.entries.push_back({rn.at(n), s});
  return CtxObject{std::move(vt),
                   HPVFormula::conj(a.constraint, rename_hpv(b.constraint, rn))};
}

CtxMorphism FreeCat::tensor_mor(const CtxMorphism& f, const CtxMorphism& g) const {
  CtxObject s = tensor(f.src, g.src);
  CtxObject d = tensor(f.dst, g.dst);
  auto rn = align_names(f.src.vars, g.src.vars);
  std::vector<Term> ts = f.terms;
  for (const auto& t : g.terms) ts.push_back(rename_term(t, rn));
  HPVPtr c = HPVFormula::conj(f.constraint, rename_hpv(g.constraint, rn));
  return raw(std::move(s), std::move(d), std::move(ts), std::move(c));
}

CtxMorphism FreeCat::symmetry(const CtxObject& a, const CtxObject& b) const {
  CtxObject s = tensor(a, b);
  CtxObject d = tensor(b, a);
  auto rn = align_names(a.vars, b.vars);  // names of b inside s
  std::vector<Term> ts;
  for (const auto& [n, _] : b.vars.entries) ts.push_back(Term{rn.at(n), {}});
  for (const auto& [n, _] : a.vars.entries) ts.push_back(Term{n, {}});
  return raw(std::move(s), std::move(d), std::move(ts), HPVFormula::top());
}

CtxMorphism FreeCat::diagonal(const CtxObject& a) const {
  CtxObject d = tensor(a, a);
  std::vector<Term> ts = vars_as_terms(a.vars);
  auto copy = vars_as_terms(a.vars);
  ts.insert(ts.end(), copy.begin(), copy.end());
  return raw(a, std::move(d), std::move(ts), HPVFormula::top());
}

CtxMorphism FreeCat::codiagonal(const CtxObject& a) const {
  CtxObject s = tensor(a, a);
  std::size_t n = a.vars.entries.size();
  std::vector<Term> left, right;
  for (std::size_t i = 0; i < n; ++i) {
    left.push_back(Term{s.vars.entries[i].first, {}});
    right.push_back(Term{s.vars.entries[n + i].first, {}});
  }
  return raw(std::move(s), a, left, eq_tuple(left, right));
}

CtxMorphism FreeCat::bang(const CtxObject& a) const {
  return raw(a, unit_object(), {}, HPVFormula::top());
}

CtxMorphism FreeCat::proj1(const CtxObject& a, const CtxObject& b) const {
  CtxObject s = tensor(a, b);
  return raw(std::move(s), a, vars_as_terms(a.vars), HPVFormula::top());
}

CtxMorphism FreeCat::proj2(const CtxObject& a, const CtxObject& b) const {
  CtxObject s = tensor(a, b);
  std::size_t n = a.vars.entries.size();
  std::vector<Term> ts;
  for (std::size_t i = n; i < s.vars.entries.size(); ++i)
    ts.push_back(Term{s.vars.entries[i].first, {}});
  return raw(std::move(s), b, std::move(ts), HPVFormula::top());
}

CtxMorphism FreeCat::meet(const CtxMorphism& f, const CtxMorphism& g) const {
  if (!obj_equal(f.src, g.src) || !obj_equal(f.dst, g.dst))
    throw CategoryError("meet needs a parallel pair");
  return compose(codiagonal(f.dst), compose(tensor_mor(f, g), diagonal(f.src)));
}

CtxMorphism FreeCat::restriction_of(const CtxMorphism& f) const {
  return raw(f.src, f.src, vars_as_terms(f.src.vars),
             HPVFormula::conj(defs_of(f.terms), f.constraint));
}

Verdict FreeCat::is_total(const CtxMorphism& f) const {
  return entails(f.src.vars, f.src.constraint,
                 HPVFormula::conj(defs_of(f.terms), f.constraint));
}

std::pair<CtxMorphism, CtxMorphism> FreeCat::split_coreflexive(const CtxMorphism& d) const {
  if (!obj_equal(d.src, d.dst)) throw CategoryError("coreflexives are endomorphisms");
  switch (leq_2cell(d, identity(d.src))) {
    case Verdict::Proved: break;
    case Verdict::Refuted: throw CategoryError("not a coreflexive");
    case Verdict::Unknown: throw ValidityUnknown("coreflexivity undecided within budget");
  }
  switch (eq_morphism(compose(d, d), d)) {
    case Verdict::Proved: break;
    case Verdict::Refuted: throw CategoryError("not idempotent");
    case Verdict::Unknown: throw ValidityUnknown("idempotence undecided within budget");
  }
  HPVPtr dom = HPVFormula::conj(defs_of(d.terms), d.constraint);
  CtxObject sub{d.src.vars, HPVFormula::conj(d.src.constraint, dom)};
  CtxMorphism i = raw(sub, d.src, vars_as_terms(sub.vars), HPVFormula::top());
  CtxMorphism j = raw(d.src, sub, vars_as_terms(d.src.vars), dom);
  i.section = std::make_shared<const CtxMorphism>(j);
  return {std::move(i), std::move(j)};
}

CtxMorphism FreeCat::quasi_inverse(const CtxMorphism& i) const {
  if (!i.section)
    throw CategoryError("quasi-inverse is only stored for splittings of coreflexives");
  return *i.section;
}

Verdict FreeCat::is_monic(const CtxMorphism& f) const {
  CtxMorphism lhs = compose(codiagonal(f.dst), tensor_mor(f, f));
  CtxMorphism rhs = compose(f, codiagonal(f.src));
  return eq_morphism(lhs, rhs);
}

CommaData FreeCat::comma_object(const CtxMorphism& f, const CtxMorphism& g) const {
  if (mode_ != LogicMode::HPV)
    throw CategoryError("comma objects need HPV mode");
  if (!obj_equal(f.dst, g.dst)) throw CategoryError("comma cospan targets differ");

  const CtxObject& X = f.src;
  const CtxObject& Y = g.src;
  auto rn = align_names(X.vars, Y.vars);
  VarTuple vt = X.vars;
  for (const auto& [n, s] : Y.vars.entries) vt.entries.push_back({rn.at(n), s});

  std::vector<Term> gts;
  gts.reserve(g.terms.size());
  for (const auto& t : g.terms) gts.push_back(rename_term(t, rn));
  HPVPtr gcon = rename_hpv(g.constraint, rn);

  HPVPtr ante = HPVFormula::conj(defs_of(f.terms), f.constraint);
  HPVPtr cons = HPVFormula::conj(eq_tuple(f.terms, gts), gcon);
  HPVPtr con = HPVFormula::conj(
      HPVFormula::conj(X.constraint, rename_hpv(Y.constraint, rn)),
      HPVFormula::imp(std::move(ante), std::move(cons)));
  CtxObject apex{std::move(vt), std::move(con)};

  CtxMorphism to_src = raw(apex, X, vars_as_terms(X.vars), HPVFormula::top());
  std::vector<Term> yts;
  for (const auto& [n, _] : Y.vars.entries) yts.push_back(Term{rn.at(n), {}});
  CtxMorphism to_oth = raw(apex, Y, std::move(yts), HPVFormula::top());
  return CommaData{std::move(apex), std::move(to_src), std::move(to_oth), f, g};
}

CtxMorphism FreeCat::comma_pair(const CommaData& c, const CtxMorphism& phi,
                                const CtxMorphism& psi) const {
  if (!obj_equal(phi.src, psi.src)) throw CategoryError("mediator legs have different sources");
  if (!obj_equal(phi.dst, c.f.src) || !obj_equal(psi.dst, c.g.src))
    throw CategoryError("mediator legs do not match the cospan feet");
  switch (leq_2cell(compose(c.f, phi), compose(c.g, psi))) {
    case Verdict::Proved: break;
    case Verdict::Refuted: throw CategoryError("square does not commute laxly");
    case Verdict::Unknown: throw ValidityUnknown("lax square undecided within budget");
  }
  auto rn = positional_rename(psi.src.vars, phi.src.vars);
  std::vector<Term> ts = phi.terms;
  for (const auto& t : psi.terms) ts.push_back(rename_term(t, rn));
  HPVPtr psic = rename_hpv(psi.constraint, rn);
  std::vector<Term> psits(ts.begin() + static_cast<long>(phi.terms.size()), ts.end());
  HPVPtr con = HPVFormula::conj(
      HPVFormula::conj(phi.constraint, psic),
      HPVFormula::conj(defs_of(phi.terms), defs_of(psits)));
  return raw(phi.src, c.apex, std::move(ts), std::move(con));
}

}  // namespace alk
