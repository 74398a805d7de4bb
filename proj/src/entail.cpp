#include "alk/entail.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <sstream>

namespace alk {

// ---------------------------------------------------------------------------
// Interpretations

std::optional<std::string> Interp::eval(const Term& t,
                                        const std::map<std::string, std::string>& asg) const {
  auto it = asg.find(t.var);
  if (it == asg.end()) return std::nullopt;
  std::string cur = it->second;
  for (const auto& a : t.apps) {
    auto fa = acts.find(a);
    if (fa == acts.end()) return std::nullopt;
    auto next = fa->second.apply(cur);
    if (!next) return std::nullopt;
    cur = *next;
  }
  return cur;
}

bool Interp::satisfies(const PVFormula& f, const std::map<std::string, std::string>& asg) const {
  for (const auto& e : f.eqs) {
    auto l = eval(e.lhs, asg), r = eval(e.rhs, asg);
    if (!l || !r || *l != *r) return false;
  }
  return true;
}

bool Interp::satisfies(const HPVPtr& f, const std::map<std::string, std::string>& asg) const {
  switch (f->kind) {
    case HPVFormula::Kind::Top:
      return true;
    case HPVFormula::Kind::Eq: {
      auto l = eval(f->lhs, asg), r = eval(f->rhs, asg);
      return l && r && *l == *r;
    }
    case HPVFormula::Kind::And:
      return satisfies(f->a, asg) && satisfies(f->b, asg);
    case HPVFormula::Kind::Imp:
      return !satisfies(f->a, asg) || satisfies(f->b, asg);
  }
  return false;
}

bool Interp::satisfies_axioms(const Theory& th) const {
  for (const auto& ax : th.axioms) {
    for (const auto& asg : enumerate_assignments(*this, ax.vars)) {
      if (!satisfies(ax.formula, asg)) return false;
    }
  }
  return true;
}

std::string Interp::describe(const Signature& sig) const {
  std::ostringstream os;
  for (const auto& [s, carrier] : sits) {
    os << "set " << s << " = {";
    for (std::size_t i = 0; i < carrier.elems.size(); ++i)
      os << (i ? ", " : "") << carrier.elems[i];
    os << "};\n";
  }
  for (const auto& [a, pm] : acts) {
    const ActionDecl* decl = sig.find_action(a);
    os << "pmap " << a << " : " << (decl ? decl->src : "?") << " -> " << (decl ? decl->dst : "?")
       << " = {";
    bool first = true;
    for (const auto& [x, y] : pm.graph) {
      if (!first) os << ", ";
      first = false;
      os << x << " -> " << y;
    }
    os << "};\n";
  }
  return os.str();
}

std::vector<std::map<std::string, std::string>> enumerate_assignments(const Interp& in,
                                                                      const VarTuple& vars) {
  std::vector<std::map<std::string, std::string>> out;
  std::vector<const FinSet*> carriers;
  for (const auto& [v, s] : vars.entries) {
    auto it = in.sits.find(s);
    if (it == in.sits.end() || it->second.elems.empty()) return out;
    carriers.push_back(&it->second);
  }
  std::vector<std::size_t> ix(vars.entries.size(), 0);
  while (true) {
    std::map<std::string, std::string> asg;
    for (std::size_t i = 0; i < ix.size(); ++i)
      asg[vars.entries[i].first] = carriers[i]->elems[ix[i]];
    out.push_back(std::move(asg));
    std::size_t k = 0;
    while (k < ix.size() && ++ix[k] == carriers[k]->elems.size()) ix[k++] = 0;
    if (k == ix.size()) break;
    if (ix.empty()) break;
  }
  return out;
}

namespace {
std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}
}  // namespace

EnumResult enumerate_interps(const Signature& sig, int max_carrier, long max_steps,
                             const std::function<bool(const Interp&)>& fn) {
  if (max_carrier < 1) return {false, true};
  const std::size_t ns = sig.situations.size();
  std::vector<int> sizes(ns, 1);
  long steps = 0;
  while (true) {
    std::map<std::string, FinSet> sits;
    for (std::size_t i = 0; i < ns; ++i)
      sits[sig.situations[i]] = named_carrier(lower(sig.situations[i]), sizes[i]);

    std::vector<std::vector<FinPMap>> options;
    for (const auto& a : sig.actions)
      options.push_back(all_pmaps(sits.at(a.src), sits.at(a.dst)));

    std::vector<std::size_t> ix(options.size(), 0);
    while (true) {
      if (++steps > max_steps) return {false, false};
      Interp in;
      in.sits = sits;
      for (std::size_t i = 0; i < options.size(); ++i)
        in.acts[sig.actions[i].name] = options[i][ix[i]];
      if (fn(in)) return {true, false};
      std::size_t k = 0;
      while (k < ix.size() && ++ix[k] == options[k].size()) ix[k++] = 0;
      if (k == ix.size()) break;
      if (ix.empty()) break;
    }

    std::size_t k = 0;
    while (k < ns && ++sizes[k] > max_carrier) sizes[k++] = 1;
    if (k == ns) break;
    if (ns == 0) break;
  }
  return {false, true};
}

// ---------------------------------------------------------------------------
// Derivation checking

const char* to_string(PVTag t) {
  switch (t) {
    case PVTag::Ax: return "Ax";
    case PVTag::Cut: return "Cut";
    case PVTag::Substitution: return "Substitution";
    case PVTag::Reflexivity: return "Reflexivity";
    case PVTag::Equality: return "Equality";
    case PVTag::Strictness1: return "Strictness1";
    case PVTag::Strictness2: return "Strictness2";
    case PVTag::Top: return "Top";
    case PVTag::AndIntro: return "AndIntro";
    case PVTag::Proj1: return "Proj1";
    case PVTag::Proj2: return "Proj2";
    case PVTag::AxiomOfTheory: return "AxiomOfTheory";
    case PVTag::HeytingI: return "HeytingI";
    case PVTag::HeytingE: return "HeytingE";
  }
  return "?";
}

namespace {

bool type_check_pv(const Signature& sig, const VarTuple& vars, const PVFormula& f,
                   std::string* err) {
  try {
    for (const auto& e : f.eqs) {
      auto tl = type_of_term(sig, vars, e.lhs);
      auto tr = type_of_term(sig, vars, e.rhs);
      if (tl != tr) {
        *err = cat("equation sides have types ", tl, " and ", tr);
        return false;
      }
    }
  } catch (const TypeError& ex) {
    *err = ex.what();
    return false;
  }
  return true;
}

bool type_check_hpv(const Signature& sig, const VarTuple& vars, const HPVPtr& f,
                    std::string* err) {
  switch (f->kind) {
    case HPVFormula::Kind::Top:
      return true;
    case HPVFormula::Kind::Eq:
      return type_check_pv(sig, vars, PVFormula::eq(f->lhs, f->rhs), err);
    case HPVFormula::Kind::And:
    case HPVFormula::Kind::Imp:
      return type_check_hpv(sig, vars, f->a, err) && type_check_hpv(sig, vars, f->b, err);
  }
  return true;
}

// one term-side of a replacement step: unchanged, or variable x swapped for y
bool replace_side_ok(const Term& from, const Term& to, const std::string& x,
                     const std::string& y) {
  if (from == to) return true;
  return from.var == x && to.var == y && from.apps == to.apps;
}

struct PVChecker {
  const Theory& th;
  CheckResult res;

  void fail(const PVDerivation& d, const std::string& msg) {
    if (!res.ok) return;
    res.ok = false;
    res.error = cat(to_string(d.tag), ": ", msg);
  }

  void check(const PVDerivPtr& dp) {
    if (!res.ok) return;
    const PVDerivation& d = *dp;
    std::string terr;
    if (!type_check_pv(th.sig, d.vars, d.hyp, &terr) ||
        !type_check_pv(th.sig, d.vars, d.concl, &terr)) {
      fail(d, cat("ill-typed sequent: ", terr));
      return;
    }
    for (const auto& k : d.kids) {
      check(k);
      if (!res.ok) return;
    }
    auto kids_match_vars = [&]() {
      for (const auto& k : d.kids)
        if (k->vars != d.vars) return false;
      return true;
    };
    switch (d.tag) {
      case PVTag::Ax:
        if (!d.kids.empty()) return fail(d, "expects no premises");
        if (!multiset_eq(d.hyp, d.concl)) return fail(d, "conclusion differs from hypothesis");
        break;
      case PVTag::Top:
        if (!d.kids.empty()) return fail(d, "expects no premises");
        if (!d.concl.is_top()) return fail(d, "conclusion must be empty");
        break;
      case PVTag::Reflexivity: {
        if (!d.kids.empty()) return fail(d, "expects no premises");
        if (!d.hyp.is_top()) return fail(d, "hypothesis must be empty");
        PVFormula want;
        for (const auto& [v, s] : d.vars.entries) want.add(Term{v, {}}, Term{v, {}});
        if (!multiset_eq(d.concl, want))
          return fail(d, "conclusion must assert definedness of every tuple variable");
        break;
      }
      case PVTag::Equality: {
        if (!d.kids.empty()) return fail(d, "expects no premises");
        if (d.hyp.eqs.empty()) return fail(d, "needs a leading variable equation");
        const auto& head = d.hyp.eqs[0];
        if (!head.lhs.apps.empty() || !head.rhs.apps.empty())
          return fail(d, "leading equation must relate bare variables");
        if (head.lhs.var != d.eq_x || head.rhs.var != d.eq_y)
          return fail(d, "leading equation disagrees with the recorded variable pair");
        auto tx = d.vars.type_of(d.eq_x), ty = d.vars.type_of(d.eq_y);
        if (!tx || !ty || *tx != *ty) return fail(d, "variable pair must share a situation");
        if (d.concl.eqs.size() + 1 != d.hyp.eqs.size())
          return fail(d, "conclusion must rewrite the remaining equations one for one");
        for (std::size_t i = 0; i < d.concl.eqs.size(); ++i) {
          const auto& from = d.hyp.eqs[i + 1];
          const auto& to = d.concl.eqs[i];
          if (!replace_side_ok(from.lhs, to.lhs, d.eq_x, d.eq_y) ||
              !replace_side_ok(from.rhs, to.rhs, d.eq_x, d.eq_y))
            return fail(d, "conclusion is not a replacement instance");
        }
        break;
      }
      case PVTag::Strictness1: {
        if (!d.kids.empty()) return fail(d, "expects no premises");
        PVFormula want;
        for (const auto& e : d.hyp.eqs) {
          want.add(e.lhs, e.lhs);
          want.add(e.rhs, e.rhs);
        }
        if (!multiset_eq(d.concl, want))
          return fail(d, "conclusion must assert definedness of both sides");
        break;
      }
      case PVTag::Strictness2: {
        if (!d.kids.empty()) return fail(d, "expects no premises");
        if (d.hyp.eqs.size() != 1 || !(d.hyp.eqs[0].lhs == d.hyp.eqs[0].rhs))
          return fail(d, "hypothesis must be a single definedness assertion");
        if (d.concl.eqs.size() != 1 || !(d.concl.eqs[0].lhs == d.concl.eqs[0].rhs))
          return fail(d, "conclusion must be a single definedness assertion");
        auto subs = subterms(d.hyp.eqs[0].lhs);
        if (subs.count(d.concl.eqs[0].lhs) == 0)
          return fail(d, "conclusion term is not a subterm of the hypothesis term");
        break;
      }
      case PVTag::Proj1:
      case PVTag::Proj2:
        if (!d.kids.empty()) return fail(d, "expects no premises");
        if (!multiset_leq(d.concl, d.hyp))
          return fail(d, "conclusion must be part of the hypothesis");
        break;
      case PVTag::AndIntro: {
        if (d.kids.size() != 2) return fail(d, "expects two premises");
        if (!kids_match_vars()) return fail(d, "premises must share the tuple");
        if (!multiset_eq(d.kids[0]->hyp, d.hyp) || !multiset_eq(d.kids[1]->hyp, d.hyp))
          return fail(d, "premises must share the hypothesis");
        if (!multiset_eq(d.concl, d.kids[0]->concl.conj(d.kids[1]->concl)))
          return fail(d, "conclusion must join the premise conclusions");
        break;
      }
      case PVTag::Cut: {
        if (d.kids.size() != 2) return fail(d, "expects two premises");
        if (!kids_match_vars()) return fail(d, "premises must share the tuple");
        if (!multiset_eq(d.kids[0]->hyp, d.hyp)) return fail(d, "left premise hypothesis differs");
        if (!multiset_eq(d.kids[0]->concl, d.kids[1]->hyp))
          return fail(d, "premises do not meet in the middle");
        if (!multiset_eq(d.kids[1]->concl, d.concl)) return fail(d, "conclusion differs");
        break;
      }
      case PVTag::Substitution: {
        if (d.kids.size() != 1) return fail(d, "expects one premise");
        const auto& kid = *d.kids[0];
        if (d.sigma.size() != kid.vars.entries.size())
          return fail(d, "substitution must cover the premise tuple exactly");
        PVFormula defs;
        for (const auto& [y, s] : kid.vars.entries) {
          auto it = d.sigma.find(y);
          if (it == d.sigma.end()) return fail(d, cat("no replacement for ", y));
          try {
            if (type_of_term(th.sig, d.vars, it->second) != s)
              return fail(d, cat("replacement for ", y, " has the wrong situation"));
          } catch (const TypeError& ex) {
            return fail(d, ex.what());
          }
          defs.add(it->second, it->second);
        }
        try {
          PVFormula want_hyp = defs.conj(substitute(th.sig, kid.vars, kid.hyp, d.sigma, d.vars));
          PVFormula want_concl = substitute(th.sig, kid.vars, kid.concl, d.sigma, d.vars);
          if (!multiset_eq(d.hyp, want_hyp))
            return fail(d, "hypothesis must assert replacement definedness plus the instance");
          if (!multiset_eq(d.concl, want_concl))
            return fail(d, "conclusion must be the substitution instance");
        } catch (const TypeError& ex) {
          return fail(d, ex.what());
        }
        break;
      }
      case PVTag::AxiomOfTheory: {
        if (!d.kids.empty()) return fail(d, "expects no premises");
        if (d.axiom_index < 0 || d.axiom_index >= static_cast<int>(th.axioms.size()))
          return fail(d, "axiom index out of range");
        const Axiom& ax = th.axioms[d.axiom_index];
        if (!(d.vars == ax.vars)) return fail(d, "tuple must match the axiom tuple");
        if (!d.hyp.is_top()) return fail(d, "hypothesis must be empty");
        auto pv = hpv_to_pv(ax.formula);
        if (!pv) return fail(d, "axiom is not a plain conjunction of equations");
        if (!multiset_eq(d.concl, *pv)) return fail(d, "conclusion differs from the axiom");
        break;
      }
      case PVTag::HeytingI:
      case PVTag::HeytingE:
        return fail(d, "arrow rules are not part of the conjunctive system");
    }
  }
};

}  // namespace

CheckResult check_pv_derivation(const Theory& th, const PVDerivPtr& d) {
  if (!d) return {false, "empty derivation"};
  PVChecker c{th, {}};
  c.check(d);
  return c.res;
}

// ---------------------------------------------------------------------------
// HPV derivation checking

namespace {

bool hpv_ms_remove(std::vector<HPVPtr>& pool, const HPVPtr& x) {
  for (auto it = pool.begin(); it != pool.end(); ++it) {
    if (hpv_equal(*it, x)) {
      pool.erase(it);
      return true;
    }
  }
  return false;
}

bool hpv_ms_leq(const std::vector<HPVPtr>& a, std::vector<HPVPtr> b) {
  for (const auto& x : a)
    if (!hpv_ms_remove(b, x)) return false;
  return true;
}

bool hpv_ms_eq(const std::vector<HPVPtr>& a, const std::vector<HPVPtr>& b) {
  return a.size() == b.size() && hpv_ms_leq(a, b);
}

std::vector<HPVPtr> hpv_ms_concat(std::vector<HPVPtr> a, const std::vector<HPVPtr>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

struct HPVChecker {
  const Theory& th;
  CheckResult res;

  void fail(const HPVDerivation& d, const std::string& msg) {
    if (!res.ok) return;
    res.ok = false;
    res.error = cat(to_string(d.tag), ": ", msg);
  }

  void check(const HPVDerivPtr& dp) {
    if (!res.ok) return;
    const HPVDerivation& d = *dp;
    std::string terr;
    if (!type_check_hpv(th.sig, d.vars, d.hyp, &terr) ||
        !type_check_hpv(th.sig, d.vars, d.concl, &terr)) {
      fail(d, cat("ill-typed sequent: ", terr));
      return;
    }
    for (const auto& k : d.kids) {
      check(k);
      if (!res.ok) return;
    }
    auto kids_match_vars = [&]() {
      for (const auto& k : d.kids)
        if (k->vars != d.vars) return false;
      return true;
    };
    const auto hs = hpv_conjuncts(d.hyp);
    const auto cs = hpv_conjuncts(d.concl);
    auto all_eq_kind = [](const std::vector<HPVPtr>& v) {
      return std::all_of(v.begin(), v.end(),
                         [](const HPVPtr& f) { return f->kind == HPVFormula::Kind::Eq; });
    };
    switch (d.tag) {
      case PVTag::Ax:
        if (!d.kids.empty()) return fail(d, "expects no premises");
        if (!hpv_ms_eq(hs, cs)) return fail(d, "conclusion differs from hypothesis");
        break;
      case PVTag::Top:
        if (!d.kids.empty()) return fail(d, "expects no premises");
        if (!cs.empty()) return fail(d, "conclusion must be empty");
        break;
      case PVTag::Reflexivity: {
        if (!d.kids.empty() || !hs.empty()) return fail(d, "hypothesis must be empty");
        std::vector<HPVPtr> want;
        for (const auto& [v, s] : d.vars.entries) want.push_back(HPVFormula::def(Term{v, {}}));
        if (!hpv_ms_eq(cs, want))
          return fail(d, "conclusion must assert definedness of every tuple variable");
        break;
      }
      case PVTag::Equality: {
        if (!d.kids.empty()) return fail(d, "expects no premises");
        if (hs.empty() || hs[0]->kind != HPVFormula::Kind::Eq)
          return fail(d, "needs a leading variable equation");
        if (!hs[0]->lhs.apps.empty() || !hs[0]->rhs.apps.empty() || hs[0]->lhs.var != d.eq_x ||
            hs[0]->rhs.var != d.eq_y)
          return fail(d, "leading equation must be the recorded variable pair");
        auto tx = d.vars.type_of(d.eq_x), ty = d.vars.type_of(d.eq_y);
        if (!tx || !ty || *tx != *ty) return fail(d, "variable pair must share a situation");
        if (cs.size() + 1 != hs.size()) return fail(d, "conclusion must rewrite one for one");
        for (std::size_t i = 0; i < cs.size(); ++i) {
          if (hs[i + 1]->kind != HPVFormula::Kind::Eq || cs[i]->kind != HPVFormula::Kind::Eq)
            return fail(d, "replacement applies to equations only");
          if (!replace_side_ok(hs[i + 1]->lhs, cs[i]->lhs, d.eq_x, d.eq_y) ||
              !replace_side_ok(hs[i + 1]->rhs, cs[i]->rhs, d.eq_x, d.eq_y))
            return fail(d, "conclusion is not a replacement instance");
        }
        break;
      }
      case PVTag::Strictness1: {
        if (!d.kids.empty()) return fail(d, "expects no premises");
        if (!all_eq_kind(hs)) return fail(d, "hypothesis must be equations");
        std::vector<HPVPtr> want;
        for (const auto& h : hs) {
          want.push_back(HPVFormula::def(h->lhs));
          want.push_back(HPVFormula::def(h->rhs));
        }
        if (!hpv_ms_eq(cs, want))
          return fail(d, "conclusion must assert definedness of both sides");
        break;
      }
      case PVTag::Strictness2: {
        if (!d.kids.empty()) return fail(d, "expects no premises");
        if (hs.size() != 1 || hs[0]->kind != HPVFormula::Kind::Eq ||
            !(hs[0]->lhs == hs[0]->rhs))
          return fail(d, "hypothesis must be a single definedness assertion");
        if (cs.size() != 1 || cs[0]->kind != HPVFormula::Kind::Eq ||
            !(cs[0]->lhs == cs[0]->rhs))
          return fail(d, "conclusion must be a single definedness assertion");
        if (subterms(hs[0]->lhs).count(cs[0]->lhs) == 0)
          return fail(d, "conclusion term is not a subterm of the hypothesis term");
        break;
      }
      case PVTag::Proj1:
      case PVTag::Proj2:
        if (!d.kids.empty()) return fail(d, "expects no premises");
        if (!hpv_ms_leq(cs, hs)) return fail(d, "conclusion must be part of the hypothesis");
        break;
      case PVTag::AndIntro: {
        if (d.kids.size() != 2) return fail(d, "expects two premises");
        if (!kids_match_vars()) return fail(d, "premises must share the tuple");
        if (!hpv_ms_eq(hpv_conjuncts(d.kids[0]->hyp), hs) ||
            !hpv_ms_eq(hpv_conjuncts(d.kids[1]->hyp), hs))
          return fail(d, "premises must share the hypothesis");
        if (!hpv_ms_eq(cs, hpv_ms_concat(hpv_conjuncts(d.kids[0]->concl),
                                         hpv_conjuncts(d.kids[1]->concl))))
          return fail(d, "conclusion must join the premise conclusions");
        break;
      }
      case PVTag::Cut: {
        if (d.kids.size() != 2) return fail(d, "expects two premises");
        if (!kids_match_vars()) return fail(d, "premises must share the tuple");
        if (!hpv_ms_eq(hpv_conjuncts(d.kids[0]->hyp), hs))
          return fail(d, "left premise hypothesis differs");
        if (!hpv_ms_eq(hpv_conjuncts(d.kids[0]->concl), hpv_conjuncts(d.kids[1]->hyp)))
          return fail(d, "premises do not meet in the middle");
        if (!hpv_ms_eq(hpv_conjuncts(d.kids[1]->concl), cs)) return fail(d, "conclusion differs");
        break;
      }
      case PVTag::Substitution: {
        if (d.kids.size() != 1) return fail(d, "expects one premise");
        const auto& kid = *d.kids[0];
        if (d.sigma.size() != kid.vars.entries.size())
          return fail(d, "substitution must cover the premise tuple exactly");
        std::vector<HPVPtr> defs;
        for (const auto& [y, s] : kid.vars.entries) {
          auto it = d.sigma.find(y);
          if (it == d.sigma.end()) return fail(d, cat("no replacement for ", y));
          try {
            if (type_of_term(th.sig, d.vars, it->second) != s)
              return fail(d, cat("replacement for ", y, " has the wrong situation"));
          } catch (const TypeError& ex) {
            return fail(d, ex.what());
          }
          defs.push_back(HPVFormula::def(it->second));
        }
        try {
          HPVPtr inst_hyp = substitute(th.sig, kid.vars, kid.hyp, d.sigma, d.vars);
          HPVPtr inst_concl = substitute(th.sig, kid.vars, kid.concl, d.sigma, d.vars);
          if (!hpv_ms_eq(hs, hpv_ms_concat(defs, hpv_conjuncts(inst_hyp))))
            return fail(d, "hypothesis must assert replacement definedness plus the instance");
          if (!hpv_ms_eq(cs, hpv_conjuncts(inst_concl)))
            return fail(d, "conclusion must be the substitution instance");
        } catch (const TypeError& ex) {
          return fail(d, ex.what());
        }
        break;
      }
      case PVTag::AxiomOfTheory: {
        if (!d.kids.empty()) return fail(d, "expects no premises");
        if (d.axiom_index < 0 || d.axiom_index >= static_cast<int>(th.axioms.size()))
          return fail(d, "axiom index out of range");
        const Axiom& ax = th.axioms[d.axiom_index];
        if (!(d.vars == ax.vars)) return fail(d, "tuple must match the axiom tuple");
        if (!hs.empty()) return fail(d, "hypothesis must be empty");
        if (!hpv_ms_eq(cs, hpv_conjuncts(ax.formula)))
          return fail(d, "conclusion differs from the axiom");
        break;
      }
      case PVTag::HeytingI: {
        if (d.kids.size() != 1) return fail(d, "expects one premise");
        if (!kids_match_vars()) return fail(d, "premise must share the tuple");
        if (cs.size() != 1 || cs[0]->kind != HPVFormula::Kind::Imp)
          return fail(d, "conclusion must be a single arrow");
        const auto& kid = *d.kids[0];
        if (!hpv_ms_eq(hpv_conjuncts(kid.hyp), hpv_ms_concat(hs, hpv_conjuncts(cs[0]->a))))
          return fail(d, "premise hypothesis must add the antecedent");
        if (!hpv_ms_eq(hpv_conjuncts(kid.concl), hpv_conjuncts(cs[0]->b)))
          return fail(d, "premise conclusion must be the consequent");
        break;
      }
      case PVTag::HeytingE: {
        if (d.kids.size() != 2) return fail(d, "expects two premises");
        if (!kids_match_vars()) return fail(d, "premises must share the tuple");
        if (!hpv_ms_eq(hpv_conjuncts(d.kids[0]->hyp), hs) ||
            !hpv_ms_eq(hpv_conjuncts(d.kids[1]->hyp), hs))
          return fail(d, "premises must share the hypothesis");
        auto arrow = hpv_conjuncts(d.kids[1]->concl);
        if (arrow.size() != 1 || arrow[0]->kind != HPVFormula::Kind::Imp)
          return fail(d, "second premise must conclude a single arrow");
        if (!hpv_ms_eq(hpv_conjuncts(d.kids[0]->concl), hpv_conjuncts(arrow[0]->a)))
          return fail(d, "first premise must conclude the antecedent");
        if (!hpv_ms_eq(cs, hpv_conjuncts(arrow[0]->b)))
          return fail(d, "conclusion must be the consequent");
        break;
      }
    }
  }
};

}  // namespace

CheckResult check_hpv_derivation(const Theory& th, const HPVDerivPtr& d) {
  if (!d) return {false, "empty derivation"};
  HPVChecker c{th, {}};
  c.check(d);
  return c.res;
}

HPVDerivPtr embed_pv_derivation(const PVDerivPtr& d) {
  if (!d) return nullptr;
  auto n = std::make_shared<HPVDerivation>();
  n->tag = d->tag;
  n->vars = d->vars;
  n->hyp = HPVFormula::embed(d->hyp);
  n->concl = HPVFormula::embed(d->concl);
  n->eq_x = d->eq_x;
  n->eq_y = d->eq_y;
  n->sigma = d->sigma;
  n->axiom_index = d->axiom_index;
  for (const auto& k : d->kids) n->kids.push_back(embed_pv_derivation(k));
  return n;
}

std::size_t derivation_size(const PVDerivPtr& d) {
  std::set<const PVDerivation*> seen;
  std::function<void(const PVDerivPtr&)> go = [&](const PVDerivPtr& n) {
    if (!n || !seen.insert(n.get()).second) return;
    for (const auto& k : n->kids) go(k);
  };
  go(d);
  return seen.size();
}

// ---------------------------------------------------------------------------
// Congruence closure

CongruenceState::CongruenceState(const Theory& th, VarTuple vars)
    : th_(th), vars_(std::move(vars)) {}

int CongruenceState::intern(const Term& t) {
  auto it = idx_.find(t);
  if (it != idx_.end()) return it->second;
  int id = static_cast<int>(universe_.size());
  universe_.push_back(t);
  idx_[t] = id;
  uf_.push_back(id);
  forest_parent_.push_back(-1);
  forest_reason_.push_back({});
  def_.emplace_back();
  if (!t.apps.empty()) {
    Term child{t.var, std::vector<std::string>(t.apps.begin(), t.apps.end() - 1)};
    intern(child);
  }
  return id;
}

void CongruenceState::mark_defined(int t, DefReason r) {
  if (!def_[t]) def_[t] = std::move(r);
}

int CongruenceState::find(int a) const {
  while (uf_[a] != a) {
    uf_[a] = uf_[uf_[a]];
    a = uf_[a];
  }
  return a;
}

void CongruenceState::reroot(int a) {
  int prev = -1;
  EdgeReason prev_r;
  int cur = a;
  while (cur != -1) {
    int next = forest_parent_[cur];
    EdgeReason r = forest_reason_[cur];
    forest_parent_[cur] = prev;
    if (prev != -1) {
      EdgeReason rr = prev_r;
      rr.fwd = !rr.fwd;
      forest_reason_[cur] = rr;
    }
    prev = cur;
    prev_r = r;
    cur = next;
  }
}

void CongruenceState::merge(int a, int b, EdgeReason r) {
  int ra = find(a), rb = find(b);
  if (ra == rb) return;
  reroot(a);
  forest_parent_[a] = b;
  forest_reason_[a] = std::move(r);
  uf_[ra] = rb;
}

bool CongruenceState::cc_round() {
  bool changed = false;
  const int n = static_cast<int>(universe_.size());
  for (int t = 0; t < n; ++t) {
    if (!def_[t] || universe_[t].apps.empty()) continue;
    Term child{universe_[t].var,
               std::vector<std::string>(universe_[t].apps.begin(), universe_[t].apps.end() - 1)};
    int c = idx_.at(child);
    if (!def_[c]) {
      DefReason r;
      r.kind = DefReason::Kind::Subterm;
      r.super_term = t;
      mark_defined(c, r);
      changed = true;
    }
  }
  for (int u = 0; u < n; ++u) {
    if (!def_[u] || universe_[u].apps.empty()) continue;
    Term cu{universe_[u].var,
            std::vector<std::string>(universe_[u].apps.begin(), universe_[u].apps.end() - 1)};
    int cuid = idx_.at(cu);
    for (int v = 0; v < n; ++v) {
      if (v == u || universe_[v].apps.empty()) continue;
      if (universe_[u].apps.back() != universe_[v].apps.back()) continue;
      Term cv{universe_[v].var,
              std::vector<std::string>(universe_[v].apps.begin(), universe_[v].apps.end() - 1)};
      int cvid = idx_.at(cv);
      if (!def_[cvid] || find(cuid) != find(cvid)) continue;
      EdgeReason er;
      er.kind = EdgeReason::Kind::Cong;
      er.sub_a = cuid;
      er.sub_b = cvid;
      if (!def_[v]) {
        DefReason dr;
        dr.kind = DefReason::Kind::Propagate;
        dr.from_term = u;
        dr.sub_a = cuid;
        dr.sub_b = cvid;
        mark_defined(v, dr);
        merge(u, v, er);
        changed = true;
      } else if (find(u) != find(v)) {
        merge(u, v, er);
        changed = true;
      }
    }
  }
  return changed;
}

void CongruenceState::close() {
  while (cc_round()) {
  }
}

void CongruenceState::saturate(const PVFormula& hypothesis, const std::set<Term>& extra_universe,
                               int depth) {
  hyp_ = hypothesis;
  def_memo_.clear();
  for (const auto& [v, s] : vars_.entries) {
    int id = intern(Term{v, {}});
    DefReason r;
    r.kind = DefReason::Kind::Var;
    mark_defined(id, r);
  }
  for (const auto& t : extra_universe) intern(t);
  for (std::size_t k = 0; k < hyp_.eqs.size(); ++k) {
    int l = intern(hyp_.eqs[k].lhs);
    int r = intern(hyp_.eqs[k].rhs);
    DefReason dr;
    dr.kind = DefReason::Kind::SideOfHyp;
    dr.hyp_eq = static_cast<int>(k);
    mark_defined(l, dr);
    mark_defined(r, dr);
    EdgeReason er;
    er.kind = EdgeReason::Kind::Hyp;
    er.hyp_eq = static_cast<int>(k);
    merge(l, r, er);
  }
  close();

  std::set<std::string> applied;
  for (int round = 0; round < depth; ++round) {
    bool any = false;
    for (std::size_t ai = 0; ai < th_.axioms.size(); ++ai) {
      const Axiom& ax = th_.axioms[ai];
      auto pv = hpv_to_pv(ax.formula);
      if (!pv) continue;  // arrow axioms are outside the conjunctive closure
      std::vector<std::vector<int>> choices;
      bool possible = true;
      for (const auto& [y, s] : ax.vars.entries) {
        std::vector<int> c;
        for (int t = 0; t < static_cast<int>(universe_.size()); ++t) {
          if (!def_[t]) continue;
          try {
            if (type_of_term(th_.sig, vars_, universe_[t]) == s) c.push_back(t);
          } catch (const TypeError&) {
          }
        }
        if (c.empty()) possible = false;
        choices.push_back(std::move(c));
      }
      if (!possible) continue;
      std::vector<std::size_t> ix(choices.size(), 0);
      while (true) {
        std::map<std::string, Term> sigma;
        std::string key = std::to_string(ai);
        for (std::size_t i = 0; i < choices.size(); ++i) {
          const Term& t = universe_[choices[i][ix[i]]];
          sigma[ax.vars.entries[i].first] = t;
          key += "|" + print_term(t);
        }
        if (!applied.count(key) && universe_.size() < 4000) {
          applied.insert(key);
          PVFormula inst = substitute(th_.sig, ax.vars, *pv, sigma, vars_);
          for (std::size_t j = 0; j < inst.eqs.size(); ++j) {
            int l = intern(inst.eqs[j].lhs);
            int r = intern(inst.eqs[j].rhs);
            DefReason dr;
            dr.kind = DefReason::Kind::SideOfAx;
            dr.ax = static_cast<int>(ai);
            dr.ax_eq = static_cast<int>(j);
            dr.sigma = sigma;
            mark_defined(l, dr);
            mark_defined(r, dr);
            EdgeReason er;
            er.kind = EdgeReason::Kind::AxInst;
            er.ax = static_cast<int>(ai);
            er.ax_eq = static_cast<int>(j);
            er.sigma = sigma;
            merge(l, r, er);
          }
          any = true;
        }
        std::size_t k = 0;
        while (k < ix.size() && ++ix[k] == choices[k].size()) ix[k++] = 0;
        if (k == ix.size() || ix.empty()) break;
      }
    }
    close();
    if (!any) break;
  }
}

bool CongruenceState::is_defined(const Term& t) const {
  auto it = idx_.find(t);
  return it != idx_.end() && def_[it->second].has_value();
}

bool CongruenceState::same_class(const Term& a, const Term& b) const {
  auto ia = idx_.find(a), ib = idx_.find(b);
  if (ia == idx_.end() || ib == idx_.end()) return false;
  return find(ia->second) == find(ib->second);
}

Term CongruenceState::canon(const Term& t) const {
  auto it = idx_.find(t);
  if (it == idx_.end() || !def_[it->second]) return t;
  int root = find(it->second);
  const Term* best = &t;
  for (int i = 0; i < static_cast<int>(universe_.size()); ++i) {
    if (find(i) != root) continue;
    const Term& cand = universe_[i];
    if (cand.depth() < best->depth() ||
        (cand.depth() == best->depth() && print_term(cand) < print_term(*best)))
      best = &cand;
  }
  return *best;
}

bool CongruenceState::holds(const PVFormula& goal) const {
  for (const auto& e : goal.eqs) {
    if (!is_defined(e.lhs) || !is_defined(e.rhs)) return false;
    if (!same_class(e.lhs, e.rhs)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Derivation reconstruction

PVDerivPtr CongruenceState::d_proj(const PVFormula& big, const PVFormula& small) const {
  auto n = std::make_shared<PVDerivation>();
  n->tag = PVTag::Proj1;
  n->vars = vars_;
  n->hyp = big;
  n->concl = small;
  return n;
}

PVDerivPtr CongruenceState::d_cut(const PVDerivPtr& a, const PVDerivPtr& b) const {
  auto n = std::make_shared<PVDerivation>();
  n->tag = PVTag::Cut;
  n->vars = vars_;
  n->hyp = a->hyp;
  n->concl = b->concl;
  n->kids = {a, b};
  return n;
}

PVDerivPtr CongruenceState::d_and(const PVDerivPtr& a, const PVDerivPtr& b) const {
  auto n = std::make_shared<PVDerivation>();
  n->tag = PVTag::AndIntro;
  n->vars = vars_;
  n->hyp = a->hyp;
  n->concl = a->concl.conj(b->concl);
  n->kids = {a, b};
  return n;
}

PVDerivPtr CongruenceState::d_hyp() const {
  auto n = std::make_shared<PVDerivation>();
  n->tag = PVTag::Ax;
  n->vars = vars_;
  n->hyp = hyp_;
  n->concl = hyp_;
  return n;
}

namespace {
// assembles hyp_ |- [each premise conclusion joined]; empty list gives hyp_ |- top
PVDerivPtr fold_and(const std::function<PVDerivPtr(const PVDerivPtr&, const PVDerivPtr&)>& join,
                    const PVDerivPtr& top_node, const std::vector<PVDerivPtr>& parts) {
  if (parts.empty()) return top_node;
  PVDerivPtr acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = join(acc, parts[i]);
  return acc;
}
}  // namespace

PVDerivPtr CongruenceState::d_axinst(int ax, const std::map<std::string, Term>& sigma) const {
  const Axiom& a = th_.axioms[ax];
  PVFormula axpv = *hpv_to_pv(a.formula);

  auto leaf = std::make_shared<PVDerivation>();
  leaf->tag = PVTag::AxiomOfTheory;
  leaf->vars = a.vars;
  leaf->hyp = PVFormula::top();
  leaf->concl = axpv;
  leaf->axiom_index = ax;

  auto sub = std::make_shared<PVDerivation>();
  sub->tag = PVTag::Substitution;
  sub->vars = vars_;
  sub->sigma = sigma;
  sub->kids = {leaf};
  PVFormula defs;
  std::vector<PVDerivPtr> parts;
  for (const auto& [y, s] : a.vars.entries) {
    const Term& t = sigma.at(y);
    defs.add(t, t);
    parts.push_back(d_def(idx_.at(t)));
  }
  sub->hyp = defs;
  sub->concl = substitute(th_.sig, a.vars, axpv, sigma, vars_);

  auto top = std::make_shared<PVDerivation>();
  top->tag = PVTag::Top;
  top->vars = vars_;
  top->hyp = hyp_;
  top->concl = PVFormula::top();

  auto join = [this](const PVDerivPtr& x, const PVDerivPtr& y) { return d_and(x, y); };
  return d_cut(fold_and(join, top, parts), sub);
}

// the one-step congruence lemma: from a child equation to the equation of the
// parent applications, via Equality at a two-variable tuple plus Substitution
PVDerivPtr CongruenceState::d_edge(int x, int y, const EdgeReason& r) const {
  const Term& tx = universe_[x];
  const Term& ty = universe_[y];
  std::string act = tx.apps.back();
  const Term& ta = universe_[r.sub_a];
  const Term& tb = universe_[r.sub_b];
  std::string s = type_of_term(th_.sig, vars_, ta);

  VarTuple wt;
  wt.entries = {{"w1", s}, {"w2", s}};
  Term w1{"w1", {}}, w2{"w2", {}};
  Term cw1{"w1", {act}}, cw2{"w2", {act}};

  auto eqn = std::make_shared<PVDerivation>();
  eqn->tag = PVTag::Equality;
  eqn->vars = wt;
  eqn->hyp = PVFormula::eq(w1, w2).conj(PVFormula::eq(cw1, cw1));
  eqn->concl = PVFormula::eq(cw1, cw2);
  eqn->eq_x = "w1";
  eqn->eq_y = "w2";

  auto sub = std::make_shared<PVDerivation>();
  sub->tag = PVTag::Substitution;
  sub->vars = vars_;
  sub->sigma = {{"w1", ta}, {"w2", tb}};
  sub->kids = {eqn};
  sub->hyp = PVFormula::def(ta).conj(PVFormula::def(tb)).conj(PVFormula::eq(ta, tb)).conj(
      PVFormula::eq(tx, tx));
  sub->concl = PVFormula::eq(tx, ty);

  std::vector<PVDerivPtr> parts = {d_def(r.sub_a), d_def(r.sub_b), d_eq(r.sub_a, r.sub_b),
                                   d_def(x)};
  auto join = [this](const PVDerivPtr& a, const PVDerivPtr& b) { return d_and(a, b); };
  return d_cut(fold_and(join, nullptr, parts), sub);
}

PVDerivPtr CongruenceState::d_sym(const PVDerivPtr& ab) const {
  const Term a = ab->concl.eqs[0].lhs;
  const Term b = ab->concl.eqs[0].rhs;
  std::string s = type_of_term(th_.sig, vars_, a);

  VarTuple wt;
  wt.entries = {{"w1", s}, {"w2", s}};
  Term w1{"w1", {}}, w2{"w2", {}};

  auto eqn = std::make_shared<PVDerivation>();
  eqn->tag = PVTag::Equality;
  eqn->vars = wt;
  eqn->hyp = PVFormula::eq(w1, w2).conj(PVFormula::eq(w1, w1));
  eqn->concl = PVFormula::eq(w2, w1);
  eqn->eq_x = "w1";
  eqn->eq_y = "w2";

  auto sub = std::make_shared<PVDerivation>();
  sub->tag = PVTag::Substitution;
  sub->vars = vars_;
  sub->sigma = {{"w1", a}, {"w2", b}};
  sub->kids = {eqn};
  sub->hyp = PVFormula::def(a).conj(PVFormula::def(b)).conj(PVFormula::eq(a, b)).conj(
      PVFormula::def(a));
  sub->concl = PVFormula::eq(b, a);

  std::vector<PVDerivPtr> parts = {d_def(idx_.at(a)), d_def(idx_.at(b)), ab, d_def(idx_.at(a))};
  auto join = [this](const PVDerivPtr& x, const PVDerivPtr& y) { return d_and(x, y); };
  return d_cut(fold_and(join, nullptr, parts), sub);
}

namespace {
// transitivity lemma at the term level, again Equality plus Substitution
PVDerivPtr trans_step(const CongruenceState&, const Theory&, const VarTuple&, const PVFormula&,
                      const PVDerivPtr&, const PVDerivPtr&);
}  // namespace

PVDerivPtr CongruenceState::d_def(int t) const {
  auto memo = def_memo_.find(t);
  if (memo != def_memo_.end()) return memo->second;
  const DefReason& r = *def_[t];
  const Term& tm = universe_[t];
  PVDerivPtr out;
  switch (r.kind) {
    case DefReason::Kind::Var: {
      auto refl = std::make_shared<PVDerivation>();
      refl->tag = PVTag::Reflexivity;
      refl->vars = vars_;
      refl->hyp = PVFormula::top();
      for (const auto& [v, s] : vars_.entries) refl->concl.add(Term{v, {}}, Term{v, {}});
      auto top = std::make_shared<PVDerivation>();
      top->tag = PVTag::Top;
      top->vars = vars_;
      top->hyp = hyp_;
      top->concl = PVFormula::top();
      auto all = d_cut(top, refl);
      out = d_cut(all, d_proj(all->concl, PVFormula::def(tm)));
      break;
    }
    case DefReason::Kind::Subterm: {
      auto sup = d_def(r.super_term);
      auto str2 = std::make_shared<PVDerivation>();
      str2->tag = PVTag::Strictness2;
      str2->vars = vars_;
      str2->hyp = PVFormula::def(universe_[r.super_term]);
      str2->concl = PVFormula::def(tm);
      out = d_cut(sup, str2);
      break;
    }
    case DefReason::Kind::SideOfHyp: {
      const PVEquation& e = hyp_.eqs[r.hyp_eq];
      auto pick = d_proj(hyp_, PVFormula::eq(e.lhs, e.rhs));
      auto str1 = std::make_shared<PVDerivation>();
      str1->tag = PVTag::Strictness1;
      str1->vars = vars_;
      str1->hyp = PVFormula::eq(e.lhs, e.rhs);
      str1->concl = PVFormula::def(e.lhs).conj(PVFormula::def(e.rhs));
      auto both = d_cut(pick, str1);
      out = d_cut(both, d_proj(both->concl, PVFormula::def(tm)));
      break;
    }
    case DefReason::Kind::SideOfAx: {
      const Axiom& ax = th_.axioms[r.ax];
      PVFormula inst = substitute(th_.sig, ax.vars, *hpv_to_pv(ax.formula), r.sigma, vars_);
      const PVEquation& e = inst.eqs[r.ax_eq];
      auto whole = d_axinst(r.ax, r.sigma);
      auto pick = d_cut(whole, d_proj(inst, PVFormula::eq(e.lhs, e.rhs)));
      auto str1 = std::make_shared<PVDerivation>();
      str1->tag = PVTag::Strictness1;
      str1->vars = vars_;
      str1->hyp = PVFormula::eq(e.lhs, e.rhs);
      str1->concl = PVFormula::def(e.lhs).conj(PVFormula::def(e.rhs));
      auto both = d_cut(pick, str1);
      out = d_cut(both, d_proj(both->concl, PVFormula::def(tm)));
      break;
    }
    case DefReason::Kind::Propagate: {
      EdgeReason er;
      er.kind = EdgeReason::Kind::Cong;
      er.sub_a = r.sub_a;
      er.sub_b = r.sub_b;
      auto uv = d_edge(r.from_term, t, er);
      const Term& u = universe_[r.from_term];
      auto str1 = std::make_shared<PVDerivation>();
      str1->tag = PVTag::Strictness1;
      str1->vars = vars_;
      str1->hyp = PVFormula::eq(u, tm);
      str1->concl = PVFormula::def(u).conj(PVFormula::def(tm));
      auto both = d_cut(uv, str1);
      out = d_cut(both, d_proj(both->concl, PVFormula::def(tm)));
      break;
    }
  }
  def_memo_[t] = out;
  return out;
}

PVDerivPtr CongruenceState::d_eq(int a, int b) const {
  if (a == b) return d_def(a);

  // unique forest path between a and b
  std::vector<int> up_a;
  std::map<int, int> pos;
  for (int cur = a; cur != -1; cur = forest_parent_[cur]) {
    pos[cur] = static_cast<int>(up_a.size());
    up_a.push_back(cur);
  }
  std::vector<int> up_b;
  int lca = -1;
  for (int cur = b; cur != -1; cur = forest_parent_[cur]) {
    if (pos.count(cur)) {
      lca = cur;
      break;
    }
    up_b.push_back(cur);
  }
  assert(lca != -1 && "terms are not in the same class");

  // derivation of one traversal step (from -> to) where the stored edge sits
  // at `node` pointing to its parent
  auto step = [&](int node, bool along_parent) -> PVDerivPtr {
    int par = forest_parent_[node];
    const EdgeReason& er = forest_reason_[node];
    auto raw = [&](int x, int y) -> PVDerivPtr {
      switch (er.kind) {
        case EdgeReason::Kind::Hyp: {
          const PVEquation& e = hyp_.eqs[er.hyp_eq];
          return d_proj(hyp_, PVFormula::eq(e.lhs, e.rhs));
        }
        case EdgeReason::Kind::AxInst: {
          const Axiom& ax = th_.axioms[er.ax];
          PVFormula inst = substitute(th_.sig, ax.vars, *hpv_to_pv(ax.formula), er.sigma, vars_);
          const PVEquation& e = inst.eqs[er.ax_eq];
          return d_cut(d_axinst(er.ax, er.sigma), d_proj(inst, PVFormula::eq(e.lhs, e.rhs)));
        }
        case EdgeReason::Kind::Cong:
          return d_edge(x, y, er);
      }
      return nullptr;
    };
    // er.fwd: the reason proves term(node) ≐ term(parent)
    if (along_parent) {
      return er.fwd ? raw(node, par) : d_sym(raw(par, node));
    }
    return er.fwd ? d_sym(raw(node, par)) : raw(par, node);
  };

  std::vector<PVDerivPtr> chain;
  for (int i = 0; up_a[i] != lca; ++i) chain.push_back(step(up_a[i], true));
  for (int i = static_cast<int>(up_b.size()) - 1; i >= 0; --i)
    chain.push_back(step(up_b[i], false));

  PVDerivPtr acc = chain[0];
  for (std::size_t i = 1; i < chain.size(); ++i)
    acc = trans_step(*this, th_, vars_, hyp_, acc, chain[i]);
  return acc;
}

namespace {

PVDerivPtr trans_step(const CongruenceState& cc, const Theory& th, const VarTuple& vars,
                      const PVFormula& hyp, const PVDerivPtr& ab, const PVDerivPtr& bc) {
  (void)hyp;
  const Term a = ab->concl.eqs[0].lhs;
  const Term b = ab->concl.eqs[0].rhs;
  const Term c = bc->concl.eqs[0].rhs;
  std::string s = type_of_term(th.sig, vars, a);

  VarTuple wt;
  wt.entries = {{"w1", s}, {"w2", s}, {"w3", s}};
  Term w1{"w1", {}}, w2{"w2", {}}, w3{"w3", {}};

  auto eqn = std::make_shared<PVDerivation>();
  eqn->tag = PVTag::Equality;
  eqn->vars = wt;
  eqn->hyp = PVFormula::eq(w2, w3).conj(PVFormula::eq(w1, w2));
  eqn->concl = PVFormula::eq(w1, w3);
  eqn->eq_x = "w2";
  eqn->eq_y = "w3";

  auto sub = std::make_shared<PVDerivation>();
  sub->tag = PVTag::Substitution;
  sub->vars = vars;
  sub->sigma = {{"w1", a}, {"w2", b}, {"w3", c}};
  sub->kids = {eqn};
  sub->hyp = PVFormula::def(a)
                 .conj(PVFormula::def(b))
                 .conj(PVFormula::def(c))
                 .conj(PVFormula::eq(b, c))
                 .conj(PVFormula::eq(a, b));
  sub->concl = PVFormula::eq(a, c);

  // definedness of the three endpoints comes from the closure state
  auto defs_a = cc.reconstruct(PVFormula::def(a));
  auto defs_b = cc.reconstruct(PVFormula::def(b));
  auto defs_c = cc.reconstruct(PVFormula::def(c));

  auto mk_and = [&](const PVDerivPtr& x, const PVDerivPtr& y) {
    auto n = std::make_shared<PVDerivation>();
    n->tag = PVTag::AndIntro;
    n->vars = vars;
    n->hyp = x->hyp;
    n->concl = x->concl.conj(y->concl);
    n->kids = {x, y};
    return PVDerivPtr(n);
  };
  auto mk_cut = [&](const PVDerivPtr& x, const PVDerivPtr& y) {
    auto n = std::make_shared<PVDerivation>();
    n->tag = PVTag::Cut;
    n->vars = vars;
    n->hyp = x->hyp;
    n->concl = y->concl;
    n->kids = {x, y};
    return PVDerivPtr(n);
  };
  PVDerivPtr premise = mk_and(mk_and(mk_and(mk_and(defs_a, defs_b), defs_c), bc), ab);
  return mk_cut(premise, sub);
}

}  // namespace

PVDerivPtr CongruenceState::reconstruct(const PVFormula& goal) const {
  if (goal.is_top()) {
    auto top = std::make_shared<PVDerivation>();
    top->tag = PVTag::Top;
    top->vars = vars_;
    top->hyp = hyp_;
    top->concl = goal;
    return top;
  }
  std::vector<PVDerivPtr> parts;
  for (const auto& e : goal.eqs) {
    int l = idx_.at(e.lhs), r = idx_.at(e.rhs);
    parts.push_back(l == r ? d_def(l) : d_eq(l, r));
  }
  PVDerivPtr acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = d_and(acc, parts[i]);
  return acc;
}

CongruenceState cc_saturate(const Theory& th, const VarTuple& vars, const PVFormula& hypothesis,
                            const std::set<Term>& universe, int depth) {
  CongruenceState cc(th, vars);
  cc.saturate(hypothesis, universe, depth);
  return cc;
}

// ---------------------------------------------------------------------------
// Entailment judgements

namespace {

void validate_pv_inputs(const Theory& th, const VarTuple& vars, const PVFormula& f) {
  std::string err;
  if (!type_check_pv(th.sig, vars, f, &err)) throw TypeError(err);
}

void validate_hpv_inputs(const Theory& th, const VarTuple& vars, const HPVPtr& f) {
  std::string err;
  if (!type_check_hpv(th.sig, vars, f, &err)) throw TypeError(err);
}

std::optional<Countermodel> find_countermodel(const Theory& th, const VarTuple& vars,
                                              const std::function<bool(const Interp&,
                                                                       const std::map<std::string, std::string>&)>& bad,
                                              const Budget& budget, bool* exhausted) {
  std::optional<Countermodel> cm;
  auto res = enumerate_interps(th.sig, budget.carrier, budget.steps, [&](const Interp& in) {
    if (!in.satisfies_axioms(th)) return false;
    for (const auto& asg : enumerate_assignments(in, vars)) {
      if (bad(in, asg)) {
        cm = Countermodel{in, asg};
        return true;
      }
    }
    return false;
  });
  if (exhausted) *exhausted = res.exhausted;
  return cm;
}

}  // namespace

PVJudgement pv_entails(const Theory& th, const VarTuple& vars, const PVFormula& hyp,
                       const PVFormula& goal, const Budget& budget) {
  th.sig.validate();
  validate_pv_inputs(th, vars, hyp);
  validate_pv_inputs(th, vars, goal);

  CongruenceState cc(th, vars);
  cc.saturate(hyp, subterms(goal), budget.depth);
  if (cc.holds(goal)) {
    PVJudgement j;
    j.verdict = Verdict::Proved;
    j.derivation = cc.reconstruct(goal);
    return j;
  }

  auto cm = find_countermodel(
      th, vars,
      [&](const Interp& in, const std::map<std::string, std::string>& asg) {
        return in.satisfies(hyp, asg) && !in.satisfies(goal, asg);
      },
      budget, nullptr);
  if (cm) {
    PVJudgement j;
    j.verdict = Verdict::Refuted;
    j.cm = std::move(cm);
    return j;
  }
  return {};
}

// ---------------------------------------------------------------------------
// Arrow-closed entailment: goal-directed search over the extended rules

namespace {

struct HpvProver {
  const Theory& th;
  const VarTuple& vars;
  Budget budget;
  long steps = 0;
  std::map<std::string, HPVDerivPtr> done{};
  std::set<std::string> inprog{};

  std::string key(const HPVPtr& h, const HPVPtr& g) {
    return print_hpv(h) + " |- " + print_hpv(g);
  }

  HPVDerivPtr leaf(PVTag tag, const HPVPtr& h, const HPVPtr& c) {
    auto n = std::make_shared<HPVDerivation>();
    n->tag = tag;
    n->vars = vars;
    n->hyp = h;
    n->concl = c;
    return n;
  }

  HPVDerivPtr prove_goal(const HPVPtr& H, const HPVPtr& G, int depth) {
    auto cs = hpv_conjuncts(G);
    if (cs.empty()) return leaf(PVTag::Top, H, G);
    if (cs.size() == 1) {
      auto d = prove_one(H, cs[0], depth);
      if (!d) return nullptr;
      if (hpv_equal(cs[0], G)) return d;
      // conclusion shape differs from G only by dropped units; restate it
      auto n = std::make_shared<HPVDerivation>();
      *n = *d;
      n->concl = G;
      return n;
    }
    std::vector<HPVDerivPtr> parts;
    for (const auto& c : cs) {
      auto d = prove_one(H, c, depth);
      if (!d) return nullptr;
      parts.push_back(d);
    }
    HPVDerivPtr acc = parts[0];
    HPVPtr acc_f = cs[0];
    for (std::size_t i = 1; i < parts.size(); ++i) {
      acc_f = i + 1 == parts.size() ? G : HPVFormula::conj(acc_f, cs[i]);
      auto n = std::make_shared<HPVDerivation>();
      n->tag = PVTag::AndIntro;
      n->vars = vars;
      n->hyp = H;
      n->concl = acc_f;
      n->kids = {acc, parts[i]};
      acc = n;
    }
    return acc;
  }

  HPVDerivPtr prove_one(const HPVPtr& H, const HPVPtr& g, int depth) {
    if (++steps > budget.steps) return nullptr;
    std::string k = key(H, g);
    if (auto it = done.find(k); it != done.end()) return it->second;
    if (inprog.count(k)) return nullptr;
    inprog.insert(k);
    auto d = attempt(H, g, depth);
    inprog.erase(k);
    if (d) done[k] = d;
    return d;
  }

  HPVDerivPtr attempt(const HPVPtr& H, const HPVPtr& g, int depth) {
    auto hs = hpv_conjuncts(H);
    // direct projection
    for (const auto& h : hs)
      if (hpv_equal(h, g)) return leaf(PVTag::Proj1, H, g);
    if (g->kind == HPVFormula::Kind::Top) return leaf(PVTag::Top, H, g);

    if (g->kind == HPVFormula::Kind::Imp) {
      auto kid = prove_goal(HPVFormula::conj(H, g->a), g->b, depth);
      if (kid) {
        auto n = std::make_shared<HPVDerivation>();
        n->tag = PVTag::HeytingI;
        n->vars = vars;
        n->hyp = H;
        n->concl = g;
        n->kids = {kid};
        return n;
      }
      return nullptr;
    }

    if (g->kind == HPVFormula::Kind::Eq) {
      // equational goals go through the conjunctive fragment of the hypothesis
      PVFormula base;
      std::vector<HPVPtr> base_cs;
      for (const auto& h : hs) {
        if (auto pv = hpv_to_pv(h)) {
          for (const auto& e : pv->eqs) base.add(e.lhs, e.rhs);
          base_cs.push_back(h);
        }
      }
      PVFormula want = PVFormula::eq(g->lhs, g->rhs);
      CongruenceState cc(th, vars);
      cc.saturate(base, subterms(want), budget.depth);
      if (cc.holds(want)) {
        auto pvd = cc.reconstruct(want);
        auto hd = embed_pv_derivation(pvd);
        HPVPtr base_h = HPVFormula::embed(base);
        // reshape the embedded root so its hypothesis is the exact formula object
        auto hd2 = std::make_shared<HPVDerivation>();
        *hd2 = *hd;
        hd2->hyp = base_h;
        hd2->concl = g;
        auto proj = leaf(PVTag::Proj1, H, base_h);
        auto n = std::make_shared<HPVDerivation>();
        n->tag = PVTag::Cut;
        n->vars = vars;
        n->hyp = H;
        n->concl = g;
        n->kids = {proj, hd2};
        return n;
      }
    }

    if (depth <= 0) return nullptr;

    // use an arrow from the hypothesis
    for (const auto& h : hs) {
      if (h->kind != HPVFormula::Kind::Imp) continue;
      auto da = prove_goal(H, h->a, depth - 1);
      if (!da) continue;
      auto dimp = leaf(PVTag::Proj1, H, h);
      auto de = std::make_shared<HPVDerivation>();
      de->tag = PVTag::HeytingE;
      de->vars = vars;
      de->hyp = H;
      de->concl = h->b;
      de->kids = {da, dimp};

      HPVPtr H2 = HPVFormula::conj(H, h->b);
      auto dg = prove_one(H2, g, depth - 1);
      if (!dg) continue;

      auto dH = leaf(PVTag::Ax, H, H);
      auto pair = std::make_shared<HPVDerivation>();
      pair->tag = PVTag::AndIntro;
      pair->vars = vars;
      pair->hyp = H;
      pair->concl = H2;
      pair->kids = {dH, de};
      auto n = std::make_shared<HPVDerivation>();
      n->tag = PVTag::Cut;
      n->vars = vars;
      n->hyp = H;
      n->concl = g;
      n->kids = {pair, dg};
      return n;
    }
    return nullptr;
  }
};

}  // namespace

HPVJudgement hpv_entails(const Theory& th, const VarTuple& vars, const HPVPtr& hyp,
                         const HPVPtr& goal, const Budget& budget) {
  th.sig.validate();
  validate_hpv_inputs(th, vars, hyp);
  validate_hpv_inputs(th, vars, goal);

  HpvProver p{.th = th, .vars = vars, .budget = budget};
  if (auto d = p.prove_goal(hyp, goal, budget.depth)) {
    HPVJudgement j;
    j.verdict = Verdict::Proved;
    j.derivation = d;
    return j;
  }

  auto cm = find_countermodel(
      th, vars,
      [&](const Interp& in, const std::map<std::string, std::string>& asg) {
        return in.satisfies(hyp, asg) && !in.satisfies(goal, asg);
      },
      budget, nullptr);
  if (cm) {
    HPVJudgement j;
    j.verdict = Verdict::Refuted;
    j.cm = std::move(cm);
    return j;
  }
  return {};
}

// ---------------------------------------------------------------------------
// Independent bounded search (test oracle)

namespace {

struct OracleCtx {
  const Theory& th;
  const VarTuple& vars;
  std::vector<PVEquation> hyp{};
  std::vector<Term> terms{};
  // instantiated axioms: conclusion equations plus the replacement terms whose
  // definedness the instantiation requires
  std::vector<std::pair<std::vector<PVEquation>, std::vector<Term>>> insts{};
  std::map<std::string, int> failed_at{};
  std::set<std::string> proved{};
  std::set<std::string> inprog{};
  long steps = 0;
  long max_steps = 500000;

  static std::string key(const PVEquation& e) {
    return print_term(e.lhs) + " == " + print_term(e.rhs);
  }

  bool in_hyp(const PVEquation& e) const {
    return std::find(hyp.begin(), hyp.end(), e) != hyp.end();
  }

  bool prove(const PVEquation& e, int gas) {
    if (in_hyp(e)) return true;
    std::string k = key(e);
    if (proved.count(k)) return true;
    if (gas <= 0) return false;
    if (auto it = failed_at.find(k); it != failed_at.end() && gas <= it->second) return false;
    if (++steps > max_steps) return false;
    if (inprog.count(k)) return false;
    inprog.insert(k);
    bool ok = moves(e, gas);
    inprog.erase(k);
    if (ok)
      proved.insert(k);
    else if (int& f = failed_at[k]; f < gas)
      f = gas;
    return ok;
  }

  bool moves(const PVEquation& e, int gas) {
    const bool is_def = e.lhs == e.rhs;

    // reflexivity at a tuple variable
    if (is_def && e.lhs.apps.empty() && vars.type_of(e.lhs.var)) return true;

    // symmetry
    if (!is_def && prove(PVEquation{e.rhs, e.lhs}, gas - 1)) return true;

    // definedness of a side of a provable equation
    if (is_def) {
      for (const auto& u : terms) {
        if (u == e.lhs) continue;
        if (prove(PVEquation{e.lhs, u}, gas - 1)) return true;
        if (prove(PVEquation{u, e.lhs}, gas - 1)) return true;
      }
      // definedness of a superterm
      for (const auto& t : terms) {
        if (t == e.lhs) continue;
        if (subterms(t).count(e.lhs) && prove(PVEquation{t, t}, gas - 1)) return true;
      }
    }

    // transitivity through a known term
    if (!is_def) {
      for (const auto& m : terms) {
        if (m == e.lhs || m == e.rhs) continue;
        if (prove(PVEquation{e.lhs, m}, gas - 1) && prove(PVEquation{m, e.rhs}, gas - 1))
          return true;
      }
    }

    // congruence one application down
    if (!e.lhs.apps.empty() && !e.rhs.apps.empty() && e.lhs.apps.back() == e.rhs.apps.back()) {
      Term cl{e.lhs.var, std::vector<std::string>(e.lhs.apps.begin(), e.lhs.apps.end() - 1)};
      Term cr{e.rhs.var, std::vector<std::string>(e.rhs.apps.begin(), e.rhs.apps.end() - 1)};
      if (prove(PVEquation{cl, cr}, gas - 1) && prove(PVEquation{e.lhs, e.lhs}, gas - 1))
        return true;
    }

    // variable-for-variable replacement backwards
    for (const auto& [x, sx] : vars.entries) {
      for (const auto& [y, sy] : vars.entries) {
        if (x == y || sx != sy) continue;
        for (int mask = 1; mask < 4; ++mask) {
          Term l = e.lhs, r = e.rhs;
          bool applicable = true;
          if (mask & 1) {
            if (l.var == y)
              l.var = x;
            else
              applicable = false;
          }
          if (mask & 2) {
            if (r.var == y)
              r.var = x;
            else
              applicable = false;
          }
          if (!applicable) continue;
          if (prove(PVEquation{Term{x, {}}, Term{y, {}}}, gas - 1) &&
              prove(PVEquation{l, r}, gas - 1))
            return true;
        }
      }
    }

    // instantiated axiom
    for (const auto& [eqs, doms] : insts) {
      if (std::find(eqs.begin(), eqs.end(), e) == eqs.end()) continue;
      bool all = true;
      for (const auto& t : doms) {
        if (!prove(PVEquation{t, t}, gas - 1)) {
          all = false;
          break;
        }
      }
      if (all) return true;
    }
    return false;
  }
};

}  // namespace

bool pv_oracle_search(const Theory& th, const VarTuple& vars, const PVFormula& hyp,
                      const PVFormula& goal, int size_bound) {
  OracleCtx ctx{.th = th, .vars = vars};
  ctx.hyp = hyp.eqs;

  std::set<Term> pool = subterms(hyp);
  for (const auto& t : subterms(goal)) pool.insert(t);
  for (const auto& [v, s] : vars.entries) pool.insert(Term{v, {}});

  std::set<std::string> seen_inst;
  for (int round = 0; round < 2; ++round) {
    std::vector<Term> current(pool.begin(), pool.end());
    for (std::size_t ai = 0; ai < th.axioms.size(); ++ai) {
      const Axiom& ax = th.axioms[ai];
      auto pv = hpv_to_pv(ax.formula);
      if (!pv) continue;
      std::vector<std::vector<Term>> choices;
      bool possible = true;
      for (const auto& [y, s] : ax.vars.entries) {
        std::vector<Term> c;
        for (const auto& t : current) {
          try {
            if (type_of_term(th.sig, vars, t) == s) c.push_back(t);
          } catch (const TypeError&) {
          }
        }
        if (c.empty()) possible = false;
        choices.push_back(std::move(c));
      }
      if (!possible || choices.empty()) {
        if (possible && choices.empty()) {
          // closed axiom: a single instance with no replacements
          std::string ik = std::to_string(ai);
          if (!seen_inst.count(ik)) {
            seen_inst.insert(ik);
            ctx.insts.push_back({pv->eqs, {}});
            for (const auto& e : pv->eqs) {
              for (const auto& t : subterms(Term{e.lhs.var, e.lhs.apps})) pool.insert(t);
              for (const auto& t : subterms(Term{e.rhs.var, e.rhs.apps})) pool.insert(t);
            }
          }
        }
        continue;
      }
      std::vector<std::size_t> ix(choices.size(), 0);
      while (true) {
        std::map<std::string, Term> sigma;
        std::vector<Term> doms;
        std::string ik = std::to_string(ai);
        for (std::size_t i = 0; i < choices.size(); ++i) {
          sigma[ax.vars.entries[i].first] = choices[i][ix[i]];
          doms.push_back(choices[i][ix[i]]);
          ik += "|" + print_term(choices[i][ix[i]]);
        }
        if (!seen_inst.count(ik) && ctx.insts.size() < 256) {
          seen_inst.insert(ik);
          PVFormula inst = substitute(th.sig, ax.vars, *pv, sigma, vars);
          ctx.insts.push_back({inst.eqs, doms});
          for (const auto& t : subterms(inst)) pool.insert(t);
        }
        std::size_t k = 0;
        while (k < ix.size() && ++ix[k] == choices[k].size()) ix[k++] = 0;
        if (k == ix.size()) break;
      }
    }
    if (pool.size() > 64) break;
  }
  ctx.terms.assign(pool.begin(), pool.end());

  for (const auto& e : goal.eqs) {
    if (!ctx.prove(e, size_bound)) return false;
  }
  return true;
}

}  // namespace alk
