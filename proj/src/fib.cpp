#include "alk/fib.hpp"

#include <algorithm>
#include <sstream>

namespace alk {

Verdict BaseOracle::eq_cells(MorId f, MorId g) {
  Verdict a = leq(f, g);
  if (a == Verdict::Refuted) return Verdict::Refuted;
  Verdict b = leq(g, f);
  if (b == Verdict::Refuted) return Verdict::Refuted;
  if (a == Verdict::Proved && b == Verdict::Proved) return Verdict::Proved;
  return Verdict::Unknown;
}

// ---------------------------------------------------------------- FinBase

ObjId FinBase::add_object(const std::string& name, FinSet carrier) {
  if (obj_names_.count(name)) throw TypeError(cat("duplicate object name: ", name));
  ObjId a = intern_obj(name, std::move(carrier));
  objs_[a].declared = true;
  return a;
}

MorId FinBase::add_map(const std::string& name, ObjId src, ObjId dst, FinPMap pm) {
  if (mor_names_.count(name)) throw TypeError(cat("duplicate map name: ", name));
  pm.validate();
  if (!(pm.src == carrier(src)) || !(pm.dst == carrier(dst)))
    throw TypeError(cat("map ", name, " does not match its declared boundary"));
  MorId f = intern_mor(name, src, dst, std::move(pm));
  mors_[f].declared = true;
  mor_names_[name] = f;  // alias if the value was already interned under another name
  return f;
}

const FinSet& FinBase::carrier(ObjId a) const { return objs_.at(a).carrier; }
const FinPMap& FinBase::pmap(MorId f) const { return mors_.at(f).pm; }

std::vector<ObjId> FinBase::objects() const {
  std::vector<ObjId> out;
  for (std::size_t i = 0; i < objs_.size(); ++i)
    if (objs_[i].declared) out.push_back(static_cast<ObjId>(i));
  return out;
}

std::vector<MorId> FinBase::generators() const {
  std::vector<MorId> out;
  for (std::size_t i = 0; i < mors_.size(); ++i)
    if (mors_[i].declared) out.push_back(static_cast<MorId>(i));
  return out;
}

std::string FinBase::obj_name(ObjId a) const { return objs_.at(a).name; }
std::string FinBase::mor_name(MorId f) const { return mors_.at(f).name; }

std::optional<ObjId> FinBase::obj_by_name(const std::string& n) const {
  auto it = obj_names_.find(n);
  if (it == obj_names_.end()) return std::nullopt;
  return it->second;
}

std::optional<MorId> FinBase::mor_by_name(const std::string& n) const {
  auto it = mor_names_.find(n);
  if (it == mor_names_.end()) return std::nullopt;
  return it->second;
}

ObjId FinBase::source(MorId f) const { return mors_.at(f).src; }
ObjId FinBase::target(MorId f) const { return mors_.at(f).dst; }

ObjId FinBase::intern_obj(const std::string& name, FinSet carrier) {
  std::string n = name;
  if (n.empty()) n = cat("_o", objs_.size());
  auto it = obj_names_.find(n);
  if (it != obj_names_.end()) return it->second;
  ObjId a = static_cast<ObjId>(objs_.size());
  objs_.push_back({n, std::move(carrier), false});
  obj_names_[n] = a;
  return a;
}

MorId FinBase::intern_mor(const std::string& name, ObjId src, ObjId dst, FinPMap pm) {
  auto key = std::make_tuple(src, dst, pm.graph);
  auto it = mor_vals_.find(key);
  if (it != mor_vals_.end()) return it->second;
  MorId f = static_cast<MorId>(mors_.size());
  std::string n = name;
  if (n.empty() || mor_names_.count(n)) n = cat("_m", f);
  mors_.push_back({n, src, dst, std::move(pm), false});
  mor_names_[n] = f;
  mor_vals_[key] = f;
  return f;
}

MorId FinBase::identity(ObjId a) {
  return intern_mor(cat("(id ", obj_name(a), ")"), a, a, pm_id(carrier(a)));
}

MorId FinBase::compose(MorId g, MorId f) {
  if (target(f) != source(g))
    throw TypeError(cat("compose: boundary mismatch between ", mor_name(g), " and ",
                        mor_name(f)));
  return intern_mor(cat("(comp ", mor_name(g), " ", mor_name(f), ")"), source(f),
                    target(g), pm_compose(pmap(g), pmap(f)));
}

MorId FinBase::restriction(MorId f) {
  return intern_mor(cat("(restr ", mor_name(f), ")"), source(f), source(f),
                    pm_restriction(pmap(f)));
}

Verdict FinBase::leq(MorId f, MorId g) {
  if (source(f) != source(g) || target(f) != target(g))
    throw TypeError("leq: cells are not parallel");
  return pm_leq(pmap(f), pmap(g)) ? Verdict::Proved : Verdict::Refuted;
}

Verdict FinBase::total(MorId f) {
  return pm_total(pmap(f)) ? Verdict::Proved : Verdict::Refuted;
}

CommaCell FinBase::comma(MorId f, MorId g) {
  if (target(f) != target(g)) throw TypeError("comma: cospan targets differ");
  auto key = std::make_pair(f, g);
  auto it = comma_cache_.find(key);
  if (it != comma_cache_.end()) return it->second;
  CommaSquare cs = pm_comma(pmap(f), pmap(g));
  ObjId apex = intern_obj(cat("(capex ", mor_name(f), " ", mor_name(g), ")"), cs.apex);
  CommaCell out;
  out.apex = apex;
  out.to_source = intern_mor(cat("(csrc ", mor_name(f), " ", mor_name(g), ")"), apex,
                             source(f), cs.to_src_f);
  out.to_other = intern_mor(cat("(cother ", mor_name(f), " ", mor_name(g), ")"), apex,
                            source(g), cs.to_src_g);
  comma_cache_[key] = out;
  return out;
}

MorId FinBase::comma_pair(MorId f, MorId g, MorId phi, MorId psi) {
  if (source(phi) != source(psi)) throw TypeError("comma_pair: sources differ");
  if (target(phi) != source(f) || target(psi) != source(g))
    throw TypeError("comma_pair: legs do not match the cospan");
  FinPMap fphi = pm_compose(pmap(f), pmap(phi));
  FinPMap gpsi = pm_compose(pmap(g), pmap(psi));
  if (!pm_leq(fphi, gpsi)) throw CategoryError("comma_pair: square does not commute laxly");
  CommaCell cc = comma(f, g);
  CommaSquare cs{carrier(cc.apex), pmap(cc.to_source), pmap(cc.to_other)};
  FinPMap med = pm_comma_pair(cs, pmap(phi), pmap(psi));
  return intern_mor(cat("(cpair ", mor_name(f), " ", mor_name(g), " ", mor_name(phi),
                        " ", mor_name(psi), ")"),
                    source(phi), cc.apex, std::move(med));
}

std::pair<MorId, MorId> FinBase::split_restriction(MorId f) {
  auto it = split_cache_.find(f);
  if (it != split_cache_.end()) return it->second;
  Splitting sp = pm_split_coreflexive(pm_restriction(pmap(f)));
  ObjId sub = intern_obj(cat("(dom ", mor_name(f), ")"), sp.subobject);
  MorId incl = intern_mor(cat("(incl ", mor_name(f), ")"), sub, source(f), sp.incl);
  MorId proj = intern_mor(cat("(proj ", mor_name(f), ")"), source(f), sub, sp.proj);
  auto out = std::make_pair(incl, proj);
  split_cache_[f] = out;
  return out;
}

ObjId FinBase::tensor_obj(ObjId a, ObjId b) {
  return intern_obj(cat("(ox ", obj_name(a), " ", obj_name(b), ")"),
                    pm_tensor(carrier(a), carrier(b)));
}

MorId FinBase::tensor_mor(MorId f, MorId g) {
  ObjId s = tensor_obj(source(f), source(g));
  ObjId d = tensor_obj(target(f), target(g));
  return intern_mor(cat("(tensor ", mor_name(f), " ", mor_name(g), ")"), s, d,
                    pm_tensor_mor(pmap(f), pmap(g)));
}

MorId FinBase::diagonal(ObjId a) {
  ObjId d = tensor_obj(a, a);
  return intern_mor(cat("(diag ", obj_name(a), ")"), a, d, pm_diagonal(carrier(a)));
}

MorId FinBase::codiagonal(ObjId a) {
  ObjId s = tensor_obj(a, a);
  return intern_mor(cat("(codiag ", obj_name(a), ")"), s, a, pm_codiagonal(carrier(a)));
}

// --------------------------------------------------------------- FreeBase

FreeBase::FreeBase(Theory th, LogicMode mode, Budget budget)
    : cat_(std::move(th), mode, budget) {}

ObjId FreeBase::add_object(const std::string& name, CtxObject o) {
  if (obj_names_.count(name)) throw TypeError(cat("duplicate object name: ", name));
  ObjId a = intern_obj(name, std::move(o));
  objs_[a].declared = true;
  obj_names_[name] = a;
  return a;
}

MorId FreeBase::add_morphism(const std::string& name, CtxMorphism m) {
  if (mor_names_.count(name)) throw TypeError(cat("duplicate morphism name: ", name));
  MorId f = intern_mor(name, std::move(m));
  mors_[f].declared = true;
  mor_names_[name] = f;
  return f;
}

const CtxObject& FreeBase::ctx_object(ObjId a) const { return objs_.at(a).obj; }
const CtxMorphism& FreeBase::ctx_morphism(MorId f) const { return mors_.at(f).mor; }

std::vector<ObjId> FreeBase::objects() const {
  std::vector<ObjId> out;
  for (std::size_t i = 0; i < objs_.size(); ++i)
    if (objs_[i].declared) out.push_back(static_cast<ObjId>(i));
  return out;
}

std::vector<MorId> FreeBase::generators() const {
  std::vector<MorId> out;
  for (std::size_t i = 0; i < mors_.size(); ++i)
    if (mors_[i].declared) out.push_back(static_cast<MorId>(i));
  return out;
}

std::string FreeBase::obj_name(ObjId a) const { return objs_.at(a).name; }
std::string FreeBase::mor_name(MorId f) const { return mors_.at(f).name; }

std::optional<ObjId> FreeBase::obj_by_name(const std::string& n) const {
  auto it = obj_names_.find(n);
  if (it == obj_names_.end()) return std::nullopt;
  return it->second;
}

std::optional<MorId> FreeBase::mor_by_name(const std::string& n) const {
  auto it = mor_names_.find(n);
  if (it == mor_names_.end()) return std::nullopt;
  return it->second;
}

ObjId FreeBase::source(MorId f) const { return mors_.at(f).src; }
ObjId FreeBase::target(MorId f) const { return mors_.at(f).dst; }

namespace {

// compose() nests constraint conjunctions by association order, so the raw
// print is not a stable identity. Key on the flattened, sorted conjunct list.
std::string canon_constraint(const HPVPtr& c) {
  std::vector<std::string> cs;
  for (const auto& q : hpv_conjuncts(c)) cs.push_back(print_hpv(q));
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  std::string s = "[";
  for (const auto& q : cs) {
    s += q;
    s += ';';
  }
  s += ']';
  return s;
}

std::string canon_obj_key(const CtxObject& o) {
  std::string s = "{";
  for (const auto& [n, srt] : o.vars.entries) {
    s += n;
    s += ':';
    s += srt;
    s += ',';
  }
  s += '|';
  s += canon_constraint(o.constraint);
  s += '}';
  return s;
}

std::string canon_mor_key(const CtxMorphism& m) {
  std::string s = "{";
  for (const auto& t : m.terms) {
    s += print_term(t);
    s += ',';
  }
  s += '|';
  s += canon_constraint(m.constraint);
  s += "} : ";
  s += canon_obj_key(m.src);
  s += " -> ";
  s += canon_obj_key(m.dst);
  return s;
}

}  // namespace

ObjId FreeBase::intern_obj(const std::string& name, CtxObject o) {
  std::string key = canon_obj_key(o);
  auto it = obj_prints_.find(key);
  if (it != obj_prints_.end()) return it->second;
  ObjId a = static_cast<ObjId>(objs_.size());
  std::string n = name.empty() ? cat("_o", a) : name;
  objs_.push_back({n, std::move(o), false});
  obj_prints_[key] = a;
  return a;
}

MorId FreeBase::intern_mor(const std::string& name, CtxMorphism m) {
  std::string key = canon_mor_key(m);
  auto it = mor_prints_.find(key);
  if (it != mor_prints_.end()) return it->second;
  ObjId s = intern_obj("", m.src);
  ObjId d = intern_obj("", m.dst);
  MorId f = static_cast<MorId>(mors_.size());
  std::string n = name.empty() ? cat("_m", f) : name;
  mors_.push_back({n, std::move(m), s, d, false});
  mor_prints_[key] = f;
  return f;
}

MorId FreeBase::identity(ObjId a) {
  return intern_mor(cat("(id ", obj_name(a), ")"), cat_.identity(ctx_object(a)));
}

MorId FreeBase::compose(MorId g, MorId f) {
  return intern_mor(cat("(comp ", mor_name(g), " ", mor_name(f), ")"),
                    cat_.compose(ctx_morphism(g), ctx_morphism(f)));
}

MorId FreeBase::restriction(MorId f) {
  return intern_mor(cat("(restr ", mor_name(f), ")"),
                    cat_.restriction_of(ctx_morphism(f)));
}

Verdict FreeBase::leq(MorId f, MorId g) {
  return cat_.leq_2cell(ctx_morphism(f), ctx_morphism(g));
}

Verdict FreeBase::total(MorId f) { return cat_.is_total(ctx_morphism(f)); }

CommaCell FreeBase::comma(MorId f, MorId g) {
  auto key = std::make_pair(f, g);
  auto it = comma_cache_.find(key);
  if (it != comma_cache_.end()) return it->second;
  CommaData cd = cat_.comma_object(ctx_morphism(f), ctx_morphism(g));
  CommaCell out;
  out.apex = intern_obj(cat("(capex ", mor_name(f), " ", mor_name(g), ")"), cd.apex);
  out.to_source =
      intern_mor(cat("(csrc ", mor_name(f), " ", mor_name(g), ")"), cd.to_source);
  out.to_other =
      intern_mor(cat("(cother ", mor_name(f), " ", mor_name(g), ")"), cd.to_other);
  comma_cache_[key] = out;
  return out;
}

MorId FreeBase::comma_pair(MorId f, MorId g, MorId phi, MorId psi) {
  CommaData cd = cat_.comma_object(ctx_morphism(f), ctx_morphism(g));
  comma(f, g);  // keep the cached cell in sync with the canonical construction
  return intern_mor(cat("(cpair ", mor_name(f), " ", mor_name(g), " ", mor_name(phi),
                        " ", mor_name(psi), ")"),
                    cat_.comma_pair(cd, ctx_morphism(phi), ctx_morphism(psi)));
}

std::pair<MorId, MorId> FreeBase::split_restriction(MorId f) {
  auto it = split_cache_.find(f);
  if (it != split_cache_.end()) return it->second;
  auto [i, j] = cat_.split_coreflexive(cat_.restriction_of(ctx_morphism(f)));
  intern_obj(cat("(dom ", mor_name(f), ")"), i.src);  // name the subobject first
  auto out = std::make_pair(intern_mor(cat("(incl ", mor_name(f), ")"), i),
                            intern_mor(cat("(proj ", mor_name(f), ")"), j));
  split_cache_[f] = out;
  return out;
}

ObjId FreeBase::tensor_obj(ObjId a, ObjId b) {
  return intern_obj(cat("(ox ", obj_name(a), " ", obj_name(b), ")"),
                    cat_.tensor(ctx_object(a), ctx_object(b)));
}

MorId FreeBase::tensor_mor(MorId f, MorId g) {
  return intern_mor(cat("(tensor ", mor_name(f), " ", mor_name(g), ")"),
                    cat_.tensor_mor(ctx_morphism(f), ctx_morphism(g)));
}

MorId FreeBase::diagonal(ObjId a) {
  return intern_mor(cat("(diag ", obj_name(a), ")"), cat_.diagonal(ctx_object(a)));
}

MorId FreeBase::codiagonal(ObjId a) {
  return intern_mor(cat("(codiag ", obj_name(a), ")"), cat_.codiagonal(ctx_object(a)));
}

// ------------------------------------------------------------ FibFormula

namespace {

FibPtr mk(FibFormula f) { return std::make_shared<const FibFormula>(std::move(f)); }

}  // namespace

FibPtr FibFormula::mk_atom(std::string name, ObjId at) {
  FibFormula f{Kind::Atom, at, std::move(name), -1, nullptr, nullptr};
  return mk(std::move(f));
}

FibPtr FibFormula::top(ObjId at) { return mk({Kind::Top, at, "", -1, nullptr, nullptr}); }
FibPtr FibFormula::bot(ObjId at) { return mk({Kind::Bot, at, "", -1, nullptr, nullptr}); }

FibPtr FibFormula::neg(FibPtr p) {
  return mk({Kind::Neg, p->type, "", -1, std::move(p), nullptr});
}

FibPtr FibFormula::conj(FibPtr p, FibPtr q) {
  if (p->type != q->type) throw TypeError("conjunction of formulas over different objects");
  ObjId at = p->type;
  return mk({Kind::And, at, "", -1, std::move(p), std::move(q)});
}

FibPtr FibFormula::disj(FibPtr p, FibPtr q) {
  if (p->type != q->type) throw TypeError("disjunction of formulas over different objects");
  ObjId at = p->type;
  return mk({Kind::Or, at, "", -1, std::move(p), std::move(q)});
}

FibPtr FibFormula::star(const BaseOracle& base, MorId f, FibPtr p) {
  if (p->type != base.target(f))
    throw TypeError(cat("star: formula lives over ", base.obj_name(p->type),
                        ", not over the target of ", base.mor_name(f)));
  return mk({Kind::Star, base.source(f), "", f, std::move(p), nullptr});
}

FibPtr FibFormula::coprod(const BaseOracle& base, MorId f, FibPtr p) {
  if (p->type != base.source(f))
    throw TypeError(cat("coprod: formula lives over ", base.obj_name(p->type),
                        ", not over the source of ", base.mor_name(f)));
  return mk({Kind::Coprod, base.target(f), "", f, std::move(p), nullptr});
}

FibPtr FibFormula::prod(const BaseOracle& base, MorId f, FibPtr p) {
  if (p->type != base.source(f))
    throw TypeError(cat("prod: formula lives over ", base.obj_name(p->type),
                        ", not over the source of ", base.mor_name(f)));
  return mk({Kind::Prod, base.target(f), "", f, std::move(p), nullptr});
}

bool fib_equal(const FibPtr& x, const FibPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind || x->type != y->type) return false;
  switch (x->kind) {
    case FibFormula::Kind::Atom:
      return x->atom == y->atom;
    case FibFormula::Kind::Top:
    case FibFormula::Kind::Bot:
      return true;
    case FibFormula::Kind::Neg:
      return fib_equal(x->a, y->a);
    case FibFormula::Kind::And:
    case FibFormula::Kind::Or:
      return fib_equal(x->a, y->a) && fib_equal(x->b, y->b);
    case FibFormula::Kind::Star:
    case FibFormula::Kind::Coprod:
    case FibFormula::Kind::Prod:
      return x->mor == y->mor && fib_equal(x->a, y->a);
  }
  return false;
}

int formula_complexity(const FibPtr& p) {
  switch (p->kind) {
    case FibFormula::Kind::Atom:
    case FibFormula::Kind::Top:
    case FibFormula::Kind::Bot:
      return 1;
    case FibFormula::Kind::Neg:
      return 1 + formula_complexity(p->a);
    case FibFormula::Kind::And:
    case FibFormula::Kind::Or:
      return 1 + std::max(formula_complexity(p->a), formula_complexity(p->b));
    case FibFormula::Kind::Star:
      return formula_complexity(p->a);
    case FibFormula::Kind::Coprod:
    case FibFormula::Kind::Prod:
      return 1 + formula_complexity(p->a);
  }
  return 0;
}

std::string print_fib(const BaseOracle& base, const FibPtr& p) {
  switch (p->kind) {
    case FibFormula::Kind::Atom:
      return p->atom;
    case FibFormula::Kind::Top:
      return "top";
    case FibFormula::Kind::Bot:
      return "bot";
    case FibFormula::Kind::Neg:
      return cat("(neg ", print_fib(base, p->a), ")");
    case FibFormula::Kind::And:
      return cat("(and ", print_fib(base, p->a), " ", print_fib(base, p->b), ")");
    case FibFormula::Kind::Or:
      return cat("(or ", print_fib(base, p->a), " ", print_fib(base, p->b), ")");
    case FibFormula::Kind::Star:
      return cat("(star ", base.mor_name(p->mor), " ", print_fib(base, p->a), ")");
    case FibFormula::Kind::Coprod:
      return cat("(coprod ", base.mor_name(p->mor), " ", print_fib(base, p->a), ")");
    case FibFormula::Kind::Prod:
      return cat("(prod ", base.mor_name(p->mor), " ", print_fib(base, p->a), ")");
  }
  return "?";
}

bool sequent_equal(const Sequent& s, const Sequent& t) {
  return s.type == t.type && fib_mset_eq(s.left, t.left) && fib_mset_eq(s.right, t.right);
}

std::string print_sequent(const BaseOracle& base, const Sequent& s) {
  std::ostringstream os;
  os << base.obj_name(s.type) << " |";
  for (std::size_t i = 0; i < s.left.size(); ++i)
    os << (i ? ", " : " ") << print_fib(base, s.left[i]);
  os << " |-";
  for (std::size_t i = 0; i < s.right.size(); ++i)
    os << (i ? ", " : " ") << print_fib(base, s.right[i]);
  return os.str();
}

bool fib_mset_eq(const std::vector<FibPtr>& xs, const std::vector<FibPtr>& ys) {
  if (xs.size() != ys.size()) return false;
  std::vector<bool> used(ys.size(), false);
  for (const auto& x : xs) {
    bool hit = false;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      if (!used[j] && fib_equal(x, ys[j])) {
        used[j] = true;
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

std::optional<std::vector<FibPtr>> fib_remove(const std::vector<FibPtr>& xs,
                                              const FibPtr& p) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (fib_equal(xs[i], p)) {
      std::vector<FibPtr> out;
      out.reserve(xs.size() - 1);
      for (std::size_t j = 0; j < xs.size(); ++j)
        if (j != i) out.push_back(xs[j]);
      return out;
    }
  }
  return std::nullopt;
}

int fib_count(const std::vector<FibPtr>& xs, const FibPtr& p) {
  int n = 0;
  for (const auto& x : xs)
    if (fib_equal(x, p)) ++n;
  return n;
}

}  // namespace alk
