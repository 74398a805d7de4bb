#include "alk/parmaps.hpp"

#include <algorithm>

namespace alk {

bool FinSet::contains(const std::string& e) const {
  return std::find(elems.begin(), elems.end(), e) != elems.end();
}

std::optional<std::string> FinPMap::apply(const std::string& x) const {
  auto it = graph.find(x);
  if (it == graph.end()) return std::nullopt;
  return it->second;
}

Subset FinPMap::domain() const {
  Subset out;
  for (const auto& [k, _] : graph) out.insert(k);
  return out;
}

Subset FinPMap::image() const {
  Subset out;
  for (const auto& [_, v] : graph) out.insert(v);
  return out;
}

void FinPMap::validate() const {
  for (const auto& [k, v] : graph) {
    if (!src.contains(k)) throw TypeError("partial map key " + k + " outside source");
    if (!dst.contains(v)) throw TypeError("partial map value " + v + " outside target");
  }
}

FinPMap pm_id(const FinSet& a) {
  FinPMap f{a, a, {}};
  for (const auto& e : a.elems) f.graph[e] = e;
  return f;
}

FinPMap pm_compose(const FinPMap& g, const FinPMap& f) {
  if (!(f.dst == g.src)) throw TypeError("composition boundary mismatch");
  FinPMap out{f.src, g.dst, {}};
  for (const auto& [x, y] : f.graph) {
    auto z = g.apply(y);
    if (z) out.graph[x] = *z;
  }
  return out;
}

FinPMap pm_restriction(const FinPMap& f) {
  FinPMap out{f.src, f.src, {}};
  for (const auto& [x, _] : f.graph) out.graph[x] = x;
  return out;
}

bool pm_leq(const FinPMap& f, const FinPMap& g) {
  if (!(f.src == g.src) || !(f.dst == g.dst)) throw TypeError("leq boundary mismatch");
  for (const auto& [x, y] : f.graph) {
    auto z = g.apply(x);
    if (!z || *z != y) return false;
  }
  return true;
}

bool pm_total(const FinPMap& f) { return f.graph.size() == f.src.size(); }

FinPMap pm_empty(const FinSet& a, const FinSet& b) { return FinPMap{a, b, {}}; }

std::string pair_name(const std::string& a, const std::string& b) {
  return "(" + a + "," + b + ")";
}

FinSet pm_unit() { return FinSet{{"*"}}; }

FinSet pm_tensor(const FinSet& a, const FinSet& b) {
  FinSet out;
  for (const auto& x : a.elems)
    for (const auto& y : b.elems) out.elems.push_back(pair_name(x, y));
  return out;
}

FinPMap pm_tensor_mor(const FinPMap& f, const FinPMap& g) {
  FinPMap out{pm_tensor(f.src, g.src), pm_tensor(f.dst, g.dst), {}};
  for (const auto& [x, fx] : f.graph)
    for (const auto& [y, gy] : g.graph) out.graph[pair_name(x, y)] = pair_name(fx, gy);
  return out;
}

FinPMap pm_diagonal(const FinSet& a) {
  FinPMap out{a, pm_tensor(a, a), {}};
  for (const auto& x : a.elems) out.graph[x] = pair_name(x, x);
  return out;
}

FinPMap pm_codiagonal(const FinSet& a) {
  FinPMap out{pm_tensor(a, a), a, {}};
  for (const auto& x : a.elems) out.graph[pair_name(x, x)] = x;
  return out;
}

FinPMap pm_bang(const FinSet& a) {
  FinPMap out{a, pm_unit(), {}};
  for (const auto& x : a.elems) out.graph[x] = "*";
  return out;
}

FinPMap pm_symmetry(const FinSet& a, const FinSet& b) {
  FinPMap out{pm_tensor(a, b), pm_tensor(b, a), {}};
  for (const auto& x : a.elems)
    for (const auto& y : b.elems) out.graph[pair_name(x, y)] = pair_name(y, x);
  return out;
}

FinPMap pm_proj1(const FinSet& a, const FinSet& b) {
  FinPMap out{pm_tensor(a, b), a, {}};
  for (const auto& x : a.elems)
    for (const auto& y : b.elems) out.graph[pair_name(x, y)] = x;
  return out;
}

FinPMap pm_proj2(const FinSet& a, const FinSet& b) {
  FinPMap out{pm_tensor(a, b), b, {}};
  for (const auto& x : a.elems)
    for (const auto& y : b.elems) out.graph[pair_name(x, y)] = y;
  return out;
}

FinPMap pm_meet(const FinPMap& f, const FinPMap& g) {
  if (!(f.src == g.src) || !(f.dst == g.dst)) throw TypeError("meet boundary mismatch");
  FinPMap out{f.src, f.dst, {}};
  for (const auto& [x, y] : f.graph) {
    auto z = g.apply(x);
    if (z && *z == y) out.graph[x] = y;
  }
  return out;
}

bool pm_is_monic(const FinPMap& f) {
  FinPMap lhs = pm_compose(pm_codiagonal(f.dst), pm_tensor_mor(f, f));
  FinPMap rhs = pm_compose(f, pm_codiagonal(f.src));
  return lhs == rhs;
}

std::optional<FinPMap> pm_quasi_inverse(const FinPMap& f) {
  FinPMap out{f.dst, f.src, {}};
  for (const auto& [x, y] : f.graph) {
    if (out.graph.count(y)) return std::nullopt;  // not injective where defined
    out.graph[y] = x;
  }
  return out;
}

bool pm_is_coreflexive(const FinPMap& d) {
  if (!(d.src == d.dst)) return false;
  for (const auto& [x, y] : d.graph)
    if (x != y) return false;
  return true;
}

Splitting pm_split_coreflexive(const FinPMap& d) {
  if (!pm_is_coreflexive(d)) throw TypeError("not a coreflexive");
  Splitting s;
  for (const auto& e : d.src.elems)
    if (d.defined_at(e)) s.subobject.elems.push_back(e);
  s.incl = FinPMap{s.subobject, d.src, {}};
  s.proj = FinPMap{d.src, s.subobject, {}};
  for (const auto& e : s.subobject.elems) {
    s.incl.graph[e] = e;
    s.proj.graph[e] = e;
  }
  return s;
}

CommaSquare pm_comma(const FinPMap& f, const FinPMap& g) {
  if (!(f.dst == g.dst)) throw TypeError("comma target mismatch");
  CommaSquare cs;
  cs.to_src_f = FinPMap{{}, f.src, {}};
  cs.to_src_g = FinPMap{{}, g.src, {}};
  for (const auto& a : f.src.elems) {
    for (const auto& c : g.src.elems) {
      auto fa = f.apply(a);
      if (fa) {
        auto gc = g.apply(c);
        if (!gc || *gc != *fa) continue;
      }
      std::string p = pair_name(a, c);
      cs.apex.elems.push_back(p);
      cs.to_src_f.graph[p] = a;
      cs.to_src_g.graph[p] = c;
    }
  }
  cs.to_src_f.src = cs.apex;
  cs.to_src_g.src = cs.apex;
  return cs;
}

FinPMap pm_comma_pair(const CommaSquare& cs, const FinPMap& phi, const FinPMap& psi) {
  if (!(phi.src == psi.src)) throw TypeError("comma mediator source mismatch");
  FinPMap out{phi.src, cs.apex, {}};
  for (const auto& x : phi.src.elems) {
    auto a = phi.apply(x);
    auto c = psi.apply(x);
    if (a && c) {
      std::string p = pair_name(*a, *c);
      if (!cs.apex.contains(p))
        throw TypeError("mediator image " + p + " missing from comma apex (f∘φ ⊑ g∘ψ fails)");
      out.graph[x] = p;
    }
  }
  return out;
}

Subset complement(const FinSet& carrier, const Subset& s) {
  Subset out;
  for (const auto& e : carrier.elems)
    if (!s.count(e)) out.insert(e);
  return out;
}

Subset stable_heyting(const FinSet& carrier, const Subset& alpha, const Subset& beta) {
  Subset out = complement(carrier, alpha);
  out.insert(beta.begin(), beta.end());
  return out;
}

Subset dom_con_pullback(const FinPMap& f, const Subset& v) {
  Subset out;
  for (const auto& x : f.src.elems) {
    auto y = f.apply(x);
    if (!y || v.count(*y)) out.insert(x);
  }
  return out;
}

Subset dom_co_pullback(const FinPMap& f, const Subset& v) {
  Subset out;
  for (const auto& x : f.src.elems) {
    auto y = f.apply(x);
    if (y && v.count(*y)) out.insert(x);
  }
  return out;
}

Subset exists_along(const FinPMap& f, const Subset& u) {
  Subset out;
  for (const auto& x : u) {
    auto y = f.apply(x);
    if (y) out.insert(*y);
  }
  return out;
}

Subset forall_along_mono(const FinPMap& i, const Subset& u) {
  if (!pm_total(i) || !pm_is_monic(i)) throw TypeError("forall_along_mono needs a total monic");
  auto j = pm_quasi_inverse(i);
  return dom_con_pullback(*j, u);
}

std::vector<Subset> all_subsets(const FinSet& a) {
  std::vector<Subset> out;
  std::size_t n = a.size();
  if (n > 20) throw TypeError("carrier too large to enumerate subsets");
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Subset s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) s.insert(a.elems[i]);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<FinPMap> all_pmaps(const FinSet& a, const FinSet& b) {
  std::vector<FinPMap> out;
  std::size_t n = a.size(), m = b.size() + 1;  // m-1 targets plus "undefined"
  double count = 1;
  for (std::size_t i = 0; i < n; ++i) count *= static_cast<double>(m);
  if (count > 2e6) throw TypeError("too many partial maps to enumerate");
  std::vector<std::size_t> choice(n, 0);
  for (;;) {
    FinPMap f{a, b, {}};
    for (std::size_t i = 0; i < n; ++i)
      if (choice[i] > 0) f.graph[a.elems[i]] = b.elems[choice[i] - 1];
    out.push_back(std::move(f));
    std::size_t i = 0;
    while (i < n && ++choice[i] == m) choice[i++] = 0;
    if (i == n) break;
  }
  return out;
}

std::vector<FinPMap> all_total_maps(const FinSet& a, const FinSet& b) {
  std::vector<FinPMap> out;
  for (auto& f : all_pmaps(a, b))
    if (pm_total(f)) out.push_back(std::move(f));
  return out;
}

FinPMap random_pmap(Rng& rng, const FinSet& a, const FinSet& b) {
  FinPMap f{a, b, {}};
  if (b.size() == 0) return f;
  std::uniform_int_distribution<std::size_t> pick(0, b.size());
  for (const auto& x : a.elems) {
    std::size_t c = pick(rng);
    if (c > 0) f.graph[x] = b.elems[c - 1];
  }
  return f;
}

Subset random_subset(Rng& rng, const FinSet& a) {
  Subset s;
  std::uniform_int_distribution<int> coin(0, 1);
  for (const auto& x : a.elems)
    if (coin(rng)) s.insert(x);
  return s;
}

FinSet named_carrier(const std::string& prefix, int n) {
  FinSet out;
  for (int i = 0; i < n; ++i) out.elems.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace alk
