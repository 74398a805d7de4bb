// Finite sets and partial maps: the concrete category every abstract law is
// checked against. Elements are named atoms with a total order, so subset and
// map enumeration is canonical and deterministic.
#ifndef ALK_PARMAPS_HPP
#define ALK_PARMAPS_HPP

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alk/common.hpp"

namespace alk {

struct FinSet {
  std::vector<std::string> elems;  // ordered, no duplicates

  bool contains(const std::string& e) const;
  std::size_t size() const { return elems.size(); }
  bool operator==(const FinSet&) const = default;
  auto operator<=>(const FinSet&) const = default;
};

using Subset = std::set<std::string>;

struct FinPMap {
  FinSet src, dst;
  std::map<std::string, std::string> graph;  // keys ⊆ src, values ∈ dst

  std::optional<std::string> apply(const std::string& x) const;
  bool defined_at(const std::string& x) const { return graph.count(x) != 0; }
  Subset domain() const;
  Subset image() const;
  void validate() const;  // throws TypeError on out-of-range entries
  bool operator==(const FinPMap&) const = default;
  auto operator<=>(const FinPMap&) const = default;
};

// Core restriction-category structure.
FinPMap pm_id(const FinSet& a);
FinPMap pm_compose(const FinPMap& g, const FinPMap& f);  // g after f
FinPMap pm_restriction(const FinPMap& f);                // partial identity on dom f
bool pm_leq(const FinPMap& f, const FinPMap& g);         // graph inclusion
bool pm_total(const FinPMap& f);
FinPMap pm_empty(const FinSet& a, const FinSet& b);

// Monoidal structure. Pair elements are named "(a,b)".
std::string pair_name(const std::string& a, const std::string& b);
FinSet pm_unit();                                   // one-element carrier
FinSet pm_tensor(const FinSet& a, const FinSet& b);
FinPMap pm_tensor_mor(const FinPMap& f, const FinPMap& g);
FinPMap pm_diagonal(const FinSet& a);               // A -> A⊗A
FinPMap pm_codiagonal(const FinSet& a);             // A⊗A -> A, defined on the diagonal
FinPMap pm_bang(const FinSet& a);                   // A -> I, total
FinPMap pm_symmetry(const FinSet& a, const FinSet& b);
FinPMap pm_proj1(const FinSet& a, const FinSet& b);  // A⊗B -> A, total
FinPMap pm_proj2(const FinSet& a, const FinSet& b);
FinPMap pm_meet(const FinPMap& f, const FinPMap& g);  // ∇(f⊗g)Δ

bool pm_is_monic(const FinPMap& f);  // decides ∇(f⊗f) = f∇
// converse graph; requires injectivity where defined
std::optional<FinPMap> pm_quasi_inverse(const FinPMap& f);
bool pm_is_coreflexive(const FinPMap& d);
// split d ⊑ id as i ∘ j with i total monic, j its quasi-inverse
struct Splitting {
  FinSet subobject;
  FinPMap incl;  // i : subobject -> carrier, total monic
  FinPMap proj;  // j : carrier -> subobject, partial identity
};
Splitting pm_split_coreflexive(const FinPMap& d);

struct CommaSquare {
  FinSet apex;
  FinPMap to_src_f;  // ĝ : apex -> src(f), total
  FinPMap to_src_g;  // f̂ : apex -> src(g), total
};
// apex = {(a,c) | f(a)↓ implies g(c)↓ and f(a)=g(c)}
CommaSquare pm_comma(const FinPMap& f, const FinPMap& g);
// mediator for φ,ψ with f∘φ ⊑ g∘ψ: defined where both φ and ψ are
FinPMap pm_comma_pair(const CommaSquare& cs, const FinPMap& phi, const FinPMap& psi);

// Domain-lattice operations.
Subset complement(const FinSet& carrier, const Subset& s);
Subset stable_heyting(const FinSet& carrier, const Subset& alpha, const Subset& beta);
Subset dom_con_pullback(const FinPMap& f, const Subset& v);  // f(x)↓ → f(x)∈V
Subset dom_co_pullback(const FinPMap& f, const Subset& v);   // f(x)↓ ∧ f(x)∈V
Subset exists_along(const FinPMap& f, const Subset& u);      // image of U ∩ dom f
Subset forall_along_mono(const FinPMap& i, const Subset& u);  // total monic i only

// Enumeration helpers for law suites (deterministic order).
std::vector<Subset> all_subsets(const FinSet& a);
std::vector<FinPMap> all_pmaps(const FinSet& a, const FinSet& b);
std::vector<FinPMap> all_total_maps(const FinSet& a, const FinSet& b);
FinPMap random_pmap(Rng& rng, const FinSet& a, const FinSet& b);
Subset random_subset(Rng& rng, const FinSet& a);
FinSet named_carrier(const std::string& prefix, int n);

}  // namespace alk

#endif
