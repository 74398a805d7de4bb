// Typed formulas over a base bicategory of partial maps, plus the oracle
// interface the sequent calculus consults for its side conditions (ordering
// of 1-cells, comma squares, restrictions, splittings).
//
// One-cells and objects are opaque interned ids. Implementations guarantee
// that equal constructions intern to equal ids: compose(g, f) asked twice
// gives the same id, and in a finite base two maps with the same graph and
// the same boundary coincide. Formula equality is structural over these ids.
#ifndef ALK_FIB_HPP
#define ALK_FIB_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "alk/common.hpp"
#include "alk/freecat.hpp"
#include "alk/parmaps.hpp"

namespace alk {

using ObjId = int;
using MorId = int;

// A weak comma square over the base: both legs are total and
// f ∘ to_source ⊑ g ∘ to_other.
struct CommaCell {
  ObjId apex = -1;
  MorId to_source = -1;  // apex -> src(f)
  MorId to_other = -1;   // apex -> src(g)
  bool operator==(const CommaCell&) const = default;
};

class BaseOracle {
 public:
  virtual ~BaseOracle() = default;

  virtual std::vector<ObjId> objects() const = 0;
  virtual std::vector<MorId> generators() const = 0;  // declared 1-cells
  virtual std::string obj_name(ObjId a) const = 0;
  virtual std::string mor_name(MorId f) const = 0;
  virtual std::optional<ObjId> obj_by_name(const std::string& n) const = 0;
  virtual std::optional<MorId> mor_by_name(const std::string& n) const = 0;

  virtual ObjId source(MorId f) const = 0;
  virtual ObjId target(MorId f) const = 0;

  virtual MorId identity(ObjId a) = 0;
  virtual MorId compose(MorId g, MorId f) = 0;  // g after f
  virtual MorId restriction(MorId f) = 0;
  virtual Verdict leq(MorId f, MorId g) = 0;  // 2-cell f ⊑ g, f,g parallel
  virtual Verdict total(MorId f) = 0;

  virtual CommaCell comma(MorId f, MorId g) = 0;  // canonical per (f, g)
  // mediator into comma(f, g) for a lax square f∘phi ⊑ g∘psi
  virtual MorId comma_pair(MorId f, MorId g, MorId phi, MorId psi) = 0;
  // split restriction(f) = incl ∘ proj with proj ∘ incl = id on the domain
  virtual std::pair<MorId, MorId> split_restriction(MorId f) = 0;

  virtual ObjId tensor_obj(ObjId a, ObjId b) = 0;
  virtual MorId tensor_mor(MorId f, MorId g) = 0;
  virtual MorId diagonal(ObjId a) = 0;    // A -> A⊗A
  virtual MorId codiagonal(ObjId a) = 0;  // A⊗A -> A

  Verdict eq_cells(MorId f, MorId g);  // leq both ways
};

// Finite base: named carriers and partial maps, every judgement decidable.
class FinBase : public BaseOracle {
 public:
  ObjId add_object(const std::string& name, FinSet carrier);
  MorId add_map(const std::string& name, ObjId src, ObjId dst, FinPMap pm);
  const FinSet& carrier(ObjId a) const;
  const FinPMap& pmap(MorId f) const;

  std::vector<ObjId> objects() const override;
  std::vector<MorId> generators() const override;
  std::string obj_name(ObjId a) const override;
  std::string mor_name(MorId f) const override;
  std::optional<ObjId> obj_by_name(const std::string& n) const override;
  std::optional<MorId> mor_by_name(const std::string& n) const override;
  ObjId source(MorId f) const override;
  ObjId target(MorId f) const override;
  MorId identity(ObjId a) override;
  MorId compose(MorId g, MorId f) override;
  MorId restriction(MorId f) override;
  Verdict leq(MorId f, MorId g) override;
  Verdict total(MorId f) override;
  CommaCell comma(MorId f, MorId g) override;
  MorId comma_pair(MorId f, MorId g, MorId phi, MorId psi) override;
  std::pair<MorId, MorId> split_restriction(MorId f) override;
  ObjId tensor_obj(ObjId a, ObjId b) override;
  MorId tensor_mor(MorId f, MorId g) override;
  MorId diagonal(ObjId a) override;
  MorId codiagonal(ObjId a) override;

 private:
  ObjId intern_obj(const std::string& name, FinSet carrier);
  MorId intern_mor(const std::string& name, ObjId src, ObjId dst, FinPMap pm);

  struct ObjRec {
    std::string name;
    FinSet carrier;
    bool declared = false;
  };
  struct MorRec {
    std::string name;
    ObjId src = -1, dst = -1;
    FinPMap pm;
    bool declared = false;
  };
  std::vector<ObjRec> objs_;
  std::vector<MorRec> mors_;
  std::map<std::string, ObjId> obj_names_;
  std::map<std::string, MorId> mor_names_;
  std::map<std::tuple<ObjId, ObjId, std::map<std::string, std::string>>, MorId> mor_vals_;
  std::map<std::pair<MorId, MorId>, CommaCell> comma_cache_;
  std::map<MorId, std::pair<MorId, MorId>> split_cache_;
};

// Free base: contexts and term tuples over an equational theory of actions.
// Judgements may come back Unknown; ids are interned by printed form.
class FreeBase : public BaseOracle {
 public:
  FreeBase(Theory th, LogicMode mode, Budget budget = {});

  FreeCat& category() { return cat_; }
  ObjId add_object(const std::string& name, CtxObject o);
  MorId add_morphism(const std::string& name, CtxMorphism m);
  const CtxObject& ctx_object(ObjId a) const;
  const CtxMorphism& ctx_morphism(MorId f) const;

  std::vector<ObjId> objects() const override;
  std::vector<MorId> generators() const override;
  std::string obj_name(ObjId a) const override;
  std::string mor_name(MorId f) const override;
  std::optional<ObjId> obj_by_name(const std::string& n) const override;
  std::optional<MorId> mor_by_name(const std::string& n) const override;
  ObjId source(MorId f) const override;
  ObjId target(MorId f) const override;
  MorId identity(ObjId a) override;
  MorId compose(MorId g, MorId f) override;
  MorId restriction(MorId f) override;
  Verdict leq(MorId f, MorId g) override;
  Verdict total(MorId f) override;
  CommaCell comma(MorId f, MorId g) override;
  MorId comma_pair(MorId f, MorId g, MorId phi, MorId psi) override;
  std::pair<MorId, MorId> split_restriction(MorId f) override;
  ObjId tensor_obj(ObjId a, ObjId b) override;
  MorId tensor_mor(MorId f, MorId g) override;
  MorId diagonal(ObjId a) override;
  MorId codiagonal(ObjId a) override;

 private:
  ObjId intern_obj(const std::string& name, CtxObject o);
  MorId intern_mor(const std::string& name, CtxMorphism m);

  FreeCat cat_;
  struct ObjRec {
    std::string name;
    CtxObject obj;
    bool declared = false;
  };
  struct MorRec {
    std::string name;
    CtxMorphism mor;
    ObjId src = -1, dst = -1;
    bool declared = false;
  };
  std::vector<ObjRec> objs_;
  std::vector<MorRec> mors_;
  std::map<std::string, ObjId> obj_names_;   // declared names
  std::map<std::string, MorId> mor_names_;   // declared names
  std::map<std::string, ObjId> obj_prints_;  // printed form -> id
  std::map<std::string, MorId> mor_prints_;
  std::map<std::pair<MorId, MorId>, CommaCell> comma_cache_;
  std::map<MorId, std::pair<MorId, MorId>> split_cache_;
};

// Formulas of the typed sequent calculus. Star(f, p) pulls p back along f;
// Coprod(f, p) and Prod(f, p) quantify along f.
struct FibFormula;
using FibPtr = std::shared_ptr<const FibFormula>;

struct FibFormula {
  enum class Kind { Atom, Top, Bot, Neg, And, Or, Star, Coprod, Prod };

  Kind kind;
  ObjId type = -1;   // object the formula lives over
  std::string atom;  // Atom
  MorId mor = -1;    // Star / Coprod / Prod
  FibPtr a, b;

  static FibPtr mk_atom(std::string name, ObjId at);
  static FibPtr top(ObjId at);
  static FibPtr bot(ObjId at);
  static FibPtr neg(FibPtr p);
  static FibPtr conj(FibPtr p, FibPtr q);
  static FibPtr disj(FibPtr p, FibPtr q);
  // star: p over target(f), result over source(f)
  static FibPtr star(const BaseOracle& base, MorId f, FibPtr p);
  // coprod/prod: p over source(f), result over target(f)
  static FibPtr coprod(const BaseOracle& base, MorId f, FibPtr p);
  static FibPtr prod(const BaseOracle& base, MorId f, FibPtr p);
};

bool fib_equal(const FibPtr& x, const FibPtr& y);
// pullback along a 1-cell is transparent; connectives add one
int formula_complexity(const FibPtr& p);
std::string print_fib(const BaseOracle& base, const FibPtr& p);

struct Sequent {
  ObjId type = -1;
  std::vector<FibPtr> left, right;
};

bool sequent_equal(const Sequent& s, const Sequent& t);
std::string print_sequent(const BaseOracle& base, const Sequent& s);

// Multiset helpers (contexts are multisets).
bool fib_mset_eq(const std::vector<FibPtr>& xs, const std::vector<FibPtr>& ys);
// remove one occurrence; nullopt if absent
std::optional<std::vector<FibPtr>> fib_remove(const std::vector<FibPtr>& xs,
                                              const FibPtr& p);
int fib_count(const std::vector<FibPtr>& xs, const FibPtr& p);

}  // namespace alk

#endif
