// Free partial cartesian category over a signature and theory.
// Objects are variable contexts with a constraint; 1-cells are term
// tuples guarded by a constraint, taken up to provable equality.
#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "alk/entail.hpp"
#include "alk/syntax.hpp"

namespace alk {

// Raised when a requested cell fails its defining entailment outright.
struct ValidityRefuted : std::runtime_error {
  explicit ValidityRefuted(const std::string& m) : std::runtime_error(m) {}
};

// Raised when the entailment backend runs out of budget either way.
struct ValidityUnknown : std::runtime_error {
  explicit ValidityUnknown(const std::string& m) : std::runtime_error(m) {}
};

// Structural misuse: mismatched boundaries, wrong mode, missing data.
struct CategoryError : std::runtime_error {
  explicit CategoryError(const std::string& m) : std::runtime_error(m) {}
};

enum class LogicMode { PV, HPV };

struct CtxObject {
  VarTuple vars;
  HPVPtr constraint;  // imp-free when the ambient mode is PV
};

struct CtxMorphism {
  CtxObject src;
  CtxObject dst;
  std::vector<Term> terms;  // one per dst var, over src vars
  HPVPtr constraint;        // over src vars
  // section stored by split_coreflexive so the retraction is recoverable
  std::shared_ptr<const CtxMorphism> section;
};

// Weak comma object together with its two projection legs.
struct CommaData {
  CtxObject apex;
  CtxMorphism to_source;  // apex -> src(f)
  CtxMorphism to_other;   // apex -> src(g)
  CtxMorphism f, g;       // the cospan the apex was built for
};

bool obj_equal(const CtxObject& a, const CtxObject& b);  // up to renaming
std::string print_object(const CtxObject& o);
std::string print_morphism(const CtxMorphism& m);

class FreeCat {
 public:
  FreeCat(Theory th, LogicMode mode, Budget budget = {});

  const Theory& theory() const { return th_; }
  LogicMode mode() const { return mode_; }

  CtxObject mk_object(VarTuple vars, HPVPtr constraint) const;
  CtxObject unit_object() const;  // empty context, trivial constraint

  // Checks typing and discharges the validity entailment; throws
  // TypeError / ValidityRefuted / ValidityUnknown.
  CtxMorphism mk_morphism(CtxObject src, CtxObject dst, std::vector<Term> terms,
                          HPVPtr constraint) const;

  CtxMorphism identity(const CtxObject& a) const;
  CtxMorphism compose(const CtxMorphism& g, const CtxMorphism& f) const;

  // f <= g as 2-cells (parallel pair required).
  Verdict leq_2cell(const CtxMorphism& f, const CtxMorphism& g) const;
  Verdict eq_morphism(const CtxMorphism& f, const CtxMorphism& g) const;

  CtxObject tensor(const CtxObject& a, const CtxObject& b) const;
  CtxMorphism tensor_mor(const CtxMorphism& f, const CtxMorphism& g) const;
  CtxMorphism symmetry(const CtxObject& a, const CtxObject& b) const;

  CtxMorphism diagonal(const CtxObject& a) const;    // a -> a (x) a
  CtxMorphism codiagonal(const CtxObject& a) const;  // a (x) a -> a
  CtxMorphism bang(const CtxObject& a) const;        // a -> I
  CtxMorphism proj1(const CtxObject& a, const CtxObject& b) const;
  CtxMorphism proj2(const CtxObject& a, const CtxObject& b) const;

  // Binary meet of a parallel pair: codiagonal . (f (x) g) . diagonal.
  CtxMorphism meet(const CtxMorphism& f, const CtxMorphism& g) const;

  CtxMorphism restriction_of(const CtxMorphism& f) const;  // src -> src
  Verdict is_total(const CtxMorphism& f) const;

  // Splits a coreflexive d <= id as d = i . j with j . i = id.
  // Returns (i, j); i remembers j for quasi_inverse.
  std::pair<CtxMorphism, CtxMorphism> split_coreflexive(const CtxMorphism& d) const;
  CtxMorphism quasi_inverse(const CtxMorphism& i) const;

  Verdict is_monic(const CtxMorphism& f) const;

  // Weak comma object of a cospan f : X -> Z <- Y : g. HPV mode only.
  CommaData comma_object(const CtxMorphism& f, const CtxMorphism& g) const;
  // Mediator for phi : W -> X, psi : W -> Y with f.phi <= g.psi.
  CtxMorphism comma_pair(const CommaData& c, const CtxMorphism& phi,
                         const CtxMorphism& psi) const;

 private:
  Verdict entails(const VarTuple& vars, const HPVPtr& hyp, const HPVPtr& goal) const;
  CtxMorphism raw(CtxObject src, CtxObject dst, std::vector<Term> terms,
                  HPVPtr constraint) const;
  void check_object(const CtxObject& o) const;

  Theory th_;
  LogicMode mode_;
  Budget budget_;
};

}  // namespace alk
