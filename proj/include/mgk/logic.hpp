#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mgk/coalgebra.hpp"
#include "mgk/prob.hpp"
#include "mgk/space.hpp"

namespace mgk {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { top, prim, conj, diamond };

  Kind kind = Kind::top;
  /// Primitive name or action name.
  std::string name;
  Rational threshold;
  FormulaPtr left;
  FormulaPtr right;
};

FormulaPtr make_top();
FormulaPtr make_prim(std::string name);
FormulaPtr make_and(FormulaPtr a, FormulaPtr b);
FormulaPtr make_diamond(std::string action, Rational q, FormulaPtr phi);

/// phi := "T" | ident | phi "&" phi | "<" ident ">_" rational phi | "(" phi ")"
FormulaPtr parse_formula(std::string_view text);
std::string to_string(const Formula& phi);
std::size_t modal_depth(const Formula& phi);

struct KripkeModel {
  SpaceRef space;
  std::map<std::string, MarkovKernel> kernels;
  std::map<std::string, StateSet> valuations;

  /// Kernels must be X ~> X on `space`, valuations measurable.
  void validate() const;
  std::size_t size() const { return space->size(); }
};

StateSet validity_set(const KripkeModel& m, const Formula& phi);

/// Logical equivalence by partition refinement. Per-state signatures are
/// computed in parallel.
EquivRelation equivalence_partition(const KripkeModel& m);
EquivRelation equivalence_partition_serial(const KripkeModel& m);

/// Every distinct validity set: closure of {X} and the valuations under
/// intersection and the modal operators at the thresholds where the
/// validity set can change. Sorted.
std::vector<StateSet> validity_family(const KripkeModel& m);

struct SmallnessReport {
  bool small = false;
  Partition sigma_alpha;
  Partition theta;
};

SmallnessReport check_smallness(const KripkeModel& m);

struct FactorModel {
  KripkeModel model;
  MeasurableMap rho;
};

FactorModel factor_model(const KripkeModel& m);

/// Kernel morphism for every action and V1_p = f^{-1} V2_p for every primitive.
Verdict check_kripke_morphism(const MeasurableMap& f, const KripkeModel& m1, const KripkeModel& m2);

struct BehavioralWitness {
  /// Factor of the second model; both legs end here.
  KripkeModel mediator;
  MeasurableMap left;
  MeasurableMap right;
  /// The bijection Re0 from classes of the first model to classes of the second.
  std::vector<std::size_t> iso;
};

/// Both models must be small (PreconditionError naming the model otherwise)
/// and declare the same actions and primitives (InputError). Returns a
/// verified cospan when the models are logically equivalent.
std::optional<BehavioralWitness> behavioral_witness(const KripkeModel& m1, const KripkeModel& m2);

/// Logical equivalence of two models via joint refinement on their disjoint union.
bool logically_equivalent(const KripkeModel& m1, const KripkeModel& m2);

}  // namespace mgk
