#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mgk/coalgebra.hpp"
#include "mgk/interval.hpp"
#include "mgk/prob.hpp"

namespace mgk {

/// An upper-closed family of measure sets, given intensionally: either all
/// sets containing one measure, or all sets containing every listed measure.
class Portfolio {
 public:
  enum class Kind { kernel, generators };

  static Portfolio kernel_generated(FinMeasure mu);
  /// Requires at least one measure.
  static Portfolio finitely_generated(std::vector<FinMeasure> measures);

  Kind kind() const noexcept { return kind_; }
  const std::vector<FinMeasure>& measures() const noexcept { return measures_; }
  /// H in P iff every generating measure lies in H.
  bool contains(const LinPred& h) const;
  /// Smallest value of the predicate's left-hand side over the generators.
  Rational min_value(const LinPred& h) const;

  bool operator==(const Portfolio& other) const;

 private:
  Portfolio(Kind kind, std::vector<FinMeasure> measures);

  Kind kind_;
  std::vector<FinMeasure> measures_;
};

class EffectivityFunction {
 public:
  /// One portfolio per state, constant across atoms.
  EffectivityFunction(SpaceRef space, std::vector<Portfolio> portfolios);

  const SpaceRef& space() const noexcept { return space_; }
  const Portfolio& at(std::size_t s) const { return portfolios_.at(s); }
  const std::vector<Portfolio>& portfolios() const noexcept { return portfolios_; }

 private:
  SpaceRef space_;
  std::vector<Portfolio> portfolios_;
};

EffectivityFunction eff_from_kernel(const MarkovKernel& k);
/// Vertex generators dirac(s') for s' in succ(s); discrete space on the states.
EffectivityFunction eff_from_transition(const TransitionSystem& ts);

/// q-parameterized family H_q = {mu : sum_k c_k mu(atom k) >= q} (or > q).
struct LinearFamily {
  std::vector<Rational> coefficients;
  bool strict = false;
};

struct TCell {
  /// Atom of the state space.
  StateSet states = 0;
  /// {q in [0,1] : H_q in P(s)} for s in `states`.
  QInterval q_range;
};

std::vector<TCell> t_measurability_report(const EffectivityFunction& eff, const LinearFamily& family);

/// Closed thresholds t_A indexed by atom mask: (r, A) in R iff r <= t_A.
class CharacteristicRelation {
 public:
  CharacteristicRelation(SpaceRef space, std::vector<Rational> thresholds);

  const SpaceRef& space() const noexcept { return space_; }
  /// InputError unless `a` is measurable.
  const Rational& threshold(StateSet a) const;
  const std::vector<Rational>& thresholds() const noexcept { return thresholds_; }
  bool contains(const Rational& r, StateSet a) const { return r <= threshold(a); }
  void set_threshold(StateSet a, Rational t);

 private:
  SpaceRef space_;
  std::vector<Rational> thresholds_;
};

/// t_A = largest candidate r with beta(A, r) in P(s).
CharacteristicRelation char_rel_of(const EffectivityFunction& eff, std::size_t s);

struct RuleViolation {
  /// 1..8.
  int rule = 0;
  std::string witness;
};

struct RuleReport {
  std::vector<RuleViolation> violations;

  bool passed() const { return violations.empty(); }
  /// 0 when all rules pass.
  int first_failing_rule() const { return violations.empty() ? 0 : violations.front().rule; }
  std::string format() const;
};

/// Checks the eight rules as threshold inequalities, in rule order.
RuleReport validate_char_rel(const CharacteristicRelation& r);

/// mu_R(A) = t_A as atom weights; PreconditionError with the rule report if
/// validation fails, or if the thresholds are not additive.
FinMeasure measure_from_char(const CharacteristicRelation& r);

struct SatisfyImplement {
  bool satisfies = false;
  bool implements = false;
};

SatisfyImplement check_satisfy_implement(const Portfolio& q, const CharacteristicRelation& r, const FinMeasure& mu);

struct KernelRecovery {
  std::optional<MarkovKernel> kernel;
  /// One line per failing state.
  std::vector<std::string> diagnostics;
};

/// Rebuilds K with P = P_K, or explains per state why none exists.
KernelRecovery kernel_from_eff(const EffectivityFunction& eff, std::uint64_t seed = 1);

}  // namespace mgk
