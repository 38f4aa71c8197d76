#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mgk/rational.hpp"
#include "mgk/space.hpp"

namespace mgk {

/// Probability measure on a finite measurable space, stored as atom weights.
class FinMeasure {
 public:
  /// Weights indexed by atom; must be nonnegative and sum to exactly 1.
  FinMeasure(SpaceRef space, std::vector<Rational> atom_weights);

  /// Per-state weights, summed into atoms.
  static FinMeasure from_state_weights(SpaceRef space, const std::vector<Rational>& state_weights);

  const SpaceRef& space() const noexcept { return space_; }
  const std::vector<Rational>& weights() const noexcept { return weights_; }
  const Rational& weight(std::size_t atom) const { return weights_.at(atom); }

  /// Value on a measurable set; InputError otherwise.
  Rational operator()(StateSet a) const;

  /// "{atom: w, ...}" with atoms printed as label sets.
  std::string format() const;

  bool operator==(const FinMeasure& other) const;

 private:
  SpaceRef space_;
  std::vector<Rational> weights_;
};

/// Per-atom rational values; constant on atoms by construction.
class BoundedFunction {
 public:
  BoundedFunction(SpaceRef space, std::vector<Rational> atom_values);

  static BoundedFunction constant(SpaceRef space, const Rational& value);
  /// chi_A; InputError unless A is measurable.
  static BoundedFunction indicator(SpaceRef space, StateSet a);

  const SpaceRef& space() const noexcept { return space_; }
  const std::vector<Rational>& values() const noexcept { return values_; }
  const Rational& at_state(std::size_t x) const { return values_.at(space_->atom_of(x)); }

  BoundedFunction operator+(const BoundedFunction& other) const;
  BoundedFunction scaled(const Rational& c) const;
  bool operator==(const BoundedFunction& other) const;

 private:
  SpaceRef space_;
  std::vector<Rational> values_;
};

/// {mu : sum_k coeff[k] * mu(atom k) >= bound}, or > when strict.
struct LinPred {
  SpaceRef space;
  std::vector<Rational> coefficients;
  Rational bound;
  bool strict = false;

  bool operator()(const FinMeasure& mu) const;
  Rational lhs(const FinMeasure& mu) const;
  std::string format() const;
};

/// beta(A, q): measures giving A at least q (more than q when strict).
LinPred beta(const SpaceRef& space, StateSet a, const Rational& q, bool strict = false);

FinMeasure dirac(const SpaceRef& space, std::size_t x);

/// Stochastic relation dom ~> cod, one measure per dom state.
class MarkovKernel {
 public:
  /// Rows must live on `cod` and be constant across each dom atom.
  MarkovKernel(SpaceRef dom, SpaceRef cod, std::vector<FinMeasure> rows);

  const SpaceRef& dom() const noexcept { return dom_; }
  const SpaceRef& cod() const noexcept { return cod_; }
  const std::vector<FinMeasure>& rows() const noexcept { return rows_; }
  const FinMeasure& row(std::size_t x) const { return rows_.at(x); }
  Rational operator()(std::size_t x, StateSet b) const { return rows_.at(x)(b); }

  /// K*(mu)(B) = integral of K(x)(B) d mu.
  FinMeasure lift(const FinMeasure& mu) const;

  bool operator==(const MarkovKernel& other) const;

 private:
  SpaceRef dom_;
  SpaceRef cod_;
  std::vector<FinMeasure> rows_;
};

MarkovKernel dirac_kernel(const SpaceRef& space);
/// x |-> dirac(f(x)); f must be measurable.
MarkovKernel deterministic_kernel(const MeasurableMap& f);

/// B |-> mu(f^{-1} B). Requires f measurable and mu on dom(f).
FinMeasure image_measure(const MeasurableMap& f, const FinMeasure& mu);

Rational integrate(const BoundedFunction& f, const FinMeasure& mu);

std::function<FinMeasure(const FinMeasure&)> lift_kernel(const MarkovKernel& k);

struct TransportResult {
  Rational lhs;
  Rational rhs;
  /// x |-> integral of f d K(x), a bounded function on dom.
  BoundedFunction inner;
};

TransportResult integral_transport(const BoundedFunction& f, const MarkovKernel& k, const FinMeasure& mu);

/// (L * K)(x)(C) = integral of L(y)(C) K(x)(dy). Rows are computed in parallel.
MarkovKernel kleisli_compose(const MarkovKernel& l, const MarkovKernel& k);
/// Single-threaded reference for kleisli_compose.
MarkovKernel kleisli_compose_serial(const MarkovKernel& l, const MarkovKernel& k);

}  // namespace mgk
