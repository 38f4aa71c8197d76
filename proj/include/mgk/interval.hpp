#pragma once

#include <string>
#include <vector>

#include "mgk/rational.hpp"
#include "mgk/space.hpp"

namespace mgk {

/// A subinterval of [0,1] with open/closed endpoints; empty intervals are canonical.
class QInterval {
 public:
  QInterval() = default;  // empty
  QInterval(Rational lo, bool lo_closed, Rational hi, bool hi_closed);

  static QInterval empty() { return {}; }
  static QInterval full() { return {Rational(0), true, Rational(1), true}; }
  /// [0, t], clipped to [0,1].
  static QInterval down_closed(const Rational& t);
  /// [0, t), clipped to [0,1].
  static QInterval down_open(const Rational& t);

  bool is_empty() const noexcept { return empty_; }
  const Rational& lo() const noexcept { return lo_; }
  const Rational& hi() const noexcept { return hi_; }
  bool lo_closed() const noexcept { return lo_closed_; }
  bool hi_closed() const noexcept { return hi_closed_; }

  bool contains(const Rational& q) const;
  Rational length() const;
  /// Anchored at 0 (or empty).
  bool is_down_set() const;
  /// Anchored at 1 (or empty).
  bool is_up_set() const;
  /// [0,1] minus this interval; requires an anchored interval.
  QInterval complement() const;

  /// Infimum of [0,1] minus this interval and whether it is attained;
  /// `infinite` when the complement is empty.
  struct Gap {
    bool infinite = false;
    Rational value;
    bool attained = false;
  };
  Gap failure_infimum() const;

  std::string format() const;
  bool operator==(const QInterval& other) const = default;

 private:
  bool empty_ = true;
  Rational lo_;
  bool lo_closed_ = false;
  Rational hi_;
  bool hi_closed_ = false;
};

/// Down-set whose complement has infimum `sum`, attained iff `attained`:
/// q fails iff q >= sum (attained) or q > sum.
QInterval from_failure_sum(const Rational& sum, bool attained);

/// Per-atom membership intervals q |-> {s : q in interval(s)}.
class ThresholdFunction {
 public:
  ThresholdFunction(SpaceRef space, std::vector<QInterval> per_atom, std::vector<bool> approximate = {});

  const SpaceRef& space() const noexcept { return space_; }
  const std::vector<QInterval>& intervals() const noexcept { return intervals_; }
  const QInterval& at_state(std::size_t s) const { return intervals_.at(space_->atom_of(s)); }
  const QInterval& at_atom(std::size_t k) const { return intervals_.at(k); }
  /// Per atom: star iteration stopped before stabilizing; the interval is a lower bound.
  const std::vector<bool>& approximate() const noexcept { return approximate_; }
  bool any_approximate() const;

  StateSet evaluate(const Rational& q) const;
  ThresholdFunction complement() const;

  bool operator==(const ThresholdFunction& other) const;

 private:
  SpaceRef space_;
  std::vector<QInterval> intervals_;
  std::vector<bool> approximate_;
};

}  // namespace mgk
