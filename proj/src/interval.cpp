#include "mgk/interval.hpp"

#include <algorithm>

#include "mgk/errors.hpp"

namespace mgk {

QInterval::QInterval(Rational lo, bool lo_closed, Rational hi, bool hi_closed)
    : lo_(std::move(lo)), lo_closed_(lo_closed), hi_(std::move(hi)), hi_closed_(hi_closed) {
  if (lo_ < 0) {
    lo_ = 0;
    lo_closed_ = true;
  }
  if (hi_ > 1) {
    hi_ = 1;
    hi_closed_ = true;
  }
  empty_ = lo_ > hi_ || (lo_ == hi_ && !(lo_closed_ && hi_closed_));
  if (empty_) *this = QInterval();
}

QInterval QInterval::down_closed(const Rational& t) { return {Rational(0), true, t, true}; }

QInterval QInterval::down_open(const Rational& t) { return {Rational(0), true, t, false}; }

bool QInterval::contains(const Rational& q) const {
  if (empty_) return false;
  const bool above = lo_closed_ ? q >= lo_ : q > lo_;
  const bool below = hi_closed_ ? q <= hi_ : q < hi_;
  return above && below;
}

Rational QInterval::length() const { return empty_ ? Rational(0) : Rational(hi_ - lo_); }

bool QInterval::is_down_set() const { return empty_ || (lo_ == 0 && lo_closed_); }

bool QInterval::is_up_set() const { return empty_ || (hi_ == 1 && hi_closed_); }

QInterval QInterval::complement() const {
  if (empty_) return full();
  if (is_down_set() && is_up_set()) return empty();
  if (is_down_set()) return {hi_, !hi_closed_, Rational(1), true};
  if (is_up_set()) return {Rational(0), true, lo_, !lo_closed_};
  throw InvariantViolation("complement of an interval anchored at neither end: " + format());
}

QInterval::Gap QInterval::failure_infimum() const {
  if (empty_) return {false, Rational(0), true};
  if (is_down_set() && is_up_set()) return {true, Rational(0), false};
  if (!contains(Rational(0))) return {false, Rational(0), true};
  if (!is_down_set()) throw InvariantViolation("interval anchored at neither end: " + format());
  // [0,hi] fails on (hi,1], [0,hi) on [hi,1].
  return {false, hi_, !hi_closed_};
}

std::string QInterval::format() const {
  if (empty_) return "{}";
  return std::string(lo_closed_ ? "[" : "(") + to_string(lo_) + ", " + to_string(hi_) + (hi_closed_ ? "]" : ")");
}

QInterval from_failure_sum(const Rational& sum, bool attained) {
  if (sum > 1) return QInterval::full();
  return attained ? QInterval::down_open(sum) : QInterval::down_closed(sum);
}

ThresholdFunction::ThresholdFunction(SpaceRef space, std::vector<QInterval> per_atom, std::vector<bool> approximate)
    : space_(std::move(space)), intervals_(std::move(per_atom)), approximate_(std::move(approximate)) {
  if (intervals_.size() != space_->atom_count()) throw InputError("threshold function needs one interval per atom");
  if (approximate_.empty()) approximate_.assign(intervals_.size(), false);
  if (approximate_.size() != intervals_.size()) throw InputError("approximation flags need one entry per atom");
}

bool ThresholdFunction::any_approximate() const {
  return std::any_of(approximate_.begin(), approximate_.end(), [](bool b) { return b; });
}

StateSet ThresholdFunction::evaluate(const Rational& q) const {
  StateSet out = 0;
  for (std::size_t k = 0; k < intervals_.size(); ++k) {
    if (intervals_[k].contains(q)) out |= space_->atom(k);
  }
  return out;
}

ThresholdFunction ThresholdFunction::complement() const {
  std::vector<QInterval> c;
  c.reserve(intervals_.size());
  for (const auto& i : intervals_) c.push_back(i.complement());
  return {space_, std::move(c), approximate_};
}

bool ThresholdFunction::operator==(const ThresholdFunction& other) const {
  return same_space(space_, other.space_) && intervals_ == other.intervals_ && approximate_ == other.approximate_;
}

}  // namespace mgk
