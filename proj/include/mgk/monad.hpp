#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mgk/errors.hpp"
#include "mgk/random.hpp"
#include "mgk/rational.hpp"
#include "mgk/state_set.hpp"

namespace mgk {

/// Upper-closed family of subsets of {0..n-1}, stored by its minimal members.
class UpperClosedFamily {
 public:
  UpperClosedFamily() = default;
  /// Any generating list; it is reduced to its minimal members.
  UpperClosedFamily(std::size_t base, std::vector<StateSet> generators);

  static UpperClosedFamily empty(std::size_t base) { return {base, {}}; }
  /// Every subset (generated by the empty set).
  static UpperClosedFamily everything(std::size_t base) { return {base, {0}}; }
  static UpperClosedFamily principal(std::size_t base, StateSet g) { return {base, {g}}; }

  std::size_t base_size() const noexcept { return base_; }
  const std::vector<StateSet>& generators() const noexcept { return gens_; }
  bool contains(StateSet h) const;

  UpperClosedFamily intersect(const UpperClosedFamily& other) const;
  UpperClosedFamily unite(const UpperClosedFamily& other) const;

  /// Bitmask over all 2^n subsets; n <= 6.
  std::uint64_t extension() const;
  static UpperClosedFamily from_extension(std::size_t base, std::uint64_t ext);
  static bool is_upper_closed_extension(std::size_t base, std::uint64_t ext);

  bool operator==(const UpperClosedFamily& other) const = default;

 private:
  std::size_t base_ = 0;
  std::vector<StateSet> gens_;
};

/// "up{{0, 1}, {2}}" using index labels, or the given labels.
std::string format_family(const UpperClosedFamily& f, const std::vector<std::string>& labels = {});

// Each instance supplies T on finite carriers {0..n-1}: values, eta, lift, the
// direct definition of the functor action, and random values for law checks.

struct PowersetMonad {
  using Value = StateSet;
  static constexpr std::string_view name = "powerset";

  static Value eta(std::size_t n, std::size_t x);
  /// f*(A) = union of f(x) over x in A.
  static Value lift(const std::vector<Value>& f, std::size_t target, const Value& a);
  /// Direct image.
  static Value fmap_direct(const std::vector<std::size_t>& f, std::size_t target, const Value& a);
  static Value random_value(Rng& rng, std::size_t n);
  static std::string describe(const Value& v, std::size_t n);
};

struct UpperClosedMonad {
  using Value = UpperClosedFamily;
  static constexpr std::string_view name = "upper_closed";

  /// {A : x in A}.
  static Value eta(std::size_t n, std::size_t x);
  /// f*(C) = {B : {x : B in f(x)} in C}, computed on generators.
  static Value lift(const std::vector<Value>& f, std::size_t target, const Value& c);
  /// {H : f^{-1} H in C}.
  static Value fmap_direct(const std::vector<std::size_t>& f, std::size_t target, const Value& c);
  static Value random_value(Rng& rng, std::size_t n);
  static std::string describe(const Value& v, std::size_t n);

  /// Literal set-builder definition of lift over explicit families; n, target <= 4.
  static Value lift_extensional(const std::vector<Value>& f, std::size_t target, const Value& c);
};

struct DiscreteProbMonad {
  /// Point weights summing to 1.
  using Value = std::vector<Rational>;
  static constexpr std::string_view name = "discrete_prob";

  static Value eta(std::size_t n, std::size_t x);
  /// f*(p)(y) = sum_x p(x) f(x)(y).
  static Value lift(const std::vector<Value>& f, std::size_t target, const Value& p);
  /// D(f)(p)(y) = sum of p(x) over f(x) = y.
  static Value fmap_direct(const std::vector<std::size_t>& f, std::size_t target, const Value& p);
  static Value random_value(Rng& rng, std::size_t n);
  static std::string describe(const Value& v, std::size_t n);
};

/// A Kleisli morphism {0..from-1} -> T{0..to-1}.
template <class M>
struct KleisliArrow {
  std::size_t from = 0;
  std::size_t to = 0;
  std::vector<typename M::Value> images;

  bool operator==(const KleisliArrow&) const = default;
};

template <class M>
KleisliArrow<M> eta_arrow(std::size_t n) {
  KleisliArrow<M> a{n, n, {}};
  for (std::size_t x = 0; x < n; ++x) a.images.push_back(M::eta(n, x));
  return a;
}

template <class M>
typename M::Value lift(const KleisliArrow<M>& f, const typename M::Value& v) {
  return M::lift(f.images, f.to, v);
}

/// g * f := g^* o f.
template <class M>
KleisliArrow<M> kleisli_compose_generic(const KleisliArrow<M>& g, const KleisliArrow<M>& f) {
  if (f.to != g.from) {
    throw InputError("Kleisli arrows do not compose: " + std::to_string(f.to) + " vs " + std::to_string(g.from));
  }
  KleisliArrow<M> out{f.from, g.to, {}};
  for (const auto& v : f.images) out.images.push_back(lift(g, v));
  return out;
}

/// T f := (eta o f)^*.
template <class M>
typename M::Value functor_action(const std::vector<std::size_t>& f, std::size_t target, const typename M::Value& v) {
  std::vector<typename M::Value> images;
  for (std::size_t y : f) images.push_back(M::eta(target, y));
  return M::lift(images, target, v);
}

template <class M>
KleisliArrow<M> random_arrow(Rng& rng, std::size_t from, std::size_t to) {
  KleisliArrow<M> a{from, to, {}};
  for (std::size_t x = 0; x < from; ++x) a.images.push_back(M::random_value(rng, to));
  return a;
}

struct LawReport {
  std::string monad;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  /// One verbatim counterexample per failed check.
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
  std::string format() const;
};

/// Checks eta* = id, f* o eta = f and g* o f* = (g* o f)* on `trials` random
/// carriers of size 1..max_size with random arrows.
template <class M>
LawReport check_monad_laws(std::size_t trials, std::uint64_t seed, std::size_t max_size = 5) {
  LawReport report{std::string(M::name), trials, seed, {}};
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t nx = rng.between(1, max_size);
    const std::size_t ny = rng.between(1, max_size);
    const std::size_t nz = rng.between(1, max_size);
    const auto v = M::random_value(rng, nx);
    const auto f = random_arrow<M>(rng, nx, ny);
    const auto g = random_arrow<M>(rng, ny, nz);
    const std::string where = "trial " + std::to_string(t) + ": ";

    if (!(lift(eta_arrow<M>(nx), v) == v)) {
      report.failures.push_back(where + "eta* != id at " + M::describe(v, nx));
    }
    for (std::size_t x = 0; x < nx; ++x) {
      if (!(lift(f, M::eta(nx, x)) == f.images[x])) {
        report.failures.push_back(where + "f* o eta != f at point " + std::to_string(x) + ": got " +
                                  M::describe(lift(f, M::eta(nx, x)), ny) + ", want " +
                                  M::describe(f.images[x], ny));
      }
    }
    const auto lhs = lift(g, lift(f, v));
    const auto rhs = lift(kleisli_compose_generic(g, f), v);
    if (!(lhs == rhs)) {
      report.failures.push_back(where + "g* o f* != (g* o f)* at " + M::describe(v, nx) + ": " +
                                M::describe(lhs, nz) + " vs " + M::describe(rhs, nz));
    }
  }
  return report;
}

/// By instance name; InputError for an unknown name.
LawReport check_monad_laws(std::string_view monad, std::size_t trials, std::uint64_t seed);

}  // namespace mgk
