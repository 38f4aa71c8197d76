#include "mgk/monad.hpp"

#include <algorithm>

namespace mgk {

// -------------------------------------------------------- UpperClosedFamily

UpperClosedFamily::UpperClosedFamily(std::size_t base, std::vector<StateSet> generators) : base_(base) {
  if (base > kMaxStates) throw InputError("base set too large");
  for (StateSet g : generators) {
    if (!subset_of(g, full_set(base))) throw InputError("generator outside the base set");
  }
  std::sort(generators.begin(), generators.end());
  generators.erase(std::unique(generators.begin(), generators.end()), generators.end());
  for (StateSet g : generators) {
    const bool dominated = std::any_of(generators.begin(), generators.end(),
                                       [&](StateSet h) { return h != g && subset_of(h, g); });
    if (!dominated) gens_.push_back(g);
  }
}

bool UpperClosedFamily::contains(StateSet h) const {
  return std::any_of(gens_.begin(), gens_.end(), [&](StateSet g) { return subset_of(g, h); });
}

UpperClosedFamily UpperClosedFamily::intersect(const UpperClosedFamily& other) const {
  if (other.base_ != base_) throw InputError("families over different base sets");
  std::vector<StateSet> unions;
  unions.reserve(gens_.size() * other.gens_.size());
  for (StateSet a : gens_) {
    for (StateSet b : other.gens_) unions.push_back(a | b);
  }
  return {base_, std::move(unions)};
}

UpperClosedFamily UpperClosedFamily::unite(const UpperClosedFamily& other) const {
  if (other.base_ != base_) throw InputError("families over different base sets");
  std::vector<StateSet> all = gens_;
  all.insert(all.end(), other.gens_.begin(), other.gens_.end());
  return {base_, std::move(all)};
}

std::uint64_t UpperClosedFamily::extension() const {
  if (base_ > 6) throw UnsupportedError("extensional families need a base of at most 6 points");
  std::uint64_t ext = 0;
  for (StateSet h = 0; h <= full_set(base_); ++h) {
    if (contains(h)) ext |= std::uint64_t{1} << h;
  }
  return ext;
}

UpperClosedFamily UpperClosedFamily::from_extension(std::size_t base, std::uint64_t ext) {
  if (base > 6) throw UnsupportedError("extensional families need a base of at most 6 points");
  if (!is_upper_closed_extension(base, ext)) throw InputError("family is not upper closed");
  std::vector<StateSet> members;
  for (StateSet h = 0; h <= full_set(base); ++h) {
    if ((ext >> h) & 1U) members.push_back(h);
  }
  return {base, std::move(members)};
}

bool UpperClosedFamily::is_upper_closed_extension(std::size_t base, std::uint64_t ext) {
  for (StateSet h = 0; h <= full_set(base); ++h) {
    if (((ext >> h) & 1U) == 0) continue;
    for (std::size_t i = 0; i < base; ++i) {
      if (((ext >> (h | singleton(i))) & 1U) == 0) return false;
    }
  }
  return true;
}

std::string format_family(const UpperClosedFamily& f, const std::vector<std::string>& labels) {
  std::string out = "up{";
  bool first_gen = true;
  for (StateSet g : f.generators()) {
    if (!first_gen) out += ", ";
    first_gen = false;
    out += "{";
    bool first = true;
    for_each_member(g, [&](std::size_t i) {
      if (!first) out += ", ";
      first = false;
      out += labels.empty() ? std::to_string(i) : labels.at(i);
    });
    out += "}";
  }
  return out + "}";
}

// --------------------------------------------------------------- powerset

StateSet PowersetMonad::eta(std::size_t, std::size_t x) { return singleton(x); }

StateSet PowersetMonad::lift(const std::vector<StateSet>& f, std::size_t, const StateSet& a) {
  StateSet out = 0;
  for_each_member(a, [&](std::size_t x) { out |= f.at(x); });
  return out;
}

StateSet PowersetMonad::fmap_direct(const std::vector<std::size_t>& f, std::size_t, const StateSet& a) {
  StateSet out = 0;
  for_each_member(a, [&](std::size_t x) { out |= singleton(f.at(x)); });
  return out;
}

StateSet PowersetMonad::random_value(Rng& rng, std::size_t n) { return rng.subset(n); }

std::string PowersetMonad::describe(const StateSet& v, std::size_t n) {
  return FinMeasurableSpace::discrete(index_labels(n)).format(v);
}

// ----------------------------------------------------------- upper closed

UpperClosedFamily UpperClosedMonad::eta(std::size_t n, std::size_t x) {
  return UpperClosedFamily::principal(n, singleton(x));
}

UpperClosedFamily UpperClosedMonad::lift(const std::vector<UpperClosedFamily>& f, std::size_t target,
                                         const UpperClosedFamily& c) {
  // B in f*(C) iff some generator G of C has B in f(x) for every x in G.
  UpperClosedFamily out = UpperClosedFamily::empty(target);
  for (StateSet g : c.generators()) {
    UpperClosedFamily meet = UpperClosedFamily::everything(target);
    for_each_member(g, [&](std::size_t x) { meet = meet.intersect(f.at(x)); });
    out = out.unite(meet);
  }
  return out;
}

UpperClosedFamily UpperClosedMonad::fmap_direct(const std::vector<std::size_t>& f, std::size_t target,
                                                const UpperClosedFamily& c) {
  // f^{-1} H contains G iff H contains f[G].
  std::vector<StateSet> images;
  for (StateSet g : c.generators()) {
    StateSet img = 0;
    for_each_member(g, [&](std::size_t x) { img |= singleton(f.at(x)); });
    images.push_back(img);
  }
  return {target, std::move(images)};
}

UpperClosedFamily UpperClosedMonad::random_value(Rng& rng, std::size_t n) {
  std::vector<StateSet> gens;
  for (std::size_t k = rng.index(4); k > 0; --k) gens.push_back(rng.subset(n));
  return {n, std::move(gens)};
}

std::string UpperClosedMonad::describe(const UpperClosedFamily& v, std::size_t) { return format_family(v); }

UpperClosedFamily UpperClosedMonad::lift_extensional(const std::vector<UpperClosedFamily>& f, std::size_t target,
                                                     const UpperClosedFamily& c) {
  std::uint64_t ext = 0;
  for (StateSet b = 0; b <= full_set(target); ++b) {
    StateSet carriers = 0;
    for (std::size_t x = 0; x < f.size(); ++x) {
      if (((f[x].extension() >> b) & 1U) != 0) carriers |= singleton(x);
    }
    if (((c.extension() >> carriers) & 1U) != 0) ext |= std::uint64_t{1} << b;
  }
  return UpperClosedFamily::from_extension(target, ext);
}

// --------------------------------------------------- discrete probability

std::vector<Rational> DiscreteProbMonad::eta(std::size_t n, std::size_t x) {
  std::vector<Rational> p(n, Rational(0));
  p.at(x) = 1;
  return p;
}

std::vector<Rational> DiscreteProbMonad::lift(const std::vector<Value>& f, std::size_t target, const Value& p) {
  std::vector<Rational> out(target, Rational(0));
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0) continue;
    for (std::size_t y = 0; y < target; ++y) out[y] += p[x] * f.at(x).at(y);
  }
  return out;
}

std::vector<Rational> DiscreteProbMonad::fmap_direct(const std::vector<std::size_t>& f, std::size_t target,
                                                     const Value& p) {
  std::vector<Rational> out(target, Rational(0));
  for (std::size_t x = 0; x < p.size(); ++x) out.at(f.at(x)) += p[x];
  return out;
}

std::vector<Rational> DiscreteProbMonad::random_value(Rng& rng, std::size_t n) {
  const unsigned denominator = 12;
  std::vector<Rational> p(n, Rational(0));
  for (unsigned u = 0; u < denominator; ++u) p[rng.index(n)] += Rational(1, denominator);
  return p;
}

std::string DiscreteProbMonad::describe(const Value& v, std::size_t) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(v[i]);
  }
  return out + ")";
}

// ------------------------------------------------------------------ reports

std::string LawReport::format() const {
  std::string out = "monad " + monad + ": " + std::to_string(trials) + " trials, seed " + std::to_string(seed) +
                    ", " + std::to_string(failures.size()) + " failure(s)\n";
  for (const auto& f : failures) out += "  " + f + "\n";
  return out;
}

LawReport check_monad_laws(std::string_view monad, std::size_t trials, std::uint64_t seed) {
  if (monad == PowersetMonad::name) return check_monad_laws<PowersetMonad>(trials, seed);
  if (monad == UpperClosedMonad::name) return check_monad_laws<UpperClosedMonad>(trials, seed);
  if (monad == DiscreteProbMonad::name) return check_monad_laws<DiscreteProbMonad>(trials, seed);
  throw InputError("unknown monad '" + std::string(monad) + "' (expected powerset, upper_closed or discrete_prob)");
}

}  // namespace mgk
