#include "mgk/effectivity.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "mgk/errors.hpp"
#include "mgk/random.hpp"

namespace mgk {

namespace {

// Thresholds are tabulated over all unions of atoms.
constexpr std::size_t kMaxCharAtoms = 12;

Rational clamp01(const Rational& v) {
  if (v < 0) return Rational(0);
  if (v > 1) return Rational(1);
  return v;
}

// Sorted candidate thresholds with midpoints between consecutive values.
std::vector<Rational> with_midpoints(std::set<Rational> values) {
  values.insert(Rational(0));
  values.insert(Rational(1));
  std::vector<Rational> sorted(values.begin(), values.end());
  std::vector<Rational> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out.push_back(sorted[i]);
    if (i + 1 < sorted.size()) out.push_back(Rational((sorted[i] + sorted[i + 1]) / 2));
  }
  return out;
}

}  // namespace

Portfolio::Portfolio(Kind kind, std::vector<FinMeasure> measures) : kind_(kind), measures_(std::move(measures)) {}

Portfolio Portfolio::kernel_generated(FinMeasure mu) { return Portfolio(Kind::kernel, {std::move(mu)}); }

Portfolio Portfolio::finitely_generated(std::vector<FinMeasure> measures) {
  if (measures.empty()) throw InputError("finitely generated portfolio needs at least one measure");
  for (const auto& m : measures) {
    if (!same_space(m.space(), measures.front().space())) throw InputError("portfolio measures live on different spaces");
  }
  return Portfolio(Kind::generators, std::move(measures));
}

bool Portfolio::contains(const LinPred& h) const {
  return std::all_of(measures_.begin(), measures_.end(), [&](const FinMeasure& mu) { return h(mu); });
}

Rational Portfolio::min_value(const LinPred& h) const {
  Rational best = h.lhs(measures_.front());
  for (std::size_t i = 1; i < measures_.size(); ++i) {
    Rational v = h.lhs(measures_[i]);
    if (v < best) best = v;
  }
  return best;
}

bool Portfolio::operator==(const Portfolio& other) const {
  return kind_ == other.kind_ && measures_ == other.measures_;
}

EffectivityFunction::EffectivityFunction(SpaceRef space, std::vector<Portfolio> portfolios)
    : space_(std::move(space)), portfolios_(std::move(portfolios)) {
  if (portfolios_.size() != space_->size()) throw InputError("effectivity function needs one portfolio per state");
  for (std::size_t s = 0; s < portfolios_.size(); ++s) {
    for (const auto& mu : portfolios_[s].measures()) {
      if (!same_space(mu.space(), space_)) {
        throw InputError("portfolio of state " + space_->label(s) + " lives on another space");
      }
    }
    const std::size_t rep = lowest(space_->atoms().block_containing(s));
    if (!(portfolios_[s] == portfolios_[rep])) {
      throw InputError("portfolios differ inside the atom of state " + space_->label(s));
    }
  }
}

EffectivityFunction eff_from_kernel(const MarkovKernel& k) {
  if (!same_space(k.dom(), k.cod())) throw InputError("effectivity function needs a kernel X ~> X");
  std::vector<Portfolio> out;
  out.reserve(k.dom()->size());
  for (const auto& row : k.rows()) out.push_back(Portfolio::kernel_generated(row));
  return {k.dom(), std::move(out)};
}

EffectivityFunction eff_from_transition(const TransitionSystem& ts) {
  auto space = share(FinMeasurableSpace::discrete(ts.states));
  std::vector<Portfolio> out;
  out.reserve(ts.size());
  for (std::size_t s = 0; s < ts.size(); ++s) {
    if (ts.succ.at(s) == 0) throw InputError("state " + ts.states[s] + " has no successor");
    std::vector<FinMeasure> gens;
    for_each_member(ts.succ[s], [&](std::size_t t) { gens.push_back(dirac(space, t)); });
    out.push_back(Portfolio::finitely_generated(std::move(gens)));
  }
  return {space, std::move(out)};
}

std::vector<TCell> t_measurability_report(const EffectivityFunction& eff, const LinearFamily& family) {
  const auto& space = eff.space();
  if (family.coefficients.size() != space->atom_count()) {
    throw UnsupportedError("linear family needs one coefficient per atom");
  }
  std::vector<TCell> cells;
  for (std::size_t k = 0; k < space->atom_count(); ++k) {
    const StateSet atom = space->atom(k);
    LinPred h{space, family.coefficients, Rational(0), family.strict};
    // H_q in P(s) iff v >= q (resp. v > q), v the smallest generator value.
    const Rational v = eff.at(lowest(atom)).min_value(h);
    QInterval range;
    if (family.strict) {
      range = v > 0 ? QInterval::down_open(v) : QInterval::empty();
    } else {
      range = v >= 0 ? QInterval::down_closed(v) : QInterval::empty();
    }
    cells.push_back({atom, range});
  }
  return cells;
}

CharacteristicRelation::CharacteristicRelation(SpaceRef space, std::vector<Rational> thresholds)
    : space_(std::move(space)), thresholds_(std::move(thresholds)) {
  if (space_->atom_count() > kMaxCharAtoms) {
    throw UnsupportedError("characteristic relations support at most " + std::to_string(kMaxCharAtoms) + " atoms");
  }
  if (thresholds_.size() != (std::size_t{1} << space_->atom_count())) {
    throw InputError("characteristic relation needs one threshold per measurable set");
  }
  for (const auto& t : thresholds_) {
    if (t < 0 || t > 1) throw InputError("threshold " + to_string(t) + " outside [0,1]");
  }
}

const Rational& CharacteristicRelation::threshold(StateSet a) const {
  if (!space_->is_measurable(a)) throw InputError("set " + space_->format(a) + " is not measurable");
  return thresholds_[space_->atoms().block_mask_of(a)];
}

void CharacteristicRelation::set_threshold(StateSet a, Rational t) {
  if (!space_->is_measurable(a)) throw InputError("set " + space_->format(a) + " is not measurable");
  if (t < 0 || t > 1) throw InputError("threshold " + to_string(t) + " outside [0,1]");
  thresholds_[space_->atoms().block_mask_of(a)] = std::move(t);
}

CharacteristicRelation char_rel_of(const EffectivityFunction& eff, std::size_t s) {
  const auto& space = eff.space();
  if (space->atom_count() > kMaxCharAtoms) {
    throw UnsupportedError("characteristic relations support at most " + std::to_string(kMaxCharAtoms) + " atoms");
  }
  const std::size_t sets = std::size_t{1} << space->atom_count();
  std::vector<Rational> t(sets);
  for (std::size_t mask = 0; mask < sets; ++mask) {
    // beta(A, r) in P(s) iff r <= min over generators of nu(A).
    t[mask] = clamp01(eff.at(s).min_value(beta(space, space->atoms().union_of(mask), Rational(0))));
  }
  return {space, std::move(t)};
}

std::string RuleReport::format() const {
  if (violations.empty()) return "all rules pass";
  std::ostringstream out;
  for (const auto& v : violations) out << "rule " << v.rule << ": " << v.witness << '\n';
  return out.str();
}

RuleReport validate_char_rel(const CharacteristicRelation& r) {
  const auto& space = r.space();
  const auto& t = r.thresholds();
  const std::size_t sets = t.size();
  const std::uint64_t all = sets - 1;
  auto name = [&](std::uint64_t mask) { return space->format(space->atoms().union_of(mask)); };
  auto th = [&](std::uint64_t mask) { return "t" + name(mask) + " = " + to_string(t[mask]); };
  RuleReport report;
  auto add = [&](int rule, std::string w) { report.violations.push_back({rule, std::move(w)}); };

  // 1: monotone in the set.
  for (std::uint64_t a = 0; a < sets; ++a) {
    for (std::uint64_t b = 0; b < sets; ++b) {
      if ((a & ~b) == 0 && t[a] > t[b]) {
        add(1, th(a) + " exceeds " + th(b));
        goto rule3;
      }
    }
  }
  // 2: downward closed in r; holds for closed thresholds by construction.
rule3:
  for (std::uint64_t a = 0; a < sets; ++a) {
    for (std::uint64_t b = a; b < sets; ++b) {
      if (t[a | b] > t[a] + t[b]) {
        add(3, th(a | b) + " exceeds " + th(a) + " plus " + th(b));
        goto rule4;
      }
    }
  }
rule4:
  for (std::uint64_t a = 0; a < sets; ++a) {
    for (std::uint64_t b = 0; b < sets; ++b) {
      const Rational split = t[a & b] + t[a & ~b & all];
      if (std::min(split, Rational(1)) > t[a]) {
        add(4, th(a & b) + " and " + th(a & ~b & all) + " force more than " + th(a));
        goto rule5;
      }
    }
  }
rule5:
  for (std::uint64_t a = 0; a < sets; ++a) {
    if (t[a] + t[all & ~a] > 1) {
      add(5, th(a) + " and " + th(all & ~a) + " sum above 1");
      break;
    }
  }
  if (t[0] != 0) add(6, th(0));
  // 7: descending chains stabilize on a finite algebra.
  if (t[all] != 1) add(8, th(all));
  return report;
}

FinMeasure measure_from_char(const CharacteristicRelation& r) {
  const RuleReport report = validate_char_rel(r);
  if (!report.passed()) throw PreconditionError("characteristic relation fails validation:\n" + report.format());
  const auto& space = r.space();
  std::vector<Rational> weights;
  for (std::size_t k = 0; k < space->atom_count(); ++k) weights.push_back(r.threshold(space->atom(k)));
  const auto& t = r.thresholds();
  for (std::uint64_t mask = 0; mask < t.size(); ++mask) {
    Rational sum(0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if ((mask >> k) & 1U) sum += weights[k];
    }
    if (sum != t[mask]) {
      throw PreconditionError("thresholds are not additive on " + space->format(space->atoms().union_of(mask)) +
                              ": " + to_string(t[mask]) + " vs atom sum " + to_string(sum));
    }
  }
  return FinMeasure(space, std::move(weights));
}

SatisfyImplement check_satisfy_implement(const Portfolio& q, const CharacteristicRelation& r, const FinMeasure& mu) {
  const auto& space = r.space();
  if (!same_space(space, mu.space())) throw InputError("measure and relation live on different spaces");
  SatisfyImplement out{true, true};
  for (std::uint64_t mask = 0; mask < r.thresholds().size(); ++mask) {
    const StateSet a = space->atoms().union_of(mask);
    std::set<Rational> values{r.thresholds()[mask], mu(a)};
    for (const auto& nu : q.measures()) values.insert(nu(a));
    for (const auto& v : with_midpoints(std::move(values))) {
      if (v < 0 || v > 1) continue;
      const bool in_q = q.contains(beta(space, a, v));
      if (r.contains(v, a) != in_q) out.satisfies = false;
      if ((mu(a) >= v) != in_q) out.implements = false;
    }
  }
  return out;
}

KernelRecovery kernel_from_eff(const EffectivityFunction& eff, std::uint64_t seed) {
  const auto& space = eff.space();
  KernelRecovery out;
  std::vector<FinMeasure> rows;
  Rng rng(seed);
  for (std::size_t s = 0; s < space->size(); ++s) {
    const std::string where = "state " + space->label(s) + ": ";
    const CharacteristicRelation r = char_rel_of(eff, s);
    const RuleReport report = validate_char_rel(r);
    if (!report.passed()) {
      const auto& v = report.violations.front();
      out.diagnostics.push_back(where + "rule " + std::to_string(v.rule) + " fails, " + v.witness);
      continue;
    }
    std::optional<FinMeasure> mu;
    try {
      mu.emplace(measure_from_char(r));
    } catch (const PreconditionError& e) {
      out.diagnostics.push_back(where + e.what());
      continue;
    }
    const Portfolio candidate = Portfolio::kernel_generated(*mu);
    const Portfolio& given = eff.at(s);
    std::vector<LinPred> probes;
    for (std::uint64_t mask = 0; mask < r.thresholds().size(); ++mask) {
      const StateSet a = space->atoms().union_of(mask);
      std::set<Rational> values{(*mu)(a)};
      for (const auto& nu : given.measures()) values.insert(nu(a));
      for (const auto& v : with_midpoints(std::move(values))) {
        probes.push_back(beta(space, a, v));
        probes.push_back(beta(space, a, v, true));
      }
    }
    // Separating half-spaces: keep mu, exclude a differing generator.
    for (const auto& nu : given.measures()) {
      if (nu == *mu) continue;
      std::vector<Rational> c;
      Rational bound(0);
      for (std::size_t k = 0; k < space->atom_count(); ++k) {
        c.push_back(Rational(mu->weight(k) - nu.weight(k)));
        bound += c.back() * mu->weight(k);
      }
      probes.push_back({space, std::move(c), bound, false});
    }
    for (int i = 0; i < 32; ++i) {
      std::vector<Rational> c;
      for (std::size_t k = 0; k < space->atom_count(); ++k) {
        c.push_back(Rational(static_cast<long>(rng.between(0, 16)) - 8, 4));
      }
      probes.push_back({space, std::move(c), Rational(static_cast<long>(rng.between(0, 16)) - 8, 8), rng.coin()});
    }
    bool ok = true;
    for (const auto& h : probes) {
      if (candidate.contains(h) != given.contains(h)) {
        out.diagnostics.push_back(where + "membership differs on " + h.format() + " (recovered measure " +
                                  (candidate.contains(h) ? "accepts" : "rejects") + " it)");
        ok = false;
        break;
      }
    }
    if (ok) rows.push_back(*mu);
  }
  if (out.diagnostics.empty()) out.kernel.emplace(space, space, std::move(rows));
  return out;
}

}  // namespace mgk
