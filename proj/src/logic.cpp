#include "mgk/logic.hpp"

#include <algorithm>
#include <set>

#include "mgk/detail/cursor.hpp"
#include "mgk/errors.hpp"

namespace mgk {

// ------------------------------------------------------------------ syntax

FormulaPtr make_top() { return std::make_shared<const Formula>(); }

FormulaPtr make_prim(std::string name) {
  return std::make_shared<const Formula>(Formula{Formula::Kind::prim, std::move(name), Rational(0), nullptr, nullptr});
}

FormulaPtr make_and(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<const Formula>(Formula{Formula::Kind::conj, "", Rational(0), std::move(a), std::move(b)});
}

FormulaPtr make_diamond(std::string action, Rational q, FormulaPtr phi) {
  if (q < 0 || q > 1) throw InputError("threshold " + to_string(q) + " outside [0,1]");
  return std::make_shared<const Formula>(
      Formula{Formula::Kind::diamond, std::move(action), std::move(q), std::move(phi), nullptr});
}

namespace {

FormulaPtr parse_conj(detail::Cursor& c);

FormulaPtr parse_unary(detail::Cursor& c) {
  if (c.consume("(")) {
    FormulaPtr inner = parse_conj(c);
    c.expect(")");
    return inner;
  }
  if (c.consume("<")) {
    std::string action = c.identifier();
    c.expect(">_");
    Rational q = c.unit_rational();
    return make_diamond(std::move(action), std::move(q), parse_unary(c));
  }
  std::string id = c.identifier();
  if (id == "T") return make_top();
  return make_prim(std::move(id));
}

FormulaPtr parse_conj(detail::Cursor& c) {
  FormulaPtr out = parse_unary(c);
  while (c.consume("&")) out = make_and(out, parse_unary(c));
  return out;
}

}  // namespace

FormulaPtr parse_formula(std::string_view text) {
  detail::Cursor c(text);
  FormulaPtr out = parse_conj(c);
  if (!c.at_end()) c.fail("unexpected input after formula");
  return out;
}

std::string to_string(const Formula& phi) {
  switch (phi.kind) {
    case Formula::Kind::top:
      return "T";
    case Formula::Kind::prim:
      return phi.name;
    case Formula::Kind::conj: {
      std::string right = to_string(*phi.right);
      if (phi.right->kind == Formula::Kind::conj) right = "(" + right + ")";
      return to_string(*phi.left) + " & " + right;
    }
    case Formula::Kind::diamond: {
      std::string body = to_string(*phi.left);
      if (phi.left->kind == Formula::Kind::conj) body = "(" + body + ")";
      return "<" + phi.name + ">_" + to_string(phi.threshold) + " " + body;
    }
  }
  return "";
}

std::size_t modal_depth(const Formula& phi) {
  switch (phi.kind) {
    case Formula::Kind::conj:
      return std::max(modal_depth(*phi.left), modal_depth(*phi.right));
    case Formula::Kind::diamond:
      return 1 + modal_depth(*phi.left);
    default:
      return 0;
  }
}

// ---------------------------------------------------------------- semantics

void KripkeModel::validate() const {
  if (!space) throw InputError("model without a space");
  for (const auto& [a, k] : kernels) {
    if (!same_space(k.dom(), space) || !same_space(k.cod(), space)) {
      throw InputError("kernel " + a + " is not a kernel on the model space");
    }
  }
  for (const auto& [p, v] : valuations) {
    if (!space->is_measurable(v)) throw InputError("valuation " + p + " is not measurable");
  }
}

namespace {

const MarkovKernel& kernel_for(const KripkeModel& m, const std::string& action) {
  auto it = m.kernels.find(action);
  if (it == m.kernels.end()) throw InputError("unknown action '" + action + "'");
  return it->second;
}

StateSet at_least(const MarkovKernel& k, StateSet u, const Rational& q) {
  StateSet out = 0;
  for (std::size_t x = 0; x < k.dom()->size(); ++x) {
    if (k(x, u) >= q) out |= singleton(x);
  }
  return out;
}

template <bool Parallel>
EquivRelation refine(const KripkeModel& m) {
  const std::size_t n = m.size();
  std::vector<std::vector<bool>> pattern(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (const auto& [p, v] : m.valuations) pattern[x].push_back(contains(v, x));
  }
  Partition current = Partition::from_labels(std::span<const std::vector<bool>>(pattern));
  while (true) {
    using Signature = std::pair<std::size_t, std::vector<Rational>>;
    std::vector<Signature> sig(n);
    const auto compute = [&](std::size_t x) {
      sig[x].first = current.block_of(x);
      for (const auto& [a, k] : m.kernels) {
        for (StateSet b : current.blocks()) sig[x].second.push_back(k(x, b));
      }
    };
    if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t x = 0; x < static_cast<std::ptrdiff_t>(n); ++x) compute(static_cast<std::size_t>(x));
    } else {
      for (std::size_t x = 0; x < n; ++x) compute(x);
    }
    Partition next = Partition::from_labels(std::span<const Signature>(sig));
    if (next.block_count() == current.block_count()) return next;
    current = std::move(next);
  }
}

}  // namespace

StateSet validity_set(const KripkeModel& m, const Formula& phi) {
  switch (phi.kind) {
    case Formula::Kind::top:
      return m.space->full();
    case Formula::Kind::prim: {
      auto it = m.valuations.find(phi.name);
      if (it == m.valuations.end()) throw InputError("unknown primitive '" + phi.name + "'");
      return it->second;
    }
    case Formula::Kind::conj:
      return validity_set(m, *phi.left) & validity_set(m, *phi.right);
    case Formula::Kind::diamond:
      return at_least(kernel_for(m, phi.name), validity_set(m, *phi.left), phi.threshold);
  }
  return 0;
}

EquivRelation equivalence_partition(const KripkeModel& m) { return refine<true>(m); }
EquivRelation equivalence_partition_serial(const KripkeModel& m) { return refine<false>(m); }

std::vector<StateSet> validity_family(const KripkeModel& m) {
  std::set<StateSet> family{m.space->full()};
  for (const auto& [p, v] : m.valuations) family.insert(v);
  bool grew = true;
  while (grew) {
    grew = false;
    const std::vector<StateSet> snapshot(family.begin(), family.end());
    for (StateSet a : snapshot) {
      for (StateSet b : snapshot) grew |= family.insert(a & b).second;
    }
    for (const auto& [a, k] : m.kernels) {
      for (StateSet u : snapshot) {
        // The set {x : K(x)(U) >= q} only changes at the values K(x)(U).
        std::set<Rational> values{Rational(0)};
        for (std::size_t x = 0; x < m.size(); ++x) values.insert(k(x, u));
        for (const Rational& q : values) grew |= family.insert(at_least(k, u, q)).second;
        if (*values.rbegin() < 1) grew |= family.insert(0).second;
      }
    }
  }
  return {family.begin(), family.end()};
}

SmallnessReport check_smallness(const KripkeModel& m) {
  const EquivRelation alpha = equivalence_partition(m);
  SmallnessReport out;
  out.sigma_alpha = m.space->atoms().join(alpha);
  const auto family = validity_family(m);
  out.theta = sigma_close(m.size(), family);
  if (!out.theta.refines(out.sigma_alpha)) {
    throw InvariantViolation("a validity set is not invariant under logical equivalence");
  }
  out.small = out.theta == out.sigma_alpha;
  return out;
}

FactorModel factor_model(const KripkeModel& m) {
  const EquivRelation alpha = equivalence_partition(m);
  FactorResult fr = factor(m.space, alpha);
  KripkeModel out{fr.factor_space, {}, {}};
  for (const auto& [a, k] : m.kernels) {
    CongruenceResult c = check_congruence(alpha, k);
    if (!c.ok) throw InvariantViolation("logical equivalence is not a congruence for " + a + ": " + c.witness);
    std::vector<FinMeasure> rows;
    for (const auto& r : c.factor_kernel->rows()) rows.emplace_back(fr.factor_space, r.weights());
    out.kernels.emplace(a, MarkovKernel(fr.factor_space, fr.factor_space, std::move(rows)));
  }
  for (const auto& [p, v] : m.valuations) out.valuations.emplace(p, fr.rho.image(v));
  return FactorModel{std::move(out), std::move(fr.rho)};
}

Verdict check_kripke_morphism(const MeasurableMap& f, const KripkeModel& m1, const KripkeModel& m2) {
  for (const auto& [a, k] : m1.kernels) {
    auto it = m2.kernels.find(a);
    if (it == m2.kernels.end()) return {false, "action " + a + " missing in the target"};
    if (Verdict v = check_morphism(f, k, it->second); !v) return {false, "action " + a + ": " + v.witness};
  }
  for (const auto& [p, v] : m1.valuations) {
    auto it = m2.valuations.find(p);
    if (it == m2.valuations.end()) return {false, "primitive " + p + " missing in the target"};
    if (f.preimage(it->second) != v) return {false, "valuation of " + p + " is not the preimage"};
  }
  return {};
}

namespace {

void require_same_signature(const KripkeModel& m1, const KripkeModel& m2) {
  auto keys = [](const auto& map) {
    std::vector<std::string> out;
    for (const auto& kv : map) out.push_back(kv.first);
    return out;
  };
  if (keys(m1.kernels) != keys(m2.kernels) || keys(m1.valuations) != keys(m2.valuations)) {
    throw InputError("models declare different actions or primitives");
  }
}

KripkeModel disjoint_union(const KripkeModel& m1, const KripkeModel& m2) {
  const std::size_t n1 = m1.size();
  const std::size_t n = n1 + m2.size();
  if (n > kMaxStates) throw UnsupportedError("disjoint union exceeds 64 states");
  std::vector<std::string> labels;
  for (const auto& l : m1.space->labels()) labels.push_back("1:" + l);
  for (const auto& l : m2.space->labels()) labels.push_back("2:" + l);
  std::vector<StateSet> atoms = m1.space->atoms().blocks();
  for (StateSet b : m2.space->atoms().blocks()) atoms.push_back(b << n1);
  auto space = share(FinMeasurableSpace(std::move(labels), Partition(n, std::move(atoms))));
  const std::size_t a1 = m1.space->atom_count();
  KripkeModel u{space, {}, {}};
  for (const auto& [a, k1] : m1.kernels) {
    const MarkovKernel& k2 = m2.kernels.at(a);
    std::vector<FinMeasure> rows;
    for (std::size_t x = 0; x < n; ++x) {
      std::vector<Rational> w(space->atom_count(), Rational(0));
      const FinMeasure& r = x < n1 ? k1.row(x) : k2.row(x - n1);
      for (std::size_t j = 0; j < r.weights().size(); ++j) w[(x < n1 ? 0 : a1) + j] = r.weight(j);
      rows.emplace_back(space, std::move(w));
    }
    u.kernels.emplace(a, MarkovKernel(space, space, std::move(rows)));
  }
  for (const auto& [p, v] : m1.valuations) u.valuations.emplace(p, v | (m2.valuations.at(p) << n1));
  return u;
}

}  // namespace

bool logically_equivalent(const KripkeModel& m1, const KripkeModel& m2) {
  require_same_signature(m1, m2);
  const EquivRelation joint = equivalence_partition(disjoint_union(m1, m2));
  const StateSet left = full_set(m1.size());
  return std::all_of(joint.blocks().begin(), joint.blocks().end(),
                     [&](StateSet b) { return (b & left) != 0 && (b & ~left) != 0; });
}

std::optional<BehavioralWitness> behavioral_witness(const KripkeModel& m1, const KripkeModel& m2) {
  if (!check_smallness(m1).small) throw PreconditionError("first model is not small");
  if (!check_smallness(m2).small) throw PreconditionError("second model is not small");
  if (!logically_equivalent(m1, m2)) return std::nullopt;
  const std::size_t n1 = m1.size();
  const EquivRelation joint = equivalence_partition(disjoint_union(m1, m2));
  FactorModel f1 = factor_model(m1);
  FactorModel f2 = factor_model(m2);
  std::vector<std::size_t> iso(f1.model.size());
  for (std::size_t c = 0; c < iso.size(); ++c) {
    const std::size_t x = lowest(f1.rho.preimage(singleton(c)));
    const StateSet partners = joint.block_containing(x) >> n1;
    iso[c] = f2.rho(lowest(partners));
  }
  MeasurableMap iso_map(f1.model.space, f2.model.space, iso);
  if (!iso_map.is_surjective() || !iso_map.is_injective()) throw InvariantViolation("Re0 is not a bijection");
  std::vector<std::size_t> inverse(iso.size());
  for (std::size_t c = 0; c < iso.size(); ++c) inverse[iso[c]] = c;
  if (!check_measurable(iso_map) || !check_measurable(MeasurableMap(f2.model.space, f1.model.space, inverse))) {
    throw InvariantViolation("Re0 is not bi-measurable");
  }
  MeasurableMap left = f1.rho.then(iso_map);
  if (Verdict v = check_kripke_morphism(left, m1, f2.model); !v) {
    throw InvariantViolation("left leg of the cospan is not a morphism: " + v.witness);
  }
  if (Verdict v = check_kripke_morphism(f2.rho, m2, f2.model); !v) {
    throw InvariantViolation("right leg of the cospan is not a morphism: " + v.witness);
  }
  return BehavioralWitness{std::move(f2.model), std::move(left), std::move(f2.rho), std::move(iso)};
}

}  // namespace mgk
