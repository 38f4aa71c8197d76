#include "mgk/coalgebra.hpp"

#include <algorithm>
#include <deque>

#include "mgk/errors.hpp"

namespace mgk {

namespace {

void check_table(const std::vector<std::size_t>& phi, std::size_t from, std::size_t to) {
  if (phi.size() != from) throw InputError("map is not total on the source carrier");
  for (std::size_t y : phi) {
    if (y >= to) throw InputError("map value outside the target carrier");
  }
}

std::string pair_label(const std::vector<std::string>& left, const std::vector<std::string>& right,
                       std::size_t s, std::size_t t) {
  return "(" + left.at(s) + "," + right.at(t) + ")";
}

std::string describe_set(const std::vector<std::string>& labels, StateSet s) {
  std::string out = "{";
  bool first = true;
  for_each_member(s, [&](std::size_t i) {
    if (!first) out += ", ";
    first = false;
    out += labels.at(i);
  });
  return out + "}";
}

StateSet image_of(const std::vector<std::size_t>& pi, StateSet d) {
  StateSet out = 0;
  for_each_member(d, [&](std::size_t b) { out |= singleton(pi[b]); });
  return out;
}

// Partition of the domain into nonempty preimages of codomain atoms.
Partition preimage_partition(const MeasurableMap& g) {
  std::vector<StateSet> blocks;
  for (StateSet atom : g.cod()->atoms().blocks()) {
    if (StateSet p = g.preimage(atom); p != 0) blocks.push_back(p);
  }
  return Partition(g.dom()->size(), std::move(blocks));
}

SpaceRef product_space(const FinMeasurableSpace& x, const FinMeasurableSpace& y) {
  if (x.size() * y.size() > kMaxStates) throw UnsupportedError("product space exceeds 64 states");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) labels.push_back("(" + x.label(i) + "," + y.label(j) + ")");
  }
  std::vector<std::size_t> atom_label(labels.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) atom_label[i * y.size() + j] = x.atom_of(i) * y.atom_count() + y.atom_of(j);
  }
  return share(FinMeasurableSpace(std::move(labels), Partition::from_labels(std::span<const std::size_t>(atom_label))));
}

// Exact max-flow (Edmonds-Karp) on a dense rational capacity matrix.
Rational max_flow(std::vector<std::vector<Rational>>& residual, std::size_t source, std::size_t sink) {
  const std::size_t n = residual.size();
  Rational total(0);
  while (true) {
    std::vector<std::size_t> parent(n, n);
    parent[source] = source;
    std::deque<std::size_t> queue{source};
    while (!queue.empty() && parent[sink] == n) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v = 0; v < n; ++v) {
        if (parent[v] == n && residual[u][v] > 0) {
          parent[v] = u;
          queue.push_back(v);
        }
      }
    }
    if (parent[sink] == n) return total;
    Rational push = residual[parent[sink]][sink];
    for (std::size_t v = sink; v != source; v = parent[v]) push = std::min(push, residual[parent[v]][v]);
    for (std::size_t v = sink; v != source; v = parent[v]) {
      residual[parent[v]][v] -= push;
      residual[v][parent[v]] += push;
    }
    total += push;
  }
}

}  // namespace

// ----------------------------------------------------------------- Relation

Relation::Relation(std::size_t left, std::size_t right, std::vector<std::pair<std::size_t, std::size_t>> pairs)
    : left_(left), right_(right), pairs_(std::move(pairs)) {
  for (const auto& [s, t] : pairs_) {
    if (s >= left_ || t >= right_) throw InputError("relation pair outside the carriers");
  }
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

Relation Relation::graph(const std::vector<std::size_t>& f, std::size_t right) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t x = 0; x < f.size(); ++x) pairs.emplace_back(x, f[x]);
  return Relation(f.size(), right, std::move(pairs));
}

Relation Relation::from_mask(std::size_t left, std::size_t right, std::uint64_t mask) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for_each_member(mask, [&](std::size_t bit) { pairs.emplace_back(bit / right, bit % right); });
  return Relation(left, right, std::move(pairs));
}

bool Relation::contains(std::size_t s, std::size_t t) const {
  return std::binary_search(pairs_.begin(), pairs_.end(), std::make_pair(s, t));
}

StateSet Relation::left_projection() const {
  StateSet out = 0;
  for (const auto& p : pairs_) out |= singleton(p.first);
  return out;
}

StateSet Relation::right_projection() const {
  StateSet out = 0;
  for (const auto& p : pairs_) out |= singleton(p.second);
  return out;
}

bool Relation::has_full_projections() const {
  return left_projection() == full_set(left_) && right_projection() == full_set(right_);
}

// ---------------------------------------------------------------- morphisms

Verdict check_morphism(const std::vector<std::size_t>& phi, const TransitionSystem& c1, const TransitionSystem& c2) {
  check_table(phi, c1.size(), c2.size());
  for (std::size_t a = 0; a < c1.size(); ++a) {
    const StateSet img = PowersetMonad::fmap_direct(phi, c2.size(), c1.succ[a]);
    if (img != c2.succ[phi[a]]) {
      return {false, "state " + c1.states[a] + ": image of successors " + describe_set(c2.states, img) +
                         " but " + c2.states[phi[a]] + " has successors " + describe_set(c2.states, c2.succ[phi[a]])};
    }
  }
  return {};
}

Verdict check_bounded_morphism(const std::vector<std::size_t>& phi, const TransitionSystem& c1,
                               const TransitionSystem& c2) {
  check_table(phi, c1.size(), c2.size());
  for (std::size_t a = 0; a < c1.size(); ++a) {
    for (std::size_t a2 = 0; a2 < c1.size(); ++a2) {
      if (contains(c1.succ[a], a2) && !contains(c2.succ[phi[a]], phi[a2])) {
        return {false, c1.states[a] + " -> " + c1.states[a2] + " but not " + c2.states[phi[a]] + " -> " +
                           c2.states[phi[a2]]};
      }
    }
    for (std::size_t b = 0; b < c2.size(); ++b) {
      if (!contains(c2.succ[phi[a]], b)) continue;
      bool found = false;
      for_each_member(c1.succ[a], [&](std::size_t a2) { found = found || phi[a2] == b; });
      if (!found) {
        return {false, c2.states[phi[a]] + " -> " + c2.states[b] + " has no preimage transition from " +
                           c1.states[a]};
      }
    }
  }
  return {};
}

Verdict check_morphism(const std::vector<std::size_t>& phi, const UpperClosedCoalgebra& c1,
                       const UpperClosedCoalgebra& c2) {
  check_table(phi, c1.size(), c2.size());
  for (std::size_t a = 0; a < c1.size(); ++a) {
    const auto img = UpperClosedMonad::fmap_direct(phi, c2.size(), c1.structure[a]);
    if (!(img == c2.structure[phi[a]])) {
      return {false, "state " + c1.states[a] + ": transported family " + format_family(img, c2.states) + " but " +
                         c2.states[phi[a]] + " has " + format_family(c2.structure[phi[a]], c2.states)};
    }
  }
  return {};
}

Verdict check_morphism(const MeasurableMap& phi, const MarkovKernel& k, const MarkovKernel& l) {
  if (!same_space(phi.dom(), k.dom()) || !same_space(k.dom(), k.cod()) || !same_space(phi.cod(), l.dom()) ||
      !same_space(l.dom(), l.cod())) {
    throw InputError("morphism does not match the coalgebra spaces");
  }
  if (!check_measurable(phi)) return {false, "map is not measurable"};
  for (std::size_t x = 0; x < k.dom()->size(); ++x) {
    const FinMeasure img = image_measure(phi, k.row(x));
    if (!(img == l.row(phi(x)))) {
      return {false, "state " + k.dom()->label(x) + ": image of K(x) is " + img.format() + " but L(" +
                         l.dom()->label(phi(x)) + ") is " + l.row(phi(x)).format()};
    }
  }
  return {};
}

Verdict check_strong_morphism(const MeasurableMap& phi, const MarkovKernel& k, const MarkovKernel& l) {
  if (Verdict v = check_morphism(phi, k, l); !v) return v;
  if (!phi.is_surjective()) return {false, "map is not surjective"};
  const std::vector<MeasurableMap> maps{phi};
  if (final_sigma(maps).atoms() != phi.cod()->atoms()) {
    return {false, "codomain sigma-algebra is not final for the map"};
  }
  return {};
}

// ------------------------------------------------------------ bisimulations

Verdict check_bisimulation(const Relation& b, const TransitionSystem& c1, const TransitionSystem& c2) {
  if (b.left_size() != c1.size() || b.right_size() != c2.size()) throw InputError("relation over other carriers");
  for (const auto& [s, t] : b.pairs()) {
    for (std::size_t s2 = 0; s2 < c1.size(); ++s2) {
      if (!contains(c1.succ[s], s2)) continue;
      bool found = false;
      for_each_member(c2.succ[t], [&](std::size_t t2) { found = found || b.contains(s2, t2); });
      if (!found) {
        return {false, pair_label(c1.states, c2.states, s, t) + ": " + c1.states[s] + " -> " + c1.states[s2] +
                           " is not matched"};
      }
    }
    for (std::size_t t2 = 0; t2 < c2.size(); ++t2) {
      if (!contains(c2.succ[t], t2)) continue;
      bool found = false;
      for_each_member(c1.succ[s], [&](std::size_t s2) { found = found || b.contains(s2, t2); });
      if (!found) {
        return {false, pair_label(c1.states, c2.states, s, t) + ": " + c2.states[t] + " -> " + c2.states[t2] +
                           " is not matched"};
      }
    }
  }
  return {};
}

Verdict check_bisimulation(const Relation& b, const UpperClosedCoalgebra& c1, const UpperClosedCoalgebra& c2) {
  if (b.left_size() != c1.size() || b.right_size() != c2.size()) throw InputError("relation over other carriers");
  // Both clauses only need generators: a larger X is easier to serve, a
  // smaller Y is easier to cover.
  auto covers = [&](StateSet x, StateSet y, bool left_to_right) {
    bool all = true;
    for_each_member(y, [&](std::size_t v) {
      bool found = false;
      for_each_member(x, [&](std::size_t u) { found = found || (left_to_right ? b.contains(u, v) : b.contains(v, u)); });
      all = all && found;
    });
    return all;
  };
  for (const auto& [s, t] : b.pairs()) {
    const auto& fs = c1.structure[s].generators();
    const auto& gt = c2.structure[t].generators();
    for (StateSet x : fs) {
      if (std::none_of(gt.begin(), gt.end(), [&](StateSet y) { return covers(x, y, true); })) {
        return {false, pair_label(c1.states, c2.states, s, t) + ": " + describe_set(c1.states, x) + " in f(" +
                           c1.states[s] + ") has no answer in g(" + c2.states[t] + ")"};
      }
    }
    for (StateSet y : gt) {
      if (std::none_of(fs.begin(), fs.end(), [&](StateSet x) { return covers(y, x, false); })) {
        return {false, pair_label(c1.states, c2.states, s, t) + ": " + describe_set(c2.states, y) + " in g(" +
                           c2.states[t] + ") has no answer in f(" + c1.states[s] + ")"};
      }
    }
  }
  return {};
}

Verdict check_bisimulation(const Relation&, const MarkovKernel&, const MarkovKernel&) {
  throw UnsupportedError("relational bisimulation is not defined for stochastic coalgebras; check a span instead");
}

Mediator<TransitionSystem> mediator_structure(const Relation& b, const TransitionSystem& c1,
                                              const TransitionSystem& c2) {
  if (Verdict v = check_bisimulation(b, c1, c2); !v) throw PreconditionError("not a bisimulation: " + v.witness);
  Mediator<TransitionSystem> m;
  const auto& pairs = b.pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [s, t] = pairs[i];
    m.coalgebra.states.push_back(pair_label(c1.states, c2.states, s, t));
    StateSet succ = 0;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      if (contains(c1.succ[s], pairs[j].first) && contains(c2.succ[t], pairs[j].second)) succ |= singleton(j);
    }
    m.coalgebra.succ.push_back(succ);
    m.pi_left.push_back(s);
    m.pi_right.push_back(t);
  }
  return m;
}

Mediator<UpperClosedCoalgebra> mediator_structure(const Relation& b, const UpperClosedCoalgebra& c1,
                                                  const UpperClosedCoalgebra& c2) {
  if (b.size() > kMaxUpperClosedMediator) {
    throw UnsupportedError("upper-closed mediator needs |B| <= 12, got " + std::to_string(b.size()));
  }
  if (!b.has_full_projections()) throw PreconditionError("relation does not project onto both carriers");
  if (Verdict v = check_bisimulation(b, c1, c2); !v) throw PreconditionError("not a bisimulation: " + v.witness);
  Mediator<UpperClosedCoalgebra> m;
  for (const auto& [s, t] : b.pairs()) {
    m.pi_left.push_back(s);
    m.pi_right.push_back(t);
  }
  const std::size_t n = b.size();
  for (const auto& [s, t] : b.pairs()) {
    m.coalgebra.states.push_back(pair_label(c1.states, c2.states, s, t));
    std::vector<StateSet> members;
    for (StateSet d = 0; d <= full_set(n); ++d) {
      if (c1.structure[s].contains(image_of(m.pi_left, d)) && c2.structure[t].contains(image_of(m.pi_right, d))) {
        members.push_back(d);
      }
    }
    m.coalgebra.structure.emplace_back(n, std::move(members));
  }
  return m;
}

// ------------------------------------------------ congruences, subsystems

CongruenceResult check_congruence(const EquivRelation& tau, const MarkovKernel& k) {
  const SpaceRef& space = k.dom();
  if (!same_space(space, k.cod())) throw InputError("congruences need a kernel X ~> X");
  if (tau.universe_size() != space->size()) throw InputError("equivalence relation over a different carrier");
  const Partition invariant_atoms = space->atoms().join(tau);
  CongruenceResult out;
  for (StateSet cls : tau.blocks()) {
    const std::size_t rep = lowest(cls);
    for (StateSet inv : invariant_atoms.blocks()) {
      bool differs = false;
      for_each_member(cls, [&](std::size_t x) {
        if (differs) return;
        if (k(x, inv) != k(rep, inv)) {
          differs = true;
          out.witness = space->label(rep) + " ~ " + space->label(x) + " differ on " + space->format(inv) + ": " +
                        to_string(k(rep, inv)) + " vs " + to_string(k(x, inv));
        }
      });
      if (differs) return out;
    }
  }
  FactorResult fr = factor(space, tau);
  const auto& fs = fr.factor_space;
  std::vector<FinMeasure> rows;
  for (std::size_t c = 0; c < fs->size(); ++c) {
    const std::size_t rep = lowest(tau.block(c));
    std::vector<Rational> w(fs->atom_count());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = k(rep, fr.rho.preimage(fs->atom(j)));
    rows.emplace_back(fs, std::move(w));
  }
  MarkovKernel kt(fs, fs, std::move(rows));
  if (Verdict v = check_strong_morphism(fr.rho, k, kt); !v) {
    throw InvariantViolation("factor map of a congruence is not a strong morphism: " + v.witness);
  }
  out.ok = true;
  out.factor = std::move(fr);
  out.factor_kernel = std::move(kt);
  return out;
}

SubsystemResult check_subsystem(const Partition& sub_atoms, const MarkovKernel& k) {
  const SpaceRef& space = k.dom();
  if (!same_space(space, k.cod())) throw InputError("subsystems need a kernel X ~> X");
  if (sub_atoms.universe_size() != space->size() || !space->atoms().refines(sub_atoms)) {
    throw InputError("sub-sigma-algebra is not coarser than the sigma-algebra of the system");
  }
  SubsystemResult out;
  for (StateSet b : sub_atoms.blocks()) {
    for (StateSet cell : sub_atoms.blocks()) {
      const std::size_t rep = lowest(cell);
      bool differs = false;
      for_each_member(cell, [&](std::size_t x) {
        if (!differs && k(x, b) != k(rep, b)) {
          differs = true;
          out.witness = "K(" + space->label(rep) + ")(" + space->format(b) + ") = " + to_string(k(rep, b)) +
                        " but K(" + space->label(x) + ")(" + space->format(b) + ") = " + to_string(k(x, b));
        }
      });
      if (differs) return out;
    }
  }
  auto coarse = share(FinMeasurableSpace(space->labels(), sub_atoms));
  std::vector<FinMeasure> rows;
  for (std::size_t x = 0; x < space->size(); ++x) {
    std::vector<Rational> w(coarse->atom_count());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = k(x, coarse->atom(j));
    rows.emplace_back(coarse, std::move(w));
  }
  out.ok = true;
  out.restricted = MarkovKernel(coarse, coarse, std::move(rows));
  return out;
}

// ---------------------------------------------------------- stochastic spans

std::string to_string(SpanVerdict v) {
  switch (v) {
    case SpanVerdict::not_span:
      return "not_span";
    case SpanVerdict::trivial_common_events:
      return "trivial_common_events";
    case SpanVerdict::bisimilar:
      return "bisimilar";
  }
  return "?";
}

SpanReport check_stochastic_span(const StochasticSpan& sp) {
  SpanReport out;
  const MarkovKernel& m = sp.mediator;
  struct Leg {
    const MarkovKernel* k;
    const MeasurableMap* f;
    const MeasurableMap* g;
    const char* name;
  };
  const Leg legs[] = {{&sp.k1, &sp.f1, &sp.g1, "1"}, {&sp.k2, &sp.f2, &sp.g2, "2"}};
  for (const Leg& leg : legs) {
    const std::string i = leg.name;
    if (!same_space(leg.f->dom(), m.dom()) || !same_space(leg.g->dom(), m.cod()) ||
        !same_space(leg.f->cod(), leg.k->dom()) || !same_space(leg.g->cod(), leg.k->cod())) {
      out.reason = "leg " + i + " does not connect the mediator to K" + i;
      return out;
    }
    if (!check_measurable(*leg.f) || !check_measurable(*leg.g)) {
      out.reason = "leg " + i + " is not measurable";
      return out;
    }
    if (!leg.f->is_surjective() || !leg.g->is_surjective()) {
      out.reason = "leg " + i + " is not surjective";
      return out;
    }
    for (std::size_t a = 0; a < m.dom()->size(); ++a) {
      const FinMeasure img = image_measure(*leg.g, m.row(a));
      const FinMeasure& want = leg.k->row((*leg.f)(a));
      if (!(img == want)) {
        out.reason = "leg " + i + " is not a morphism at " + m.dom()->label(a) + ": pushed mediator row " +
                     img.format() + " vs " + want.format();
        return out;
      }
    }
  }
  out.common_events = preimage_partition(sp.g1).join(preimage_partition(sp.g2));
  if (out.common_events->block_count() >= 2) {
    out.verdict = SpanVerdict::bisimilar;
    out.reason = "common event " + m.cod()->format(out.common_events->block(0));
  } else {
    out.verdict = SpanVerdict::trivial_common_events;
    out.reason = "common events are only the empty set and the whole mediator codomain";
  }
  return out;
}

StochasticSpan product_mediator(const MarkovKernel& k1, const MarkovKernel& k2) {
  const auto a = product_space(*k1.dom(), *k2.dom());
  const auto b = product_space(*k1.cod(), *k2.cod());
  const std::size_t n2 = k2.dom()->size();
  const std::size_t m2 = k2.cod()->size();
  std::vector<FinMeasure> rows;
  for (std::size_t p = 0; p < a->size(); ++p) {
    const FinMeasure& r1 = k1.row(p / n2);
    const FinMeasure& r2 = k2.row(p % n2);
    std::vector<Rational> w(b->atom_count());
    for (std::size_t j = 0; j < w.size(); ++j) {
      const std::size_t q = lowest(b->atom(j));
      w[j] = r1.weight(k1.cod()->atom_of(q / m2)) * r2.weight(k2.cod()->atom_of(q % m2));
    }
    rows.emplace_back(b, std::move(w));
  }
  auto projection = [](const SpaceRef& dom, const SpaceRef& cod, std::size_t stride, bool first) {
    std::vector<std::size_t> t(dom->size());
    for (std::size_t p = 0; p < t.size(); ++p) t[p] = first ? p / stride : p % stride;
    return MeasurableMap(dom, cod, std::move(t));
  };
  return StochasticSpan{k1,
                        k2,
                        MarkovKernel(a, b, std::move(rows)),
                        projection(a, k1.dom(), n2, true),
                        projection(b, k1.cod(), m2, true),
                        projection(a, k2.dom(), n2, false),
                        projection(b, k2.cod(), m2, false)};
}

std::optional<StochasticSpan> search_stochastic_span(const MarkovKernel& k1, const MarkovKernel& k2,
                                                     std::size_t max_pairs) {
  if (!same_space(k1.dom(), k1.cod()) || !same_space(k2.dom(), k2.cod())) {
    throw InputError("span search needs two coalgebras X ~> X");
  }
  const auto& x1 = *k1.dom();
  const auto& x2 = *k2.dom();
  const std::size_t cells = x1.size() * x2.size();
  if (cells > max_pairs || cells > 20) {
    throw UnsupportedError("span search is limited to " + std::to_string(std::min<std::size_t>(max_pairs, 20)) +
                           " state pairs");
  }
  for (std::uint64_t mask = 1; mask <= full_set(cells); ++mask) {
    const Relation r = Relation::from_mask(x1.size(), x2.size(), mask);
    if (!r.has_full_projections()) continue;
    std::vector<std::string> labels;
    std::vector<std::size_t> pi1;
    std::vector<std::size_t> pi2;
    std::vector<std::size_t> cell_of;
    for (const auto& [s, t] : r.pairs()) {
      labels.push_back("(" + x1.label(s) + "," + x2.label(t) + ")");
      pi1.push_back(s);
      pi2.push_back(t);
      cell_of.push_back(x1.atom_of(s) * x2.atom_count() + x2.atom_of(t));
    }
    auto rs = share(FinMeasurableSpace(labels, Partition::from_labels(std::span<const std::size_t>(cell_of))));
    // One coupling per atom of R, supported on the atoms of R.
    std::vector<FinMeasure> rows;
    bool feasible = true;
    for (std::size_t a = 0; a < rs->size() && feasible; ++a) {
      const FinMeasure& mu1 = k1.row(pi1[a]);
      const FinMeasure& mu2 = k2.row(pi2[a]);
      const std::size_t p = x1.atom_count();
      const std::size_t q = x2.atom_count();
      const std::size_t source = p + q;
      const std::size_t sink = source + 1;
      std::vector<std::vector<Rational>> cap(sink + 1, std::vector<Rational>(sink + 1, Rational(0)));
      for (std::size_t i = 0; i < p; ++i) cap[source][i] = mu1.weight(i);
      for (std::size_t j = 0; j < q; ++j) cap[p + j][sink] = mu2.weight(j);
      for (std::size_t c = 0; c < rs->atom_count(); ++c) {
        const std::size_t cell = cell_of[lowest(rs->atom(c))];
        cap[cell / q][p + cell % q] = 1;
      }
      const auto initial = cap;
      if (max_flow(cap, source, sink) != 1) {
        feasible = false;
        break;
      }
      std::vector<Rational> w(rs->atom_count());
      for (std::size_t c = 0; c < w.size(); ++c) {
        const std::size_t cell = cell_of[lowest(rs->atom(c))];
        w[c] = initial[cell / q][p + cell % q] - cap[cell / q][p + cell % q];
      }
      rows.emplace_back(rs, std::move(w));
    }
    if (!feasible) continue;
    // Rows depend only on the atom of a, so the mediator is measurable.
    std::vector<FinMeasure> by_state;
    for (std::size_t a = 0; a < rs->size(); ++a) by_state.push_back(rows[lowest(rs->atom(rs->atom_of(a)))]);
    StochasticSpan span{k1,
                        k2,
                        MarkovKernel(rs, rs, std::move(by_state)),
                        MeasurableMap(rs, k1.dom(), pi1),
                        MeasurableMap(rs, k1.cod(), pi1),
                        MeasurableMap(rs, k2.dom(), pi2),
                        MeasurableMap(rs, k2.cod(), pi2)};
    if (check_stochastic_span(span).verdict == SpanVerdict::bisimilar) return span;
  }
  return std::nullopt;
}

// ------------------------------------------------------------------ sweeps

std::vector<UpperClosedFamily> all_upper_closed_families(std::size_t n) {
  if (n > 4) throw UnsupportedError("enumerating upper-closed families needs n <= 4");
  const std::size_t subsets = std::size_t{1} << n;
  std::vector<UpperClosedFamily> out;
  for (std::uint64_t ext = 0; ext < (std::uint64_t{1} << subsets); ++ext) {
    if (UpperClosedFamily::is_upper_closed_extension(n, ext)) out.push_back(UpperClosedFamily::from_extension(n, ext));
  }
  return out;
}

namespace {

std::vector<TransitionSystem> all_transition_systems(std::size_t n) {
  std::vector<TransitionSystem> out;
  const std::uint64_t per_state = std::uint64_t{1} << n;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= per_state;
  for (std::uint64_t code = 0; code < total; ++code) {
    TransitionSystem ts{index_labels(n), {}};
    std::uint64_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      ts.succ.push_back(c % per_state);
      c /= per_state;
    }
    out.push_back(std::move(ts));
  }
  return out;
}

std::vector<UpperClosedCoalgebra> all_upper_closed_coalgebras(std::size_t n, std::size_t max_generators) {
  std::vector<UpperClosedFamily> families;
  for (auto& f : all_upper_closed_families(n)) {
    if (f.generators().size() <= max_generators) families.push_back(std::move(f));
  }
  std::vector<UpperClosedCoalgebra> out;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= families.size();
  for (std::uint64_t code = 0; code < total; ++code) {
    UpperClosedCoalgebra c{index_labels(n), {}};
    std::uint64_t rest = code;
    for (std::size_t i = 0; i < n; ++i) {
      c.structure.push_back(families[rest % families.size()]);
      rest /= families.size();
    }
    out.push_back(std::move(c));
  }
  return out;
}

// Brute force: does some structure h on B make both projections morphisms?
// The morphism conditions are independent per element of B.
bool some_structure_exists(const Relation& b, const TransitionSystem& c1, const TransitionSystem& c2) {
  std::vector<std::size_t> pl;
  std::vector<std::size_t> pr;
  for (const auto& [s, t] : b.pairs()) {
    pl.push_back(s);
    pr.push_back(t);
  }
  for (const auto& [s, t] : b.pairs()) {
    bool found = false;
    for (StateSet d = 0; d <= full_set(b.size()) && !found; ++d) {
      found = image_of(pl, d) == c1.succ[s] && image_of(pr, d) == c2.succ[t];
    }
    if (!found) return false;
  }
  return true;
}

bool some_structure_exists(const Relation& b, const UpperClosedCoalgebra& c1, const UpperClosedCoalgebra& c2,
                           const std::vector<UpperClosedFamily>& candidates) {
  std::vector<std::size_t> pl;
  std::vector<std::size_t> pr;
  for (const auto& [s, t] : b.pairs()) {
    pl.push_back(s);
    pr.push_back(t);
  }
  for (const auto& [s, t] : b.pairs()) {
    const bool found = std::any_of(candidates.begin(), candidates.end(), [&](const UpperClosedFamily& h) {
      return UpperClosedMonad::fmap_direct(pl, c1.size(), h) == c1.structure[s] &&
             UpperClosedMonad::fmap_direct(pr, c2.size(), h) == c2.structure[t];
    });
    if (!found) return false;
  }
  return true;
}

template <class C>
std::string describe_case(const C& c1, const C& c2, const Relation& b, const std::string& what);

template <>
std::string describe_case(const TransitionSystem& c1, const TransitionSystem& c2, const Relation& b,
                          const std::string& what) {
  std::string out = what + " for S succ";
  for (StateSet s : c1.succ) out += " " + describe_set(c1.states, s);
  out += ", T succ";
  for (StateSet s : c2.succ) out += " " + describe_set(c2.states, s);
  out += ", B = {";
  for (const auto& [s, t] : b.pairs()) out += pair_label(c1.states, c2.states, s, t);
  return out + "}";
}

template <>
std::string describe_case(const UpperClosedCoalgebra& c1, const UpperClosedCoalgebra& c2, const Relation& b,
                          const std::string& what) {
  std::string out = what + " for f";
  for (const auto& f : c1.structure) out += " " + format_family(f, c1.states);
  out += ", g";
  for (const auto& f : c2.structure) out += " " + format_family(f, c2.states);
  out += ", B = {";
  for (const auto& [s, t] : b.pairs()) out += pair_label(c1.states, c2.states, s, t);
  return out + "}";
}

// One system pair, all relations.
template <class C, class Exists>
SweepStats sweep_pair(const C& c1, const C& c2, bool need_full_projections, Exists&& exists) {
  SweepStats st;
  const std::size_t cells = c1.size() * c2.size();
  for (std::uint64_t mask = 0; mask <= full_set(cells); ++mask) {
    const Relation b = Relation::from_mask(c1.size(), c2.size(), mask);
    ++st.cases;
    if (need_full_projections && !b.has_full_projections()) continue;
    ++st.in_scope;
    const bool bis = static_cast<bool>(check_bisimulation(b, c1, c2));
    st.bisimulations += bis ? 1 : 0;
    std::string problem;
    if (bis != exists(b)) {
      problem = bis ? "bisimulation without a mediating structure" : "mediating structure without bisimulation";
    } else if (bis) {
      const auto med = mediator_structure(b, c1, c2);
      if (!check_morphism(med.pi_left, med.coalgebra, c1) || !check_morphism(med.pi_right, med.coalgebra, c2)) {
        problem = "canonical mediator projections are not morphisms";
      }
    } else {
      try {
        mediator_structure(b, c1, c2);
        problem = "mediator accepted a non-bisimulation";
      } catch (const PreconditionError&) {
      }
    }
    if (!problem.empty()) {
      if (st.mismatches == 0) st.first_mismatch = describe_case(c1, c2, b, problem);
      ++st.mismatches;
    }
  }
  return st;
}

void merge(SweepStats& into, const SweepStats& part) {
  into.cases += part.cases;
  into.bisimulations += part.bisimulations;
  into.in_scope += part.in_scope;
  if (into.mismatches == 0 && part.mismatches > 0) into.first_mismatch = part.first_mismatch;
  into.mismatches += part.mismatches;
}

template <class C, class Exists>
SweepStats sweep(const std::vector<C>& systems, bool need_full, Exists&& exists, bool parallel) {
  const auto n = static_cast<std::ptrdiff_t>(systems.size() * systems.size());
  std::vector<SweepStats> parts(static_cast<std::size_t>(n));
  const auto run = [&](std::ptrdiff_t i) {
    const auto u = static_cast<std::size_t>(i);
    const C& c1 = systems[u / systems.size()];
    const C& c2 = systems[u % systems.size()];
    parts[u] = sweep_pair(c1, c2, need_full, [&](const Relation& b) { return exists(b, c1, c2); });
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) run(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) run(i);
  }
  SweepStats total;
  for (const auto& p : parts) merge(total, p);
  return total;
}

SweepStats run_aczel(std::size_t n, bool parallel) {
  const auto systems = all_transition_systems(n);
  return sweep(
      systems, false,
      [](const Relation& b, const TransitionSystem& c1, const TransitionSystem& c2) {
        return some_structure_exists(b, c1, c2);
      },
      parallel);
}

SweepStats run_upper_closed(std::size_t n, std::size_t max_generators, bool parallel) {
  const auto systems = all_upper_closed_coalgebras(n, max_generators);
  std::vector<std::vector<UpperClosedFamily>> candidates;
  for (std::size_t k = 0; k <= n * n; ++k) candidates.push_back(all_upper_closed_families(k));
  return sweep(
      systems, true,
      [&](const Relation& b, const UpperClosedCoalgebra& c1, const UpperClosedCoalgebra& c2) {
        return some_structure_exists(b, c1, c2, candidates[b.size()]);
      },
      parallel);
}

}  // namespace

SweepStats aczel_sweep(std::size_t n) { return run_aczel(n, true); }
SweepStats aczel_sweep_serial(std::size_t n) { return run_aczel(n, false); }

SweepStats upper_closed_sweep(std::size_t n, std::size_t max_generators) {
  if (n > 2) throw UnsupportedError("upper-closed sweep enumerates mediators on |B| <= 4, so n <= 2");
  return run_upper_closed(n, max_generators, true);
}

SweepStats upper_closed_sweep_serial(std::size_t n, std::size_t max_generators) {
  if (n > 2) throw UnsupportedError("upper-closed sweep enumerates mediators on |B| <= 4, so n <= 2");
  return run_upper_closed(n, max_generators, false);
}

}  // namespace mgk
