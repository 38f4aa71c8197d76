#include "mgk/space.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "mgk/errors.hpp"

namespace mgk {

// ---------------------------------------------------------------- Partition

Partition::Partition(std::size_t universe, std::vector<StateSet> blocks)
    : universe_(universe), blocks_(std::move(blocks)) {
  if (universe_ > kMaxStates) {
    throw InputError("carrier of " + std::to_string(universe_) + " states exceeds the limit of 64");
  }
  StateSet seen = 0;
  for (StateSet b : blocks_) {
    if (b == 0) throw InputError("partition block is empty");
    if (!subset_of(b, full_set(universe_))) throw InputError("partition block outside the carrier");
    if ((seen & b) != 0) throw InputError("partition blocks overlap");
    seen |= b;
  }
  if (seen != full_set(universe_)) throw InputError("partition blocks do not cover the carrier");
  std::sort(blocks_.begin(), blocks_.end(), [](StateSet a, StateSet b) { return lowest(a) < lowest(b); });
  index();
}

void Partition::index() {
  block_of_.assign(universe_, 0);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    for_each_member(blocks_[k], [&](std::size_t i) { block_of_[i] = k; });
  }
}

Partition Partition::discrete(std::size_t universe) {
  std::vector<StateSet> blocks;
  for (std::size_t i = 0; i < universe; ++i) blocks.push_back(singleton(i));
  return Partition(universe, std::move(blocks));
}

Partition Partition::single_block(std::size_t universe) {
  if (universe == 0) return Partition(0, {});
  return Partition(universe, {full_set(universe)});
}

bool Partition::is_union_of_blocks(StateSet s) const { return saturate(s) == s; }

StateSet Partition::saturate(StateSet s) const {
  StateSet out = 0;
  for_each_member(s & universe_set(), [&](std::size_t i) { out |= blocks_[block_of_[i]]; });
  return out;
}

StateSet Partition::union_of(std::uint64_t block_mask) const {
  StateSet out = 0;
  for_each_member(block_mask, [&](std::size_t k) { out |= blocks_.at(k); });
  return out;
}

std::uint64_t Partition::block_mask_of(StateSet union_of_blocks) const {
  std::uint64_t mask = 0;
  for_each_member(union_of_blocks, [&](std::size_t i) { mask |= singleton(block_of_[i]); });
  return mask;
}

Partition Partition::meet(const Partition& other) const {
  if (other.universe_ != universe_) throw InputError("partitions over different carriers");
  std::vector<StateSet> blocks;
  for (StateSet a : blocks_) {
    for (StateSet b : other.blocks_) {
      if ((a & b) != 0) blocks.push_back(a & b);
    }
  }
  return Partition(universe_, std::move(blocks));
}

Partition Partition::join(const Partition& other) const {
  if (other.universe_ != universe_) throw InputError("partitions over different carriers");
  std::vector<std::size_t> parent(universe_);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto merge_block = [&](StateSet b) {
    const std::size_t root = find(lowest(b));
    for_each_member(b, [&](std::size_t i) { parent[find(i)] = root; });
  };
  for (StateSet b : blocks_) merge_block(b);
  for (StateSet b : other.blocks_) merge_block(b);
  std::vector<std::size_t> roots(universe_);
  for (std::size_t i = 0; i < universe_; ++i) roots[i] = find(i);
  return from_labels(std::span<const std::size_t>(roots));
}

bool Partition::refines(const Partition& coarser) const {
  if (coarser.universe_ != universe_) return false;
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [&](StateSet b) { return subset_of(b, coarser.block_containing(lowest(b))); });
}

std::vector<StateSet> Partition::all_unions() const {
  if (blocks_.size() > 24) throw UnsupportedError("too many atoms to enumerate all measurable sets");
  const std::uint64_t count = std::uint64_t{1} << blocks_.size();
  std::vector<StateSet> out;
  out.reserve(count);
  for (std::uint64_t m = 0; m < count; ++m) out.push_back(union_of(m));
  return out;
}

// ------------------------------------------------------- FinMeasurableSpace

FinMeasurableSpace::FinMeasurableSpace(std::vector<std::string> labels, Partition atoms)
    : labels_(std::move(labels)), atoms_(std::move(atoms)) {
  if (labels_.size() > kMaxStates) throw InputError("more than 64 states");
  if (atoms_.universe_size() != labels_.size()) throw InputError("atom partition does not match the carrier");
  std::set<std::string_view> unique;
  for (const auto& l : labels_) {
    if (l.empty()) throw InputError("empty state label");
    if (!unique.insert(l).second) throw InputError("duplicate state label '" + l + "'");
  }
}

FinMeasurableSpace FinMeasurableSpace::discrete(std::vector<std::string> labels) {
  const std::size_t n = labels.size();
  return FinMeasurableSpace(std::move(labels), Partition::discrete(n));
}

FinMeasurableSpace FinMeasurableSpace::trivial(std::vector<std::string> labels) {
  const std::size_t n = labels.size();
  return FinMeasurableSpace(std::move(labels), Partition::single_block(n));
}

std::size_t FinMeasurableSpace::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  throw InputError("unknown state '" + std::string(label) + "'");
}

bool FinMeasurableSpace::has_label(std::string_view label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

StateSet FinMeasurableSpace::set_of(std::span<const std::string> names) const {
  StateSet s = 0;
  for (const auto& n : names) s |= singleton(index_of(n));
  return s;
}

std::vector<std::string> FinMeasurableSpace::names_of(StateSet s) const {
  std::vector<std::string> out;
  for_each_member(s & full(), [&](std::size_t i) { out.push_back(labels_[i]); });
  return out;
}

std::string FinMeasurableSpace::format(StateSet s) const {
  std::string out = "{";
  bool first = true;
  for_each_member(s & full(), [&](std::size_t i) {
    if (!first) out += ", ";
    out += labels_[i];
    first = false;
  });
  return out + "}";
}

bool same_space(const SpaceRef& a, const SpaceRef& b) {
  return a == b || (a && b && *a == *b);
}

std::vector<std::string> index_labels(std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

// ------------------------------------------------------------ MeasurableMap

MeasurableMap::MeasurableMap(SpaceRef dom, SpaceRef cod, std::vector<std::size_t> table)
    : dom_(std::move(dom)), cod_(std::move(cod)), table_(std::move(table)) {
  if (!dom_ || !cod_) throw InputError("map without domain or codomain");
  if (table_.size() != dom_->size()) throw InputError("map table is not total on its domain");
  for (std::size_t y : table_) {
    if (y >= cod_->size()) throw InputError("map value outside its codomain");
  }
}

MeasurableMap MeasurableMap::identity(SpaceRef space) {
  std::vector<std::size_t> t(space->size());
  std::iota(t.begin(), t.end(), 0);
  return MeasurableMap(space, space, std::move(t));
}

MeasurableMap MeasurableMap::constant(SpaceRef dom, SpaceRef cod, std::size_t value) {
  std::vector<std::size_t> t(dom->size(), value);
  return MeasurableMap(std::move(dom), std::move(cod), std::move(t));
}

StateSet MeasurableMap::preimage(StateSet b) const {
  StateSet out = 0;
  for (std::size_t x = 0; x < table_.size(); ++x) {
    if (contains(b, table_[x])) out |= singleton(x);
  }
  return out;
}

StateSet MeasurableMap::image(StateSet a) const {
  StateSet out = 0;
  for_each_member(a, [&](std::size_t x) { out |= singleton(table_.at(x)); });
  return out;
}

bool MeasurableMap::is_surjective() const { return image(dom_->full()) == cod_->full(); }

bool MeasurableMap::is_injective() const {
  return cardinality(image(dom_->full())) == dom_->size();
}

MeasurableMap MeasurableMap::then(const MeasurableMap& next) const {
  if (!same_space(cod_, next.dom_)) throw InputError("maps are not composable");
  std::vector<std::size_t> t(table_.size());
  for (std::size_t x = 0; x < t.size(); ++x) t[x] = next(table_[x]);
  return MeasurableMap(dom_, next.cod_, std::move(t));
}

// ------------------------------------------------------------- operations

Partition sigma_close(std::size_t n, std::span<const StateSet> generators) {
  Partition atoms = Partition::single_block(n);
  const StateSet all = full_set(n);
  for (StateSet g : generators) {
    if (!subset_of(g, all)) throw InputError("generator mentions a state outside the carrier");
    std::vector<StateSet> split;
    if (g != 0) split.push_back(g);
    if ((all & ~g) != 0) split.push_back(all & ~g);
    atoms = atoms.meet(Partition(n, std::move(split)));
  }
  return atoms;
}

FinMeasurableSpace sigma_close(std::vector<std::string> carrier,
                               const std::vector<std::vector<std::string>>& generators) {
  const auto probe = FinMeasurableSpace::discrete(carrier);
  std::vector<StateSet> gens;
  gens.reserve(generators.size());
  for (const auto& g : generators) gens.push_back(probe.set_of(g));
  const std::size_t n = carrier.size();
  return FinMeasurableSpace(std::move(carrier), sigma_close(n, gens));
}

bool check_measurable(const MeasurableMap& f) {
  const auto& dom = *f.dom();
  return std::all_of(f.cod()->atoms().blocks().begin(), f.cod()->atoms().blocks().end(),
                     [&](StateSet atom) { return dom.is_measurable(f.preimage(atom)); });
}

bool check_measurable(const MeasurableMap& f, std::span<const StateSet> cod_generators) {
  if (sigma_close(f.cod()->size(), cod_generators) != f.cod()->atoms()) {
    throw InputError("generators do not generate the codomain sigma-algebra");
  }
  const auto& dom = *f.dom();
  return std::all_of(cod_generators.begin(), cod_generators.end(),
                     [&](StateSet g) { return dom.is_measurable(f.preimage(g)); });
}

FinMeasurableSpace initial_sigma(std::span<const MeasurableMap> maps) {
  if (maps.empty()) throw InputError("initial sigma-algebra needs at least one map");
  const auto& carrier = maps.front().dom()->labels();
  Partition atoms = Partition::single_block(carrier.size());
  for (const auto& f : maps) {
    if (f.dom()->labels() != carrier) throw InputError("maps do not share a domain carrier");
    std::vector<StateSet> fibers;
    for (StateSet a : f.cod()->atoms().blocks()) {
      if (StateSet p = f.preimage(a); p != 0) fibers.push_back(p);
    }
    atoms = atoms.meet(Partition(carrier.size(), std::move(fibers)));
  }
  return FinMeasurableSpace(carrier, std::move(atoms));
}

FinMeasurableSpace final_sigma(std::span<const MeasurableMap> maps) {
  if (maps.empty()) throw InputError("final sigma-algebra needs at least one map");
  const auto& carrier = maps.front().cod()->labels();
  // B is measurable iff every domain atom maps entirely inside or outside B,
  // so the atoms are the connected components of the atom images.
  Partition atoms = Partition::discrete(carrier.size());
  for (const auto& g : maps) {
    if (g.cod()->labels() != carrier) throw InputError("maps do not share a codomain carrier");
    std::vector<StateSet> blocks;
    StateSet covered = 0;
    for (StateSet a : g.dom()->atoms().blocks()) {
      StateSet img = g.image(a);
      // merge with earlier overlapping images
      for (auto it = blocks.begin(); it != blocks.end();) {
        if ((*it & img) != 0) {
          img |= *it;
          it = blocks.erase(it);
        } else {
          ++it;
        }
      }
      blocks.push_back(img);
      covered |= img;
    }
    for_each_member(full_set(carrier.size()) & ~covered, [&](std::size_t y) { blocks.push_back(singleton(y)); });
    atoms = atoms.join(Partition(carrier.size(), std::move(blocks)));
  }
  return FinMeasurableSpace(carrier, std::move(atoms));
}

FinMeasurableSpace derive_sigma(SigmaMode mode, std::span<const MeasurableMap> maps) {
  return mode == SigmaMode::initial ? initial_sigma(maps) : final_sigma(maps);
}

FactorResult factor(const SpaceRef& space, const EquivRelation& tau) {
  if (tau.universe_size() != space->size()) throw InputError("equivalence relation over a different carrier");
  std::vector<std::string> labels;
  std::vector<std::size_t> table(space->size());
  for (std::size_t k = 0; k < tau.block_count(); ++k) {
    labels.push_back("[" + space->label(lowest(tau.block(k))) + "]");
    for_each_member(tau.block(k), [&](std::size_t x) { table[x] = k; });
  }
  const Partition invariant_atoms = space->atoms().join(tau);
  std::vector<StateSet> factor_atoms;
  for (StateSet b : invariant_atoms.blocks()) {
    StateSet img = 0;
    for_each_member(b, [&](std::size_t x) { img |= singleton(table[x]); });
    factor_atoms.push_back(img);
  }
  const std::size_t classes = labels.size();
  auto fs = share(FinMeasurableSpace(std::move(labels), Partition(classes, std::move(factor_atoms))));
  std::vector<StateSet> invariants = invariant_atoms.all_unions();
  std::sort(invariants.begin(), invariants.end());
  return FactorResult{fs, MeasurableMap(space, fs, std::move(table)), invariant_atoms, std::move(invariants)};
}

EquivRelation kernel_of(const MeasurableMap& f) {
  return Partition::from_labels(std::span<const std::size_t>(f.table()));
}

std::vector<StateSet> pi_lambda_closure(const std::vector<std::string>& carrier,
                                        std::span<const StateSet> pi_system) {
  const StateSet all = full_set(carrier.size());
  std::set<StateSet> members(pi_system.begin(), pi_system.end());
  for (StateSet a : members) {
    if (!subset_of(a, all)) throw InputError("pi-system member outside the carrier");
  }
  for (StateSet a : members) {
    for (StateSet b : members) {
      const StateSet c = a & b;
      if (c != 0 && !members.contains(c)) {
        const auto space = FinMeasurableSpace::discrete(carrier);
        throw PreconditionError("family is not closed under intersection: " + space.format(a) + " and " +
                                space.format(b));
      }
    }
  }
  members.insert(all);
  bool grew = true;
  while (grew) {
    grew = false;
    const std::vector<StateSet> snapshot(members.begin(), members.end());
    for (StateSet a : snapshot) {
      grew |= members.insert(all & ~a).second;
      for (StateSet b : snapshot) {
        if ((a & b) == 0) grew |= members.insert(a | b).second;
      }
    }
  }
  return {members.begin(), members.end()};
}

}  // namespace mgk
