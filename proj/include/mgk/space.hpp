#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mgk/state_set.hpp"

namespace mgk {

/// A partition of {0, ..., n-1} into disjoint nonempty blocks.
///
/// Blocks are kept in canonical order (by lowest member), so two partitions
/// of the same universe compare equal iff they have the same blocks. Used both
/// for the atoms of a finite sigma-algebra and for equivalence relations.
class Partition {
 public:
  Partition() = default;
  /// Throws InputError unless the blocks are disjoint, nonempty and cover.
  Partition(std::size_t universe, std::vector<StateSet> blocks);

  static Partition discrete(std::size_t universe);
  static Partition single_block(std::size_t universe);
  /// Blocks are the fibers of `class_of`; the labels themselves are arbitrary.
  template <class Label>
  static Partition from_labels(std::span<const Label> class_of);

  std::size_t universe_size() const noexcept { return universe_; }
  std::size_t block_count() const noexcept { return blocks_.size(); }
  const std::vector<StateSet>& blocks() const noexcept { return blocks_; }
  StateSet block(std::size_t k) const { return blocks_.at(k); }
  std::size_t block_of(std::size_t i) const { return block_of_.at(i); }
  StateSet block_containing(std::size_t i) const { return blocks_[block_of_.at(i)]; }
  StateSet universe_set() const noexcept { return full_set(universe_); }

  bool is_union_of_blocks(StateSet s) const;
  /// Smallest union of blocks containing `s`.
  StateSet saturate(StateSet s) const;
  /// Union of the blocks whose indices are set in `block_mask`.
  StateSet union_of(std::uint64_t block_mask) const;
  /// Bitmask over block indices for a union of blocks.
  std::uint64_t block_mask_of(StateSet union_of_blocks) const;

  /// Common refinement: blocks are the nonempty pairwise intersections.
  Partition meet(const Partition& other) const;
  /// Finest common coarsening.
  Partition join(const Partition& other) const;
  bool refines(const Partition& coarser) const;

  /// Every union of blocks, in increasing block-mask order. Requires <= 24 blocks.
  std::vector<StateSet> all_unions() const;

  bool operator==(const Partition& other) const = default;

 private:
  void index();

  std::size_t universe_ = 0;
  std::vector<StateSet> blocks_;
  std::vector<std::size_t> block_of_;
};

using EquivRelation = Partition;

/// Finite carrier with a sigma-algebra given by its atoms.
class FinMeasurableSpace {
 public:
  FinMeasurableSpace(std::vector<std::string> labels, Partition atoms);

  static FinMeasurableSpace discrete(std::vector<std::string> labels);
  static FinMeasurableSpace trivial(std::vector<std::string> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  /// Throws InputError for an unknown label.
  std::size_t index_of(std::string_view label) const;
  bool has_label(std::string_view label) const;

  const Partition& atoms() const noexcept { return atoms_; }
  std::size_t atom_count() const noexcept { return atoms_.block_count(); }
  StateSet atom(std::size_t k) const { return atoms_.block(k); }
  std::size_t atom_of(std::size_t i) const { return atoms_.block_of(i); }
  StateSet full() const noexcept { return full_set(size()); }

  bool is_measurable(StateSet s) const { return subset_of(s, full()) && atoms_.is_union_of_blocks(s); }
  std::vector<StateSet> measurable_sets() const { return atoms_.all_unions(); }

  StateSet set_of(std::span<const std::string> names) const;
  std::vector<std::string> names_of(StateSet s) const;
  /// "{a, b}" in declared label order.
  std::string format(StateSet s) const;

  bool operator==(const FinMeasurableSpace& other) const = default;

 private:
  std::vector<std::string> labels_;
  Partition atoms_;
};

using SpaceRef = std::shared_ptr<const FinMeasurableSpace>;

inline SpaceRef share(FinMeasurableSpace space) {
  return std::make_shared<const FinMeasurableSpace>(std::move(space));
}

/// Pointer-equal or value-equal.
bool same_space(const SpaceRef& a, const SpaceRef& b);

/// Labels "0", "1", ..., for anonymous carriers.
std::vector<std::string> index_labels(std::size_t n);

/// A total map between carriers. Measurability is a property checked separately.
class MeasurableMap {
 public:
  MeasurableMap(SpaceRef dom, SpaceRef cod, std::vector<std::size_t> table);

  static MeasurableMap identity(SpaceRef space);
  static MeasurableMap constant(SpaceRef dom, SpaceRef cod, std::size_t value);

  const SpaceRef& dom() const noexcept { return dom_; }
  const SpaceRef& cod() const noexcept { return cod_; }
  const std::vector<std::size_t>& table() const noexcept { return table_; }
  std::size_t operator()(std::size_t x) const { return table_.at(x); }

  StateSet preimage(StateSet b) const;
  StateSet image(StateSet a) const;
  bool is_surjective() const;
  bool is_injective() const;

  /// `next` after `*this`.
  MeasurableMap then(const MeasurableMap& next) const;

 private:
  SpaceRef dom_;
  SpaceRef cod_;
  std::vector<std::size_t> table_;
};

/// Smallest sigma-algebra on `n` points containing every generator.
Partition sigma_close(std::size_t n, std::span<const StateSet> generators);
FinMeasurableSpace sigma_close(std::vector<std::string> carrier,
                               const std::vector<std::vector<std::string>>& generators);

/// True iff the preimage of every codomain atom is measurable.
bool check_measurable(const MeasurableMap& f);
/// Tests only the preimages of `cod_generators`, which must generate the
/// codomain sigma-algebra (InputError otherwise).
bool check_measurable(const MeasurableMap& f, std::span<const StateSet> cod_generators);

/// Smallest sigma-algebra on the common domain making every map measurable.
/// The sigma-algebras the maps carry on their domain are ignored.
FinMeasurableSpace initial_sigma(std::span<const MeasurableMap> maps);
/// Largest sigma-algebra on the common codomain making every map measurable.
FinMeasurableSpace final_sigma(std::span<const MeasurableMap> maps);

enum class SigmaMode { initial, final };
FinMeasurableSpace derive_sigma(SigmaMode mode, std::span<const MeasurableMap> maps);

struct FactorResult {
  SpaceRef factor_space;
  MeasurableMap rho;
  /// Atoms of the sigma-algebra of measurable tau-invariant sets.
  Partition invariant_atoms;
  /// Every measurable tau-invariant set, sorted.
  std::vector<StateSet> invariants;
};

FactorResult factor(const SpaceRef& space, const EquivRelation& tau);

EquivRelation kernel_of(const MeasurableMap& f);

/// Closure of an intersection-stable family under complement and disjoint
/// union (a Dynkin system containing the carrier). Empty intersections are
/// allowed. Throws PreconditionError naming a pair whose intersection is
/// missing.
std::vector<StateSet> pi_lambda_closure(const std::vector<std::string>& carrier,
                                        std::span<const StateSet> pi_system);

template <class Label>
Partition Partition::from_labels(std::span<const Label> class_of) {
  std::vector<StateSet> blocks;
  std::vector<Label> seen;
  for (std::size_t i = 0; i < class_of.size(); ++i) {
    std::size_t k = 0;
    while (k < seen.size() && !(seen[k] == class_of[i])) ++k;
    if (k == seen.size()) {
      seen.push_back(class_of[i]);
      blocks.push_back(0);
    }
    blocks[k] |= singleton(i);
  }
  return Partition(class_of.size(), std::move(blocks));
}

}  // namespace mgk
