#include "mgk/random.hpp"

namespace mgk {

Partition random_partition(Rng& rng, std::size_t n) {
  std::vector<std::size_t> labels(n);
  for (auto& l : labels) l = rng.index(n);
  return Partition::from_labels(std::span<const std::size_t>(labels));
}

SpaceRef random_space(Rng& rng, std::size_t n) {
  return share(FinMeasurableSpace(index_labels(n), random_partition(rng, n)));
}

FinMeasure random_measure(Rng& rng, const SpaceRef& space, unsigned denominator) {
  std::vector<Rational> w(space->atom_count(), Rational(0));
  for (unsigned u = 0; u < denominator; ++u) w[rng.index(w.size())] += Rational(1, denominator);
  return FinMeasure(space, std::move(w));
}

MarkovKernel random_kernel(Rng& rng, const SpaceRef& dom, const SpaceRef& cod, unsigned denominator) {
  std::vector<FinMeasure> per_atom;
  for (std::size_t k = 0; k < dom->atom_count(); ++k) per_atom.push_back(random_measure(rng, cod, denominator));
  std::vector<FinMeasure> rows;
  for (std::size_t x = 0; x < dom->size(); ++x) rows.push_back(per_atom[dom->atom_of(x)]);
  return MarkovKernel(dom, cod, std::move(rows));
}

MeasurableMap random_measurable_map(Rng& rng, const SpaceRef& dom, const SpaceRef& cod) {
  std::vector<std::size_t> table(dom->size());
  for (std::size_t k = 0; k < dom->atom_count(); ++k) {
    const StateSet target = cod->atom(rng.index(cod->atom_count()));
    const std::size_t size = cardinality(target);
    for_each_member(dom->atom(k), [&](std::size_t x) {
      StateSet rest = target;
      for (std::size_t skip = rng.index(size); skip > 0; --skip) rest &= rest - 1;
      table[x] = lowest(rest);
    });
  }
  return MeasurableMap(dom, cod, std::move(table));
}

}  // namespace mgk
