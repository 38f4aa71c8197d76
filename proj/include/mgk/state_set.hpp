#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>

namespace mgk {

// Subsets of a finite carrier, indexed by declared label order.
using StateSet = std::uint64_t;

inline constexpr std::size_t kMaxStates = 64;

constexpr StateSet singleton(std::size_t i) { return StateSet{1} << i; }

constexpr StateSet full_set(std::size_t n) {
  return n >= kMaxStates ? ~StateSet{0} : (StateSet{1} << n) - 1;
}

constexpr bool contains(StateSet s, std::size_t i) { return (s >> i) & 1U; }

constexpr bool subset_of(StateSet a, StateSet b) { return (a & ~b) == 0; }

constexpr std::size_t cardinality(StateSet s) { return static_cast<std::size_t>(std::popcount(s)); }

constexpr std::size_t lowest(StateSet s) { return static_cast<std::size_t>(std::countr_zero(s)); }

template <class F>
void for_each_member(StateSet s, F&& f) {
  while (s != 0) {
    const std::size_t i = lowest(s);
    f(i);
    s &= s - 1;
  }
}

}  // namespace mgk
