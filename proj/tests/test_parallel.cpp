#include <gtest/gtest.h>

#include "mgk/coalgebra.hpp"
#include "mgk/logic.hpp"
#include "oracles.hpp"

namespace {

using namespace mgk;

TEST(Parallel, KleisliMatchesSerial) {
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    auto x = random_space(rng, rng.between(1, 20));
    auto y = random_space(rng, rng.between(1, 20));
    auto z = random_space(rng, rng.between(1, 20));
    const auto k = random_kernel(rng, x, y);
    const auto l = random_kernel(rng, y, z);
    EXPECT_EQ(kleisli_compose(l, k), kleisli_compose_serial(l, k));
  }
}

TEST(Parallel, RefinementMatchesSerial) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = oracle::random_kripke(rng, rng.between(1, 16), {"a", "b"}, {"p"}, 3);
    EXPECT_EQ(equivalence_partition(m), equivalence_partition_serial(m));
  }
}

TEST(Parallel, SweepsMatchSerial) {
  EXPECT_EQ(aczel_sweep(2), aczel_sweep_serial(2));
  EXPECT_EQ(upper_closed_sweep(2, 1), upper_closed_sweep_serial(2, 1));
}

}  // namespace
