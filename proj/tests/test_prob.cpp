#include <gtest/gtest.h>

#include "mgk/errors.hpp"
#include "mgk/prob.hpp"
#include "mgk/random.hpp"
#include "oracles.hpp"

namespace {

using namespace mgk;

Rational r(const char* s) { return parse_rational(s); }

SpaceRef discrete(std::size_t n) { return share(FinMeasurableSpace::discrete(index_labels(n))); }

TEST(Rational, ParseAndPrint) {
  EXPECT_EQ(to_string(r("2/4")), "1/2");
  EXPECT_EQ(to_string(r("-3")), "-3");
  EXPECT_EQ(to_string(r("4/2")), "2");
  EXPECT_THROW(parse_rational("1/0"), InputError);
  EXPECT_THROW(parse_rational("0.5"), InputError);
  EXPECT_THROW(parse_rational(""), InputError);
}

TEST(FinMeasure, Validation) {
  auto s = discrete(2);
  EXPECT_THROW(FinMeasure(s, {r("1/2"), r("5/8")}), InputError);
  EXPECT_THROW(FinMeasure(s, {r("3/2"), r("-1/2")}), InputError);
  EXPECT_THROW(FinMeasure(s, {r("1")}), InputError);
  const FinMeasure mu(s, {r("1/4"), r("3/4")});
  EXPECT_EQ(mu(0b11), 1);
  EXPECT_EQ(mu(0), 0);
}

TEST(FinMeasure, NonMeasurableSetRejected) {
  auto s = share(FinMeasurableSpace::trivial({"a", "b"}));
  const FinMeasure mu(s, {r("1")});
  EXPECT_THROW(mu(0b01), InputError);
}

TEST(Beta, Examples) {
  auto s = discrete(2);
  const FinMeasure uniform(s, {r("1/2"), r("1/2")});
  EXPECT_TRUE(beta(s, 0b11, r("0"))(uniform));
  EXPECT_TRUE(beta(s, 0b11, r("0"))(dirac(s, 0)));
  EXPECT_FALSE(beta(s, 0, r("1/8"))(uniform));
  EXPECT_TRUE(beta(s, 0b01, r("1/2"))(uniform));
  EXPECT_FALSE(beta(s, 0b01, r("1/2"), true)(uniform));
}

TEST(Dirac, OnCoarseSpace) {
  auto s = share(FinMeasurableSpace::trivial({"a", "b"}));
  EXPECT_EQ(dirac(s, 0).weights(), (std::vector<Rational>{1}));
  auto d = discrete(3);
  EXPECT_EQ(dirac(d, 1)(0b010), 1);
  EXPECT_EQ(dirac(d, 1)(0b101), 0);
}

TEST(ImageMeasure, Examples) {
  auto abc = discrete(3);
  auto uv = discrete(2);
  const FinMeasure mu(abc, {r("1/2"), r("1/4"), r("1/4")});
  EXPECT_EQ(image_measure(MeasurableMap::identity(abc), mu), mu);
  EXPECT_EQ(image_measure(MeasurableMap::constant(abc, uv, 1), mu), dirac(uv, 1));
  EXPECT_EQ(image_measure(MeasurableMap(abc, uv, {0, 0, 1}), mu).weights(),
            (std::vector<Rational>{r("3/4"), r("1/4")}));
}

TEST(Integrate, Examples) {
  auto s = discrete(2);
  const FinMeasure mu(s, {r("1/3"), r("2/3")});
  EXPECT_EQ(integrate(BoundedFunction::indicator(s, 0b01), mu), r("1/3"));
  EXPECT_EQ(integrate(BoundedFunction::constant(s, 0), mu), 0);
  EXPECT_EQ(integrate(BoundedFunction(s, {r("2"), r("-1")}), mu), 0);
}

TEST(LiftKernel, Examples) {
  auto s = discrete(2);
  const MarkovKernel k(s, s, {FinMeasure(s, {r("1/2"), r("1/2")}), FinMeasure(s, {r("0"), r("1")})});
  const FinMeasure mu(s, {r("1/2"), r("1/2")});
  EXPECT_EQ(k.lift(mu).weights(), (std::vector<Rational>{r("1/4"), r("3/4")}));
  EXPECT_EQ(k.lift(dirac(s, 0)), k.row(0));
  EXPECT_EQ(dirac_kernel(s).lift(mu), mu);
  EXPECT_EQ(lift_kernel(k)(mu), k.lift(mu));
}

TEST(MarkovKernel, RowsMustBeAtomConstant) {
  auto dom = share(FinMeasurableSpace::trivial({"a", "b"}));
  auto cod = discrete(2);
  EXPECT_THROW(MarkovKernel(dom, cod, {dirac(cod, 0), dirac(cod, 1)}), InputError);
  EXPECT_NO_THROW(MarkovKernel(dom, cod, {dirac(cod, 0), dirac(cod, 0)}));
}

TEST(IntegralTransport, BothSidesAgree) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto x = random_space(rng, rng.between(1, 5));
    auto y = random_space(rng, rng.between(1, 5));
    const MarkovKernel k = random_kernel(rng, x, y);
    const FinMeasure mu = random_measure(rng, x);
    std::vector<Rational> values;
    for (std::size_t j = 0; j < y->atom_count(); ++j) values.push_back(fraction(static_cast<long>(rng.between(0, 8)) - 4, 3));
    const BoundedFunction f(y, values);
    const auto t = integral_transport(f, k, mu);
    EXPECT_EQ(t.lhs, t.rhs);
    EXPECT_EQ(t.lhs, integrate(f, k.lift(mu)));
  }
  auto s = discrete(2);
  const FinMeasure mu(s, {r("1/4"), r("3/4")});
  const auto ind = BoundedFunction::indicator(s, 0b10);
  const MarkovKernel k(s, s, {FinMeasure(s, {r("1/2"), r("1/2")}), FinMeasure(s, {r("0"), r("1")})});
  EXPECT_EQ(integral_transport(ind, k, mu).lhs, k.lift(mu)(0b10));
  EXPECT_EQ(integral_transport(ind, dirac_kernel(s), mu).rhs, integrate(ind, mu));
}

TEST(KleisliCompose, MatchesPointwiseSum) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    auto x = discrete(rng.between(1, 5));
    auto y = discrete(rng.between(1, 5));
    auto z = discrete(rng.between(1, 5));
    const MarkovKernel k = random_kernel(rng, x, y);
    const MarkovKernel l = random_kernel(rng, y, z);
    const MarkovKernel lk = kleisli_compose(l, k);
    const auto expect = oracle::compose_points(l, k);
    for (std::size_t a = 0; a < x->size(); ++a) {
      for (std::size_t c = 0; c < z->size(); ++c) EXPECT_EQ(lk(a, singleton(c)), expect[a][c]);
    }
  }
}

TEST(KleisliCompose, UnitsAndDeterministicKernels) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = random_space(rng, rng.between(1, 5));
    auto y = random_space(rng, rng.between(1, 5));
    const MarkovKernel k = random_kernel(rng, x, y);
    EXPECT_EQ(kleisli_compose(k, dirac_kernel(x)), k);
    EXPECT_EQ(kleisli_compose(dirac_kernel(y), k), k);
  }
  auto a = discrete(3);
  auto b = discrete(2);
  auto c = discrete(3);
  const MeasurableMap f(a, b, {1, 0, 1});
  const MeasurableMap g(b, c, {2, 0});
  EXPECT_EQ(kleisli_compose(deterministic_kernel(g), deterministic_kernel(f)), deterministic_kernel(f.then(g)));
}

TEST(KleisliCompose, Associative) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    auto w = random_space(rng, rng.between(1, 5));
    auto x = random_space(rng, rng.between(1, 5));
    auto y = random_space(rng, rng.between(1, 5));
    auto z = random_space(rng, rng.between(1, 5));
    const MarkovKernel k = random_kernel(rng, w, x);
    const MarkovKernel l = random_kernel(rng, x, y);
    const MarkovKernel m = random_kernel(rng, y, z);
    EXPECT_EQ(kleisli_compose(kleisli_compose(m, l), k), kleisli_compose(m, kleisli_compose(l, k)));
  }
}

TEST(KleisliCompose, SpaceMismatchRejected) {
  auto x = discrete(2);
  auto y = discrete(3);
  EXPECT_THROW(kleisli_compose(dirac_kernel(x), dirac_kernel(y)), InputError);
}

}  // namespace
