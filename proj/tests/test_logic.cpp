#include <gtest/gtest.h>

#include "mgk/errors.hpp"
#include "mgk/logic.hpp"
#include "oracles.hpp"

namespace {

using namespace mgk;

Rational r(const char* s) { return parse_rational(s); }

SpaceRef discrete(std::size_t n) { return share(FinMeasurableSpace::discrete(index_labels(n))); }

MarkovKernel kernel(const SpaceRef& s, const std::vector<std::vector<const char*>>& rows) {
  std::vector<FinMeasure> ms;
  for (const auto& row : rows) {
    std::vector<Rational> w;
    for (const char* x : row) w.push_back(r(x));
    ms.emplace_back(s, w);
  }
  return MarkovKernel(s, s, ms);
}

// Partition induced by the validity sets of a list of formulas.
Partition separated_by(std::size_t n, const std::vector<oracle::Witness>& ws) {
  std::vector<StateSet> sets;
  for (const auto& w : ws) sets.push_back(w.sets[0]);
  return sigma_close(n, sets);
}

TEST(Parse, Examples) {
  EXPECT_EQ(parse_formula("T")->kind, Formula::Kind::top);
  const auto d = parse_formula("<a>_1/2 p");
  ASSERT_EQ(d->kind, Formula::Kind::diamond);
  EXPECT_EQ(d->name, "a");
  EXPECT_EQ(d->threshold, r("1/2"));
  EXPECT_EQ(d->left->kind, Formula::Kind::prim);
  EXPECT_EQ(modal_depth(*d), 1U);
}

TEST(Parse, RoundTrip) {
  for (const char* text : {"<a>_1/2 (p & <b>_1/4 T)", "p & q & r", "<a>_0 <a>_1 T & p", "(p & q) & <a>_3/4 p"}) {
    const auto phi = parse_formula(text);
    const std::string printed = to_string(*phi);
    EXPECT_EQ(to_string(*parse_formula(printed)), printed) << text;
  }
  // Diamond binds tighter than conjunction, conjunction is left-associative.
  const auto f = parse_formula("<a>_1/2 p & q");
  EXPECT_EQ(f->kind, Formula::Kind::conj);
  const auto g = parse_formula("p & q & s");
  EXPECT_EQ(g->left->kind, Formula::Kind::conj);
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_formula("<a>_3/2 p"), InputError);
  EXPECT_THROW(parse_formula("p &"), ParseError);
  EXPECT_THROW(parse_formula("<a> p"), ParseError);
  EXPECT_THROW(parse_formula("(p"), ParseError);
  try {
    parse_formula("p q");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("position"), std::string::npos);
  }
}

TEST(Validity, Examples) {
  KripkeModel m;
  m.space = discrete(2);
  m.kernels.emplace("a", kernel(m.space, {{"1/2", "1/2"}, {"0", "1"}}));
  m.valuations.emplace("p", 0b10);
  EXPECT_EQ(validity_set(m, *parse_formula("<a>_0 p")), 0b11U);
  EXPECT_EQ(validity_set(m, *parse_formula("<a>_1 T")), 0b11U);
  EXPECT_EQ(validity_set(m, *parse_formula("<a>_3/4 p")), 0b10U);
  EXPECT_EQ(validity_set(m, *parse_formula("<a>_1/2 p & p")), 0b10U);
  EXPECT_THROW(validity_set(m, *parse_formula("<b>_1/2 p")), InputError);
  EXPECT_THROW(validity_set(m, *parse_formula("q")), InputError);
}

TEST(Validity, AlwaysMeasurable) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = oracle::random_kripke(rng, rng.between(1, 5), {"a", "b"}, {"p"});
    for (const auto& w : oracle::distinct_formulas({&m}, 2)) {
      EXPECT_TRUE(m.space->is_measurable(validity_set(m, *w.formula)));
      EXPECT_EQ(validity_set(m, *w.formula), w.sets[0]);
    }
  }
}

TEST(Equivalence, Examples) {
  KripkeModel m;
  m.space = discrete(3);
  m.kernels.emplace("a", dirac_kernel(m.space));
  EXPECT_EQ(equivalence_partition(m), Partition::single_block(3));

  KripkeModel two;
  two.space = discrete(2);
  two.kernels.emplace("a", dirac_kernel(two.space));
  two.valuations.emplace("p", 0b01);
  EXPECT_EQ(equivalence_partition(two), Partition::discrete(2));

  KripkeModel chain;
  chain.space = discrete(3);
  chain.kernels.emplace("a", kernel(chain.space, {{"0", "1", "0"}, {"0", "0", "1"}, {"0", "0", "1"}}));
  chain.valuations.emplace("p", 0b100);
  EXPECT_EQ(equivalence_partition(chain), Partition::discrete(3));
  EXPECT_EQ(separated_by(3, oracle::distinct_formulas({&chain}, 2)), Partition::discrete(3));
}

TEST(Equivalence, MatchesFormulaEnumeration) {
  Rng rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = rng.between(1, 4);
    const auto m = oracle::random_kripke(rng, n, {"a"}, {"p"}, 2, rng.coin());
    const auto alpha = equivalence_partition(m);
    EXPECT_EQ(alpha, separated_by(n, oracle::distinct_formulas({&m}, n)));
    EXPECT_EQ(alpha, equivalence_partition_serial(m));
  }
}

TEST(Equivalence, IsAFixpointAndACongruence) {
  Rng rng(6);
  for (int trial = 0; trial < 60; ++trial) {
    const auto m = oracle::random_kripke(rng, rng.between(1, 5), {"a", "b"}, {"p"});
    const auto alpha = equivalence_partition(m);
    for (const auto& [a, k] : m.kernels) EXPECT_TRUE(check_congruence(alpha, k).ok);
  }
}

TEST(Smallness, Examples) {
  KripkeModel sep;
  sep.space = discrete(2);
  sep.kernels.emplace("a", dirac_kernel(sep.space));
  sep.valuations.emplace("p", 0b01);
  EXPECT_TRUE(check_smallness(sep).small);

  KripkeModel blank;
  blank.space = discrete(3);
  blank.kernels.emplace("a", dirac_kernel(blank.space));
  const auto rep = check_smallness(blank);
  EXPECT_TRUE(rep.small);
  EXPECT_EQ(rep.sigma_alpha, Partition::single_block(3));
}

TEST(Smallness, ThetaInsideSigmaAlpha) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = oracle::random_kripke(rng, rng.between(1, 5), {"a"}, {"p"});
    const auto rep = check_smallness(m);
    EXPECT_TRUE(rep.sigma_alpha.refines(rep.theta));
    EXPECT_EQ(rep.small, rep.sigma_alpha == rep.theta);
    const auto fam = validity_family(m);
    EXPECT_EQ(sigma_close(m.size(), fam), rep.theta);
  }
}

TEST(FactorModel, MergesIndistinguishableStates) {
  KripkeModel m;
  m.space = discrete(3);
  m.kernels.emplace("a", kernel(m.space, {{"1/2", "1/2", "0"}, {"0", "1", "0"}, {"1/4", "1/4", "1/2"}}));
  m.valuations.emplace("p", 0b011);
  const auto f = factor_model(m);
  EXPECT_EQ(f.model.size(), 2U);
  EXPECT_EQ(f.rho.table(), (std::vector<std::size_t>{0, 0, 1}));
  EXPECT_EQ(f.model.kernels.at("a").row(0).weights(), (std::vector<Rational>{1, 0}));
  EXPECT_TRUE(check_kripke_morphism(f.rho, m, f.model));

  KripkeModel sep;
  sep.space = discrete(2);
  sep.kernels.emplace("a", dirac_kernel(sep.space));
  sep.valuations.emplace("p", 0b01);
  EXPECT_EQ(factor_model(sep).model.size(), 2U);
}

TEST(FactorModel, PreservesValidity) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = oracle::random_kripke(rng, rng.between(1, 4), {"a"}, {"p"}, 2);
    const auto f = factor_model(m);
    EXPECT_TRUE(check_kripke_morphism(f.rho, m, f.model));
    for (const auto& w : oracle::distinct_formulas({&m}, 3)) {
      EXPECT_EQ(w.sets[0], f.rho.preimage(validity_set(f.model, *w.formula))) << to_string(*w.formula);
    }
  }
}

TEST(Behavioral, SelfAndFactor) {
  Rng rng(9);
  std::size_t tested = 0;
  for (int trial = 0; trial < 60 && tested < 20; ++trial) {
    const auto m = oracle::random_kripke(rng, rng.between(1, 4), {"a"}, {"p"}, 4, true);
    if (!check_smallness(m).small) continue;
    ++tested;
    const auto self = behavioral_witness(m, m);
    ASSERT_TRUE(self.has_value());
    for (std::size_t c = 0; c < self->iso.size(); ++c) EXPECT_EQ(self->iso[c], c);
    const auto fm = factor_model(m).model;
    const auto w = behavioral_witness(m, fm);
    ASSERT_TRUE(w.has_value());
    EXPECT_TRUE(check_kripke_morphism(w->left, m, w->mediator));
    EXPECT_TRUE(check_kripke_morphism(w->right, fm, w->mediator));
    EXPECT_TRUE(logically_equivalent(m, fm));
  }
  EXPECT_GT(tested, 5U);
}

TEST(Behavioral, PermutedCopy) {
  KripkeModel m;
  m.space = discrete(3);
  m.kernels.emplace("a", kernel(m.space, {{"0", "1", "0"}, {"0", "0", "1"}, {"1/2", "0", "1/2"}}));
  m.valuations.emplace("p", 0b001);
  const auto copy = oracle::permuted_copy(m, {2, 0, 1});
  const auto w = behavioral_witness(m, copy);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->iso, (std::vector<std::size_t>{2, 0, 1}));
}

TEST(Behavioral, DistinctModelsHaveNoWitness) {
  KripkeModel m1;
  m1.space = discrete(1);
  m1.kernels.emplace("a", dirac_kernel(m1.space));
  m1.valuations.emplace("p", 0b1);
  KripkeModel m2 = m1;
  m2.valuations["p"] = 0;
  EXPECT_FALSE(behavioral_witness(m1, m2).has_value());
  EXPECT_FALSE(logically_equivalent(m1, m2));
}

TEST(Behavioral, SignatureMismatch) {
  KripkeModel m1;
  m1.space = discrete(1);
  m1.kernels.emplace("a", dirac_kernel(m1.space));
  KripkeModel m2 = m1;
  m2.valuations.emplace("p", 0b1);
  EXPECT_THROW(behavioral_witness(m1, m2), InputError);
}

TEST(Morphisms, PreserveValidity) {
  Rng rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = oracle::random_kripke(rng, rng.between(1, 4), {"a"}, {"p"}, 4, true);
    const std::size_t n = m.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = (i + 1) % n;
    const auto copy = oracle::permuted_copy(m, perm);
    const MeasurableMap f(m.space, copy.space, perm);
    ASSERT_TRUE(check_kripke_morphism(f, m, copy));
    for (const auto& w : oracle::distinct_formulas({&m}, 3)) {
      EXPECT_EQ(w.sets[0], f.preimage(validity_set(copy, *w.formula)));
    }
  }
}

}  // namespace
