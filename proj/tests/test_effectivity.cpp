#include <gtest/gtest.h>

#include "mgk/effectivity.hpp"
#include "mgk/errors.hpp"
#include "mgk/random.hpp"

namespace {

using namespace mgk;

Rational r(const char* s) { return parse_rational(s); }

SpaceRef discrete(std::size_t n) { return share(FinMeasurableSpace::discrete(index_labels(n))); }

FinMeasure measure(const SpaceRef& s, std::vector<const char*> w) {
  std::vector<Rational> out;
  for (const char* x : w) out.push_back(r(x));
  return FinMeasure(s, out);
}

MarkovKernel kernel(const SpaceRef& s, const std::vector<std::vector<const char*>>& rows) {
  std::vector<FinMeasure> ms;
  for (const auto& row : rows) ms.push_back(measure(s, row));
  return MarkovKernel(s, s, ms);
}

TEST(EffFromKernel, BetaMembership) {
  auto s = discrete(2);
  const auto k = kernel(s, {{"1/2", "1/2"}, {"1/4", "3/4"}});
  const auto eff = eff_from_kernel(k);
  for (std::size_t x = 0; x < 2; ++x) {
    for (StateSet a = 0; a < 4; ++a) {
      for (int i = 0; i <= 8; ++i) {
        const Rational q = fraction(i, 8);
        EXPECT_EQ(eff.at(x).contains(beta(s, a, q)), k(x, a) >= q);
      }
    }
  }
  EXPECT_FALSE(eff.at(0).contains(beta(s, 0b01, r("3/4"))));
  const auto d = eff_from_kernel(dirac_kernel(s));
  for (std::size_t x = 0; x < 2; ++x) EXPECT_TRUE(d.at(x).contains(beta(s, singleton(x), 1)));
}

TEST(EffFromTransition, Examples) {
  const TransitionSystem ts{{"a", "b", "c"}, {0b001, 0b011, 0b100}};
  const auto eff = eff_from_transition(ts);
  const auto& s = eff.space();
  EXPECT_TRUE(eff.at(0).contains(beta(s, 0b001, 1)));
  EXPECT_FALSE(eff.at(0).contains(beta(s, 0b010, r("1/8"))));
  EXPECT_TRUE(eff.at(1).contains(beta(s, 0b011, 1)));
  EXPECT_FALSE(eff.at(1).contains(beta(s, 0b001, r("1/2"))));
  const TransitionSystem dead{{"a"}, {0}};
  EXPECT_THROW(eff_from_transition(dead), InputError);
}

TEST(EffectivityFunction, PortfoliosMustBeAtomConstant) {
  auto s = share(FinMeasurableSpace::trivial({"a", "b"}));
  const auto mu = measure(s, {"1"});
  EXPECT_NO_THROW(EffectivityFunction(s, {Portfolio::kernel_generated(mu), Portfolio::kernel_generated(mu)}));
  auto d = discrete(2);
  EXPECT_THROW(EffectivityFunction(d, {Portfolio::kernel_generated(dirac(d, 0))}), InputError);
}

TEST(EffectivityFunction, MembershipIsAntitoneInBound) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = random_space(rng, rng.between(1, 4));
    std::vector<FinMeasure> gens;
    for (std::size_t k = rng.between(1, 3); k > 0; --k) gens.push_back(random_measure(rng, s, 6));
    const auto p = Portfolio::finitely_generated(gens);
    const StateSet a = rng.subset(s->size());
    StateSet am = 0;
    for (std::size_t j = 0; j < s->atom_count(); ++j) {
      if (subset_of(s->atom(j), a)) am |= s->atom(j);
    }
    bool member = true;
    for (int i = 0; i <= 12; ++i) {
      const bool now = p.contains(beta(s, am, fraction(i, 12)));
      EXPECT_TRUE(member || !now);
      member = now;
    }
  }
}

TEST(TMeasurability, Examples) {
  auto s = discrete(2);
  const auto eff = eff_from_kernel(kernel(s, {{"1/2", "1/2"}, {"1/4", "3/4"}}));
  const auto cells = t_measurability_report(eff, {{1, 0}, false});
  ASSERT_EQ(cells.size(), 2U);
  EXPECT_EQ(cells[0].q_range, QInterval::down_closed(r("1/2")));
  EXPECT_EQ(cells[1].q_range, QInterval::down_closed(r("1/4")));
  const auto strict = t_measurability_report(eff, {{1, 0}, true});
  EXPECT_EQ(strict[1].q_range, QInterval::down_open(r("1/4")));

  const auto zero = t_measurability_report(eff, {{0, 0}, false});
  for (const auto& c : zero) EXPECT_EQ(c.q_range, QInterval(0, true, 0, true));

  const Portfolio p = Portfolio::finitely_generated({measure(s, {"1/2", "1/2"}), measure(s, {"1/4", "3/4"})});
  const EffectivityFunction g(s, {p, p});
  const auto gc = t_measurability_report(g, {{1, 0}, false});
  EXPECT_EQ(gc[0].q_range, QInterval::down_closed(r("1/4")));
}

TEST(TMeasurability, CellsMatchMembership) {
  Rng rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    auto s = random_space(rng, rng.between(1, 4));
    const auto eff = eff_from_kernel(random_kernel(rng, s, s, 6));
    LinearFamily fam;
    for (std::size_t j = 0; j < s->atom_count(); ++j) fam.coefficients.emplace_back(static_cast<long>(rng.between(0, 4)) - 1);
    fam.strict = rng.coin();
    const auto cells = t_measurability_report(eff, fam);
    StateSet covered = 0;
    for (const auto& c : cells) {
      covered |= c.states;
      const std::size_t x = lowest(c.states);
      for (int i = 0; i <= 24; ++i) {
        const Rational q = fraction(i, 24);
        const LinPred h{s, fam.coefficients, q, fam.strict};
        EXPECT_EQ(c.q_range.contains(q), eff.at(x).contains(h));
      }
    }
    EXPECT_EQ(covered, s->full());
  }
}

TEST(CharRel, FromKernelAndGenerators) {
  auto s = discrete(2);
  const auto k = kernel(s, {{"1/3", "2/3"}, {"1", "0"}});
  const auto eff = eff_from_kernel(k);
  const auto rel = char_rel_of(eff, 0);
  for (StateSet a = 0; a < 4; ++a) EXPECT_EQ(rel.threshold(a), k(0, a));
  EXPECT_EQ(rel.threshold(0), 0);
  EXPECT_EQ(rel.threshold(0b11), 1);
  EXPECT_TRUE(rel.contains(r("1/3"), 0b01));
  EXPECT_FALSE(rel.contains(r("1/2"), 0b01));

  const Portfolio p = Portfolio::finitely_generated({measure(s, {"1/2", "1/2"}), measure(s, {"1/4", "3/4"})});
  const EffectivityFunction g(s, {p, p});
  const auto gr = char_rel_of(g, 0);
  EXPECT_EQ(gr.threshold(0b01), r("1/4"));
  EXPECT_EQ(gr.threshold(0b10), r("1/2"));
}

TEST(CharRel, ValidationExamples) {
  auto s = discrete(2);
  CharacteristicRelation bad(s, {0, r("3/4"), r("3/4"), 1});
  const auto rep = validate_char_rel(bad);
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.first_failing_rule(), 5);

  CharacteristicRelation empty_half(s, {r("1/2"), r("1/2"), r("1/2"), 1});
  bool rule6 = false;
  for (const auto& v : validate_char_rel(empty_half).violations) rule6 = rule6 || v.rule == 6;
  EXPECT_TRUE(rule6);

  CharacteristicRelation no_top(s, {0, r("1/2"), r("1/4"), r("3/4")});
  bool rule8 = false;
  for (const auto& v : validate_char_rel(no_top).violations) rule8 = rule8 || v.rule == 8;
  EXPECT_TRUE(rule8);

  CharacteristicRelation non_monotone(s, {0, r("1/2"), r("1/2"), r("1/4")});
  EXPECT_EQ(validate_char_rel(non_monotone).first_failing_rule(), 1);
}

TEST(CharRel, KernelRelationsAlwaysValid) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = random_space(rng, rng.between(1, 5));
    const auto k = random_kernel(rng, s, s);
    const auto eff = eff_from_kernel(k);
    for (std::size_t x = 0; x < s->size(); ++x) {
      const auto rel = char_rel_of(eff, x);
      const auto rep = validate_char_rel(rel);
      EXPECT_TRUE(rep.passed()) << rep.format();
      EXPECT_EQ(measure_from_char(rel), k.row(x));
    }
  }
}

TEST(MeasureFromChar, Examples) {
  auto s = discrete(2);
  CharacteristicRelation rel(s, {0, r("1/3"), r("2/3"), 1});
  EXPECT_EQ(measure_from_char(rel), measure(s, {"1/3", "2/3"}));

  const Portfolio p = Portfolio::finitely_generated({measure(s, {"1/2", "1/2"}), measure(s, {"1/4", "3/4"})});
  const EffectivityFunction g(s, {p, p});
  EXPECT_THROW(measure_from_char(char_rel_of(g, 0)), PreconditionError);
  EXPECT_THROW(measure_from_char(CharacteristicRelation(s, {r("1/2"), r("1/2"), r("1/2"), 1})), PreconditionError);
}

TEST(SatisfyImplement, Examples) {
  auto s = discrete(2);
  const auto mu = measure(s, {"1/4", "3/4"});
  const auto q = Portfolio::kernel_generated(mu);
  const EffectivityFunction eff(s, {q, q});
  auto rel = char_rel_of(eff, 0);
  const auto both = check_satisfy_implement(q, rel, mu);
  EXPECT_TRUE(both.satisfies);
  EXPECT_TRUE(both.implements);
  rel.set_threshold(0b01, r("3/8"));
  EXPECT_FALSE(check_satisfy_implement(q, rel, mu).satisfies);
}

TEST(SatisfyImplement, AgreeWhenMuIsDerivedFromR) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = random_space(rng, rng.between(1, 4));
    const auto rel = char_rel_of(eff_from_kernel(random_kernel(rng, s, s, 8)), 0);
    const auto mu = measure_from_char(rel);
    // Any portfolio: kernel-generated with an unrelated measure, or generators.
    const Portfolio q = rng.coin() ? Portfolio::kernel_generated(random_measure(rng, s, 8))
                                   : Portfolio::finitely_generated({random_measure(rng, s, 8), mu});
    const auto si = check_satisfy_implement(q, rel, mu);
    EXPECT_EQ(si.satisfies, si.implements);
    const auto self = check_satisfy_implement(Portfolio::kernel_generated(mu), rel, mu);
    EXPECT_TRUE(self.satisfies && self.implements);
  }
}

TEST(KernelFromEff, Roundtrip) {
  Rng rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    auto s = random_space(rng, rng.between(1, 5));
    const auto k = random_kernel(rng, s, s);
    const auto rec = kernel_from_eff(eff_from_kernel(k));
    ASSERT_TRUE(rec.kernel.has_value());
    EXPECT_EQ(*rec.kernel, k);
  }
}

TEST(KernelFromEff, TransitionWithChoiceFails) {
  const TransitionSystem ts{{"a", "b"}, {0b11, 0b10}};
  const auto rec = kernel_from_eff(eff_from_transition(ts));
  EXPECT_FALSE(rec.kernel.has_value());
  ASSERT_FALSE(rec.diagnostics.empty());
  EXPECT_NE(rec.diagnostics.front().find("state a"), std::string::npos);

  const TransitionSystem det{{"a", "b"}, {0b10, 0b01}};
  const auto ok = kernel_from_eff(eff_from_transition(det));
  ASSERT_TRUE(ok.kernel.has_value());
  EXPECT_EQ(ok.kernel->row(0), dirac(ok.kernel->dom(), 1));
}

TEST(KernelFromEff, GeneratorsThatAgreeCollapse) {
  auto s = discrete(2);
  const auto mu = measure(s, {"1/3", "2/3"});
  const Portfolio p = Portfolio::finitely_generated({mu, mu});
  const auto rec = kernel_from_eff(EffectivityFunction(s, {p, Portfolio::kernel_generated(dirac(s, 0))}));
  ASSERT_TRUE(rec.kernel.has_value());
  EXPECT_EQ(rec.kernel->row(0), mu);
  EXPECT_EQ(rec.kernel->row(1), dirac(s, 0));
}

}  // namespace
