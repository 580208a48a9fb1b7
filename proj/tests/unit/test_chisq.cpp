#include <gtest/gtest.h>

#include "mbsel/chisq.hpp"
#include "mbsel/random.hpp"

namespace mbsel {
namespace {

Column binary(const std::string& name, const std::vector<int>& codes) {
  return Column::categorical(name, {"0", "1"}, codes);
}

TEST(Pearson, HandComputed) {
  ContingencyTable t;
  t.counts = {{50, 10}, {10, 50}};
  t.row_levels = {0, 1};
  t.col_levels = {0, 1};
  // Every expected cell is 30: 4 * 20^2 / 30.
  const auto stat = pearson_statistic(t);
  EXPECT_NEAR(stat.statistic, 4.0 * 400.0 / 30.0, 1e-9);
  EXPECT_NEAR(stat.statistic, 53.333, 1e-3);
  EXPECT_EQ(stat.df, 1.0);
  EXPECT_LT(chisq_marginal(t).p_value, 1e-12);
}

TEST(Pearson, ProportionalTableIsIndependent) {
  ContingencyTable t;
  t.counts = {{10, 20, 30}, {20, 40, 60}};
  t.row_levels = {0, 1};
  t.col_levels = {0, 1, 2};
  const auto r = chisq_marginal(t);
  EXPECT_NEAR(r.statistic, 0.0, 1e-12);
  EXPECT_EQ(r.df, 2.0);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

TEST(Pearson, SingleLevelIsDegenerate) {
  const auto a = Column::categorical("a", {"u"}, {0, 0, 0, 0});
  const auto b = binary("b", {0, 1, 0, 1});
  const auto r = chisq_marginal(a, b);
  EXPECT_EQ(r.df, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(Tabulate, CountsObservedLevelsOnly) {
  const std::vector<int> a{0, 2, 2, 0}, b{1, 1, 3, 3};
  const auto t = ContingencyTable::tabulate(a, b);
  EXPECT_EQ(t.row_levels, (std::vector<int>{0, 2}));
  EXPECT_EQ(t.col_levels, (std::vector<int>{1, 3}));
  EXPECT_EQ(t.total(), 4);
  EXPECT_EQ(t.counts[1][1], 1);
}

TEST(ConditionalChisq, IndependentWithinStrata) {
  int accepted = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(mix_seed(s, 1));
    const std::size_t n = 5000;
    std::vector<int> c1(n), c2(n), a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      c1[i] = bernoulli(rng, 0.5);
      c2[i] = bernoulli(rng, 0.4);
      // a and b both depend on the strata but not on each other.
      a[i] = bernoulli(rng, 0.2 + 0.5 * c1[i]);
      b[i] = bernoulli(rng, 0.3 + 0.2 * c1[i] + 0.3 * c2[i]);
    }
    const auto z1 = binary("c1", c1), z2 = binary("c2", c2);
    const Column* cond[] = {&z1, &z2};
    if (chisq_conditional(binary("a", a), binary("b", b), cond).p_value > 0.05) ++accepted;
  }
  EXPECT_GE(accepted, 90);
}

TEST(ConditionalChisq, XorColliderIsDependent) {
  Rng rng(3);
  const std::size_t n = 5000;
  std::vector<int> a(n), b(n), child(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = bernoulli(rng, 0.5);
    b[i] = bernoulli(rng, 0.5);
    child[i] = (a[i] ^ b[i]) ^ static_cast<int>(bernoulli(rng, 0.05));
  }
  const auto c = binary("c", child);
  const Column* cond[] = {&c};
  EXPECT_LT(chisq_conditional(binary("a", a), binary("b", b), cond).p_value, 1e-6);
}

TEST(ConditionalChisq, AllStrataTooSmall) {
  std::vector<int> codes(10), a(10), b(10);
  std::vector<std::string> levels;
  for (int i = 0; i < 10; ++i) {
    codes[i] = i;
    levels.push_back(std::to_string(i));
    a[i] = i % 2;
    b[i] = (i / 2) % 2;
  }
  const auto c = Column::categorical("c", levels, codes);
  const Column* cond[] = {&c};
  const auto r = chisq_conditional(binary("a", a), binary("b", b), cond);
  EXPECT_TRUE(r.data_insufficient);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(ConditionalChisq, EmptyConditioningIsMarginal) {
  const auto a = binary("a", {0, 1, 1, 0, 1, 1, 0, 0});
  const auto b = binary("b", {0, 1, 1, 1, 1, 0, 0, 0});
  const auto c = chisq_conditional(a, b, {});
  const auto m = chisq_marginal(a, b);
  EXPECT_EQ(c.statistic, m.statistic);
  EXPECT_EQ(c.p_value, m.p_value);
}

TEST(MixedMarginal, ShiftedMeansDetected) {
  Rng rng(5);
  std::vector<int> g(2000);
  std::vector<double> v(2000);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = bernoulli(rng, 0.5);
    v[i] = 2.0 * g[i] + standard_normal(rng);
  }
  EXPECT_LT(mixed_marginal(binary("g", g), Column::continuous("v", v)).p_value, 1e-10);
}

TEST(MixedMarginal, CalibratedUnderIndependence) {
  int rejections = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(mix_seed(s, 2));
    std::vector<int> g(2000);
    std::vector<double> v(2000);
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = static_cast<int>(rng() % 3);
      v[i] = standard_normal(rng);
    }
    const auto cat = Column::categorical("g", {"a", "b", "c"}, g);
    if (mixed_marginal(cat, Column::continuous("v", v)).rejects(0.05)) ++rejections;
  }
  EXPECT_GE(rejections / 200.0, 0.02);
  EXPECT_LE(rejections / 200.0, 0.09);
}

TEST(MixedMarginal, ConstantContinuous) {
  const auto r = mixed_marginal(binary("g", {0, 1, 0, 1}), Column::continuous("v", {1, 1, 1, 1}));
  EXPECT_EQ(r.df, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(Chisq, RejectsContinuousInput) {
  const auto v = Column::continuous("v", {1, 2});
  EXPECT_THROW(chisq_marginal(v, binary("b", {0, 1})), std::invalid_argument);
}

}  // namespace
}  // namespace mbsel
