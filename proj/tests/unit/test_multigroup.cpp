#include <gtest/gtest.h>

#include <cmath>

#include "mbsel/evalbench.hpp"
#include "mbsel/fbed.hpp"
#include "mbsel/multigroup.hpp"
#include "mbsel/random.hpp"
#include "mbsel/simgen.hpp"

namespace mbsel {
namespace {

std::vector<double> normals(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = standard_normal(rng);
  return v;
}

double variance(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += (a[i] - ma) * (b[i] - mb);
    aa += (a[i] - ma) * (a[i] - ma);
    bb += (b[i] - mb) * (b[i] - mb);
  }
  return ab / std::sqrt(aa * bb);
}

DataTable small_linear(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  auto a = normals(rng, n), b = normals(rng, n), c = normals(rng, n), d = normals(rng, n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] - 0.8 * b[i] + 0.2 * standard_normal(rng);
  return DataTable({Column::continuous("a", a), Column::continuous("b", b), Column::continuous("c", c),
                    Column::continuous("d", d), Column::continuous("y", y)});
}

TEST(PrepareTarget, BinaryAndRejections) {
  const DataTable t({Column::categorical("y", {"0", "1"}, {1, 0, 1}),
                     Column::categorical("g", {"a", "b", "c"}, {0, 1, 2}),
                     Column::continuous("v", {0.5, 1.5, 2.5})});
  const auto y = prepare_target(t, "y");
  EXPECT_TRUE(y.binary);
  EXPECT_EQ(y.values, (std::vector<double>{1, 0, 1}));
  EXPECT_FALSE(prepare_target(t, "v").binary);
  EXPECT_THROW(prepare_target(t, "g"), std::invalid_argument);
}

TEST(ResidualTarget, DeterminedTargetLeavesLittle) {
  Rng rng(1);
  const auto x = normals(rng, 2000);
  const DataTable t({Column::continuous("x", x), Column::continuous("y", x)});
  const auto target = prepare_target(t, "y");
  const auto r = residual_target(t, {"x"}, target, {});
  EXPECT_LE(variance(r.values), 0.05 * variance(x));
}

TEST(ResidualTarget, NoiseSelectionKeepsTarget) {
  Rng rng(2);
  const auto noise = normals(rng, 2000), y = normals(rng, 2000);
  const DataTable t({Column::continuous("z", noise), Column::continuous("y", y)});
  const auto r = residual_target(t, {"z"}, prepare_target(t, "y"), {});
  EXPECT_GE(correlation(r.values, y), 0.9);
}

TEST(ResidualTarget, BinaryResidualsBounded) {
  Rng rng(3);
  const auto x = normals(rng, 1000);
  std::vector<int> y(1000);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = bernoulli(rng, 1.0 / (1.0 + std::exp(-x[i])));
  const DataTable t({Column::continuous("x", x), Column::categorical("y", {"0", "1"}, y)});
  const auto r = residual_target(t, {"x"}, prepare_target(t, "y"), {});
  for (double v : r.values) {
    EXPECT_GT(v, -1.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(ScreenGroup, RedundantCopyOfSelectedIsDropped) {
  int dropped = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(mix_seed(s, 4));
    const std::size_t n = 5000;
    std::vector<int> z(n);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = static_cast<int>(rng() % 3);
      x[i] = z[i] + 0.3 * standard_normal(rng);
      y[i] = 1.5 * z[i] + standard_normal(rng);
    }
    const DataTable t({Column::categorical("z", {"a", "b", "c"}, z), Column::continuous("x", x),
                       Column::continuous("y", y)});
    RcitParams p;
    p.seed = s;
    if (screen_group({"x"}, GroupKind::Continuous, {"z"}, t.column("y"), t, 1e-4, p).empty()) ++dropped;
  }
  EXPECT_GE(dropped, 18);
}

TEST(ScreenGroup, CategoricalCopyOfContinuousIsDropped) {
  Rng rng(5);
  const std::size_t n = 5000;
  std::vector<int> c(n);
  std::vector<double> z(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = standard_normal(rng);
    c[i] = z[i] + 0.3 * standard_normal(rng) > 0.0;
    y[i] = 0.3 * z[i] + standard_normal(rng);
  }
  const DataTable t({Column::continuous("z", z), Column::categorical("c", {"0", "1"}, c),
                     Column::continuous("y", y)});
  // Oracle: c carries signal only through z, so stratified on binned z nothing is left.
  EXPECT_TRUE(screen_group({"c"}, GroupKind::Categorical, {"z"}, t.column("y"), t, 1e-4).empty());
}

TEST(ScreenGroup, UnrelatedMembersRetained) {
  Rng rng(6);
  const std::size_t n = 3000;
  std::vector<int> z(n);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = bernoulli(rng, 0.5);
    x[i] = standard_normal(rng);
    y[i] = z[i] + x[i] + standard_normal(rng);
  }
  const DataTable t({Column::categorical("z", {"0", "1"}, z), Column::continuous("x", x),
                     Column::continuous("y", y)});
  EXPECT_EQ(screen_group({"x"}, GroupKind::Continuous, {"z"}, t.column("y"), t, 1e-4),
            std::vector<std::string>{"x"});
  EXPECT_EQ(screen_group({"x"}, GroupKind::Continuous, {}, t.column("y"), t, 1e-4),
            std::vector<std::string>{"x"});
}

TEST(RunM2, SingleGroupIsOneFbedRun) {
  const auto t = small_linear(1000, 7);
  MultiGroupConfig config;
  config.group_assignment = std::map<std::string, int>{{"a", 0}, {"b", 0}, {"c", 0}, {"d", 0}};
  const auto state = run_m2(t, "y", config);
  EXPECT_TRUE(state.grouping_bypassed);
  EXPECT_EQ(state.residual_fits, 0u);
  ASSERT_EQ(state.per_group_selected.size(), 1u);

  const auto y = as_matrix(t.column("y").values);
  const CITester tester = [&](const std::string& c, const std::vector<std::string>& cond) {
    return rcit(as_matrix(t.column(c).values), y, design_matrix(t, cond), config.rcit_params);
  };
  const auto direct = fbed({"a", "b", "c", "d"}, tester, {config.fbed_k, config.alpha});
  EXPECT_EQ(state.per_group_selected.at(0), direct.selected);
  EXPECT_EQ(state.mb_set, (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(state.converged);
}

TEST(RunM2, RejectsCategoricalCandidates) {
  const DataTable t({Column::categorical("g", {"0", "1"}, std::vector<int>(60, 0)),
                     Column::continuous("y", std::vector<double>(60, 1.0))});
  EXPECT_THROW(run_m2(t, "y"), std::invalid_argument);
}

TEST(RunM3, MatchesRunM2WithoutCategoricals) {
  const auto data = generate({SimKind::LinearInteractions, 0.5, 1500, Response::Continuous, 3});
  const auto a = run_m2(data.table, "y");
  const auto b = run_m3(data.table, "y");
  EXPECT_EQ(a.mb_set, b.mb_set);
  EXPECT_EQ(a.per_group_selected, b.per_group_selected);
  EXPECT_EQ(a.outer_iteration, b.outer_iteration);
}

TEST(RunM3, Deterministic) {
  const auto data = generate({SimKind::Complex, 0.5, 1500, Response::Continuous, 4});
  EXPECT_EQ(run_m3(data.table, "y").mb_set, run_m3(data.table, "y").mb_set);
}

TEST(RunM3, IndependentTargetSelectsNothing) {
  int empty = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    Rng rng(mix_seed(s, 8));
    std::vector<Column> cols;
    for (int j = 0; j < 12; ++j) cols.push_back(Column::continuous("x" + std::to_string(j), normals(rng, 1000)));
    std::vector<int> g(1000);
    for (auto& v : g) v = static_cast<int>(rng() % 3);
    cols.push_back(Column::categorical("g", {"a", "b", "c"}, g));
    cols.push_back(Column::continuous("y", normals(rng, 1000)));
    MultiGroupConfig config;
    config.rcit_params.seed = s;
    if (run_m3(DataTable(std::move(cols)), "y", config).mb_set.empty()) ++empty;
  }
  EXPECT_GE(empty, 38);
}

TEST(RunM3, PreSpecifiedGroupsBypassClustering) {
  const auto t = small_linear(800, 9);
  MultiGroupConfig config;
  config.group_assignment = std::map<std::string, int>{{"a", 0}, {"b", 1}, {"c", 0}, {"d", 1}};
  const auto state = run_m3(t, "y", config);
  EXPECT_TRUE(state.grouping_bypassed);
  ASSERT_EQ(state.partition.continuous_groups.size(), 2u);
  EXPECT_EQ(state.partition.continuous_groups[0], (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(state.mb_set, (std::vector<std::string>{"a", "b"}));
}

TEST(RunM3, LinearContinuousRecovery) {
  const auto data = generate({SimKind::LinearInteractions, 0.5, 5000, Response::Continuous, 1});
  EXPECT_GE(f1(run_m3(data.table, "y").mb_set, data.true_mb), 0.95);
}

TEST(RunM3, ComplexContinuousRecovery) {
  const auto data = generate({SimKind::Complex, 0.5, 5000, Response::Continuous, 1});
  EXPECT_GE(f1(run_m3(data.table, "y").mb_set, data.true_mb), 0.9);
}

TEST(RunM3, ComplexBinaryRecovery) {
  const auto data = generate({SimKind::Complex, 0.8, 5000, Response::Binary, 1});
  EXPECT_GE(f1(run_m3(data.table, "y").mb_set, data.true_mb), 0.85);
}

}  // namespace
}  // namespace mbsel
