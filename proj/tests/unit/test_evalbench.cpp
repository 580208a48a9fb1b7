#include <gtest/gtest.h>

#include <algorithm>

#include "mbsel/evalbench.hpp"

namespace mbsel {
namespace {

TEST(F1, Cases) {
  EXPECT_EQ(f1({"a", "b"}, {"b", "a"}), 1.0);
  EXPECT_EQ(f1({}, {"a"}), 0.0);
  EXPECT_THROW(f1({"a"}, {}), std::invalid_argument);
  std::vector<std::string> truth, selected;
  for (int i = 0; i < 22; ++i) truth.push_back("t" + std::to_string(i));
  selected = truth;
  selected.push_back("fp1");
  selected.push_back("fp2");
  const double precision = 22.0 / 24.0;
  EXPECT_NEAR(f1(selected, truth), 2.0 * precision / (precision + 1.0), 1e-12);
  EXPECT_NEAR(f1(selected, truth), 0.9565, 1e-4);
}

TEST(ReplicateStudy, SingleReplicate) {
  const SimSpec spec{SimKind::LinearInteractions, 0.5, 1500, Response::Continuous, 0};
  const auto r = replicate_study(spec, {}, 1, 11);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].seed, 11u);
  EXPECT_EQ(r.mean_f1, r.records[0].f1);
  EXPECT_EQ(r.sd_f1, 0.0);
  EXPECT_EQ(r.selection_frequency.size(), 51u);
}

TEST(ReplicateStudy, LinearContinuous) {
  const SimSpec spec{SimKind::LinearInteractions, 0.5, 5000, Response::Continuous, 0};
  const auto r = replicate_study(spec, {}, 5, 0);
  ASSERT_EQ(r.records.size(), 5u);
  EXPECT_GE(r.mean_f1, 0.95);
  for (const auto& [name, freq] : r.selection_frequency) {
    const bool in_mb = std::find(r.true_mb.begin(), r.true_mb.end(), name) != r.true_mb.end();
    if (in_mb) EXPECT_GE(freq, 0.8) << name;
    else EXPECT_LE(freq, 0.2) << name;
  }
}

TEST(Calibration, GridLayout) {
  const auto rows = rcit_calibration({0, 2}, {40, 80}, 600, 3, 1);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].cond_size, 0u);
  EXPECT_EQ(rows[1].d, 80);
  EXPECT_EQ(rows[2].cond_size, 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.p_values.size(), 3u);
    EXPECT_GE(r.fpr, 0.0);
    EXPECT_LE(r.fpr, 1.0);
  }
  EXPECT_THROW(rcit_calibration({calibration_conditioning_pool().size() + 2}, {40}, 600, 1, 1),
               std::invalid_argument);
}

TEST(Calibration, PoolExcludesCorrelatedTriple) {
  const auto& pool = calibration_conditioning_pool();
  EXPECT_EQ(pool.size(), 47u);
  for (const char* name : {"x37", "x38", "x39", "y"})
    EXPECT_EQ(std::count(pool.begin(), pool.end(), name), 0) << name;
}

TEST(Calibration, MarginalNominalLevel) {
  const auto rows = rcit_calibration({0}, {25}, 2000, 200, 3);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GE(rows[0].fpr, 0.02);
  EXPECT_LE(rows[0].fpr, 0.09);
}

TEST(Calibration, BatchMedian) {
  // Batches of 4: rates 0.25, 0.75, 0.0 -> median 0.25.
  const std::vector<double> p{0.01, 0.5, 0.5, 0.5, 0.01, 0.01, 0.01, 0.5, 0.9, 0.9, 0.9, 0.9};
  EXPECT_DOUBLE_EQ(batch_median_fpr(p, 0.05, 4), 0.25);
}

}  // namespace
}  // namespace mbsel
