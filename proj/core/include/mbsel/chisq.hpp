#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mbsel/ci_result.hpp"
#include "mbsel/data_table.hpp"

namespace mbsel {

/// r x c table of observed counts. Only levels that actually occur get a
/// row or column.
struct ContingencyTable {
  std::vector<std::vector<std::int64_t>> counts;
  std::vector<int> row_levels;
  std::vector<int> col_levels;

  std::size_t rows() const { return row_levels.size(); }
  std::size_t cols() const { return col_levels.size(); }
  std::int64_t total() const;

  static ContingencyTable tabulate(std::span<const int> a, std::span<const int> b);
};

struct PearsonStat {
  double statistic = 0.0;
  double df = 0.0;
};

/// Pearson sum (O-E)^2/E with df (r-1)(c-1); no continuity correction.
PearsonStat pearson_statistic(const ContingencyTable& table);

/// Upper tail of chi-square with df degrees of freedom; 1 when df == 0.
double chisq_upper_tail(double statistic, double df);

CITestResult chisq_marginal(const Column& a, const Column& b);
CITestResult chisq_marginal(const ContingencyTable& table);

struct ConditionalChisqOptions {
  /// Minimum rows for a stratum to contribute. 0 selects 5 * max(r, c), with
  /// r and c the level counts of a and b.
  std::size_t min_stratum_n = 0;
};

/// Stratifies on the joint level of `cond` and sums Pearson statistics and
/// df over strata that have enough rows and variation in both variables.
/// With no qualifying stratum the result is flagged data_insufficient with
/// p = 1. Empty `cond` is exactly chisq_marginal.
CITestResult chisq_conditional(const Column& a, const Column& b,
                               std::span<const Column* const> cond,
                               const ConditionalChisqOptions& options = {});

inline constexpr int kMixedMarginalBins = 4;

/// Quartile-bins `cont` and runs chisq_marginal against `cat`.
CITestResult mixed_marginal(const Column& cat, const Column& cont);

}  // namespace mbsel
