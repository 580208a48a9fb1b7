#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mbsel {

/// Outcome of one (conditional) independence test.
struct CITestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  /// Weights of the weighted chi-square null (RCIT only).
  std::vector<double> eigenvalues;
  /// Degrees of freedom (chi-square tests only).
  double df = 0.0;
  std::size_t n_used = 0;
  /// e.g. "rcit/gamma3", "chisq-conditional".
  std::string method;
  /// No stratum had enough data; callers read this as "cannot reject".
  bool data_insufficient = false;

  bool rejects(double alpha) const { return p_value < alpha; }
};

}  // namespace mbsel
