#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

#include "mbsel/ci_result.hpp"
#include "mbsel/weighted_chisq.hpp"

namespace mbsel {

/// Settings of the randomized conditional independence test.
struct RcitParams {
  /// Fourier features for the joint (x, z) block.
  int m = 5;
  /// Fourier features for y.
  int q = 5;
  /// Features per conditioning column and the floor; the conditioning map
  /// uses max(d_min, d_per_cond_var * columns(z)).
  int d_per_cond_var = 20;
  int d_min = 25;
  /// Ridge penalty per observation for the feature-space regression on z.
  double ridge = 1e-8;
  NullApprox null{};
  std::uint64_t seed = 0;
  std::size_t bandwidth_subsample = 500;

  int effective_d(Eigen::Index n_cond_columns) const;
};

inline constexpr Eigen::Index kRcitMinSamples = 50;

class InsufficientSample : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Tests x independent of y given z. Columns of x, y, z are observations in
/// rows; z may have zero columns. Every column is standardized first;
/// constant conditioning columns are dropped, and a constant x or y yields
/// p = 1.
///
/// Throws InsufficientSample for n < 50 and std::invalid_argument for
/// non-finite input or mismatched row counts.
CITestResult rcit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                  const Eigen::MatrixXd& z, const RcitParams& params = {});

/// Unconditional specialisation of rcit.
CITestResult rit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                 const RcitParams& params = {});

}  // namespace mbsel
