#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace mbsel {

/// Random Fourier feature map for the Gaussian kernel
/// k(x, x') = exp(-|x - x'|^2 / (2 bandwidth^2)).
///
/// `frequencies` is num_features x input_dim with N(0, 1/bandwidth^2)
/// entries; `phases` are uniform on [0, 2 pi). The sqrt(2 / num_features)
/// normalisation is folded into apply_fourier_map, so inner products of
/// mapped rows approximate the kernel directly.
struct FourierMap {
  Eigen::MatrixXd frequencies;
  Eigen::VectorXd phases;
  double bandwidth = 1.0;

  Eigen::Index num_features() const { return frequencies.rows(); }
  Eigen::Index input_dim() const { return frequencies.cols(); }
};

inline constexpr std::size_t kDefaultBandwidthSubsample = 500;

/// Median pairwise Euclidean distance over the first min(n, max_subsample)
/// rows; 1.0 when that median is zero.
double median_bandwidth(const Eigen::MatrixXd& x,
                        std::size_t max_subsample = kDefaultBandwidthSubsample);

FourierMap sample_fourier_map(Eigen::Index input_dim, Eigen::Index num_features,
                              double bandwidth, std::uint64_t seed);

/// n x num_features matrix with entries sqrt(2/D) cos(w_j . x_i + b_j).
Eigen::MatrixXd apply_fourier_map(const FourierMap& map, const Eigen::MatrixXd& x);

}  // namespace mbsel
