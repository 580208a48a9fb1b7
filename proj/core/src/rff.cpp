#include "mbsel/rff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mbsel/random.hpp"

namespace mbsel {

double median_bandwidth(const Eigen::MatrixXd& x, std::size_t max_subsample) {
  const Eigen::Index n = std::min<Eigen::Index>(x.rows(), static_cast<Eigen::Index>(max_subsample));
  if (n < 2) throw std::invalid_argument("median_bandwidth: need at least two rows");

  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      dists.push_back((x.row(i) - x.row(j)).norm());

  const auto mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid), dists.end());
  double median = dists[mid];
  if (dists.size() % 2 == 0) {
    const double lower = *std::max_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  return median > 0.0 ? median : 1.0;
}

FourierMap sample_fourier_map(Eigen::Index input_dim, Eigen::Index num_features,
                              double bandwidth, std::uint64_t seed) {
  if (input_dim < 1 || num_features < 1)
    throw std::invalid_argument("sample_fourier_map: dimensions must be >= 1");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("sample_fourier_map: bandwidth must be > 0");

  Rng rng(seed);
  FourierMap map;
  map.bandwidth = bandwidth;
  map.frequencies.resize(num_features, input_dim);
  for (Eigen::Index j = 0; j < num_features; ++j)
    for (Eigen::Index k = 0; k < input_dim; ++k)
      map.frequencies(j, k) = standard_normal(rng) / bandwidth;
  map.phases.resize(num_features);
  for (Eigen::Index j = 0; j < num_features; ++j)
    map.phases(j) = 2.0 * std::numbers::pi * uniform01(rng);
  return map;
}

Eigen::MatrixXd apply_fourier_map(const FourierMap& map, const Eigen::MatrixXd& x) {
  if (x.cols() != map.input_dim())
    throw std::invalid_argument("apply_fourier_map: input has " + std::to_string(x.cols()) +
                                " columns, map expects " + std::to_string(map.input_dim()));
  const double scale = std::sqrt(2.0 / static_cast<double>(map.num_features()));
  Eigen::MatrixXd proj = x * map.frequencies.transpose();
  proj.rowwise() += map.phases.transpose();
  return scale * proj.array().cos().matrix();
}

}  // namespace mbsel
