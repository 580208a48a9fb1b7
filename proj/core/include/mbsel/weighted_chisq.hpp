#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace mbsel {

/// Approximations to the upper tail of sum_k lambda_k z_k^2, z_k iid N(0,1).
enum class NullMethod {
  GammaTwoMoment,    ///< gamma matched to mean and variance
  GammaThreeMoment,  ///< Hall-Buckley-Eagleson scaled and shifted chi-square
  MonteCarlo,        ///< empirical tail over simulated draws
};

struct NullApprox {
  NullMethod method = NullMethod::GammaThreeMoment;
  std::size_t mc_samples = 100000;
  std::uint64_t mc_seed = 0;
};

std::string_view to_string(NullMethod method);

/// Upper-tail probability P(sum lambda_k z_k^2 >= s). Eigenvalues in
/// (-1e-10, 0) are clamped to zero; anything more negative throws. An
/// all-zero weight vector returns 1.
double weighted_chisq_pvalue(std::span<const double> eigenvalues, double s,
                             const NullApprox& approx = {});

/// Sorted Monte-Carlo sample of the weighted chi-square law, for evaluating
/// many tail probabilities against the same weights.
class WeightedChisqSampler {
 public:
  WeightedChisqSampler(std::span<const double> eigenvalues, std::size_t n_samples,
                       std::uint64_t seed);

  /// (#{draws >= s} + 1) / (n_samples + 1).
  double upper_tail(double s) const;
  /// Empirical quantile of the draws, prob in [0, 1].
  double quantile(double prob) const;
  std::size_t size() const { return draws_.size(); }

 private:
  std::vector<double> draws_;
};

}  // namespace mbsel
