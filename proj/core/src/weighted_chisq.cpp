#include "mbsel/weighted_chisq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "mbsel/random.hpp"

namespace mbsel {

namespace {

constexpr double kNegativeTolerance = -1e-10;

std::vector<double> clamped_weights(std::span<const double> eigenvalues) {
  std::vector<double> out;
  out.reserve(eigenvalues.size());
  for (double v : eigenvalues) {
    if (!std::isfinite(v)) throw std::invalid_argument("weighted chi-square: non-finite eigenvalue");
    if (v < kNegativeTolerance)
      throw std::invalid_argument("weighted chi-square: negative eigenvalue " + std::to_string(v));
    out.push_back(std::max(v, 0.0));
  }
  return out;
}

double gamma_upper(double shape, double x) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(shape, x);
}

double two_moment(const std::vector<double>& w, double s) {
  double k1 = 0.0, sq = 0.0;
  for (double v : w) {
    k1 += v;
    sq += v * v;
  }
  const double var = 2.0 * sq;
  const double shape = k1 * k1 / var;
  const double scale = var / k1;
  return gamma_upper(shape, s / scale);
}

double three_moment(const std::vector<double>& w, double s) {
  double k1 = 0.0, sq = 0.0, cu = 0.0;
  for (double v : w) {
    k1 += v;
    sq += v * v;
    cu += v * v * v;
  }
  const double k2 = 2.0 * sq;
  const double k3 = 8.0 * cu;
  // a * chi2_nu + b matches the first three cumulants.
  const double nu = 8.0 * k2 * k2 * k2 / (k3 * k3);
  const double a = k3 / (4.0 * k2);
  const double b = k1 - a * nu;
  const double x = (s - b) / a;
  return gamma_upper(0.5 * nu, 0.5 * x);
}

}  // namespace

std::string_view to_string(NullMethod method) {
  switch (method) {
    case NullMethod::GammaTwoMoment: return "gamma2";
    case NullMethod::GammaThreeMoment: return "gamma3";
    case NullMethod::MonteCarlo: return "montecarlo";
  }
  return "unknown";
}

double weighted_chisq_pvalue(std::span<const double> eigenvalues, double s,
                             const NullApprox& approx) {
  const auto w = clamped_weights(eigenvalues);
  if (std::none_of(w.begin(), w.end(), [](double v) { return v > 0.0; })) return 1.0;
  if (!(s > 0.0)) return 1.0;

  double p = 1.0;
  switch (approx.method) {
    case NullMethod::GammaTwoMoment: p = two_moment(w, s); break;
    case NullMethod::GammaThreeMoment: p = three_moment(w, s); break;
    case NullMethod::MonteCarlo:
      p = WeightedChisqSampler(w, approx.mc_samples, approx.mc_seed).upper_tail(s);
      break;
  }
  return std::clamp(p, 0.0, 1.0);
}

WeightedChisqSampler::WeightedChisqSampler(std::span<const double> eigenvalues,
                                           std::size_t n_samples, std::uint64_t seed) {
  if (n_samples == 0) throw std::invalid_argument("WeightedChisqSampler: n_samples must be > 0");
  const auto w = clamped_weights(eigenvalues);
  Rng rng(seed);
  draws_.resize(n_samples);
  for (auto& d : draws_) {
    double acc = 0.0;
    for (double v : w) {
      const double z = standard_normal(rng);
      acc += v * z * z;
    }
    d = acc;
  }
  std::sort(draws_.begin(), draws_.end());
}

double WeightedChisqSampler::upper_tail(double s) const {
  const auto first_ge = std::lower_bound(draws_.begin(), draws_.end(), s);
  const auto count = static_cast<double>(draws_.end() - first_ge);
  return (count + 1.0) / (static_cast<double>(draws_.size()) + 1.0);
}

double WeightedChisqSampler::quantile(double prob) const {
  prob = std::clamp(prob, 0.0, 1.0);
  const auto idx = static_cast<std::size_t>(
      std::min<double>(prob * static_cast<double>(draws_.size()), static_cast<double>(draws_.size() - 1)));
  return draws_[idx];
}

}  // namespace mbsel
