#include "mbsel/rcit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mbsel/random.hpp"
#include "mbsel/rff.hpp"

namespace mbsel {

namespace {

// Standardized copies of the non-constant columns (n-1 denominator).
Eigen::MatrixXd standardized_columns(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> keep;
  Eigen::VectorXd means(m.cols()), sds(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double mean = m.col(j).mean();
    const double ss = (m.col(j).array() - mean).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const bool constant = (m.col(j).array() == m(0, j)).all();
    means(j) = mean;
    sds(j) = sd;
    if (!constant && sd > 0.0) keep.push_back(j);
  }
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto j = keep[k];
    out.col(static_cast<Eigen::Index>(k)) = (m.col(j).array() - means(j)) / sds(j);
  }
  return out;
}

Eigen::MatrixXd centered_features(const Eigen::MatrixXd& input, Eigen::Index num_features,
                                  std::size_t subsample, std::uint64_t seed) {
  const double bw = median_bandwidth(input, subsample);
  const auto map = sample_fourier_map(input.cols(), num_features, bw, seed);
  Eigen::MatrixXd f = apply_fourier_map(map, input);
  f.rowwise() -= f.colwise().mean();
  return f;
}

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string("rcit: non-finite values in ") + what);
}

CITestResult no_variation_result(Eigen::Index n) {
  CITestResult r;
  r.statistic = 0.0;
  r.p_value = 1.0;
  r.n_used = static_cast<std::size_t>(n);
  r.method = "rcit/constant";
  return r;
}

}  // namespace

int RcitParams::effective_d(Eigen::Index n_cond_columns) const {
  return std::max(d_min, d_per_cond_var * static_cast<int>(n_cond_columns));
}

CITestResult rcit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& z,
                  const RcitParams& params) {
  const Eigen::Index n = x.rows();
  if (y.rows() != n || (z.cols() > 0 && z.rows() != n))
    throw std::invalid_argument("rcit: x, y, z must have the same number of rows");
  if (n < kRcitMinSamples)
    throw InsufficientSample("rcit: insufficient sample (n = " + std::to_string(n) + ", need >= " +
                             std::to_string(kRcitMinSamples) + ")");
  if (params.m < 1 || params.q < 1) throw std::invalid_argument("rcit: m and q must be >= 1");
  check_finite(x, "x");
  check_finite(y, "y");
  check_finite(z, "z");

  const Eigen::MatrixXd xs = standardized_columns(x);
  const Eigen::MatrixXd ys = standardized_columns(y);
  if (xs.cols() == 0 || ys.cols() == 0) return no_variation_result(n);
  const Eigen::MatrixXd zs = z.cols() > 0 ? standardized_columns(z) : Eigen::MatrixXd(n, 0);

  Eigen::MatrixXd xz(n, xs.cols() + zs.cols());
  xz << xs, zs;

  Eigen::MatrixXd a = centered_features(xz, params.m, params.bandwidth_subsample, mix_seed(params.seed, 0));
  Eigen::MatrixXd b = centered_features(ys, params.q, params.bandwidth_subsample, mix_seed(params.seed, 1));

  if (zs.cols() > 0) {
    const int d = params.effective_d(zs.cols());
    const Eigen::MatrixXd c = centered_features(zs, d, params.bandwidth_subsample, mix_seed(params.seed, 2));
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(c.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    gram.diagonal().array() += params.ridge * static_cast<double>(n);
    const Eigen::LDLT<Eigen::MatrixXd> solver(gram);
    a -= c * solver.solve(c.transpose() * a);
    b -= c * solver.solve(c.transpose() * b);
  }

  const double denom = static_cast<double>(n - 1);
  const Eigen::MatrixXd cross = a.transpose() * b / denom;
  const double statistic = static_cast<double>(n) * cross.squaredNorm();

  // Covariance of vec(a_i b_i^T) across rows.
  const Eigen::Index l = a.cols() * b.cols();
  Eigen::MatrixXd prods(n, l);
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      prods.col(i * b.cols() + j) = a.col(i).cwiseProduct(b.col(j));
  prods.rowwise() -= prods.colwise().mean();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(l, l);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(prods.transpose(), 1.0 / denom);
  cov = cov.selfadjointView<Eigen::Lower>();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);

  CITestResult r;
  r.statistic = statistic;
  r.n_used = static_cast<std::size_t>(n);
  r.eigenvalues.reserve(static_cast<std::size_t>(l));
  for (Eigen::Index k = l - 1; k >= 0; --k) {
    const double v = eig.eigenvalues()(k);
    r.eigenvalues.push_back(v < 0.0 && v > -1e-10 ? 0.0 : v);
  }
  NullApprox null = params.null;
  null.mc_seed = mix_seed(params.seed ^ params.null.mc_seed, 3);
  r.p_value = weighted_chisq_pvalue(r.eigenvalues, statistic, null);
  r.method = std::string("rcit/") + std::string(to_string(params.null.method));
  return r;
}

CITestResult rit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const RcitParams& params) {
  return rcit(x, y, Eigen::MatrixXd(x.rows(), 0), params);
}

}  // namespace mbsel
