#include "gaussian_dag.hpp"

#include <algorithm>
#include <cmath>

#include "mbsel/random.hpp"

namespace mbsel::testing {

std::vector<int> LinearGaussianDag::parents(int node) const {
  std::vector<int> out;
  for (int j = 0; j < size(); ++j)
    if (edge(j, node)) out.push_back(j);
  return out;
}

std::vector<int> LinearGaussianDag::children(int node) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (edge(node, i)) out.push_back(i);
  return out;
}

Eigen::MatrixXd LinearGaussianDag::covariance() const {
  const auto p = weights.rows();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(p, p) - weights;
  const Eigen::MatrixXd inv = a.inverse();
  return inv * noise_var.asDiagonal() * inv.transpose();
}

LinearGaussianDag random_dag(int p, double edge_prob, std::uint64_t seed) {
  Rng rng(seed);
  LinearGaussianDag dag;
  dag.weights = Eigen::MatrixXd::Zero(p, p);
  dag.noise_var.resize(p);
  for (int i = 0; i < p; ++i) {
    dag.noise_var(i) = 0.5 + uniform01(rng);
    for (int j = 0; j < i; ++j) {
      if (!bernoulli(rng, edge_prob)) continue;
      const double magnitude = 0.5 + uniform01(rng);
      dag.weights(i, j) = bernoulli(rng, 0.5) ? magnitude : -magnitude;
    }
  }
  return dag;
}

std::string node_name(int i) { return "v" + std::to_string(i); }

std::vector<int> graph_markov_boundary(const LinearGaussianDag& dag, int target) {
  std::vector<int> out = dag.parents(target);
  for (int c : dag.children(target)) {
    out.push_back(c);
    for (int s : dag.parents(c))
      if (s != target) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

Eigen::MatrixXd sub(const Eigen::MatrixXd& m, const std::vector<int>& r, const std::vector<int>& c) {
  Eigen::MatrixXd out(r.size(), c.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) out(i, j) = m(r[i], c[j]);
  return out;
}

}  // namespace

Eigen::MatrixXd conditional_covariance(const Eigen::MatrixXd& cov, const std::vector<int>& a,
                                       const std::vector<int>& b, const std::vector<int>& s) {
  Eigen::MatrixXd out = sub(cov, a, b);
  if (s.empty()) return out;
  const Eigen::MatrixXd ss = sub(cov, s, s);
  out -= sub(cov, a, s) * ss.ldlt().solve(sub(cov, s, b));
  return out;
}

double partial_correlation(const Eigen::MatrixXd& cov, int i, int j, const std::vector<int>& s) {
  const double ij = conditional_covariance(cov, {i}, {j}, s)(0, 0);
  const double ii = conditional_covariance(cov, {i}, {i}, s)(0, 0);
  const double jj = conditional_covariance(cov, {j}, {j}, s)(0, 0);
  return ij / std::sqrt(ii * jj);
}

std::vector<int> brute_force_markov_boundary(const Eigen::MatrixXd& cov, int target, double tol) {
  std::vector<int> others;
  for (int i = 0; i < cov.rows(); ++i)
    if (i != target) others.push_back(i);
  const auto k = others.size();
  for (std::size_t size = 0; size <= k; ++size) {
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) != size) continue;
      std::vector<int> s, rest;
      for (std::size_t b = 0; b < k; ++b) ((mask >> b) & 1u ? s : rest).push_back(others[b]);
      if (rest.empty() || conditional_covariance(cov, {target}, rest, s).cwiseAbs().maxCoeff() < tol)
        return s;
    }
  }
  return others;
}

CITester oracle_tester(const Eigen::MatrixXd& cov, int target, double tol) {
  return [cov, target, tol](const std::string& candidate, const std::vector<std::string>& cond) {
    std::vector<int> s;
    for (const auto& c : cond) s.push_back(std::stoi(c.substr(1)));
    const double r = partial_correlation(cov, target, std::stoi(candidate.substr(1)), s);
    CITestResult out;
    out.statistic = std::abs(r);
    out.p_value = std::abs(r) < tol ? 1.0 : 0.0;
    out.method = "oracle";
    return out;
  };
}

}  // namespace mbsel::testing
