#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mbsel/fbed.hpp"

namespace mbsel::testing {

/// Linear-Gaussian DAG over nodes 0..p-1 in topological order:
/// x_i = sum_j weights(i, j) x_j + e_i with e_i ~ N(0, noise_var[i]).
struct LinearGaussianDag {
  Eigen::MatrixXd weights;
  Eigen::VectorXd noise_var;

  int size() const { return static_cast<int>(weights.rows()); }
  bool edge(int from, int to) const { return weights(to, from) != 0.0; }
  std::vector<int> parents(int node) const;
  std::vector<int> children(int node) const;
  Eigen::MatrixXd covariance() const;
};

/// Each forward pair j < i carries an edge with `edge_prob`; weights are
/// +-Uniform(0.5, 1.5), noise variances Uniform(0.5, 1.5).
LinearGaussianDag random_dag(int p, double edge_prob, std::uint64_t seed);

std::string node_name(int i);

/// Parents, children and spouses read off the graph.
std::vector<int> graph_markov_boundary(const LinearGaussianDag& dag, int target);

/// Conditional covariance of a and b given s, from the joint covariance.
Eigen::MatrixXd conditional_covariance(const Eigen::MatrixXd& cov, const std::vector<int>& a,
                                       const std::vector<int>& b, const std::vector<int>& s);

double partial_correlation(const Eigen::MatrixXd& cov, int i, int j, const std::vector<int>& s);

/// Smallest s with target independent of every remaining node jointly given
/// s, found by enumerating all subsets in order of size.
std::vector<int> brute_force_markov_boundary(const Eigen::MatrixXd& cov, int target, double tol = 1e-9);

/// CI tester answering from the population covariance: p = 0 for a nonzero
/// partial correlation, 1 otherwise; the statistic is |partial correlation|.
CITester oracle_tester(const Eigen::MatrixXd& cov, int target, double tol = 1e-9);

}  // namespace mbsel::testing
