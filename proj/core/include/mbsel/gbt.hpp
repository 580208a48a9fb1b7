#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mbsel {

enum class Objective { SquaredError, Logistic };

struct EnsembleParams {
  int max_depth = 4;
  int n_trees = 200;
  double learning_rate = 0.2;
  int min_samples_leaf = 1;
  /// L2 penalty on leaf values (added to the hessian sum).
  double l2_regularization = 1.0;
  /// Minimum hessian sum in each child of a split.
  double min_child_weight = 1.0;
  Objective objective = Objective::SquaredError;
  std::uint64_t seed = 0;

  static EnsembleParams regression_defaults();
  static EnsembleParams classification_defaults();
};

struct TreeNode {
  int feature = -1;  ///< -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  int n_samples = 0;
  int depth = 0;

  bool is_leaf() const { return feature < 0; }
};

/// Axis-aligned binary tree; rows with x[feature] <= threshold go left.
class RegressionTree {
 public:
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double predict_row(const Eigen::MatrixXd& x, Eigen::Index row) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;
  int min_leaf_samples() const;

 private:
  std::vector<TreeNode> nodes_;
};

class FittedEnsemble {
 public:
  FittedEnsemble(std::vector<RegressionTree> trees, double base_score, EnsembleParams params,
                 std::vector<std::string> feature_names, std::vector<double> loss_trace,
                 Eigen::Index n_features);

  const std::vector<RegressionTree>& trees() const { return trees_; }
  double base_score() const { return base_score_; }
  const EnsembleParams& params() const { return params_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  Eigen::Index n_features() const { return n_features_; }
  /// Mean training loss after each round; element 0 is the base score's loss.
  const std::vector<double>& loss_trace() const { return loss_trace_; }

  /// Additive score before any link function.
  std::vector<double> raw_score(const Eigen::MatrixXd& x) const;

 private:
  std::vector<RegressionTree> trees_;
  double base_score_;
  EnsembleParams params_;
  std::vector<std::string> feature_names_;
  std::vector<double> loss_trace_;
  Eigen::Index n_features_;
};

/// Gradient boosting with exact greedy splits on midpoints between sorted
/// distinct values. A split scores GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l),
/// with G the gradient sum, H the hessian sum (row count for SquaredError,
/// sum p(1-p) for Logistic) and l the L2 penalty; with l = 0 and squared
/// error this is plain variance reduction. Leaves hold the damped Newton step
/// lr * G/(H+l). Ties between candidate splits go to the lowest feature
/// index, then the lowest threshold.
///
/// A round whose tree would raise the training loss is shrunk by halving
/// until it does not (dropped after 20 halvings), so loss_trace() is
/// non-increasing.
FittedEnsemble fit_ensemble(const Eigen::MatrixXd& x, std::span<const double> y,
                            const EnsembleParams& params,
                            std::vector<std::string> feature_names = {});

/// Raw score for SquaredError; probability in (0, 1) for Logistic.
std::vector<double> predict(const FittedEnsemble& model, const Eigen::MatrixXd& x);

/// y - predict(model, x).
std::vector<double> residuals(const FittedEnsemble& model, const Eigen::MatrixXd& x,
                              std::span<const double> y);

}  // namespace mbsel
