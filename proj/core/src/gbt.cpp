#include "mbsel/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mbsel {

namespace {

constexpr double kMinGain = 1e-12;
constexpr double kMinHessian = 1e-12;
constexpr double kLogOddsClamp = 10.0;
constexpr double kProbFloor = 1e-15;
constexpr int kMaxHalvings = 20;

double sigmoid(double f) {
  if (f >= 0.0) return 1.0 / (1.0 + std::exp(-f));
  const double e = std::exp(f);
  return e / (1.0 + e);
}

double mean_loss(Objective obj, std::span<const double> y, const std::vector<double>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (obj == Objective::SquaredError) {
      const double r = y[i] - f[i];
      acc += r * r;
    } else {
      // log(1 + e^f) - y f, evaluated without overflow.
      acc += std::log1p(std::exp(-std::abs(f[i]))) + std::max(f[i], 0.0) - y[i] * f[i];
    }
  }
  return acc / static_cast<double>(y.size());
}

struct NodeStats {
  double sum_g = 0.0;
  double sum_h = 0.0;
  int count = 0;
};

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const std::vector<std::vector<int>>& order,
              const EnsembleParams& params)
      : x_(x), order_(order), params_(params) {}

  // Grows one tree on gradients g (hessians h) and returns it with the leaf
  // id of every training row.
  RegressionTree build(const std::vector<double>& g, const std::vector<double>& h,
                       std::vector<int>& leaf_of_row) {
    const auto n = static_cast<int>(g.size());
    std::vector<TreeNode> nodes(1);
    std::vector<NodeStats> stats(1);
    leaf_of_row.assign(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      stats[0].sum_g += g[static_cast<std::size_t>(i)];
      stats[0].sum_h += h[static_cast<std::size_t>(i)];
      ++stats[0].count;
    }

    std::vector<int> frontier{0};
    const int min_leaf = std::max(1, params_.min_samples_leaf);
    for (int depth = 0; depth < params_.max_depth && !frontier.empty(); ++depth) {
      std::vector<int> slot_of(nodes.size(), -1);
      std::vector<int> active;
      for (int id : frontier)
        if (stats[static_cast<std::size_t>(id)].count >= 2 * min_leaf) {
          slot_of[static_cast<std::size_t>(id)] = static_cast<int>(active.size());
          active.push_back(id);
        }
      if (active.empty()) break;

      const auto best = find_splits(g, h, leaf_of_row, slot_of, active, stats, min_leaf);

      std::vector<int> next;
      std::vector<int> split_left(nodes.size(), -1);
      for (std::size_t s = 0; s < active.size(); ++s) {
        if (best[s].feature < 0 || !(best[s].gain > kMinGain)) continue;
        const int id = active[s];
        const int left = static_cast<int>(nodes.size());
        auto& parent = nodes[static_cast<std::size_t>(id)];
        parent.feature = best[s].feature;
        parent.threshold = best[s].threshold;
        parent.left = left;
        parent.right = left + 1;
        TreeNode child;
        child.depth = depth + 1;
        nodes.push_back(child);
        nodes.push_back(child);
        stats.emplace_back();
        stats.emplace_back();
        split_left[static_cast<std::size_t>(id)] = left;
        next.push_back(left);
        next.push_back(left + 1);
      }
      if (next.empty()) break;

      for (int i = 0; i < n; ++i) {
        const int id = leaf_of_row[static_cast<std::size_t>(i)];
        const int left = id < static_cast<int>(split_left.size()) ? split_left[static_cast<std::size_t>(id)] : -1;
        if (left < 0) continue;
        const auto& node = nodes[static_cast<std::size_t>(id)];
        const int child = x_(i, node.feature) <= node.threshold ? left : left + 1;
        leaf_of_row[static_cast<std::size_t>(i)] = child;
        auto& st = stats[static_cast<std::size_t>(child)];
        st.sum_g += g[static_cast<std::size_t>(i)];
        st.sum_h += h[static_cast<std::size_t>(i)];
        ++st.count;
      }
      frontier = std::move(next);
    }

    for (std::size_t id = 0; id < nodes.size(); ++id) {
      auto& node = nodes[id];
      const auto& st = stats[id];
      node.n_samples = st.count;
      if (!node.is_leaf() || st.count == 0) continue;
      const double raw = st.sum_g / std::max(st.sum_h + params_.l2_regularization, kMinHessian);
      node.value = params_.learning_rate * raw;
    }
    return RegressionTree(std::move(nodes));
  }

 private:
  std::vector<SplitCandidate> find_splits(const std::vector<double>& g, const std::vector<double>& h,
                                          const std::vector<int>& leaf_of_row,
                                          const std::vector<int>& slot_of,
                                          const std::vector<int>& active,
                                          const std::vector<NodeStats>& stats, int min_leaf) const {
    const std::size_t slots = active.size();
    std::vector<SplitCandidate> best(slots);
    const double lambda = params_.l2_regularization;
    std::vector<double> left_g(slots), left_h(slots);
    std::vector<int> left_n(slots);
    std::vector<double> last(slots);
    std::vector<double> parent_score(slots);
    for (std::size_t s = 0; s < slots; ++s) {
      const auto& st = stats[static_cast<std::size_t>(active[s])];
      parent_score[s] = st.sum_g * st.sum_g / std::max(st.sum_h + lambda, kMinHessian);
    }

    for (Eigen::Index f = 0; f < x_.cols(); ++f) {
      std::fill(left_g.begin(), left_g.end(), 0.0);
      std::fill(left_h.begin(), left_h.end(), 0.0);
      std::fill(left_n.begin(), left_n.end(), 0);
      const auto col = x_.col(f);
      for (int row : order_[static_cast<std::size_t>(f)]) {
        const int id = leaf_of_row[static_cast<std::size_t>(row)];
        if (id >= static_cast<int>(slot_of.size())) continue;
        const int s = slot_of[static_cast<std::size_t>(id)];
        if (s < 0) continue;
        const auto su = static_cast<std::size_t>(s);
        const double v = col(row);
        if (left_n[su] > 0 && v > last[su]) {
          const auto& st = stats[static_cast<std::size_t>(id)];
          const int nl = left_n[su];
          const int nr = st.count - nl;
          const double hl = left_h[su];
          const double hr = st.sum_h - hl;
          if (nl >= min_leaf && nr >= min_leaf && hl >= params_.min_child_weight &&
              hr >= params_.min_child_weight) {
            const double gl = left_g[su];
            const double gr = st.sum_g - gl;
            const double gain = gl * gl / std::max(hl + lambda, kMinHessian) +
                                gr * gr / std::max(hr + lambda, kMinHessian) - parent_score[su];
            if (gain > best[su].gain) {
              double thr = 0.5 * (last[su] + v);
              if (!(thr < v)) thr = last[su];
              best[su] = {gain, static_cast<int>(f), thr};
            }
          }
        }
        left_g[su] += g[static_cast<std::size_t>(row)];
        left_h[su] += h[static_cast<std::size_t>(row)];
        ++left_n[su];
        last[su] = v;
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  const std::vector<std::vector<int>>& order_;
  const EnsembleParams& params_;
};

void validate(const Eigen::MatrixXd& x, std::span<const double> y, const EnsembleParams& params) {
  if (x.rows() < 2) throw std::invalid_argument("fit_ensemble: need at least two rows");
  if (x.cols() < 1) throw std::invalid_argument("fit_ensemble: need at least one feature");
  if (static_cast<Eigen::Index>(y.size()) != x.rows())
    throw std::invalid_argument("fit_ensemble: y length does not match x rows");
  if (params.max_depth < 0 || params.n_trees < 0 || params.min_samples_leaf < 1 ||
      !(params.l2_regularization >= 0.0) || !(params.min_child_weight >= 0.0))
    throw std::invalid_argument("fit_ensemble: invalid tree parameters");
  if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0))
    throw std::invalid_argument("fit_ensemble: learning_rate must lie in (0, 1]");
  if (!x.allFinite()) throw std::invalid_argument("fit_ensemble: non-finite feature values");
  for (double v : y) {
    if (!std::isfinite(v)) throw std::invalid_argument("fit_ensemble: non-finite target");
    if (params.objective == Objective::Logistic && v != 0.0 && v != 1.0)
      throw std::invalid_argument("fit_ensemble: logistic objective requires labels in {0, 1}");
  }
}

}  // namespace

EnsembleParams EnsembleParams::regression_defaults() {
  EnsembleParams p;
  p.max_depth = 4;
  p.n_trees = 200;
  return p;
}

EnsembleParams EnsembleParams::classification_defaults() {
  EnsembleParams p;
  p.max_depth = 5;
  p.n_trees = 300;
  p.objective = Objective::Logistic;
  return p;
}

double RegressionTree::predict_row(const Eigen::MatrixXd& x, Eigen::Index row) const {
  std::size_t id = 0;
  while (!nodes_[id].is_leaf()) {
    const auto& node = nodes_[id];
    id = static_cast<std::size_t>(x(row, node.feature) <= node.threshold ? node.left : node.right);
  }
  return nodes_[id].value;
}

int RegressionTree::depth() const {
  int d = 0;
  for (const auto& node : nodes_) d = std::max(d, node.depth);
  return d;
}

int RegressionTree::min_leaf_samples() const {
  int m = std::numeric_limits<int>::max();
  for (const auto& node : nodes_)
    if (node.is_leaf()) m = std::min(m, node.n_samples);
  return m;
}

FittedEnsemble::FittedEnsemble(std::vector<RegressionTree> trees, double base_score,
                               EnsembleParams params, std::vector<std::string> feature_names,
                               std::vector<double> loss_trace, Eigen::Index n_features)
    : trees_(std::move(trees)),
      base_score_(base_score),
      params_(params),
      feature_names_(std::move(feature_names)),
      loss_trace_(std::move(loss_trace)),
      n_features_(n_features) {}

std::vector<double> FittedEnsemble::raw_score(const Eigen::MatrixXd& x) const {
  if (x.cols() != n_features_)
    throw std::invalid_argument("predict: model has " + std::to_string(n_features_) +
                                " features, input has " + std::to_string(x.cols()));
  std::vector<double> out(static_cast<std::size_t>(x.rows()), base_score_);
  for (const auto& tree : trees_)
    for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] += tree.predict_row(x, i);
  return out;
}

FittedEnsemble fit_ensemble(const Eigen::MatrixXd& x, std::span<const double> y,
                            const EnsembleParams& params, std::vector<std::string> feature_names) {
  validate(x, y, params);
  const auto n = static_cast<std::size_t>(x.rows());

  std::vector<std::vector<int>> order(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    auto& o = order[static_cast<std::size_t>(f)];
    o.resize(n);
    std::iota(o.begin(), o.end(), 0);
    const auto col = x.col(f);
    std::stable_sort(o.begin(), o.end(), [&](int a, int b) { return col(a) < col(b); });
  }

  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  const bool constant = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
  double base = 0.0;
  if (params.objective == Objective::SquaredError) {
    base = constant ? y[0] : mean;
  } else {
    const double lo = std::log(mean) - std::log1p(-mean);
    base = std::clamp(std::isnan(lo) ? 0.0 : lo, -kLogOddsClamp, kLogOddsClamp);
  }

  std::vector<double> f(n, base);
  std::vector<double> g(n), h(n, 1.0), candidate(n);
  std::vector<int> leaf_of_row;
  std::vector<double> trace{mean_loss(params.objective, y, f)};
  std::vector<RegressionTree> trees;
  trees.reserve(static_cast<std::size_t>(params.n_trees));
  TreeBuilder builder(x, order, params);

  for (int round = 0; round < params.n_trees; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      if (params.objective == Objective::SquaredError) {
        g[i] = y[i] - f[i];
      } else {
        const double p = sigmoid(f[i]);
        g[i] = y[i] - p;
        h[i] = p * (1.0 - p);
      }
    }
    RegressionTree tree = builder.build(g, h, leaf_of_row);

    std::vector<TreeNode> nodes = tree.nodes();
    double scale = 1.0;
    double loss = trace.back();
    bool accepted = false;
    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
      for (std::size_t i = 0; i < n; ++i)
        candidate[i] = f[i] + scale * nodes[static_cast<std::size_t>(leaf_of_row[i])].value;
      loss = mean_loss(params.objective, y, candidate);
      if (loss <= trace.back()) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      trace.push_back(trace.back());
      continue;
    }
    if (scale != 1.0)
      for (auto& node : nodes) node.value *= scale;
    f.swap(candidate);
    trace.push_back(loss);
    trees.emplace_back(std::move(nodes));
  }

  return FittedEnsemble(std::move(trees), base, params, std::move(feature_names), std::move(trace),
                        x.cols());
}

std::vector<double> predict(const FittedEnsemble& model, const Eigen::MatrixXd& x) {
  auto score = model.raw_score(x);
  if (model.params().objective == Objective::Logistic)
    for (auto& s : score) s = std::clamp(sigmoid(s), kProbFloor, 1.0 - kProbFloor);
  return score;
}

std::vector<double> residuals(const FittedEnsemble& model, const Eigen::MatrixXd& x,
                              std::span<const double> y) {
  if (static_cast<Eigen::Index>(y.size()) != x.rows())
    throw std::invalid_argument("residuals: y length does not match x rows");
  auto pred = predict(model, x);
  for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = y[i] - pred[i];
  return pred;
}

}  // namespace mbsel
