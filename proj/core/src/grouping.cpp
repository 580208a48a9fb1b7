#include "mbsel/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mbsel {

namespace {

constexpr double kThresholdStep = 0.1;
constexpr double kThresholdCap = 0.95;

// One average-linkage pass over `members` (indices into assoc).
std::vector<std::vector<std::size_t>> agglomerate(const Eigen::MatrixXd& assoc,
                                                  const std::vector<std::size_t>& members,
                                                  double threshold) {
  const std::size_t k = members.size();
  std::vector<std::vector<std::size_t>> clusters(k);
  for (std::size_t i = 0; i < k; ++i) clusters[i] = {members[i]};
  std::vector<bool> alive(k, true);
  Eigen::MatrixXd dist(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          1.0 - assoc(static_cast<Eigen::Index>(members[i]), static_cast<Eigen::Index>(members[j]));

  const double cut = 1.0 - threshold;
  while (true) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = k, bb = k;
    // Slots stay in ascending order of their lowest member, so the first
    // strict minimum is the lowest-index pair.
    for (std::size_t a = 0; a < k; ++a) {
      if (!alive[a]) continue;
      for (std::size_t b = a + 1; b < k; ++b) {
        if (!alive[b]) continue;
        const double d = dist(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (d < best) {
          best = d;
          ba = a;
          bb = b;
        }
      }
    }
    if (ba == k || !(best < cut)) break;

    const auto na = static_cast<double>(clusters[ba].size());
    const auto nb = static_cast<double>(clusters[bb].size());
    for (std::size_t c = 0; c < k; ++c) {
      if (!alive[c] || c == ba || c == bb) continue;
      const auto ci = static_cast<Eigen::Index>(c);
      const double merged = (na * dist(ci, static_cast<Eigen::Index>(ba)) +
                             nb * dist(ci, static_cast<Eigen::Index>(bb))) /
                            (na + nb);
      dist(ci, static_cast<Eigen::Index>(ba)) = merged;
      dist(static_cast<Eigen::Index>(ba), ci) = merged;
    }
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    std::sort(clusters[ba].begin(), clusters[ba].end());
    clusters[bb].clear();
    alive[bb] = false;
  }

  std::vector<std::vector<std::size_t>> out;
  for (std::size_t a = 0; a < k; ++a)
    if (alive[a]) out.push_back(std::move(clusters[a]));
  return out;
}

void resolve_oversize(const Eigen::MatrixXd& assoc, std::vector<std::size_t> group, double threshold,
                      std::size_t max_size, std::vector<std::vector<std::size_t>>& out,
                      double& max_threshold) {
  max_threshold = std::max(max_threshold, threshold);
  if (group.size() <= max_size) {
    out.push_back(std::move(group));
    return;
  }
  if (threshold < kThresholdCap - 1e-12) {
    const double raised = std::min(threshold + kThresholdStep, kThresholdCap);
    for (auto& sub : agglomerate(assoc, group, raised))
      resolve_oversize(assoc, std::move(sub), raised, max_size, out, max_threshold);
    return;
  }
  for (std::size_t start = 0; start < group.size(); start += max_size) {
    const auto end = std::min(group.size(), start + max_size);
    out.emplace_back(group.begin() + static_cast<std::ptrdiff_t>(start),
                     group.begin() + static_cast<std::ptrdiff_t>(end));
  }
}

void sort_groups(std::vector<std::vector<std::size_t>>& groups) {
  for (auto& g : groups) std::sort(g.begin(), g.end());
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

}  // namespace

Eigen::MatrixXd association_matrix(const DataTable& table, std::span<const std::string> vars) {
  const auto p = static_cast<Eigen::Index>(vars.size());
  const auto n = static_cast<Eigen::Index>(table.n_rows());
  Eigen::MatrixXd centered(n, p);
  Eigen::VectorXd norms(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& c = table.column(vars[static_cast<std::size_t>(j)]);
    if (c.is_categorical())
      throw std::invalid_argument("association_matrix: '" + c.name + "' is not continuous");
    const Eigen::Map<const Eigen::VectorXd> v(c.values.data(), n);
    centered.col(j) = v.array() - v.mean();
    norms(j) = centered.col(j).norm();
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j) {
      double r = 0.0;
      if (norms(i) > 0.0 && norms(j) > 0.0)
        r = std::min(1.0, std::abs(centered.col(i).dot(centered.col(j))) / (norms(i) * norms(j)));
      out(i, j) = out(j, i) = r;
    }
  return out;
}

std::vector<std::vector<std::size_t>> cluster_indices(const Eigen::MatrixXd& assoc, double threshold,
                                                      std::size_t max_group_size,
                                                      double* threshold_used) {
  if (assoc.rows() != assoc.cols()) throw std::invalid_argument("cluster_indices: matrix must be square");
  if (max_group_size == 0) throw std::invalid_argument("cluster_indices: max_group_size must be >= 1");
  std::vector<std::size_t> all(static_cast<std::size_t>(assoc.rows()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  std::vector<std::vector<std::size_t>> out;
  double max_threshold = threshold;
  for (auto& g : agglomerate(assoc, all, threshold))
    resolve_oversize(assoc, std::move(g), threshold, max_group_size, out, max_threshold);
  sort_groups(out);
  if (threshold_used) *threshold_used = max_threshold;
  return out;
}

GroupPartition cluster_groups(const Eigen::MatrixXd& assoc, std::span<const std::string> names,
                              double threshold, std::size_t max_group_size) {
  if (static_cast<Eigen::Index>(names.size()) != assoc.rows())
    throw std::invalid_argument("cluster_groups: name count does not match matrix size");
  GroupPartition out;
  for (const auto& g : cluster_indices(assoc, threshold, max_group_size, &out.threshold_used)) {
    std::vector<std::string> group;
    for (auto i : g) group.push_back(names[i]);
    out.continuous_groups.push_back(std::move(group));
  }
  return out;
}

GroupPartition partition(const DataTable& table, std::span<const std::string> candidates,
                         const PartitionOptions& options) {
  GroupPartition out;
  out.threshold_used = options.threshold;
  std::vector<std::string> continuous;
  for (const auto& name : candidates) {
    if (table.column(name).is_categorical())
      out.categorical_group.push_back(name);
    else
      continuous.push_back(name);
  }
  if (continuous.empty()) return out;

  const auto assoc = association_matrix(table, continuous);
  auto groups = cluster_indices(assoc, options.threshold, options.max_group_size, &out.threshold_used);

  if (options.pack_singletons) {
    std::vector<std::vector<std::size_t>> packed;
    std::vector<std::size_t> pending;
    for (auto& g : groups) {
      if (g.size() == 1) {
        pending.push_back(g.front());
        if (pending.size() == options.max_group_size) packed.push_back(std::exchange(pending, {}));
      } else {
        packed.push_back(std::move(g));
      }
    }
    if (!pending.empty()) packed.push_back(std::move(pending));
    groups = std::move(packed);
    sort_groups(groups);
  }

  for (const auto& g : groups) {
    std::vector<std::string> names;
    for (auto i : g) names.push_back(continuous[i]);
    out.continuous_groups.push_back(std::move(names));
  }
  return out;
}

GroupPartition partition_from_assignment(const DataTable& table,
                                         std::span<const std::string> candidates,
                                         const std::map<std::string, int>& assignment) {
  GroupPartition out;
  std::map<int, std::vector<std::string>> by_id;
  for (const auto& name : candidates) {
    if (table.column(name).is_categorical()) {
      out.categorical_group.push_back(name);
      continue;
    }
    const auto it = assignment.find(name);
    if (it == assignment.end())
      throw std::invalid_argument("pre-specified groups do not assign variable '" + name + "'");
    by_id[it->second].push_back(name);
  }
  for (auto& [id, names] : by_id) out.continuous_groups.push_back(std::move(names));
  return out;
}

}  // namespace mbsel
