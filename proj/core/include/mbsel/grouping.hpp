#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mbsel/data_table.hpp"

namespace mbsel {

/// Disjoint variable groups. Continuous groups come from dependence-based
/// clustering (or a user assignment); every categorical variable sits in
/// the single categorical group.
struct GroupPartition {
  std::vector<std::vector<std::string>> continuous_groups;
  std::vector<std::string> categorical_group;
  /// Largest clustering threshold used, after any oversize escalation.
  double threshold_used = 0.0;
};

/// |Pearson correlation| between the named continuous columns; unit
/// diagonal, zero off-diagonal for constant columns.
Eigen::MatrixXd association_matrix(const DataTable& table, std::span<const std::string> vars);

/// Average-linkage agglomerative clustering on distance 1 - assoc, merging
/// while the closest pair is nearer than 1 - threshold. Ties merge the pair
/// with the lowest member indices. A cluster larger than max_group_size is
/// re-clustered with the threshold raised by 0.1 (at most 0.95), and split
/// into index-ordered chunks if it is still too large. Groups are returned
/// ordered by their lowest member index.
std::vector<std::vector<std::size_t>> cluster_indices(const Eigen::MatrixXd& assoc, double threshold,
                                                      std::size_t max_group_size,
                                                      double* threshold_used = nullptr);

GroupPartition cluster_groups(const Eigen::MatrixXd& assoc, std::span<const std::string> names,
                              double threshold, std::size_t max_group_size);

struct PartitionOptions {
  double threshold = 0.2;
  std::size_t max_group_size = 5;
  /// Pack singleton clusters, in index order, into shared groups of up to
  /// max_group_size.
  bool pack_singletons = true;
};

GroupPartition partition(const DataTable& table, std::span<const std::string> candidates,
                         const PartitionOptions& options = {});

/// Groups from a user assignment name -> group id, bypassing clustering.
/// Categorical candidates still go to the categorical group. Every
/// continuous candidate must be assigned.
GroupPartition partition_from_assignment(const DataTable& table,
                                         std::span<const std::string> candidates,
                                         const std::map<std::string, int>& assignment);

}  // namespace mbsel
