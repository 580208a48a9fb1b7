#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mbsel/data_table.hpp"
#include "mbsel/fbed.hpp"
#include "mbsel/gbt.hpp"
#include "mbsel/grouping.hpp"
#include "mbsel/rcit.hpp"

namespace mbsel {

struct MultiGroupConfig {
  double group_threshold = 0.2;
  std::size_t max_group_size = 5;
  double alpha = 1e-4;
  int fbed_k = 1;
  int max_outer_iterations = 10;
  RcitParams rcit_params{};
  EnsembleParams ensemble_params_regression = EnsembleParams::regression_defaults();
  EnsembleParams ensemble_params_classification = EnsembleParams::classification_defaults();
  bool pack_singletons = true;
  /// Folds for out-of-fold residuals; below 2 the ensemble's in-sample
  /// residuals are used.
  std::size_t residual_folds = 0;
  /// Candidate columns; empty means every column except the target.
  std::vector<std::string> candidates;
  /// Pre-specified continuous groups (name -> group id); skips clustering.
  std::optional<std::map<std::string, int>> group_assignment;
};

struct SelectionState {
  /// Sorted.
  std::vector<std::string> mb_set;
  /// Group id -> selection in insertion order. Continuous groups are numbered
  /// 0..G-1 in partition order; the categorical group, when present, is G.
  std::map<int, std::vector<std::string>> per_group_selected;
  int outer_iteration = 0;
  bool converged = false;
  /// Traces from the last outer pass.
  std::map<int, SelectionTrace> traces;
  GroupPartition partition;
  bool grouping_bypassed = false;
  /// Ensemble fits performed (cache misses).
  std::size_t residual_fits = 0;

  /// Members of group `id`.
  const std::vector<std::string>& group_members(int id) const;
  int categorical_group_id() const;
};

/// Response prepared for selection: values on the numeric scale (binary
/// targets as 0/1) plus the original column.
struct Target {
  std::string name;
  std::vector<double> values;
  bool binary = false;
};

/// Continuous columns pass through; two-level categorical columns map to
/// {0,1}. Anything else is rejected.
Target prepare_target(const DataTable& table, const std::string& name);

/// y - yhat from the ensemble fitted on the one-hot expanded `selected`
/// columns (Logistic for binary targets, squared error otherwise).
Column residual_target(const DataTable& table, const std::vector<std::string>& selected,
                       const Target& target, const MultiGroupConfig& config);

enum class GroupKind { Continuous, Categorical };

/// Drops members of `group` that are marginally dependent on some selected
/// variable Z of the other kind (at alpha) but independent of `temp_target`
/// given Z. Categorical members are tested with chi-square against the
/// quartile-binned target given binned Z; continuous members with RCIT given
/// one-hot Z.
std::vector<std::string> screen_group(const std::vector<std::string>& group, GroupKind kind,
                                      const std::vector<std::string>& selected_other_kind,
                                      const Column& temp_target, const DataTable& table,
                                      double alpha, const RcitParams& rcit_params = {});

/// Continuous-only variant; throws std::invalid_argument on categorical
/// candidates.
SelectionState run_m2(const DataTable& table, const std::string& target,
                      const MultiGroupConfig& config = {});

/// Mixed-type variant: categorical candidates form one group, tested with
/// chi-square, and each group is screened against the other kind's
/// selections before its FBED run.
SelectionState run_m3(const DataTable& table, const std::string& target,
                      const MultiGroupConfig& config = {});

}  // namespace mbsel
