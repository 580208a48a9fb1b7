#include "mbsel/multigroup.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <stdexcept>

#include "mbsel/chisq.hpp"

namespace mbsel {

namespace {

constexpr int kTargetBins = 4;

std::vector<double> numeric_view(const Column& c) {
  if (!c.is_categorical()) return c.values;
  if (auto b = binary_values(c)) return *b;
  std::vector<double> out(c.codes.begin(), c.codes.end());
  return out;
}

Column categorical_view(const Column& c) {
  if (c.is_categorical()) return c;
  return quantile_bin(c.values, kTargetBins, c.name).column;
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    out += n;
    out += '\x1f';
  }
  return out;
}

std::vector<std::string> sorted_union(const std::map<int, std::vector<std::string>>& selected,
                                      const std::vector<int>& ids) {
  std::set<std::string> s;
  for (int id : ids) {
    const auto it = selected.find(id);
    if (it != selected.end()) s.insert(it->second.begin(), it->second.end());
  }
  return {s.begin(), s.end()};
}

class Runner {
 public:
  Runner(const DataTable& table, Target target, const MultiGroupConfig& config)
      : table_(table), target_(std::move(target)), config_(config) {}

  // Temporary target given the other groups' selection; `key` identifies it.
  Column temp_target(const std::vector<std::string>& others, std::string& key) {
    if (others.empty()) {
      key = "";
      return table_.column(target_.name);
    }
    key = join(others);
    auto it = residuals_.find(key);
    if (it == residuals_.end()) {
      it = residuals_.emplace(key, residual_target(table_, others, target_, config_)).first;
      ++fits_;
    }
    return it->second;
  }

  CITester continuous_tester(const Column& temp, const std::string& key) {
    auto y = std::make_shared<Eigen::MatrixXd>(as_matrix(numeric_view(temp)));
    return [this, y, key](const std::string& cand, const std::vector<std::string>& cond) {
      const auto cache_key = "rcit\x1e" + key + "\x1e" + cand + "\x1e" + join(cond);
      if (auto it = tests_.find(cache_key); it != tests_.end()) return it->second;
      const auto x = as_matrix(table_.column(cand).values);
      const auto z = design_matrix(table_, cond);
      auto r = rcit(x, *y, z, config_.rcit_params);
      tests_.emplace(cache_key, r);
      return r;
    };
  }

  CITester categorical_tester(const Column& temp, const std::string& key) {
    auto y = std::make_shared<Column>(categorical_view(temp));
    return [this, y, key](const std::string& cand, const std::vector<std::string>& cond) {
      const auto cache_key = "chisq\x1e" + key + "\x1e" + cand + "\x1e" + join(cond);
      if (auto it = tests_.find(cache_key); it != tests_.end()) return it->second;
      std::vector<const Column*> cols;
      for (const auto& c : cond) cols.push_back(&table_.column(c));
      auto r = chisq_conditional(table_.column(cand), *y, cols);
      tests_.emplace(cache_key, r);
      return r;
    };
  }

  std::size_t fits() const { return fits_; }

 private:
  const DataTable& table_;
  Target target_;
  const MultiGroupConfig& config_;
  std::map<std::string, Column> residuals_;
  std::map<std::string, CITestResult> tests_;
  std::size_t fits_ = 0;
};

SelectionState run_groups(const DataTable& table, const std::string& target_name,
                          const MultiGroupConfig& config, bool allow_categorical) {
  if (!table.has_column(target_name))
    throw std::invalid_argument("target column '" + target_name + "' not found");
  if (config.max_outer_iterations < 1) throw std::invalid_argument("max_outer_iterations must be >= 1");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");

  std::vector<std::string> candidates = config.candidates;
  if (candidates.empty()) {
    for (const auto& c : table.columns())
      if (c.name != target_name) candidates.push_back(c.name);
  }
  for (const auto& c : candidates) {
    if (c == target_name) throw std::invalid_argument("target '" + c + "' listed as a candidate");
    const auto& col = table.column(c);
    if (!allow_categorical && col.is_categorical())
      throw std::invalid_argument("run_m2 needs continuous candidates; '" + c +
                                  "' is categorical (use run_m3)");
  }

  SelectionState state;
  if (config.group_assignment) {
    state.partition = partition_from_assignment(table, candidates, *config.group_assignment);
    state.grouping_bypassed = true;
  } else {
    state.partition = partition(table, candidates,
                                {config.group_threshold, config.max_group_size, config.pack_singletons});
  }

  std::vector<int> ids;
  for (std::size_t g = 0; g < state.partition.continuous_groups.size(); ++g)
    ids.push_back(static_cast<int>(g));
  const int cat_id = state.categorical_group_id();
  if (cat_id >= 0) ids.push_back(cat_id);
  for (int id : ids) state.per_group_selected[id] = {};

  Runner runner(table, prepare_target(table, target_name), config);
  const FbedConfig fbed_config{config.fbed_k, config.alpha};
  std::vector<std::string> previous;

  for (int iter = 1; iter <= config.max_outer_iterations; ++iter) {
    state.outer_iteration = iter;
    for (int id : ids) {
      std::vector<int> other_ids, other_kind_ids;
      for (int o : ids) {
        if (o == id) continue;
        other_ids.push_back(o);
        if ((o == cat_id) != (id == cat_id)) other_kind_ids.push_back(o);
      }
      const auto others = sorted_union(state.per_group_selected, other_ids);
      const auto other_kind = sorted_union(state.per_group_selected, other_kind_ids);

      std::string key;
      const Column temp = runner.temp_target(others, key);
      const bool categorical = id == cat_id;
      const auto& members = state.group_members(id);
      const auto pool = other_kind.empty()
                            ? members
                            : screen_group(members, categorical ? GroupKind::Categorical : GroupKind::Continuous,
                                           other_kind, temp, table, config.alpha, config.rcit_params);
      const auto tester = categorical ? runner.categorical_tester(temp, key) : runner.continuous_tester(temp, key);
      auto result = fbed(pool, tester, fbed_config);
      state.per_group_selected[id] = std::move(result.selected);
      state.traces[id] = std::move(result.trace);
      state.mb_set = sorted_union(state.per_group_selected, ids);
    }
    if (state.mb_set == previous) {
      state.converged = true;
      break;
    }
    previous = state.mb_set;
  }
  state.residual_fits = runner.fits();
  return state;
}

}  // namespace

const std::vector<std::string>& SelectionState::group_members(int id) const {
  if (id >= 0 && static_cast<std::size_t>(id) < partition.continuous_groups.size())
    return partition.continuous_groups[static_cast<std::size_t>(id)];
  if (id == categorical_group_id()) return partition.categorical_group;
  throw std::out_of_range("unknown group id " + std::to_string(id));
}

int SelectionState::categorical_group_id() const {
  return partition.categorical_group.empty() ? -1 : static_cast<int>(partition.continuous_groups.size());
}

Target prepare_target(const DataTable& table, const std::string& name) {
  const auto& c = table.column(name);
  Target t;
  t.name = name;
  if (!c.is_categorical()) {
    t.values = c.values;
    return t;
  }
  auto b = binary_values(c);
  if (!b)
    throw std::invalid_argument("target '" + name + "' has " + std::to_string(c.num_levels()) +
                                " levels; only continuous or binary targets are supported");
  t.values = std::move(*b);
  t.binary = true;
  return t;
}

Column residual_target(const DataTable& table, const std::vector<std::string>& selected,
                       const Target& target, const MultiGroupConfig& config) {
  if (selected.empty()) throw std::invalid_argument("residual_target: empty selection");
  std::vector<std::string> names;
  const auto x = design_matrix(table, selected, &names);
  auto params = target.binary ? config.ensemble_params_classification : config.ensemble_params_regression;
  params.objective = target.binary ? Objective::Logistic : Objective::SquaredError;
  const std::size_t folds = config.residual_folds;
  if (folds < 2) {
    const auto model = fit_ensemble(x, target.values, params, names);
    return Column::continuous("residual", residuals(model, x, target.values));
  }

  // Row i belongs to fold i mod folds; each fold is predicted by a model
  // fitted on the remaining rows.
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<double> out(n);
  for (std::size_t k = 0; k < folds; ++k) {
    std::vector<Eigen::Index> train, test;
    for (std::size_t i = 0; i < n; ++i) (i % folds == k ? test : train).push_back(static_cast<Eigen::Index>(i));
    const Eigen::MatrixXd xt = x(train, Eigen::all);
    const Eigen::MatrixXd xe = x(test, Eigen::all);
    std::vector<double> yt;
    for (auto i : train) yt.push_back(target.values[static_cast<std::size_t>(i)]);
    const auto model = fit_ensemble(xt, yt, params, names);
    const auto pred = predict(model, xe);
    for (std::size_t j = 0; j < test.size(); ++j) {
      const auto i = static_cast<std::size_t>(test[j]);
      out[i] = target.values[i] - pred[j];
    }
  }
  return Column::continuous("residual", std::move(out));
}

std::vector<std::string> screen_group(const std::vector<std::string>& group, GroupKind kind,
                                      const std::vector<std::string>& selected_other_kind,
                                      const Column& temp_target, const DataTable& table,
                                      double alpha, const RcitParams& rcit_params) {
  if (selected_other_kind.empty()) return group;
  const Column binned_temp = categorical_view(temp_target);
  const Eigen::MatrixXd temp_matrix = as_matrix(numeric_view(temp_target));

  std::vector<std::string> retained;
  for (const auto& xname : group) {
    const auto& x = table.column(xname);
    bool drop = false;
    for (const auto& zname : selected_other_kind) {
      const auto& z = table.column(zname);
      CITestResult marginal;
      if (x.is_categorical() && z.is_categorical())
        marginal = chisq_marginal(x, z);
      else if (x.is_categorical())
        marginal = mixed_marginal(x, z);
      else if (z.is_categorical())
        marginal = mixed_marginal(z, x);
      else
        marginal = rit(as_matrix(x.values), as_matrix(z.values), rcit_params);
      if (!marginal.rejects(alpha)) continue;

      CITestResult conditional;
      if (kind == GroupKind::Categorical) {
        const Column zc = categorical_view(z);
        const Column* cond[] = {&zc};
        conditional = chisq_conditional(x, binned_temp, cond);
      } else {
        const std::vector<std::string> zn{zname};
        conditional = rcit(as_matrix(numeric_view(x)), temp_matrix, design_matrix(table, zn), rcit_params);
      }
      if (conditional.data_insufficient || !conditional.rejects(alpha)) {
        drop = true;
        break;
      }
    }
    if (!drop) retained.push_back(xname);
  }
  return retained;
}

SelectionState run_m2(const DataTable& table, const std::string& target, const MultiGroupConfig& config) {
  return run_groups(table, target, config, false);
}

SelectionState run_m3(const DataTable& table, const std::string& target, const MultiGroupConfig& config) {
  return run_groups(table, target, config, true);
}

}  // namespace mbsel
