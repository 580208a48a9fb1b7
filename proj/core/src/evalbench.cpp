#include "mbsel/evalbench.hpp"

#include "mbsel/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>

namespace mbsel {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::MatrixXd columns_of(const DataTable& table, const std::vector<std::string>& names) {
  return design_matrix(table, names);
}

}  // namespace

double f1(const std::vector<std::string>& selected, const std::vector<std::string>& truth) {
  const std::set<std::string> t(truth.begin(), truth.end());
  if (t.empty()) throw std::invalid_argument("f1: empty ground truth");
  const std::set<std::string> s(selected.begin(), selected.end());
  if (s.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& v : s) hit += t.count(v);
  const double precision = static_cast<double>(hit) / static_cast<double>(s.size());
  const double recall = static_cast<double>(hit) / static_cast<double>(t.size());
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

StudyReport replicate_study(const SimSpec& spec, const MultiGroupConfig& config, std::size_t n_reps,
                            std::uint64_t base_seed) {
  if (n_reps < 1) throw std::invalid_argument("replicate_study: n_reps must be >= 1");
  StudyReport report;
  report.spec = spec;
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i < n_reps; ++i) {
    SimSpec s = spec;
    s.seed = base_seed + i;
    const auto data = generate(s);
    if (i == 0) {
      report.true_mb = data.true_mb;
      for (const auto& c : data.table.columns())
        if (c.name != "y") counts[c.name] = 0;
    }
    const auto start = Clock::now();
    const auto state = run_m3(data.table, "y", config);
    ReplicateRecord rec;
    rec.runtime_s = seconds_since(start);
    rec.seed = s.seed;
    rec.selected = state.mb_set;
    rec.f1 = f1(state.mb_set, data.true_mb);
    rec.outer_iterations = state.outer_iteration;
    rec.converged = state.converged;
    for (const auto& v : state.mb_set) ++counts[v];
    report.records.push_back(std::move(rec));
  }

  double sum = 0.0;
  for (const auto& r : report.records) sum += r.f1;
  const auto k = static_cast<double>(n_reps);
  report.mean_f1 = sum / k;
  double ss = 0.0;
  for (const auto& r : report.records) ss += (r.f1 - report.mean_f1) * (r.f1 - report.mean_f1);
  report.sd_f1 = n_reps > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
  for (const auto& [name, c] : counts) report.selection_frequency[name] = static_cast<double>(c) / k;
  return report;
}

const std::vector<std::string>& calibration_conditioning_pool() {
  static const std::vector<std::string> pool = [] {
    std::vector<std::string> out;
    for (int j = 0; j < 50; ++j)
      if (j < 37 || j > 39) out.push_back("x" + std::to_string(j));
    return out;
  }();
  return pool;
}

std::vector<CalibrationRow> rcit_calibration(const std::vector<std::size_t>& cond_sizes,
                                             const std::vector<int>& d_values, std::size_t n,
                                             std::size_t n_reps, std::uint64_t seed,
                                             const CalibrationOptions& options) {
  if (cond_sizes.empty() || d_values.empty()) throw std::invalid_argument("rcit_calibration: empty grid");
  if (n_reps < 1) throw std::invalid_argument("rcit_calibration: n_reps must be >= 1");
  const auto& pool = calibration_conditioning_pool();
  for (auto c : cond_sizes)
    if (c > pool.size() + 1)
      throw std::invalid_argument("rcit_calibration: cond_size " + std::to_string(c) + " exceeds the " +
                                  std::to_string(pool.size() + 1) + " available variables");
  for (int d : d_values)
    if (d < 1) throw std::invalid_argument("rcit_calibration: d must be >= 1");

  std::vector<CalibrationRow> rows;
  for (auto c : cond_sizes)
    for (int d : d_values) rows.push_back({c, d, 0.0, 0.0, {}});
  std::vector<double> runtime(rows.size(), 0.0);

  for (std::size_t rep = 0; rep < n_reps; ++rep) {
    const auto table = gen_calibration_data(n, options.rho, mix_seed(seed, rep), options.triple_rho);
    const Eigen::MatrixXd y = columns_of(table, {"y"});
    std::vector<std::string> order = pool;
    Rng rng(mix_seed(seed, rep ^ 0x9e3779b9ULL));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i))]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      auto& row = rows[r];
      RcitParams params = options.rcit;
      params.d_min = row.d;
      params.d_per_cond_var = 0;
      params.seed = mix_seed(seed ^ 0x5bd1e995ULL, rep);
      const auto start = Clock::now();
      CITestResult res;
      if (row.cond_size == 0) {
        res = rit(columns_of(table, {"x46"}), y, params);
      } else {
        std::vector<std::string> cond{"x37"};
        cond.insert(cond.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(row.cond_size - 1));
        res = rcit(columns_of(table, {"x39"}), y, columns_of(table, cond), params);
      }
      runtime[r] += seconds_since(start);
      row.p_values.push_back(res.p_value);
    }
  }

  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto& row = rows[r];
    const auto rejected = std::count_if(row.p_values.begin(), row.p_values.end(),
                                        [&](double p) { return p < options.alpha; });
    row.fpr = static_cast<double>(rejected) / static_cast<double>(n_reps);
    row.mean_runtime_s = runtime[r] / static_cast<double>(n_reps);
  }
  return rows;
}

double batch_median_fpr(const std::vector<double>& p_values, double alpha, std::size_t batch) {
  if (batch < 1 || p_values.size() < batch) throw std::invalid_argument("batch_median_fpr: bad batch size");
  std::vector<double> rates;
  for (std::size_t start = 0; start + batch <= p_values.size(); start += batch) {
    const auto rejected = std::count_if(p_values.begin() + static_cast<std::ptrdiff_t>(start),
                                        p_values.begin() + static_cast<std::ptrdiff_t>(start + batch),
                                        [&](double p) { return p < alpha; });
    rates.push_back(static_cast<double>(rejected) / static_cast<double>(batch));
  }
  std::sort(rates.begin(), rates.end());
  const auto m = rates.size();
  return m % 2 == 1 ? rates[m / 2] : 0.5 * (rates[m / 2 - 1] + rates[m / 2]);
}

}  // namespace mbsel
