#include "mbsel/chisq.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace mbsel {

namespace {

void require_categorical(const Column& c, const char* fn) {
  if (!c.is_categorical())
    throw std::invalid_argument(std::string(fn) + ": column '" + c.name + "' is not categorical");
}

}  // namespace

std::int64_t ContingencyTable::total() const {
  std::int64_t t = 0;
  for (const auto& row : counts)
    for (auto v : row) t += v;
  return t;
}

ContingencyTable ContingencyTable::tabulate(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw std::invalid_argument("tabulate: length mismatch");
  ContingencyTable t;
  std::map<int, std::size_t> ra, cb;
  for (int v : a) ra.emplace(v, 0);
  for (int v : b) cb.emplace(v, 0);
  for (auto& [level, idx] : ra) {
    idx = t.row_levels.size();
    t.row_levels.push_back(level);
  }
  for (auto& [level, idx] : cb) {
    idx = t.col_levels.size();
    t.col_levels.push_back(level);
  }
  t.counts.assign(t.row_levels.size(), std::vector<std::int64_t>(t.col_levels.size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i) ++t.counts[ra.at(a[i])][cb.at(b[i])];
  return t;
}

PearsonStat pearson_statistic(const ContingencyTable& table) {
  const auto r = table.rows();
  const auto c = table.cols();
  std::vector<double> row_sum(r, 0.0), col_sum(c, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const auto v = static_cast<double>(table.counts[i][j]);
      row_sum[i] += v;
      col_sum[j] += v;
      total += v;
    }

  PearsonStat out;
  if (r < 2 || c < 2 || total <= 0.0) return out;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const double expected = row_sum[i] * col_sum[j] / total;
      if (expected <= 0.0) continue;
      const double diff = static_cast<double>(table.counts[i][j]) - expected;
      out.statistic += diff * diff / expected;
    }
  out.df = static_cast<double>((r - 1) * (c - 1));
  return out;
}

double chisq_upper_tail(double statistic, double df) {
  if (df <= 0.0 || statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * statistic);
}

CITestResult chisq_marginal(const ContingencyTable& table) {
  const auto stat = pearson_statistic(table);
  CITestResult r;
  r.statistic = stat.statistic;
  r.df = stat.df;
  r.p_value = chisq_upper_tail(stat.statistic, stat.df);
  r.n_used = static_cast<std::size_t>(table.total());
  r.method = "chisq-marginal";
  return r;
}

CITestResult chisq_marginal(const Column& a, const Column& b) {
  require_categorical(a, "chisq_marginal");
  require_categorical(b, "chisq_marginal");
  return chisq_marginal(ContingencyTable::tabulate(a.codes, b.codes));
}

CITestResult chisq_conditional(const Column& a, const Column& b,
                               std::span<const Column* const> cond,
                               const ConditionalChisqOptions& options) {
  require_categorical(a, "chisq_conditional");
  require_categorical(b, "chisq_conditional");
  if (a.size() != b.size()) throw std::invalid_argument("chisq_conditional: length mismatch");
  if (cond.empty()) return chisq_marginal(a, b);
  for (const auto* c : cond) {
    require_categorical(*c, "chisq_conditional");
    if (c->size() != a.size()) throw std::invalid_argument("chisq_conditional: length mismatch");
  }

  const std::size_t min_n = options.min_stratum_n > 0
                                ? options.min_stratum_n
                                : 5 * std::max(a.num_levels(), b.num_levels());

  std::map<std::vector<int>, std::vector<std::size_t>> strata;
  std::vector<int> key(cond.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < cond.size(); ++k) key[k] = cond[k]->codes[i];
    strata[key].push_back(i);
  }

  CITestResult r;
  r.method = "chisq-conditional";
  std::size_t used = 0;
  std::size_t qualifying = 0;
  std::vector<int> sa, sb;
  for (const auto& [level, rows] : strata) {
    if (rows.size() < min_n) continue;
    sa.clear();
    sb.clear();
    for (auto i : rows) {
      sa.push_back(a.codes[i]);
      sb.push_back(b.codes[i]);
    }
    const auto table = ContingencyTable::tabulate(sa, sb);
    if (table.rows() < 2 || table.cols() < 2) continue;
    const auto stat = pearson_statistic(table);
    r.statistic += stat.statistic;
    r.df += stat.df;
    used += rows.size();
    ++qualifying;
  }

  r.n_used = used;
  if (qualifying == 0) {
    r.data_insufficient = true;
    r.p_value = 1.0;
    r.method += "/data-insufficient";
    return r;
  }
  r.p_value = chisq_upper_tail(r.statistic, r.df);
  return r;
}

CITestResult mixed_marginal(const Column& cat, const Column& cont) {
  require_categorical(cat, "mixed_marginal");
  if (cont.is_categorical())
    throw std::invalid_argument("mixed_marginal: column '" + cont.name + "' is not continuous");
  const auto binned = quantile_bin(cont.values, kMixedMarginalBins, cont.name);
  auto r = chisq_marginal(cat, binned.column);
  r.method = "chisq-mixed";
  return r;
}

}  // namespace mbsel
