#include "mbsel/fbed.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace mbsel {

std::string_view to_string(Phase phase) {
  return phase == Phase::Forward ? "forward" : "backward";
}

std::string_view to_string(Action action) {
  switch (action) {
    case Action::Added: return "added";
    case Action::Dropped: return "dropped";
    case Action::Removed: return "removed";
  }
  return "?";
}

namespace {

bool dependent(const CITestResult& r, double alpha) {
  return !r.data_insufficient && r.p_value < alpha;
}

}  // namespace

std::vector<CITestResult> marginal_tests(const std::vector<std::string>& pool, const CITester& tester) {
  std::vector<CITestResult> out;
  out.reserve(pool.size());
  const std::vector<std::string> none;
  for (const auto& name : pool) out.push_back(tester(name, none));
  return out;
}

std::vector<std::string> rank_candidates(const std::vector<std::string>& pool,
                                         const std::vector<CITestResult>& marginals) {
  if (pool.size() != marginals.size()) throw std::invalid_argument("rank_candidates: size mismatch");
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = marginals[a];
    const auto& rb = marginals[b];
    if (ra.p_value != rb.p_value) return ra.p_value < rb.p_value;
    if (ra.statistic != rb.statistic) return ra.statistic > rb.statistic;
    return pool[a] < pool[b];
  });
  std::vector<std::string> out;
  out.reserve(pool.size());
  for (auto i : order) out.push_back(pool[i]);
  return out;
}

std::vector<std::string> rank_candidates(const std::vector<std::string>& pool, const CITester& tester) {
  return rank_candidates(pool, marginal_tests(pool, tester));
}

FbedResult fbed(const std::vector<std::string>& candidates, const CITester& tester,
                const FbedConfig& config) {
  if (config.k < 0) throw std::invalid_argument("fbed: k must be >= 0");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw std::invalid_argument("fbed: alpha must be in (0,1)");

  FbedResult out;
  if (candidates.empty()) return out;

  std::map<std::string, CITestResult> marginal;
  const auto all_marginals = marginal_tests(candidates, tester);
  for (std::size_t i = 0; i < candidates.size(); ++i) marginal.emplace(candidates[i], all_marginals[i]);

  std::vector<std::string>& cmb = out.selected;
  std::vector<std::string> pool = candidates;
  for (int sweep = 0; sweep <= config.k && !pool.empty(); ++sweep) {
    std::vector<CITestResult> pool_marginals;
    for (const auto& name : pool) pool_marginals.push_back(marginal.at(name));
    const auto ranked = rank_candidates(pool, pool_marginals);

    const auto size_before = cmb.size();
    std::vector<std::string> dropped;
    for (const auto& name : ranked) {
      const auto r = cmb.empty() ? marginal.at(name) : tester(name, cmb);
      if (dependent(r, config.alpha)) {
        out.trace.push_back({name, Phase::Forward, Action::Added, r.p_value, cmb, sweep});
        cmb.push_back(name);
      } else {
        out.trace.push_back({name, Phase::Forward, Action::Dropped, r.p_value, cmb, sweep});
        dropped.push_back(name);
      }
    }
    pool = std::move(dropped);
    if (cmb.size() == size_before) break;
  }

  bool changed = true;
  while (changed && !cmb.empty()) {
    changed = false;
    for (std::size_t idx = cmb.size(); idx-- > 0;) {
      std::vector<std::string> rest;
      for (std::size_t j = 0; j < cmb.size(); ++j)
        if (j != idx) rest.push_back(cmb[j]);
      const auto r = rest.empty() ? marginal.at(cmb[idx]) : tester(cmb[idx], rest);
      if (!dependent(r, config.alpha)) {
        out.trace.push_back({cmb[idx], Phase::Backward, Action::Removed, r.p_value, rest, -1});
        cmb.erase(cmb.begin() + static_cast<std::ptrdiff_t>(idx));
        changed = true;
      }
    }
  }
  return out;
}

std::vector<std::string> replay(const SelectionTrace& trace) {
  std::vector<std::string> set;
  for (const auto& e : trace) {
    if (e.action == Action::Added) {
      set.push_back(e.variable);
    } else if (e.action == Action::Removed) {
      set.erase(std::remove(set.begin(), set.end(), e.variable), set.end());
    }
  }
  return set;
}

}  // namespace mbsel
