#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "mbsel/ci_result.hpp"

namespace mbsel {

struct FbedConfig {
  /// Extra forward sweeps over the dropped pool; k = 1 runs two sweeps.
  int k = 1;
  double alpha = 1e-4;
};

enum class Phase { Forward, Backward };
enum class Action { Added, Dropped, Removed };

std::string_view to_string(Phase phase);
std::string_view to_string(Action action);

struct TraceEvent {
  std::string variable;
  Phase phase = Phase::Forward;
  Action action = Action::Added;
  double p_value = 1.0;
  std::vector<std::string> conditioning_set;
  int sweep = 0;  ///< -1 for backward events
};

using SelectionTrace = std::vector<TraceEvent>;

/// Tests candidate against the target given the named conditioning variables.
using CITester = std::function<CITestResult(const std::string& candidate,
                                            const std::vector<std::string>& conditioning)>;

struct FbedResult {
  /// In insertion order.
  std::vector<std::string> selected;
  SelectionTrace trace;
};

/// Marginal results, one per pool member, in pool order.
std::vector<CITestResult> marginal_tests(const std::vector<std::string>& pool, const CITester& tester);

/// Pool ordered by ascending marginal p-value, then larger statistic, then name.
std::vector<std::string> rank_candidates(const std::vector<std::string>& pool,
                                         const std::vector<CITestResult>& marginals);
std::vector<std::string> rank_candidates(const std::vector<std::string>& pool, const CITester& tester);

/// Forward-backward selection with early dropping. A sweep walks the pool in
/// marginal order and adds a candidate when it is dependent on the target
/// given the current selection (p < alpha), otherwise drops it for the rest
/// of the sweep. While the selection is empty the test is the cached marginal
/// one. Dropped candidates form the next sweep's pool; a sweep that adds
/// nothing ends the forward phase early. The backward phase removes, in
/// reverse insertion order, any member that is independent given the others,
/// repeating until a pass removes nothing.
///
/// Data-insufficient results count as independence.
FbedResult fbed(const std::vector<std::string>& candidates, const CITester& tester,
                const FbedConfig& config = {});

/// Replays added/removed events.
std::vector<std::string> replay(const SelectionTrace& trace);

}  // namespace mbsel
