#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mbsel/multigroup.hpp"
#include "mbsel/rcit.hpp"
#include "mbsel/simgen.hpp"

namespace mbsel {

/// Harmonic mean of precision and recall of `selected` against `truth`.
/// An empty selection scores 0; an empty truth throws.
double f1(const std::vector<std::string>& selected, const std::vector<std::string>& truth);

struct ReplicateRecord {
  std::uint64_t seed = 0;
  std::vector<std::string> selected;
  double f1 = 0.0;
  double runtime_s = 0.0;
  int outer_iterations = 0;
  bool converged = false;
};

struct StudyReport {
  SimSpec spec;
  std::vector<ReplicateRecord> records;
  double mean_f1 = 0.0;
  double sd_f1 = 0.0;
  /// Fraction of replicates selecting each candidate; covers every candidate.
  std::map<std::string, double> selection_frequency;
  std::vector<std::string> true_mb;
};

/// Replicate i uses seed base_seed + i for data generation; selection is run_m3.
StudyReport replicate_study(const SimSpec& spec, const MultiGroupConfig& config, std::size_t n_reps,
                            std::uint64_t base_seed);

struct CalibrationRow {
  std::size_t cond_size = 0;
  int d = 0;
  double fpr = 0.0;
  double mean_runtime_s = 0.0;
  /// Per replicate, in replicate order.
  std::vector<double> p_values;
};

struct CalibrationOptions {
  double alpha = 0.05;
  double rho = 0.5;
  double triple_rho = 0.9;
  RcitParams rcit{};
};

/// Covariates that may join x37 in the conditioning set: x0..x49 minus x37..x39.
const std::vector<std::string>& calibration_conditioning_pool();

/// For each replicate a fresh dataset from gen_calibration_data is shared by
/// every (cond_size, d) cell. A cell with cond_size > 0 tests y against x39
/// given x37 and cond_size - 1 pool variables drawn without replacement
/// (one shuffle per replicate, so larger sets nest the smaller), with d Fourier
/// features for the conditioning set. cond_size 0 tests y against the
/// unrelated x46 without conditioning. Rows come out in grid order,
/// cond_size major.
std::vector<CalibrationRow> rcit_calibration(const std::vector<std::size_t>& cond_sizes,
                                             const std::vector<int>& d_values, std::size_t n,
                                             std::size_t n_reps, std::uint64_t seed,
                                             const CalibrationOptions& options = {});

/// Rejection rate within consecutive batches of `batch` replicates, then the
/// median over batches.
double batch_median_fpr(const std::vector<double>& p_values, double alpha, std::size_t batch);

}  // namespace mbsel
