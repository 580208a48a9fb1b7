#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include <json.hpp>

#include "mbsel_cli/run_config.hpp"

namespace mbsel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Bad invocation or input that contradicts the configuration; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// data.csv and truth.json.
void cmd_simulate(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// report.json; returns the report.
nlohmann::json cmd_select(const RunConfig& config, const std::filesystem::path& data,
                          const std::filesystem::path& out_dir, std::ostream& log);

/// calibration.csv (cond_size,d,fpr,mean_runtime_s) and calibration.json.
void cmd_calibrate(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// bench_report.json and bench_records.csv; returns the report.
nlohmann::json cmd_bench(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// Parses `mbsel <simulate|select|calibrate|bench> --config <path> [--data <csv>]
/// [--out <dir>]`, runs the command and returns the process exit code. Logs
/// and errors go to `err`, help text to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mbsel::cli
