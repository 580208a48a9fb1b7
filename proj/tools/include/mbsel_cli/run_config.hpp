#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbsel/data_table.hpp"
#include "mbsel/evalbench.hpp"
#include "mbsel/multigroup.hpp"
#include "mbsel/simgen.hpp"

namespace mbsel::cli {

inline constexpr int kSchemaVersion = 1;

/// Named significance levels accepted in place of a number.
inline constexpr double kAlphaSimulation = 1e-4;
inline constexpr double kAlphaRealData = 1e-6;

/// Invalid or unreadable configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CalibrationSettings {
  std::vector<std::size_t> cond_sizes{0, 2, 5, 8};
  std::vector<int> d_values{40, 80, 160, 240};
  std::size_t n = 2000;
  std::size_t n_reps = 20;
  std::uint64_t seed = 0;
  CalibrationOptions options{};
};

struct BenchSettings {
  std::size_t n_reps = 5;
  std::uint64_t base_seed = 0;
};

struct RunConfig {
  SimSpec simulation{};
  std::string target = "y";
  MultiGroupConfig selection{};
  SchemaHints schema_hints;
  CalibrationSettings calibration{};
  BenchSettings bench{};
};

RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

/// Every setting, defaults included.
nlohmann::json resolved_config(const RunConfig& config);

}  // namespace mbsel::cli
