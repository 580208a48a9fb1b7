#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mbsel_cli/commands.hpp"

namespace mbsel::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("mbsel_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const json& doc, const std::string& name = "config.json") {
    const auto path = dir_ / name;
    std::ofstream(path) << doc.dump();
    return path;
  }

  int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "mbsel");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return run(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  static std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static json load(const fs::path& path) { return json::parse(slurp(path)); }

  static json linear(std::size_t n, std::uint64_t seed) {
    return {{"schema_version", 1},
            {"simulation", {{"kind", "linear"}, {"response", "continuous"}, {"rho", 0.5}, {"n", n}, {"seed", seed}}}};
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, SimulateLinearHeader) {
  const auto cfg = write_config(linear(300, 1));
  ASSERT_EQ(invoke({"simulate", "--config", cfg.string(), "--out", (dir_ / "a").string()}), 0) << err_.str();
  const auto csv = slurp(dir_ / "a" / "data.csv");
  std::string header = csv.substr(0, csv.find('\n'));
  std::string expected;
  for (int j = 0; j <= 50; ++j) expected += "x" + std::to_string(j) + ",";
  EXPECT_EQ(header, expected + "y");
  const auto truth = load(dir_ / "a" / "truth.json");
  EXPECT_EQ(truth["schema_version"], 1);
  EXPECT_TRUE(truth.contains("resolved_config"));
}

TEST_F(CliTest, SimulateIsByteIdentical) {
  const auto cfg = write_config(linear(500, 2));
  ASSERT_EQ(invoke({"simulate", "--config", cfg.string(), "--out", (dir_ / "a").string()}), 0);
  ASSERT_EQ(invoke({"simulate", "--config", cfg.string(), "--out", (dir_ / "b").string()}), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "data.csv"), slurp(dir_ / "b" / "data.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "truth.json"), slurp(dir_ / "b" / "truth.json"));
}

TEST_F(CliTest, ComplexTruthSidecar) {
  auto doc = linear(500, 3);
  doc["simulation"]["kind"] = "complex";
  const auto cfg = write_config(doc);
  ASSERT_EQ(invoke({"simulate", "--config", cfg.string(), "--out", dir_.string()}), 0);
  const auto truth = load(dir_ / "truth.json");
  EXPECT_EQ(truth["true_mb"].size(), 22u);
  EXPECT_EQ(truth["roles"]["x51"], "child");
}

TEST_F(CliTest, SelectKeepsStrongChild) {
  int with_child = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto cfg = write_config(linear(5000, seed));
    const auto out = dir_ / ("s" + std::to_string(seed));
    ASSERT_EQ(invoke({"simulate", "--config", cfg.string(), "--out", out.string()}), 0);
    ASSERT_EQ(invoke({"select", "--config", cfg.string(), "--data", (out / "data.csv").string(), "--out",
                      out.string()}),
              0)
        << err_.str();
    const auto report = load(out / "report.json");
    const auto selected = report["selected"].get<std::vector<std::string>>();
    if (std::find(selected.begin(), selected.end(), "x50") != selected.end()) ++with_child;
    EXPECT_TRUE(report.contains("trace_summary"));
    EXPECT_TRUE(report.contains("iterations"));
    EXPECT_TRUE(report.contains("converged"));
  }
  EXPECT_GE(with_child, 4);
}

TEST_F(CliTest, PreSpecifiedGroupsReported) {
  auto doc = linear(800, 4);
  json groups = json::object();
  for (int j = 0; j <= 50; ++j) groups["x" + std::to_string(j)] = j / 10;
  doc["selection"] = {{"groups", groups}};
  const auto cfg = write_config(doc);
  ASSERT_EQ(invoke({"simulate", "--config", cfg.string(), "--out", dir_.string()}), 0);
  ASSERT_EQ(invoke({"select", "--config", cfg.string(), "--data", (dir_ / "data.csv").string(), "--out",
                    dir_.string()}),
            0)
      << err_.str();
  const auto report = load(dir_ / "report.json");
  EXPECT_EQ(report["grouping_bypassed"], true);
  EXPECT_EQ(report["groups"].size(), 6u);
}

TEST_F(CliTest, MissingTargetIsUsageError) {
  auto doc = linear(200, 5);
  doc["selection"] = {{"target", "outcome"}};
  const auto cfg = write_config(doc);
  ASSERT_EQ(invoke({"simulate", "--config", cfg.string(), "--out", dir_.string()}), 0);
  EXPECT_EQ(invoke({"select", "--config", cfg.string(), "--data", (dir_ / "data.csv").string()}), 2);
  EXPECT_NE(err_.str().find("outcome"), std::string::npos);
}

TEST_F(CliTest, ConfigAndUsageErrors) {
  auto doc = linear(200, 6);
  doc["selection"] = {{"alfa", 0.1}};
  const auto bad = write_config(doc);
  EXPECT_EQ(invoke({"simulate", "--config", bad.string()}), 2);
  EXPECT_NE(err_.str().find("alfa"), std::string::npos);
  EXPECT_EQ(invoke({"simulate"}), 2);
  EXPECT_EQ(invoke({"explode", "--config", bad.string()}), 2);
  EXPECT_EQ(invoke({"select", "--config", (dir_ / "missing.json").string(), "--data", "x.csv"}), 2);
  const auto ok = write_config(linear(200, 6), "ok.json");
  EXPECT_EQ(invoke({"select", "--config", ok.string(), "--data", (dir_ / "nope.csv").string()}), 1);
  EXPECT_EQ(invoke({"--help"}), 0);
  EXPECT_NE(out_.str().find("simulate"), std::string::npos);
}

TEST_F(CliTest, CalibrateGrid) {
  json doc = {{"schema_version", 1}, {"calibration", {{"n", 600}, {"n_reps", 2}, {"seed", 1}}}};
  const auto cfg = write_config(doc);
  ASSERT_EQ(invoke({"calibrate", "--config", cfg.string(), "--out", dir_.string()}), 0) << err_.str();
  const auto table = load_table(dir_ / "calibration.csv");
  EXPECT_EQ(table.names(), (std::vector<std::string>{"cond_size", "d", "fpr", "mean_runtime_s"}));
  EXPECT_EQ(table.n_rows(), 16u);
  const auto& fpr = table.column("fpr");
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    const double v = fpr.is_categorical() ? std::stod(fpr.cell_text(i)) : fpr.values[i];
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_EQ(load(dir_ / "calibration.json")["rows"].size(), 16u);
}

TEST_F(CliTest, BenchLinearStudy) {
  auto doc = linear(5000, 0);
  doc["bench"] = {{"n_reps", 5}, {"base_seed", 0}};
  const auto cfg = write_config(doc);
  ASSERT_EQ(invoke({"bench", "--config", cfg.string(), "--out", dir_.string()}), 0) << err_.str();
  const auto report = load(dir_ / "bench_report.json");
  EXPECT_EQ(report["records"].size(), 5u);
  EXPECT_GE(report["mean_f1"].get<double>(), 0.95);
  EXPECT_EQ(report["selection_frequency"].size(), 51u);
  for (int j = 0; j <= 50; ++j) EXPECT_TRUE(report["selection_frequency"].contains("x" + std::to_string(j)));
}

TEST(RunConfig, DefaultsMaterialized) {
  const auto cfg = parse_run_config(json{{"schema_version", 1}});
  const auto resolved = resolved_config(cfg);
  EXPECT_EQ(resolved["selection"]["alpha"], 1e-4);
  EXPECT_EQ(resolved["selection"]["target"], "y");
  EXPECT_TRUE(resolved["selection"].contains("rcit"));
  EXPECT_TRUE(resolved["selection"].contains("ensemble_regression"));
  EXPECT_TRUE(resolved["simulation"].contains("seed"));
  EXPECT_EQ(parse_run_config(resolved).selection.alpha, cfg.selection.alpha);
}

TEST(RunConfig, AlphaPresets) {
  EXPECT_EQ(parse_run_config(json{{"schema_version", 1}, {"selection", {{"alpha", "real_data"}}}}).selection.alpha,
            1e-6);
  EXPECT_EQ(parse_run_config(json{{"schema_version", 1}, {"selection", {{"alpha", "simulation"}}}}).selection.alpha,
            1e-4);
  EXPECT_THROW(parse_run_config(json{{"schema_version", 1}, {"selection", {{"alpha", "loose"}}}}), ConfigError);
}

TEST(RunConfig, Rejections) {
  EXPECT_THROW(parse_run_config(json::object()), ConfigError);
  EXPECT_THROW(parse_run_config(json{{"schema_version", 2}}), ConfigError);
  EXPECT_THROW(parse_run_config(json{{"schema_version", 1}, {"extra", 1}}), ConfigError);
  EXPECT_THROW(parse_run_config(json{{"schema_version", 1}, {"simulation", {{"n", "many"}}}}), ConfigError);
  EXPECT_THROW(parse_run_config(json{{"schema_version", 1}, {"simulation", {{"kind", "nonlinear"}}}}), ConfigError);
  EXPECT_THROW(parse_run_config(json{{"schema_version", 1}, {"simulation", {{"seed", -3}}}}), ConfigError);
}

TEST(RunConfig, SignedIntegerSeedAccepted) {
  const int seed = 42;
  EXPECT_EQ(parse_run_config(json{{"schema_version", 1}, {"simulation", {{"seed", seed}}}}).simulation.seed, 42u);
}

}  // namespace
}  // namespace mbsel::cli
