#include "mbsel_cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>

namespace mbsel::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path prepare_out(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

json roles_json(const SimData& data) {
  json roles = json::object();
  for (const auto& [name, role] : data.dag_roles) roles[name] = std::string(to_string(role));
  return roles;
}

json trace_summary(const SelectionState& state) {
  json out = json::array();
  for (const auto& [id, trace] : state.traces) {
    int added = 0, dropped = 0, removed = 0;
    for (const auto& e : trace) {
      if (e.action == Action::Added) ++added;
      else if (e.action == Action::Dropped) ++dropped;
      else ++removed;
    }
    out.push_back({{"group", id},
                   {"events", trace.size()},
                   {"added", added},
                   {"dropped", dropped},
                   {"removed", removed}});
  }
  return out;
}

json groups_json(const SelectionState& state) {
  json out = json::array();
  for (const auto& [id, selected] : state.per_group_selected) {
    out.push_back({{"id", id},
                   {"kind", id == state.categorical_group_id() ? "categorical" : "continuous"},
                   {"members", state.group_members(id)},
                   {"selected", selected}});
  }
  return out;
}

}  // namespace

void cmd_simulate(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  const auto& spec = config.simulation;
  log << "[mbsel] simulate: " << to_string(spec.kind) << "/" << to_string(spec.response) << " rho=" << spec.rho
      << " n=" << spec.n << " seed=" << spec.seed << '\n';
  const auto data = generate(spec);
  prepare_out(out_dir);
  {
    auto out = open_out(out_dir / "data.csv");
    write_table(data.table, out);
    if (!out) throw std::runtime_error("write failed for data.csv");
  }
  write_json(out_dir / "truth.json", {{"schema_version", kSchemaVersion},
                                      {"true_mb", data.true_mb},
                                      {"roles", roles_json(data)},
                                      {"resolved_config", resolved_config(config)}});
  log << "[mbsel] wrote " << (out_dir / "data.csv").string() << " and truth.json (" << data.true_mb.size()
      << " true MB variables)\n";
}

json cmd_select(const RunConfig& config, const fs::path& data, const fs::path& out_dir, std::ostream& log) {
  log << "[mbsel] select: loading " << data.string() << '\n';
  const auto table = load_table(data, config.schema_hints);
  if (!table.has_column(config.target))
    throw UsageError("target column '" + config.target + "' not found in " + data.filename().string());
  for (const auto& c : config.selection.candidates)
    if (!table.has_column(c)) throw UsageError("candidate column '" + c + "' not found in " + data.filename().string());

  const auto start = std::chrono::steady_clock::now();
  const auto state = run_m3(table, config.target, config.selection);
  const double runtime = seconds_since(start);
  log << "[mbsel] selected " << state.mb_set.size() << " variables in " << state.outer_iteration
      << " outer iterations" << (state.converged ? "" : " (not converged)") << '\n';

  json report = {{"schema_version", kSchemaVersion},
                 {"command", "select"},
                 {"data", data.filename().string()},
                 {"n_rows", table.n_rows()},
                 {"target", config.target},
                 {"selected", state.mb_set},
                 {"iterations", state.outer_iteration},
                 {"converged", state.converged},
                 {"grouping_bypassed", state.grouping_bypassed},
                 {"grouping_threshold_used", state.partition.threshold_used},
                 {"groups", groups_json(state)},
                 {"trace_summary", trace_summary(state)},
                 {"residual_fits", state.residual_fits},
                 {"resolved_config", resolved_config(config)},
                 {"runtime_s", runtime}};
  prepare_out(out_dir);
  write_json(out_dir / "report.json", report);
  return report;
}

void cmd_calibrate(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  const auto& c = config.calibration;
  log << "[mbsel] calibrate: " << c.cond_sizes.size() << " x " << c.d_values.size() << " grid, n=" << c.n
      << ", " << c.n_reps << " replicates\n";
  const auto rows = rcit_calibration(c.cond_sizes, c.d_values, c.n, c.n_reps, c.seed, c.options);
  prepare_out(out_dir);
  {
    auto out = open_out(out_dir / "calibration.csv");
    out << "cond_size,d,fpr,mean_runtime_s\n" << std::setprecision(17);
    for (const auto& r : rows) out << r.cond_size << ',' << r.d << ',' << r.fpr << ',' << r.mean_runtime_s << '\n';
    if (!out) throw std::runtime_error("write failed for calibration.csv");
  }
  json cells = json::array();
  for (const auto& r : rows)
    cells.push_back({{"cond_size", r.cond_size},
                     {"d", r.d},
                     {"fpr", r.fpr},
                     {"mean_runtime_s", r.mean_runtime_s},
                     {"p_values", r.p_values}});
  write_json(out_dir / "calibration.json",
             {{"schema_version", kSchemaVersion}, {"rows", cells}, {"resolved_config", resolved_config(config)}});
  log << "[mbsel] wrote calibration.csv (" << rows.size() << " rows)\n";
}

json cmd_bench(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  const auto& spec = config.simulation;
  log << "[mbsel] bench: " << config.bench.n_reps << " replicates of " << to_string(spec.kind) << "/"
      << to_string(spec.response) << " rho=" << spec.rho << " n=" << spec.n << '\n';
  const auto study = replicate_study(spec, config.selection, config.bench.n_reps, config.bench.base_seed);

  json records = json::array();
  for (const auto& r : study.records)
    records.push_back({{"seed", r.seed},
                       {"selected", r.selected},
                       {"f1", r.f1},
                       {"outer_iterations", r.outer_iterations},
                       {"converged", r.converged},
                       {"runtime_s", r.runtime_s}});
  json report = {{"schema_version", kSchemaVersion},
                 {"command", "bench"},
                 {"records", records},
                 {"mean_f1", study.mean_f1},
                 {"sd_f1", study.sd_f1},
                 {"selection_frequency", study.selection_frequency},
                 {"true_mb", study.true_mb},
                 {"resolved_config", resolved_config(config)}};
  prepare_out(out_dir);
  write_json(out_dir / "bench_report.json", report);
  {
    auto out = open_out(out_dir / "bench_records.csv");
    out << "seed,f1,n_selected,outer_iterations,converged,runtime_s\n" << std::setprecision(17);
    for (const auto& r : study.records)
      out << r.seed << ',' << r.f1 << ',' << r.selected.size() << ',' << r.outer_iterations << ','
          << (r.converged ? 1 : 0) << ',' << r.runtime_s << '\n';
  }
  log << "[mbsel] mean F1 " << study.mean_f1 << " (sd " << study.sd_f1 << ")\n";
  return report;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markov-boundary feature selection"};
  app.require_subcommand(1);
  std::string config_path, data_path, out_dir = ".";

  auto add = [&](const char* name, const char* help, bool needs_data) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    auto* data = sub->add_option("--data", data_path, "input CSV");
    if (needs_data) data->required();
    sub->add_option("--out", out_dir, "output directory");
    return sub;
  };
  auto* simulate = add("simulate", "generate a synthetic dataset with its ground truth", false);
  auto* select = add("select", "select the Markov boundary of the target", true);
  auto* calibrate = add("calibrate", "RCIT false-positive calibration study", false);
  auto* bench = add("bench", "replicate selection study on simulated data", false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "mbsel: " << e.what() << '\n' << "run 'mbsel --help' for usage\n";
    return kExitUsage;
  }

  try {
    const auto config = load_run_config(config_path);
    if (simulate->parsed()) cmd_simulate(config, out_dir, err);
    else if (select->parsed()) cmd_select(config, data_path, out_dir, err);
    else if (calibrate->parsed()) cmd_calibrate(config, out_dir, err);
    else if (bench->parsed()) cmd_bench(config, out_dir, err);
  } catch (const ConfigError& e) {
    err << "mbsel: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "mbsel: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "mbsel: error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace mbsel::cli
