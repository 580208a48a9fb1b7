#include "mbsel_cli/run_config.hpp"

#include <fstream>
#include <set>

namespace mbsel::cli {

namespace {

using nlohmann::json;

// Reads the keys of one JSON object and rejects any it did not consume.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail("must be an object");
  }

  const json* find(const char* key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const char* key, double& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number()) fail_key(key, "must be a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void count(const char* key, Int& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0) fail_key(key, "must be a non-negative integer");
      out = static_cast<Int>(v->get<unsigned long long>());
    }
  }

  void seed(const char* key, std::uint64_t& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        fail_key(key, "must be a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void flag(const char* key, bool& out) {
    if (const auto* v = find(key)) {
      if (!v->is_boolean()) fail_key(key, "must be true or false");
      out = v->get<bool>();
    }
  }

  void text(const char* key, std::string& out) {
    if (const auto* v = find(key)) {
      if (!v->is_string()) fail_key(key, "must be a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) throw ConfigError("unknown key '" + qualified(key) + "'");
  }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config " + (path_.empty() ? std::string("document") : "'" + path_ + "'") + " " + msg);
  }
  [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const {
    throw ConfigError("config key '" + qualified(key) + "' " + msg);
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

NullMethod parse_null_method(const std::string& text) {
  if (text == "gamma2") return NullMethod::GammaTwoMoment;
  if (text == "gamma3") return NullMethod::GammaThreeMoment;
  if (text == "montecarlo") return NullMethod::MonteCarlo;
  throw ConfigError("unknown null_method '" + text + "' (gamma2|gamma3|montecarlo)");
}

void read_rcit(const json& obj, const std::string& path, RcitParams& p) {
  Section s(obj, path);
  s.count("m", p.m);
  s.count("q", p.q);
  s.count("d_per_cond_var", p.d_per_cond_var);
  s.count("d_min", p.d_min);
  s.number("ridge", p.ridge);
  s.seed("seed", p.seed);
  s.count("bandwidth_subsample", p.bandwidth_subsample);
  std::string method(to_string(p.null.method));
  s.text("null_method", method);
  p.null.method = parse_null_method(method);
  s.count("mc_samples", p.null.mc_samples);
  s.seed("mc_seed", p.null.mc_seed);
  s.finish();
  if (p.m < 1 || p.q < 1) throw ConfigError("config '" + path + "': m and q must be >= 1");
  if (!(p.ridge > 0.0)) throw ConfigError("config '" + path + ".ridge' must be positive");
}

void read_ensemble(const json& obj, const std::string& path, EnsembleParams& p) {
  Section s(obj, path);
  s.count("max_depth", p.max_depth);
  s.count("n_trees", p.n_trees);
  s.number("learning_rate", p.learning_rate);
  s.count("min_samples_leaf", p.min_samples_leaf);
  s.number("l2_regularization", p.l2_regularization);
  s.number("min_child_weight", p.min_child_weight);
  s.seed("seed", p.seed);
  s.finish();
  if (!(p.learning_rate > 0.0 && p.learning_rate <= 1.0))
    throw ConfigError("config '" + path + ".learning_rate' must lie in (0, 1]");
  if (p.min_samples_leaf < 1) throw ConfigError("config '" + path + ".min_samples_leaf' must be >= 1");
}

void read_selection(const json& obj, RunConfig& rc) {
  Section s(obj, "selection");
  auto& c = rc.selection;
  s.text("target", rc.target);
  if (const auto* a = s.find("alpha")) {
    if (a->is_number()) {
      c.alpha = a->get<double>();
    } else if (a->is_string() && *a == "simulation") {
      c.alpha = kAlphaSimulation;
    } else if (a->is_string() && *a == "real_data") {
      c.alpha = kAlphaRealData;
    } else {
      s.fail_key("alpha", "must be a number or one of \"simulation\", \"real_data\"");
    }
  }
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) s.fail_key("alpha", "must lie in (0, 1)");
  s.number("group_threshold", c.group_threshold);
  s.count("max_group_size", c.max_group_size);
  s.count("fbed_k", c.fbed_k);
  s.count("max_outer_iterations", c.max_outer_iterations);
  s.flag("pack_singletons", c.pack_singletons);
  s.count("residual_folds", c.residual_folds);
  if (const auto* v = s.find("candidates")) {
    if (!v->is_array()) s.fail_key("candidates", "must be an array of column names");
    c.candidates.clear();
    for (const auto& e : *v) {
      if (!e.is_string()) s.fail_key("candidates", "must be an array of column names");
      c.candidates.push_back(e.get<std::string>());
    }
  }
  if (const auto* v = s.find("groups")) {
    if (!v->is_object()) s.fail_key("groups", "must map column names to integer group ids");
    std::map<std::string, int> groups;
    for (const auto& [name, id] : v->items()) {
      if (!id.is_number_integer()) s.fail_key("groups", "must map column names to integer group ids");
      groups[name] = id.get<int>();
    }
    c.group_assignment = std::move(groups);
  }
  if (const auto* v = s.find("rcit")) read_rcit(*v, "selection.rcit", c.rcit_params);
  if (const auto* v = s.find("ensemble_regression"))
    read_ensemble(*v, "selection.ensemble_regression", c.ensemble_params_regression);
  if (const auto* v = s.find("ensemble_classification"))
    read_ensemble(*v, "selection.ensemble_classification", c.ensemble_params_classification);
  s.finish();
  if (c.max_group_size < 1) s.fail_key("max_group_size", "must be >= 1");
  if (c.max_outer_iterations < 1) s.fail_key("max_outer_iterations", "must be >= 1");
  if (!(c.group_threshold >= 0.0 && c.group_threshold <= 1.0)) s.fail_key("group_threshold", "must lie in [0, 1]");
}

void read_simulation(const json& obj, SimSpec& spec) {
  Section s(obj, "simulation");
  std::string kind(to_string(spec.kind)), response(to_string(spec.response));
  s.text("kind", kind);
  s.text("response", response);
  try {
    spec.kind = parse_sim_kind(kind);
    spec.response = parse_response(response);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config 'simulation': ") + e.what());
  }
  s.number("rho", spec.rho);
  s.count("n", spec.n);
  s.seed("seed", spec.seed);
  s.finish();
  if (!(spec.rho >= 0.0 && spec.rho < 1.0)) s.fail_key("rho", "must lie in [0, 1)");
  if (spec.n < 1) s.fail_key("n", "must be >= 1");
}

void read_hints(const json& obj, SchemaHints& hints) {
  Section s(obj, "schema_hints");
  for (const auto& [name, kind] : obj.items()) {
    s.find(name.c_str());
    if (kind == "categorical")
      hints[name] = ColumnKind::Categorical;
    else if (kind == "continuous")
      hints[name] = ColumnKind::Continuous;
    else
      s.fail_key(name, "must be \"categorical\" or \"continuous\"");
  }
}

void read_calibration(const json& obj, CalibrationSettings& c) {
  Section s(obj, "calibration");
  if (const auto* v = s.find("cond_sizes")) {
    if (!v->is_array() || v->empty()) s.fail_key("cond_sizes", "must be a non-empty array of counts");
    c.cond_sizes.clear();
    for (const auto& e : *v) {
      if (!e.is_number_unsigned()) s.fail_key("cond_sizes", "must be a non-empty array of counts");
      c.cond_sizes.push_back(e.get<std::size_t>());
    }
  }
  if (const auto* v = s.find("d_values")) {
    if (!v->is_array() || v->empty()) s.fail_key("d_values", "must be a non-empty array of positive integers");
    c.d_values.clear();
    for (const auto& e : *v) {
      if (!e.is_number_integer() || e.get<int>() < 1)
        s.fail_key("d_values", "must be a non-empty array of positive integers");
      c.d_values.push_back(e.get<int>());
    }
  }
  s.count("n", c.n);
  s.count("n_reps", c.n_reps);
  s.seed("seed", c.seed);
  s.number("alpha", c.options.alpha);
  s.number("rho", c.options.rho);
  s.number("triple_rho", c.options.triple_rho);
  if (const auto* v = s.find("rcit")) read_rcit(*v, "calibration.rcit", c.options.rcit);
  s.finish();
  if (c.n_reps < 1) s.fail_key("n_reps", "must be >= 1");
}

void read_bench(const json& obj, BenchSettings& b) {
  Section s(obj, "bench");
  s.count("n_reps", b.n_reps);
  s.seed("base_seed", b.base_seed);
  s.finish();
  if (b.n_reps < 1) s.fail_key("n_reps", "must be >= 1");
}

json rcit_json(const RcitParams& p) {
  return {{"m", p.m},
          {"q", p.q},
          {"d_per_cond_var", p.d_per_cond_var},
          {"d_min", p.d_min},
          {"ridge", p.ridge},
          {"seed", p.seed},
          {"bandwidth_subsample", p.bandwidth_subsample},
          {"null_method", std::string(to_string(p.null.method))},
          {"mc_samples", p.null.mc_samples},
          {"mc_seed", p.null.mc_seed}};
}

json ensemble_json(const EnsembleParams& p) {
  return {{"max_depth", p.max_depth},
          {"n_trees", p.n_trees},
          {"learning_rate", p.learning_rate},
          {"min_samples_leaf", p.min_samples_leaf},
          {"l2_regularization", p.l2_regularization},
          {"min_child_weight", p.min_child_weight},
          {"seed", p.seed}};
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  Section top(doc, "");
  const auto* version = top.find("schema_version");
  if (!version) throw ConfigError("config is missing \"schema_version\"");
  if (!version->is_number_integer() || version->get<int>() != kSchemaVersion)
    throw ConfigError("unsupported schema_version " + version->dump() + " (expected " +
                      std::to_string(kSchemaVersion) + ")");

  RunConfig rc;
  if (const auto* v = top.find("simulation")) read_simulation(*v, rc.simulation);
  if (const auto* v = top.find("selection")) read_selection(*v, rc);
  if (const auto* v = top.find("schema_hints")) read_hints(*v, rc.schema_hints);
  if (const auto* v = top.find("calibration")) read_calibration(*v, rc.calibration);
  if (const auto* v = top.find("bench")) read_bench(*v, rc.bench);
  top.finish();
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(doc);
}

json resolved_config(const RunConfig& rc) {
  const auto& c = rc.selection;
  json selection = {{"target", rc.target},
                    {"alpha", c.alpha},
                    {"group_threshold", c.group_threshold},
                    {"max_group_size", c.max_group_size},
                    {"fbed_k", c.fbed_k},
                    {"max_outer_iterations", c.max_outer_iterations},
                    {"pack_singletons", c.pack_singletons},
                    {"residual_folds", c.residual_folds},
                    {"candidates", c.candidates},
                    {"rcit", rcit_json(c.rcit_params)},
                    {"ensemble_regression", ensemble_json(c.ensemble_params_regression)},
                    {"ensemble_classification", ensemble_json(c.ensemble_params_classification)}};
  if (c.group_assignment) {
    json groups = json::object();
    for (const auto& [name, id] : *c.group_assignment) groups[name] = id;
    selection["groups"] = groups;
  }
  json hints = json::object();
  for (const auto& [name, kind] : rc.schema_hints) hints[name] = std::string(to_string(kind));

  const auto& cal = rc.calibration;
  return {{"schema_version", kSchemaVersion},
          {"simulation",
           {{"kind", std::string(to_string(rc.simulation.kind))},
            {"response", std::string(to_string(rc.simulation.response))},
            {"rho", rc.simulation.rho},
            {"n", rc.simulation.n},
            {"seed", rc.simulation.seed}}},
          {"selection", selection},
          {"schema_hints", hints},
          {"calibration",
           {{"cond_sizes", cal.cond_sizes},
            {"d_values", cal.d_values},
            {"n", cal.n},
            {"n_reps", cal.n_reps},
            {"seed", cal.seed},
            {"alpha", cal.options.alpha},
            {"rho", cal.options.rho},
            {"triple_rho", cal.options.triple_rho},
            {"rcit", rcit_json(cal.options.rcit)}}},
          {"bench", {{"n_reps", rc.bench.n_reps}, {"base_seed", rc.bench.base_seed}}}};
}

}  // namespace mbsel::cli
