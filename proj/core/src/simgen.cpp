#include "mbsel/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace mbsel {

namespace {

constexpr std::size_t kBaseCovariates = 50;
// Child noise N(0, 0.5) and N(0, 0.1), read as variances.
const double kChild50Sd = std::sqrt(0.5);
const double kChild51Sd = std::sqrt(0.1);

std::string xname(std::size_t j) { return "x" + std::to_string(j); }

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// One replicated set of linear terms and interactions starting at column o.
double linear_block(const Eigen::MatrixXd& x, Eigen::Index i, Eigen::Index o) {
  return 0.6 * x(i, o) + 0.6 * x(i, o + 1) - 0.51 * x(i, o + 2) + 0.57 * x(i, o + 3) -
         0.57 * x(i, o + 4) - 0.57 * x(i, o + 5) + 0.57 * x(i, o + 7) +
         0.57 * x(i, o) * x(i, o + 1) + 0.6 * x(i, o + 2) * x(i, o + 3);
}

double indicator(bool b) { return b ? 1.0 : 0.0; }

// Terms of the complex response shared with the calibration generator.
double complex_continuous_terms(const Eigen::MatrixXd& x, Eigen::Index i) {
  const double x7 = x(i, 7), x8 = x(i, 8);
  return 0.65 * std::log(std::abs(x(i, 0) + 0.5 * x(i, 1) + 0.75 * x(i, 2))) -
         0.45 * x(i, 0) * x(i, 0) * x(i, 5) + std::abs(x(i, 1) * x(i, 2) * x(i, 6)) +
         2.0 * x7 * indicator(std::abs(x7) > 2.0) + 1.25 * x7 * x8 * indicator(x8 < -1.0) +
         0.75 * x(i, 13) + 0.75 * x(i, 35) + 0.75 * x(i, 41) + 0.75 * std::abs(x(i, 43));
}

std::vector<std::string> level_labels(int k) {
  std::vector<std::string> out;
  for (int l = 0; l < k; ++l) out.push_back(std::to_string(l));
  return out;
}

Column binary_column(std::string name, const std::vector<int>& codes) {
  return Column::categorical(std::move(name), level_labels(2), codes);
}

SimData finish(std::vector<Column> columns, std::map<std::string, std::vector<std::string>> parents,
               const std::vector<std::string>& children) {
  SimData out;
  out.parents = std::move(parents);
  const auto mb = markov_boundary(out.parents, "y");
  const std::set<std::string> mb_set(mb.begin(), mb.end());
  const auto& py = out.parents.at("y");
  const std::set<std::string> direct(py.begin(), py.end());
  const std::set<std::string> kids(children.begin(), children.end());
  for (const auto& c : columns) {
    if (c.name == "y") continue;
    Role role = Role::Noise;
    if (direct.count(c.name)) role = Role::Parent;
    else if (kids.count(c.name)) role = Role::Child;
    else if (mb_set.count(c.name)) role = Role::Spouse;
    out.dag_roles[c.name] = role;
    if (role != Role::Noise) out.true_mb.push_back(c.name);
  }
  // Every spouse must share a child with y.
  for (const auto& [name, role] : out.dag_roles) {
    if (role != Role::Spouse) continue;
    const bool shares = std::any_of(children.begin(), children.end(), [&](const std::string& ch) {
      const auto& p = out.parents.at(ch);
      return std::find(p.begin(), p.end(), name) != p.end();
    });
    if (!shares) throw std::logic_error("simgen: spouse " + name + " shares no child with y");
  }
  out.table = DataTable(std::move(columns));
  return out;
}

void check_spec(const SimSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("simgen: n must be >= 1");
  if (!(spec.rho >= 0.0 && spec.rho < 1.0)) throw std::invalid_argument("simgen: rho must be in [0,1)");
}

}  // namespace

std::string_view to_string(SimKind kind) {
  return kind == SimKind::LinearInteractions ? "linear" : "complex";
}

std::string_view to_string(Response response) {
  return response == Response::Continuous ? "continuous" : "binary";
}

SimKind parse_sim_kind(std::string_view text) {
  if (text == "linear") return SimKind::LinearInteractions;
  if (text == "complex") return SimKind::Complex;
  throw std::invalid_argument("unknown simulation kind '" + std::string(text) + "' (linear|complex)");
}

Response parse_response(std::string_view text) {
  if (text == "continuous") return Response::Continuous;
  if (text == "binary") return Response::Binary;
  throw std::invalid_argument("unknown response '" + std::string(text) + "' (continuous|binary)");
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Parent: return "parent";
    case Role::Child: return "child";
    case Role::Spouse: return "spouse";
    case Role::Noise: return "noise";
  }
  return "?";
}

std::vector<std::vector<std::size_t>> block_structure(std::size_t p) {
  std::vector<std::vector<std::size_t>> blocks;
  std::size_t start = 0;
  bool two = true;
  while (start < p) {
    const std::size_t end = std::min(p, start + (two ? 2 : 3));
    std::vector<std::size_t> b;
    for (std::size_t j = start; j < end; ++j) b.push_back(j);
    blocks.push_back(std::move(b));
    start = end;
    two = !two;
  }
  return blocks;
}

Eigen::MatrixXd block_covariance(std::size_t p, double rho) {
  if (p < 1) throw std::invalid_argument("block_covariance: p must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("block_covariance: rho must be in [0,1)");
  const auto pi = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(pi, pi);
  for (const auto& b : block_structure(p))
    for (auto i : b)
      for (auto j : b)
        if (i != j) cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rho;
  return cov;
}

Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& cov, std::size_t n, Rng& rng) {
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("sample_gaussian: covariance not positive definite");
  const Eigen::MatrixXd lower = llt.matrixL();
  Eigen::MatrixXd z(static_cast<Eigen::Index>(n), cov.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = standard_normal(rng);
  return z * lower.transpose();
}

std::vector<std::string> markov_boundary(const std::map<std::string, std::vector<std::string>>& parents,
                                         const std::string& target) {
  std::set<std::string> mb;
  if (auto it = parents.find(target); it != parents.end()) mb.insert(it->second.begin(), it->second.end());
  for (const auto& [child, ps] : parents) {
    if (std::find(ps.begin(), ps.end(), target) == ps.end()) continue;
    mb.insert(child);
    mb.insert(ps.begin(), ps.end());
  }
  mb.erase(target);
  return {mb.begin(), mb.end()};
}

BinaryPair dependent_binary_pair(Rng& rng, std::size_t n, double p_u, double p_high, double p_low) {
  BinaryPair out;
  out.u.resize(n);
  out.v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.u[i] = bernoulli(rng, p_u) ? 1 : 0;
    out.v[i] = bernoulli(rng, out.u[i] ? p_high : p_low) ? 1 : 0;
  }
  return out;
}

CategoricalMixture categorical_mixture(Rng& rng, std::size_t n, const std::vector<double>& means) {
  if (means.empty()) throw std::invalid_argument("categorical_mixture: no levels");
  CategoricalMixture out;
  out.codes.resize(n);
  out.values.resize(n);
  const auto k = static_cast<double>(means.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int level = std::min(static_cast<int>(uniform01(rng) * k), static_cast<int>(means.size()) - 1);
    out.codes[i] = level;
    out.values[i] = means[static_cast<std::size_t>(level)] + standard_normal(rng);
  }
  return out;
}

SimData gen_linear(const SimSpec& spec) {
  if (spec.kind != SimKind::LinearInteractions) throw std::invalid_argument("gen_linear: wrong kind");
  check_spec(spec);
  Rng rng(mix_seed(spec.seed, 0));
  const Eigen::MatrixXd x = sample_gaussian(block_covariance(kBaseCovariates, spec.rho), spec.n, rng);
  const bool binary = spec.response == Response::Binary;

  std::vector<double> y(spec.n), x50(spec.n);
  std::vector<int> y_codes(spec.n);
  for (std::size_t r = 0; r < spec.n; ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    const double f = linear_block(x, i, 0) + 0.7 * linear_block(x, i, 10) + 0.4 * linear_block(x, i, 20) +
                     standard_normal(rng);
    if (binary) {
      y_codes[r] = bernoulli(rng, sigmoid(-7.75 + f)) ? 1 : 0;
      y[r] = y_codes[r];
    } else {
      y[r] = f;
    }
    x50[r] = 0.2 * y[r] + standard_normal(rng);
  }

  std::vector<Column> columns;
  for (std::size_t j = 0; j < kBaseCovariates; ++j) {
    const auto col = x.col(static_cast<Eigen::Index>(j));
    columns.push_back(Column::continuous(xname(j), std::vector<double>(col.data(), col.data() + col.size())));
  }
  columns.push_back(Column::continuous("x50", x50));
  columns.push_back(binary ? binary_column("y", y_codes) : Column::continuous("y", y));

  std::vector<std::string> py;
  for (std::size_t o : {0, 10, 20})
    for (std::size_t k : {0, 1, 2, 3, 4, 5, 7}) py.push_back(xname(o + k));
  return finish(std::move(columns), {{"y", py}, {"x50", {"y"}}}, {"x50"});
}

SimData gen_complex(const SimSpec& spec) {
  if (spec.kind != SimKind::Complex) throw std::invalid_argument("gen_complex: wrong kind");
  check_spec(spec);
  Rng rng(mix_seed(spec.seed, 1));
  const std::size_t n = spec.n;
  Eigen::MatrixXd x = sample_gaussian(block_covariance(kBaseCovariates, spec.rho), n, rng);
  auto col = [&](std::size_t j) {
    const auto c = x.col(static_cast<Eigen::Index>(j));
    return std::vector<double>(c.data(), c.data() + c.size());
  };

  const auto x11 = quantile_bin(col(10), 4).column.codes;
  std::vector<int> x12(n), x15(n), x36(n);
  for (std::size_t i = 0; i < n; ++i) x12[i] = bernoulli(rng, 0.7) ? 1 : 0;
  for (std::size_t i = 0; i < n; ++i)
    if (x12[i] == 0) x(static_cast<Eigen::Index>(i), 13) = 0.0;
  for (std::size_t i = 0; i < n; ++i) x15[i] = std::min(static_cast<int>(uniform01(rng) * 3.0), 2);
  const auto pair30 = dependent_binary_pair(rng, n);
  const auto pair32 = dependent_binary_pair(rng, n);
  for (std::size_t i = 0; i < n; ++i)
    x36[i] = bernoulli(rng, sigmoid(1.0 * x(static_cast<Eigen::Index>(i), 35))) ? 1 : 0;
  const auto mix37 = categorical_mixture(rng, n);
  const auto mix40 = categorical_mixture(rng, n);
  for (std::size_t i = 0; i < n; ++i) {
    x(static_cast<Eigen::Index>(i), 38) = mix37.values[i];
    x(static_cast<Eigen::Index>(i), 41) = mix40.values[i];
  }

  const bool binary = spec.response == Response::Binary;
  std::vector<double> y(n), x50(n), x51(n);
  std::vector<int> y_codes(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    const double f = complex_continuous_terms(x, i) + 0.5 * std::log(1.0 + x11[r]) +
                     0.5 * indicator(x15[r] != 1) - 0.2 * indicator(x15[r] == 2) +
                     std::log(1.0 + pair30.v[r]) + 0.75 * pair32.u[r] + 0.5 * indicator(mix37.codes[r] != 1) -
                     0.2 * indicator(mix37.codes[r] == 1);
    if (binary) {
      y_codes[r] = bernoulli(rng, sigmoid(-5.0 + f)) ? 1 : 0;
      y[r] = y_codes[r];
      x50[r] = 0.2 * y[r] + kChild50Sd * standard_normal(rng);
    } else {
      y[r] = f + standard_normal(rng);
      x50[r] = 0.2 * std::abs(y[r]) + kChild50Sd * standard_normal(rng);
    }
    x51[r] = 0.4 * y[r] + std::abs(x(i, 20)) - 2.0 * std::log(1.0 + std::abs(x(i, 22))) + std::exp(0.5 * x(i, 23)) +
             3.51 / (1.0 + std::abs(x(i, 25))) + kChild51Sd * standard_normal(rng);
  }

  std::vector<Column> columns;
  for (std::size_t j = 0; j < kBaseCovariates; ++j) {
    switch (j) {
      case 11: columns.push_back(Column::categorical("x11", level_labels(4), x11)); break;
      case 12: columns.push_back(binary_column("x12", x12)); break;
      case 15: columns.push_back(Column::categorical("x15", level_labels(3), x15)); break;
      case 30: columns.push_back(binary_column("x30", pair30.u)); break;
      case 31: columns.push_back(binary_column("x31", pair30.v)); break;
      case 32: columns.push_back(binary_column("x32", pair32.u)); break;
      case 33: columns.push_back(binary_column("x33", pair32.v)); break;
      case 36: columns.push_back(binary_column("x36", x36)); break;
      case 37: columns.push_back(Column::categorical("x37", level_labels(3), mix37.codes)); break;
      case 40: columns.push_back(Column::categorical("x40", level_labels(3), mix40.codes)); break;
      default: columns.push_back(Column::continuous(xname(j), col(j)));
    }
  }
  columns.push_back(Column::continuous("x50", x50));
  columns.push_back(Column::continuous("x51", x51));
  columns.push_back(binary ? binary_column("y", y_codes) : Column::continuous("y", y));

  std::vector<std::string> py;
  for (std::size_t j : {0, 1, 2, 5, 6, 7, 8, 11, 13, 15, 31, 32, 35, 37, 41, 43}) py.push_back(xname(j));
  return finish(std::move(columns),
                {{"y", py}, {"x50", {"y"}}, {"x51", {"y", "x20", "x22", "x23", "x25"}}},
                {"x50", "x51"});
}

SimData generate(const SimSpec& spec) {
  return spec.kind == SimKind::LinearInteractions ? gen_linear(spec) : gen_complex(spec);
}

DataTable gen_calibration_data(std::size_t n, double rho, std::uint64_t seed, double triple_rho) {
  Eigen::MatrixXd cov = block_covariance(kBaseCovariates, rho);
  for (Eigen::Index i : {37, 38, 39})
    for (Eigen::Index j : {37, 38, 39})
      if (i != j) cov(i, j) = triple_rho;
  Rng rng(mix_seed(seed, 2));
  const Eigen::MatrixXd x = sample_gaussian(cov, n, rng);
  std::vector<double> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    const double x37 = x(i, 37);
    y[r] = complex_continuous_terms(x, i) + x37 + 0.5 * x37 * x37 + standard_normal(rng);
  }
  std::vector<Column> columns;
  for (std::size_t j = 0; j < kBaseCovariates; ++j) {
    const auto c = x.col(static_cast<Eigen::Index>(j));
    columns.push_back(Column::continuous(xname(j), std::vector<double>(c.data(), c.data() + c.size())));
  }
  columns.push_back(Column::continuous("y", y));
  return DataTable(std::move(columns));
}

}  // namespace mbsel
