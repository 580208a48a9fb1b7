#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mbsel/data_table.hpp"
#include "mbsel/random.hpp"

namespace mbsel {

enum class SimKind { LinearInteractions, Complex };
enum class Response { Continuous, Binary };

std::string_view to_string(SimKind kind);
std::string_view to_string(Response response);
SimKind parse_sim_kind(std::string_view text);
Response parse_response(std::string_view text);

struct SimSpec {
  SimKind kind = SimKind::LinearInteractions;
  double rho = 0.5;
  std::size_t n = 5000;
  Response response = Response::Continuous;
  std::uint64_t seed = 0;
};

enum class Role { Parent, Child, Spouse, Noise };
std::string_view to_string(Role role);

struct SimData {
  /// Covariates x0, x1, ... followed by the response "y".
  DataTable table;
  /// In column order.
  std::vector<std::string> true_mb;
  std::map<std::string, Role> dag_roles;
  /// Direct causes of y and of each child of y.
  std::map<std::string, std::vector<std::string>> parents;
};

/// Index sets of the alternating 2,3,2,3,... blocks covering 0..p-1; the
/// final block may be truncated.
std::vector<std::vector<std::size_t>> block_structure(std::size_t p);

/// Unit diagonal, rho within each block of block_structure(p), 0 elsewhere.
Eigen::MatrixXd block_covariance(std::size_t p, double rho);

/// n draws from N(0, cov), one row per draw.
Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& cov, std::size_t n, Rng& rng);

/// Parents, children and the children's other parents of `target`.
std::vector<std::string> markov_boundary(const std::map<std::string, std::vector<std::string>>& parents,
                                         const std::string& target);

struct BinaryPair {
  std::vector<int> u;
  std::vector<int> v;
};

/// U ~ Bernoulli(p_u); P(V = 1 | U = 1) = p_high, P(V = 1 | U = 0) = p_low.
BinaryPair dependent_binary_pair(Rng& rng, std::size_t n, double p_u = 0.5, double p_high = 0.8,
                                 double p_low = 0.2);

struct CategoricalMixture {
  std::vector<int> codes;
  std::vector<double> values;
};

/// Level uniform over means.size() levels; value ~ N(means[level], 1).
CategoricalMixture categorical_mixture(Rng& rng, std::size_t n,
                                       const std::vector<double>& means = {-2.0, 0.0, 2.0});

SimData gen_linear(const SimSpec& spec);
SimData gen_complex(const SimSpec& spec);
SimData generate(const SimSpec& spec);

/// Continuous-only variant of the complex dataset used for RCIT calibration:
/// x0..x49 block Gaussian with x37, x38, x39 correlated at triple_rho, and a
/// continuous response in which x37 is the only member of that block with a
/// direct effect.
DataTable gen_calibration_data(std::size_t n, double rho, std::uint64_t seed, double triple_rho = 0.9);

}  // namespace mbsel
