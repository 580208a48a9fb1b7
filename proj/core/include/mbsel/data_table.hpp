#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace mbsel {

/// Raised for malformed input data: parse failures, missing cells, shape
/// mismatches, degenerate columns.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ColumnKind { Continuous, Categorical };

std::string_view to_string(ColumnKind kind);

/// A named, typed column. Continuous cells live in `values`; categorical cells
/// are stored as indices (`codes`) into the ordered `levels`.
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  std::vector<double> values;
  std::vector<std::string> levels;
  std::vector<int> codes;

  static Column continuous(std::string name, std::vector<double> values);
  static Column categorical(std::string name, std::vector<std::string> levels,
                            std::vector<int> codes);
  /// Builds a categorical column from raw labels. Levels are sorted
  /// numerically when every label parses as a number, lexicographically
  /// otherwise.
  static Column categorical_from_labels(std::string name,
                                        const std::vector<std::string>& labels);

  std::size_t size() const {
    return kind == ColumnKind::Continuous ? values.size() : codes.size();
  }
  bool is_categorical() const { return kind == ColumnKind::Categorical; }
  std::size_t num_levels() const { return levels.size(); }
  /// Cell rendered as CSV text.
  std::string cell_text(std::size_t row) const;
};

/// Immutable columnar dataset. Every column has exactly n_rows cells and
/// names are unique.
class DataTable {
 public:
  DataTable() = default;
  explicit DataTable(std::vector<Column> columns);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  bool has_column(std::string_view name) const;
  const Column& column(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::size_t n_rows_ = 0;
  std::vector<Column> columns_;
  std::unordered_map<std::string, std::size_t> index_;
};

using SchemaHints = std::map<std::string, ColumnKind>;

/// Columns with more distinct numeric values than this are typed continuous.
inline constexpr std::size_t kCategoricalMaxDistinct = 10;

DataTable load_table(const std::filesystem::path& path,
                     const SchemaHints& hints = {});
DataTable parse_table(std::istream& in, const SchemaHints& hints = {});
void write_table(const DataTable& table, std::ostream& out);

struct StandardizedColumn {
  std::vector<double> values;
  double original_mean = 0.0;
  double original_sd = 1.0;

  std::vector<double> unstandardize() const;
};

/// Zero mean, unit sd (n-1 denominator). Throws DataError on a constant column.
StandardizedColumn standardize(std::span<const double> values);

struct BinnedColumn {
  Column column;
  int n_bins = 0;
  /// Inclusive upper edge of every bin except the last.
  std::vector<double> upper_edges;
};

/// Equal-frequency binning at empirical quantiles. Bin b holds values in
/// (q_{b-1}, q_b]. When there are fewer distinct values than requested bins
/// the bin count shrinks to the distinct count.
BinnedColumn quantile_bin(std::span<const double> values, int n_bins,
                          std::string name = {});

/// L-1 indicator columns, first level dropped as the reference.
std::vector<Column> one_hot(const Column& column);

/// Values of a two-level categorical column mapped onto {0,1}: numerically
/// when the labels are "0"/"1", by level order otherwise. Empty when the
/// column is not binary.
std::optional<std::vector<double>> binary_values(const Column& column);

/// n x k matrix of the named columns. Categorical columns are expanded by
/// one_hot; continuous ones are copied verbatim. Returns the expanded names
/// through `expanded_names` when given.
Eigen::MatrixXd design_matrix(const DataTable& table,
                              std::span<const std::string> names,
                              std::vector<std::string>* expanded_names = nullptr);

/// Single-column matrix.
Eigen::MatrixXd as_matrix(std::span<const double> values);

}  // namespace mbsel
