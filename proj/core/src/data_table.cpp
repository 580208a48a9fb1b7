#include "mbsel/data_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace mbsel {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    const auto field = line.substr(start, pos == std::string_view::npos ? pos : pos - start);
    out.emplace_back(trim(field));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool is_missing_token(std::string_view s) {
  return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "null" ||
         s == "NULL" || s == "?";
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ec == std::errc{} ? ptr : buf);
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
  return kind == ColumnKind::Continuous ? "continuous" : "categorical";
}

Column Column::continuous(std::string name, std::vector<double> values) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Continuous;
  c.values = std::move(values);
  return c;
}

Column Column::categorical(std::string name, std::vector<std::string> levels,
                           std::vector<int> codes) {
  std::set<std::string> distinct(levels.begin(), levels.end());
  if (distinct.size() != levels.size())
    throw DataError("column '" + name + "': categorical levels must be distinct");
  for (const auto& l : levels)
    if (l.empty()) throw DataError("column '" + name + "': empty level label");
  for (int code : codes)
    if (code < 0 || static_cast<std::size_t>(code) >= levels.size())
      throw DataError("column '" + name + "': code outside level range");
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Categorical;
  c.levels = std::move(levels);
  c.codes = std::move(codes);
  return c;
}

Column Column::categorical_from_labels(std::string name,
                                       const std::vector<std::string>& labels) {
  std::vector<std::string> levels(labels.begin(), labels.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  const bool numeric = std::all_of(levels.begin(), levels.end(), [](const std::string& l) {
    return parse_number(l).has_value();
  });
  if (numeric) {
    std::stable_sort(levels.begin(), levels.end(), [](const std::string& a, const std::string& b) {
      return *parse_number(a) < *parse_number(b);
    });
  }

  std::unordered_map<std::string, int> lookup;
  for (std::size_t i = 0; i < levels.size(); ++i) lookup.emplace(levels[i], static_cast<int>(i));
  std::vector<int> codes;
  codes.reserve(labels.size());
  for (const auto& l : labels) codes.push_back(lookup.at(l));
  return categorical(std::move(name), std::move(levels), std::move(codes));
}

std::string Column::cell_text(std::size_t row) const {
  if (kind == ColumnKind::Continuous) return format_double(values.at(row));
  return levels.at(static_cast<std::size_t>(codes.at(row)));
}

DataTable::DataTable(std::vector<Column> columns) : columns_(std::move(columns)) {
  n_rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto& c = columns_[i];
    if (c.size() != n_rows_)
      throw DataError("column '" + c.name + "' has " + std::to_string(c.size()) +
                      " rows, expected " + std::to_string(n_rows_));
    if (!index_.emplace(c.name, i).second)
      throw DataError("duplicate column name '" + c.name + "'");
  }
}

bool DataTable::has_column(std::string_view name) const {
  return index_.find(std::string(name)) != index_.end();
}

const Column& DataTable::column(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) throw DataError("unknown column '" + std::string(name) + "'");
  return columns_[it->second];
}

std::vector<std::string> DataTable::names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

DataTable parse_table(std::istream& in, const SchemaHints& hints) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty table: no header row");
  const auto header = split_line(line);
  for (const auto& h : header)
    if (h.empty()) throw DataError("empty column name in header");
  for (const auto& [name, kind] : hints) {
    (void)kind;
    if (std::find(header.begin(), header.end(), name) == header.end())
      throw DataError("schema hint names unknown column '" + name + "'");
  }

  std::vector<std::vector<std::string>> cells(header.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    auto fields = split_line(line);
    if (fields.size() != header.size())
      throw DataError("row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (is_missing_token(fields[j]))
        throw DataError("row " + std::to_string(row) + ", column '" + header[j] +
                        "': missing value");
      cells[j].push_back(std::move(fields[j]));
    }
  }
  if (row == 0) throw DataError("empty table: no data rows");

  std::vector<Column> columns;
  columns.reserve(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) {
    const auto& raw = cells[j];
    std::vector<double> numeric;
    numeric.reserve(raw.size());
    bool all_numeric = true;
    for (const auto& s : raw) {
      const auto v = parse_number(s);
      if (!v) {
        all_numeric = false;
        break;
      }
      if (!std::isfinite(*v))
        throw DataError("column '" + header[j] + "': non-finite value '" + s + "'");
      numeric.push_back(*v);
    }

    std::optional<ColumnKind> kind;
    if (const auto it = hints.find(header[j]); it != hints.end()) kind = it->second;
    if (!kind) {
      if (!all_numeric) {
        kind = ColumnKind::Categorical;
      } else {
        std::set<double> distinct(numeric.begin(), numeric.end());
        kind = distinct.size() > kCategoricalMaxDistinct ? ColumnKind::Continuous
                                                         : ColumnKind::Categorical;
      }
    }

    if (*kind == ColumnKind::Continuous) {
      if (!all_numeric)
        throw DataError("column '" + header[j] + "': unparsable numeric cell");
      columns.push_back(Column::continuous(header[j], std::move(numeric)));
    } else {
      columns.push_back(Column::categorical_from_labels(header[j], raw));
    }
  }
  return DataTable(std::move(columns));
}

DataTable load_table(const std::filesystem::path& path, const SchemaHints& hints) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return parse_table(in, hints);
}

void write_table(const DataTable& table, std::ostream& out) {
  const auto& cols = table.columns();
  for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << cols[j].name;
  out << '\n';
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << cols[j].cell_text(i);
    out << '\n';
  }
}

std::vector<double> StandardizedColumn::unstandardize() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = values[i] * original_sd + original_mean;
  return out;
}

StandardizedColumn standardize(std::span<const double> values) {
  const auto n = values.size();
  if (n < 2) throw DataError("standardize: need at least two values");
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const bool constant = std::all_of(values.begin(), values.end(),
                                    [&](double v) { return v == values.front(); });
  if (constant || !(sd > 0.0)) throw DataError("constant column");

  StandardizedColumn out;
  out.original_mean = mean;
  out.original_sd = sd;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = (values[i] - mean) / sd;
  return out;
}

BinnedColumn quantile_bin(std::span<const double> values, int n_bins, std::string name) {
  if (n_bins < 2) throw std::invalid_argument("quantile_bin: n_bins must be >= 2");
  const auto n = values.size();

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct;
  std::vector<std::size_t> cumulative;  // rows with value <= distinct[k]
  for (std::size_t i = 0; i < n; ++i) {
    if (distinct.empty() || sorted[i] != distinct.back()) {
      distinct.push_back(sorted[i]);
      cumulative.push_back(0);
    }
    cumulative.back() = i + 1;
  }

  const std::size_t k_distinct = distinct.size();
  const int bins = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n_bins),
                                                          std::max<std::size_t>(k_distinct, 1)));

  // Index into `distinct` of each bin's inclusive upper edge. Each edge sits at
  // the empirical quantile, pushed forward only as far as needed to keep every
  // bin non-empty.
  std::vector<double> edges;
  std::vector<std::size_t> edge_idx;
  for (int b = 1; b < bins; ++b) {
    const double target = static_cast<double>(b) * static_cast<double>(n) / bins;
    std::size_t j = 0;
    while (j < k_distinct && static_cast<double>(cumulative[j]) < target) ++j;
    if (!edge_idx.empty()) j = std::max(j, edge_idx.back() + 1);
    j = std::min(j, k_distinct - static_cast<std::size_t>(bins - b));
    edge_idx.push_back(j);
    edges.push_back(distinct[j]);
  }

  std::vector<int> codes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = std::lower_bound(edges.begin(), edges.end(), values[i]);
    codes[i] = static_cast<int>(it - edges.begin());
  }
  std::vector<std::string> levels;
  for (int b = 0; b < std::max(bins, 1); ++b) levels.push_back(std::to_string(b));
  if (n == 0) levels.assign(1, "0");

  BinnedColumn out;
  out.column = Column::categorical(std::move(name), std::move(levels), std::move(codes));
  out.n_bins = std::max(bins, 1);
  out.upper_edges = std::move(edges);
  return out;
}

std::vector<Column> one_hot(const Column& column) {
  if (!column.is_categorical())
    throw DataError("one_hot: column '" + column.name + "' is not categorical");
  std::vector<Column> out;
  for (std::size_t level = 1; level < column.levels.size(); ++level) {
    std::vector<double> indicator(column.codes.size());
    for (std::size_t i = 0; i < column.codes.size(); ++i)
      indicator[i] = column.codes[i] == static_cast<int>(level) ? 1.0 : 0.0;
    out.push_back(Column::continuous(column.name + "=" + column.levels[level], std::move(indicator)));
  }
  return out;
}

std::optional<std::vector<double>> binary_values(const Column& column) {
  if (!column.is_categorical() || column.levels.size() != 2) return std::nullopt;
  std::vector<double> map{0.0, 1.0};
  const auto a = parse_number(column.levels[0]);
  const auto b = parse_number(column.levels[1]);
  if (a && b && ((*a == 0.0 && *b == 1.0) || (*a == 1.0 && *b == 0.0))) map = {*a, *b};
  std::vector<double> out(column.codes.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = map[static_cast<std::size_t>(column.codes[i])];
  return out;
}

Eigen::MatrixXd design_matrix(const DataTable& table, std::span<const std::string> names,
                              std::vector<std::string>* expanded_names) {
  std::vector<Column> expanded;  // owns one-hot indicator storage
  std::vector<std::string> labels;
  std::vector<std::pair<bool, std::size_t>> refs;  // (is_expanded, index)
  std::vector<const Column*> plain;

  for (const auto& name : names) {
    const auto& c = table.column(name);
    if (c.is_categorical()) {
      for (auto& ind : one_hot(c)) {
        labels.push_back(ind.name);
        refs.emplace_back(true, expanded.size());
        expanded.push_back(std::move(ind));
      }
    } else {
      labels.push_back(c.name);
      refs.emplace_back(false, plain.size());
      plain.push_back(&c);
    }
  }

  Eigen::MatrixXd out(static_cast<Eigen::Index>(table.n_rows()),
                      static_cast<Eigen::Index>(refs.size()));
  for (std::size_t j = 0; j < refs.size(); ++j) {
    const auto& src = refs[j].first ? expanded[refs[j].second].values
                                    : plain[refs[j].second]->values;
    out.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(src.data(), static_cast<Eigen::Index>(src.size()));
  }
  if (expanded_names) *expanded_names = std::move(labels);
  return out;
}

Eigen::MatrixXd as_matrix(std::span<const double> values) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) out(static_cast<Eigen::Index>(i), 0) = values[i];
  return out;
}

}  // namespace mbsel
