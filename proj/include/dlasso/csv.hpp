#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlasso/dataset.hpp"

namespace dlasso {

/// Rectangular numeric table parsed from a headered CSV file.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  }
};

namespace detail {

// One logical CSV record, honoring quoted fields that may contain commas,
// quotes ("" escape) and newlines.
inline bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int c;
  while ((c = in.get()) != EOF) {
    any = true;
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch == '\n') {
      break;
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get();
      break;
    } else {
      field.push_back(ch);
    }
  }
  if (!any) return false;
  fields.push_back(field);
  return true;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parse a headered CSV of finite reals. Errors carry 1-based row/column
/// coordinates (the header is row 1).
inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_csv: cannot open '" + path + "'");

  CsvTable table;
  std::vector<std::string> fields;
  if (!detail::read_record(in, fields) || (fields.size() == 1 && detail::trim(fields[0]).empty())) {
    throw std::runtime_error("read_csv: '" + path + "' is empty");
  }
  for (auto& f : fields) table.header.push_back(detail::trim(f));

  int line = 1;
  while (detail::read_record(in, fields)) {
    ++line;
    if (fields.size() == 1 && detail::trim(fields[0]).empty()) continue;  // blank line
    if (fields.size() != table.header.size()) {
      throw std::runtime_error("read_csv: row " + std::to_string(line) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(table.header.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const std::string cell = detail::trim(fields[j]);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw std::runtime_error("read_csv: non-numeric cell at row " + std::to_string(line) +
                                 ", column '" + table.header[j] + "' (value '" + cell + "')");
      }
      row[j] = v;
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) {
    throw std::runtime_error("read_csv: '" + path + "' has a header but no data rows");
  }
  return table;
}

/// Load a CSV into a Dataset, splitting off the named response column.
/// Standardization (on by default) maps predictors to mean 0 / unit sample sd
/// and centers the response, keeping the metadata for back-transformation.
inline Dataset load_dataset(const std::string& path, const std::string& response,
                            bool standardize_data = true) {
  const CsvTable table = read_csv(path);
  const int yc = table.column_index(response);
  if (yc < 0) {
    throw std::runtime_error("load_dataset: response column '" + response + "' not found in '" +
                             path + "'");
  }
  const int n = static_cast<int>(table.rows.size());
  const int p = static_cast<int>(table.header.size()) - 1;
  if (p < 1) throw std::runtime_error("load_dataset: no predictor columns besides the response");

  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  std::vector<std::string> names;
  names.reserve(p);
  for (int j = 0, k = 0; j < static_cast<int>(table.header.size()); ++j) {
    if (j == yc) continue;
    names.push_back(table.header[j]);
    for (int i = 0; i < n; ++i) X(i, k) = table.rows[i][j];
    ++k;
  }
  for (int i = 0; i < n; ++i) y(i) = table.rows[i][yc];

  Dataset raw = make_dataset(std::move(X), std::move(y), std::move(names));
  return standardize_data ? standardize(raw) : raw;
}

/// Shortest round-trip decimal form of v; identical bytes for identical
/// doubles, which keeps emitted CSV/JSON reproducible.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

}  // namespace dlasso
