#include "gcause/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "gcause/errors.hpp"

namespace gcause {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& field, double& out) {
  const std::string token = trim(field);
  if (token.empty()) return false;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc() && result.ptr == end;
}

}  // namespace

MultivariateSeries load_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open CSV file: " + path);

  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::size_t n_cols = 0;
  std::size_t line_no = 0;
  std::string line;
  bool saw_any_line = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.peek() == std::ifstream::traits_type::eof()) break;
    saw_any_line = true;
    const auto fields = split_fields(line);

    if (line_no == 1 && has_header) {
      for (const auto& f : fields) names.push_back(trim(f));
      n_cols = fields.size();
      continue;
    }
    if (n_cols == 0) n_cols = fields.size();
    if (fields.size() != n_cols) {
      throw UsageError("CSV row " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " columns, expected " +
                       std::to_string(n_cols));
    }
    std::vector<double> row(n_cols);
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (!parse_double(fields[c], row[c])) {
        throw UsageError("CSV cell is not numeric at (row " + std::to_string(line_no) +
                         ", col " + std::to_string(c + 1) + "): '" + trim(fields[c]) + "'");
      }
    }
    rows.push_back(std::move(row));
  }

  if (!saw_any_line) throw UsageError("CSV file is empty: " + path);
  if (rows.empty()) throw UsageError("CSV file has a header but no data rows: " + path);

  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(n_cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }

  if (names.empty()) names = default_names(values.cols());
  return MultivariateSeries::make(std::move(values), std::move(names));
}

void save_csv(const MultivariateSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write CSV file: " + path);

  for (std::size_t j = 0; j < series.names.size(); ++j) {
    if (j > 0) out << ',';
    out << series.names[j];
  }
  out << '\n';

  char buf[64];
  for (Eigen::Index t = 0; t < series.length(); ++t) {
    for (Eigen::Index j = 0; j < series.n_vars(); ++j) {
      if (j > 0) out << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", series.values(t, j));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw ComputeError("I/O failure while writing " + path);
}

}  // namespace gcause
