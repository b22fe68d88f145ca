#pragma once

#include <string>

#include "gcause/series.hpp"

namespace gcause {

/// Reads a comma-separated file into a series. Rows are time steps,
/// columns are variables, decimal-point numbers, UTF-8. With has_header
/// the first line supplies variable names; otherwise names default to
/// "Z1..ZN". Ragged rows and non-numeric cells raise UsageError carrying
/// the offending line (and column) number; an empty file is its own error.
MultivariateSeries load_csv(const std::string& path, bool has_header);

/// Writes the series with a header row. Values are printed with 17
/// significant digits so a load round-trips bit-exactly.
void save_csv(const MultivariateSeries& series, const std::string& path);

}  // namespace gcause
