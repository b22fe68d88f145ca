#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace gcause {

/// Half-open row range [begin, end) into a series.
struct IndexRange {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;

  Eigen::Index size() const { return end - begin; }
};

/// T x N observation matrix over named variables. Rows are time steps,
/// columns are variables. Immutable after construction; construct through
/// make() which enforces the type invariants (finite entries, N >= 2,
/// T >= 1, unique names).
struct MultivariateSeries {
  Eigen::MatrixXd values;          // T x N
  std::vector<std::string> names;  // length N
  std::string dt;                  // sampling-interval label, informational

  Eigen::Index length() const { return values.rows(); }
  Eigen::Index n_vars() const { return values.cols(); }

  /// Column index for a variable name; throws UsageError if absent.
  Eigen::Index index_of(const std::string& name) const;

  static MultivariateSeries make(Eigen::MatrixXd values,
                                 std::vector<std::string> names,
                                 std::string dt = "");
};

/// Names "Z1".."ZN", the default when a CSV ships without a header.
std::vector<std::string> default_names(Eigen::Index n_vars);

}  // namespace gcause
