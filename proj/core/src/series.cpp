#include "gcause/series.hpp"

#include <unordered_set>
#include <utility>

#include "gcause/errors.hpp"

namespace gcause {

Eigen::Index MultivariateSeries::index_of(const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == name) return static_cast<Eigen::Index>(j);
  }
  throw UsageError("unknown variable name: " + name);
}

MultivariateSeries MultivariateSeries::make(Eigen::MatrixXd values,
                                            std::vector<std::string> names,
                                            std::string dt) {
  if (values.rows() < 1) throw UsageError("series must have at least one row");
  if (values.cols() < 2) throw UsageError("series must have at least two variables");
  if (!values.allFinite()) throw UsageError("series contains non-finite values");
  if (static_cast<Eigen::Index>(names.size()) != values.cols()) {
    throw UsageError("name count does not match variable count");
  }
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) throw UsageError("duplicate variable name: " + n);
  }
  return MultivariateSeries{std::move(values), std::move(names), std::move(dt)};
}

std::vector<std::string> default_names(Eigen::Index n_vars) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(n_vars));
  for (Eigen::Index j = 0; j < n_vars; ++j) {
    names.push_back("Z" + std::to_string(j + 1));
  }
  return names;
}

}  // namespace gcause
