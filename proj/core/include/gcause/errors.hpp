#pragma once

#include <stdexcept>
#include <string>

namespace gcause {

/// Bad user input: malformed config, unparsable data file, invalid
/// partition, out-of-range hyperparameter. CLI maps this to exit code 1.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Failure while computing: numerical divergence, infeasible solve,
/// non-finite loss. CLI maps this to exit code 2.
class ComputeError : public std::runtime_error {
 public:
  explicit ComputeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gcause
