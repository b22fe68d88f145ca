#pragma once

#include <Eigen/Dense>
#include <utility>

#include "gcause/series.hpp"

namespace gcause {

/// Per-variable affine transform fitted on a training range. Stored
/// standard deviations are strictly positive; constant variables are
/// rejected at fit time.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  Eigen::MatrixXd transform(const Eigen::MatrixXd& values) const;
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& values) const;
};

/// Fits mean/std on fit_range and returns the fully transformed series.
/// Throws UsageError naming the variable if one is constant (std < 1e-12)
/// over the fit range.
std::pair<MultivariateSeries, Standardizer> standardize(const MultivariateSeries& series,
                                                        IndexRange fit_range);

}  // namespace gcause
