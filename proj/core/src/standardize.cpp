#include "gcause/standardize.hpp"

#include <cmath>

#include "gcause/errors.hpp"

namespace gcause {

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& values) const {
  return (values.rowwise() - mean.transpose()).array().rowwise() /
         stddev.transpose().array();
}

Eigen::MatrixXd Standardizer::inverse(const Eigen::MatrixXd& values) const {
  return (values.array().rowwise() * stddev.transpose().array()).matrix().rowwise() +
         mean.transpose();
}

std::pair<MultivariateSeries, Standardizer> standardize(const MultivariateSeries& series,
                                                        IndexRange fit_range) {
  if (fit_range.size() < 1) throw UsageError("standardize: empty fit range");
  if (fit_range.begin < 0 || fit_range.end > series.length()) {
    throw UsageError("standardize: fit range outside series");
  }

  const auto fit = series.values.middleRows(fit_range.begin, fit_range.size());
  const Eigen::Index n = fit.rows();

  Standardizer st;
  st.mean = fit.colwise().mean();
  // Population std so that a two-point column {a, b} maps to {-1, +1}.
  const Eigen::MatrixXd centered = fit.rowwise() - st.mean.transpose();
  st.stddev = (centered.array().square().colwise().sum() / static_cast<double>(n))
                  .sqrt()
                  .transpose();

  for (Eigen::Index j = 0; j < st.stddev.size(); ++j) {
    if (!(st.stddev(j) >= 1e-12)) {
      throw UsageError("standardize: variable '" + series.names[static_cast<std::size_t>(j)] +
                       "' is constant over the fit range");
    }
  }

  MultivariateSeries out = series;
  out.values = st.transform(series.values);
  return {std::move(out), std::move(st)};
}

}  // namespace gcause
