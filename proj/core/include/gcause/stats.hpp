#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gcause {

/// Two-sample Kolmogorov-Smirnov result. statistic is the scaled distance
/// sqrt(q*r/(q+r)) * sup_distance; p_value comes from the asymptotic
/// Kolmogorov distribution.
struct KSResult {
  double statistic;     // C = sqrt(q r / (q + r)) * D
  double sup_distance;  // D in [0, 1]
  std::size_t q;        // size of sample a
  std::size_t r;        // size of sample b
  double p_value;
};

/// Survival function of the Kolmogorov distribution,
/// Q(c) = 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 c^2),
/// truncated once terms fall below 1e-12 and clamped to [0, 1].
double kolmogorov_sf(double c);

/// Sup-distance between the two empirical CDFs evaluated at every pooled
/// sample point, plus the scaled statistic and its asymptotic p-value.
/// p = 1 exactly when D = 0. Throws UsageError on an empty sample.
KSResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Holm step-down adjustment. Never decreases a p-value, preserves the
/// argmin, output clamped to [0, 1].
std::vector<double> holm_adjust(const std::vector<double>& p_values);

}  // namespace gcause
