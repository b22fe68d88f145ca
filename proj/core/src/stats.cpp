#include "gcause/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcause/errors.hpp"

namespace gcause {

double kolmogorov_sf(double c) {
  if (c <= 1e-4) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1;; ++k) {
    const double term = std::exp(-2.0 * k * k * c * c);
    if (term < 1e-12) break;
    sum += sign * term;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KSResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw UsageError("ks_two_sample: empty sample");

  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double q = static_cast<double>(sa.size());
  const double r = static_cast<double>(sb.size());

  // Walk the pooled order; at each distinct pooled value both ECDFs have
  // absorbed all their ties before the distance is taken.
  double sup = 0.0;
  std::size_t ia = 0;
  std::size_t ib = 0;
  while (ia < sa.size() || ib < sb.size()) {
    const double x = (ib >= sb.size() || (ia < sa.size() && sa[ia] <= sb[ib])) ? sa[ia]
                                                                               : sb[ib];
    while (ia < sa.size() && sa[ia] <= x) ++ia;
    while (ib < sb.size() && sb[ib] <= x) ++ib;
    const double diff =
        std::abs(static_cast<double>(ia) / q - static_cast<double>(ib) / r);
    sup = std::max(sup, diff);
  }

  KSResult result;
  result.sup_distance = sup;
  result.q = sa.size();
  result.r = sb.size();
  result.statistic = std::sqrt(q * r / (q + r)) * sup;
  result.p_value = (sup == 0.0) ? 1.0 : kolmogorov_sf(result.statistic);
  return result;
}

std::vector<double> holm_adjust(const std::vector<double>& p_values) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return p_values[i] < p_values[j]; });

  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t rank = 0; rank < m; ++rank) {
    const double scaled = std::min(1.0, static_cast<double>(m - rank) * p_values[order[rank]]);
    running = std::max(running, scaled);
    adjusted[order[rank]] = running;
  }
  return adjusted;
}

}  // namespace gcause
