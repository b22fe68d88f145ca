#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gcause {

/// One forecast window: context rows [context_begin, forecast_start),
/// target rows [forecast_start, target_end). Slices are contiguous and
/// adjacent by construction.
struct Window {
  Eigen::Index context_begin;
  Eigen::Index forecast_start;  // t0
  Eigen::Index target_end;      // t0 + horizon
};

struct WindowSet {
  std::vector<Window> windows;
  Eigen::Index context;
  Eigen::Index horizon;
  Eigen::Index stride;

  std::size_t count() const { return windows.size(); }
};

/// Enumerates windows left to right at the given stride; the last partial
/// window is dropped, so count = floor((length - context - horizon) / stride) + 1.
/// Throws UsageError when context + horizon > length or any argument < 1.
WindowSet make_windows(Eigen::Index series_length, Eigen::Index context,
                       Eigen::Index horizon, Eigen::Index stride);

}  // namespace gcause
