#include "gcause/window.hpp"

#include <string>

#include "gcause/errors.hpp"

namespace gcause {

WindowSet make_windows(Eigen::Index series_length, Eigen::Index context,
                       Eigen::Index horizon, Eigen::Index stride) {
  if (context < 1 || horizon < 1 || stride < 1) {
    throw UsageError("window parameters must all be >= 1");
  }
  if (context + horizon > series_length) {
    throw UsageError("context + horizon (" + std::to_string(context + horizon) +
                     ") exceeds series length " + std::to_string(series_length));
  }

  WindowSet set;
  set.context = context;
  set.horizon = horizon;
  set.stride = stride;
  const Eigen::Index count = (series_length - context - horizon) / stride + 1;
  set.windows.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index k = 0; k < count; ++k) {
    const Eigen::Index t0 = context + k * stride;
    set.windows.push_back(Window{t0 - context, t0, t0 + horizon});
  }
  return set;
}

}  // namespace gcause
