#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gcause/decision.hpp"
#include "gcause/forecaster.hpp"
#include "gcause/knockoff.hpp"
#include "gcause/partition.hpp"
#include "gcause/series.hpp"
#include "gcause/stats.hpp"
#include "gcause/window.hpp"

namespace gcause {

/// Multiple-testing handling across the target group's nodes: Holm
/// step-down (family-wise control), or the raw per-node p-values.
enum class TestingMode { Holm, AnyRaw };

std::string to_string(TestingMode mode);
TestingMode testing_mode_from_string(const std::string& s);

struct InferenceConfig {
  double alpha = 0.05;
  double eps = 1e-2;  // floor on |Z_t| in the relative-residual denominator
  std::uint64_t knockoff_seed_base = 0;
  TestingMode mode = TestingMode::Holm;

  void validate() const;
};

/// Per-window forecast residuals for a set of target variables:
/// residuals(w, k) is window w's residual for targets[k].
struct ResidualSample {
  std::vector<int> targets;
  Eigen::MatrixXd residuals;
  bool interventional = false;

  Eigen::Index n_windows() const { return residuals.rows(); }
};

/// e = (1/T_h) sum_t |Z_t - Zhat_t| / max(|Z_t|, eps).
double window_residual(const Eigen::VectorXd& actual,
                       const Eigen::VectorXd& predicted_mu, double eps);

/// Predicts every window from its observed context and scores the target
/// variables with window_residual.
ResidualSample clean_residuals(const TrainedForecaster& model,
                               const MultivariateSeries& series,
                               const WindowSet& windows,
                               const std::vector<int>& targets, double eps);

/// Same, but each window's context first gets its source-group columns
/// replaced by a fresh knockoff realization (window w uses knockoff seed
/// `seed + w`); every other column and the target rows stay observed.
ResidualSample interventional_residuals(const TrainedForecaster& model,
                                        const MultivariateSeries& series,
                                        const WindowSet& windows,
                                        const std::vector<int>& source_group,
                                        const std::vector<int>& targets,
                                        const KnockoffModel& knockoff,
                                        std::uint64_t seed, double eps);

/// Clean and interventional residual samples retained for inspection and
/// histogram plots of one ordered group pair.
struct PairResiduals {
  int src_group;
  int dst_group;
  ResidualSample clean;
  ResidualSample interventional;
};

/// Directed test "does group i cause group j": per node of group j, a
/// two-sample KS test of clean vs interventional residuals; p-values
/// adjusted per config.mode; the verdict is causes iff the smallest
/// adjusted p is <= alpha (one affected node suffices for a group link).
PairDecision test_group_edge(const TrainedForecaster& model,
                             const MultivariateSeries& series,
                             const WindowSet& windows,
                             const GroupPartition& partition, int i, int j,
                             const KnockoffModel& knockoff,
                             const InferenceConfig& config,
                             PairResiduals* capture = nullptr);

/// Wall-clock phase costs in milliseconds. Reported separately from the
/// decision artifacts, which must stay byte-reproducible.
struct PhaseTimings {
  double load_ms = 0;
  double train_ms = 0;
  double knockoff_ms = 0;
  double inference_ms = 0;
  double total_ms = 0;
};

struct DiscoveryResult {
  DecisionMatrix decisions;
  TrainedForecaster forecaster;
  KnockoffModel knockoff;
  WindowSet windows;
  std::vector<PairResiduals> residuals;  // one entry per ordered pair
  std::vector<std::string> warnings;
  PhaseTimings timings;
};

/// Full pipeline on an already-standardized series: window it (stride 0
/// means stride = horizon), train one forecaster over all variables, fit
/// one knockoff model, run test_group_edge for every ordered group pair
/// and combine the directed verdicts into per-unordered-pair labels.
/// Fewer than 5 windows is an error; fewer than 30 adds a warning.
DiscoveryResult discover(const MultivariateSeries& series,
                         const GroupPartition& partition,
                         const ForecasterConfig& forecaster_config,
                         const InferenceConfig& inference_config,
                         Eigen::Index stride = 0,
                         std::optional<double> knockoff_shrinkage = std::nullopt,
                         SolveMethod knockoff_method = SolveMethod::SdpCoordinate);

std::string decision_matrix_to_json(const DecisionMatrix& matrix,
                                    const InferenceConfig& config);

}  // namespace gcause
