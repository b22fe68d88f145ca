#include "gcause/invariance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "gcause/errors.hpp"
#include "gcause/rng.hpp"
#include "json_detail.hpp"

namespace gcause {

std::string to_string(TestingMode mode) {
  switch (mode) {
    case TestingMode::Holm: return "holm";
    case TestingMode::AnyRaw: return "any-raw";
  }
  throw ComputeError("invalid TestingMode value");
}

TestingMode testing_mode_from_string(const std::string& s) {
  if (s == "holm") return TestingMode::Holm;
  if (s == "any-raw") return TestingMode::AnyRaw;
  throw UsageError("unknown testing mode '" + s + "' (expected holm or any-raw)");
}

void InferenceConfig::validate() const {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw UsageError("significance alpha must lie in (0, 1)");
  if (!(eps > 0.0)) throw UsageError("residual denominator floor eps must be > 0");
}

double window_residual(const Eigen::VectorXd& actual,
                       const Eigen::VectorXd& predicted_mu, double eps) {
  if (actual.size() != predicted_mu.size())
    throw UsageError("actual and predicted vectors differ in length");
  if (actual.size() == 0) throw UsageError("window_residual needs at least one step");
  if (!(eps > 0.0)) throw UsageError("residual denominator floor eps must be > 0");
  double sum = 0.0;
  for (Eigen::Index t = 0; t < actual.size(); ++t)
    sum += std::abs(actual(t) - predicted_mu(t)) / std::max(std::abs(actual(t)), eps);
  return sum / static_cast<double>(actual.size());
}

namespace {

void check_targets(const std::vector<int>& targets, Eigen::Index n_vars,
                   const char* what) {
  if (targets.empty()) throw UsageError(std::string(what) + " set is empty");
  for (int v : targets)
    if (v < 0 || v >= n_vars)
      throw UsageError(std::string(what) + " index out of variable range");
}

}  // namespace

ResidualSample clean_residuals(const TrainedForecaster& model,
                               const MultivariateSeries& series,
                               const WindowSet& windows,
                               const std::vector<int>& targets, double eps) {
  check_targets(targets, series.n_vars(), "target");
  Eigen::Index n = windows.count();
  ResidualSample out;
  out.targets = targets;
  out.interventional = false;
  out.residuals.resize(n, static_cast<Eigen::Index>(targets.size()));
  for (Eigen::Index w = 0; w < n; ++w) {
    const Window& win = windows.windows[static_cast<size_t>(w)];
    PredictiveTrajectory traj =
        predict(model, series.values.middleRows(win.context_begin, windows.context),
                windows.horizon);
    for (size_t k = 0; k < targets.size(); ++k) {
      Eigen::VectorXd actual =
          series.values.col(targets[k]).segment(win.forecast_start, windows.horizon);
      out.residuals(w, static_cast<Eigen::Index>(k)) =
          window_residual(actual, traj.mu.col(targets[k]), eps);
    }
  }
  return out;
}

ResidualSample interventional_residuals(const TrainedForecaster& model,
                                        const MultivariateSeries& series,
                                        const WindowSet& windows,
                                        const std::vector<int>& source_group,
                                        const std::vector<int>& targets,
                                        const KnockoffModel& knockoff,
                                        std::uint64_t seed, double eps) {
  check_targets(targets, series.n_vars(), "target");
  check_targets(source_group, series.n_vars(), "source");
  for (int s : source_group)
    if (std::find(targets.begin(), targets.end(), s) != targets.end())
      throw UsageError("source and target variable sets overlap");
  if (knockoff.n_vars() != series.n_vars())
    throw UsageError("knockoff model dimension does not match the series");

  Eigen::Index n = windows.count();
  ResidualSample out;
  out.targets = targets;
  out.interventional = true;
  out.residuals.resize(n, static_cast<Eigen::Index>(targets.size()));
  for (Eigen::Index w = 0; w < n; ++w) {
    const Window& win = windows.windows[static_cast<size_t>(w)];
    Eigen::MatrixXd ctx = series.values.middleRows(win.context_begin, windows.context);
    // Fresh in-distribution replacement per window; only the intervened
    // group's context columns change, the observed targets stay put.
    Rng rng(mix_seed(seed + static_cast<std::uint64_t>(w), 0x6b6f6666));  // "koff"
    Eigen::MatrixXd ko = sample_knockoff_matrix(knockoff, ctx, rng);
    for (int s : source_group) ctx.col(s) = ko.col(s);
    PredictiveTrajectory traj = predict(model, ctx, windows.horizon);
    for (size_t k = 0; k < targets.size(); ++k) {
      Eigen::VectorXd actual =
          series.values.col(targets[k]).segment(win.forecast_start, windows.horizon);
      out.residuals(w, static_cast<Eigen::Index>(k)) =
          window_residual(actual, traj.mu.col(targets[k]), eps);
    }
  }
  return out;
}

PairDecision test_group_edge(const TrainedForecaster& model,
                             const MultivariateSeries& series,
                             const WindowSet& windows,
                             const GroupPartition& partition, int i, int j,
                             const KnockoffModel& knockoff,
                             const InferenceConfig& config, PairResiduals* capture) {
  config.validate();
  int g = partition.n_groups();
  if (i < 0 || i >= g || j < 0 || j >= g)
    throw UsageError("group index out of range");
  if (i == j) throw UsageError("cannot test a group against itself");

  const std::vector<int>& sources = partition.groups[static_cast<size_t>(i)].vars;
  const std::vector<int>& targets = partition.groups[static_cast<size_t>(j)].vars;

  ResidualSample clean = clean_residuals(model, series, windows, targets, config.eps);
  // Pair-specific knockoff stream so ordered tests are independent of the
  // order they run in.
  std::uint64_t pair_seed =
      mix_seed(config.knockoff_seed_base, static_cast<std::uint64_t>(i),
               static_cast<std::uint64_t>(j));
  ResidualSample interv = interventional_residuals(
      model, series, windows, sources, targets, knockoff, pair_seed, config.eps);

  PairDecision dec;
  dec.src_group = i;
  dec.dst_group = j;
  dec.target_nodes = targets;
  std::vector<double> raw;
  Eigen::Index n = clean.n_windows();
  for (size_t k = 0; k < targets.size(); ++k) {
    std::vector<double> a(static_cast<size_t>(n)), b(static_cast<size_t>(n));
    Eigen::VectorXd::Map(a.data(), n) = clean.residuals.col(static_cast<Eigen::Index>(k));
    Eigen::VectorXd::Map(b.data(), n) = interv.residuals.col(static_cast<Eigen::Index>(k));
    KSResult ks = ks_two_sample(a, b);
    dec.node_tests.push_back(ks);
    raw.push_back(ks.p_value);
  }
  dec.adjusted_p = config.mode == TestingMode::Holm ? holm_adjust(raw) : raw;
  dec.causes =
      *std::min_element(dec.adjusted_p.begin(), dec.adjusted_p.end()) <= config.alpha;

  if (capture) {
    capture->src_group = i;
    capture->dst_group = j;
    capture->clean = std::move(clean);
    capture->interventional = std::move(interv);
  }
  return dec;
}

DiscoveryResult discover(const MultivariateSeries& series,
                         const GroupPartition& partition,
                         const ForecasterConfig& forecaster_config,
                         const InferenceConfig& inference_config,
                         Eigen::Index stride,
                         std::optional<double> knockoff_shrinkage,
                         SolveMethod knockoff_method) {
  forecaster_config.validate();
  inference_config.validate();
  require_valid_partition(partition, static_cast<int>(series.n_vars()));

  Eigen::Index st = stride == 0 ? forecaster_config.horizon : stride;
  WindowSet windows = make_windows(series.length(), forecaster_config.context,
                                   forecaster_config.horizon, st);

  DiscoveryResult res;
  if (windows.count() < 5)
    throw UsageError("discovery needs at least 5 forecast windows, got " +
                     std::to_string(windows.count()) +
                     "; use a longer series or a smaller context/horizon/stride");
  if (windows.count() < 30)
    res.warnings.push_back("only " + std::to_string(windows.count()) +
                           " forecast windows; the KS test has little power below 30");

  res.windows = windows;
  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point from) {
    return std::chrono::duration<double, std::milli>(clock::now() - from).count();
  };

  auto t = clock::now();
  res.forecaster = train(series, windows, forecaster_config);
  res.timings.train_ms = ms_since(t);

  t = clock::now();
  res.knockoff = fit_gaussian(series, knockoff_shrinkage, knockoff_method);
  res.timings.knockoff_ms = ms_since(t);

  res.decisions.partition = partition;
  res.decisions.alpha = inference_config.alpha;

  t = clock::now();
  int g = partition.n_groups();
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      if (i == j) continue;
      PairResiduals pr;
      res.decisions.pairs.push_back(test_group_edge(res.forecaster, series, windows,
                                                    partition, i, j, res.knockoff,
                                                    inference_config, &pr));
      res.residuals.push_back(std::move(pr));
    }
  res.timings.inference_ms = ms_since(t);

  for (int a = 0; a < g; ++a)
    for (int b = a + 1; b < g; ++b) {
      bool fwd = res.decisions.pair(a, b).causes;
      bool bwd = res.decisions.pair(b, a).causes;
      LinkLabel label = fwd && bwd  ? LinkLabel::Bidirectional
                        : fwd       ? LinkLabel::Forward
                        : bwd       ? LinkLabel::Backward
                                    : LinkLabel::None;
      res.decisions.links.push_back(PairLink{a, b, label});
    }
  return res;
}

namespace detail {

nlohmann::json inference_config_json(const InferenceConfig& config) {
  return {{"alpha", config.alpha},
          {"eps", config.eps},
          {"knockoff_seed_base", config.knockoff_seed_base},
          {"mode", to_string(config.mode)}};
}

nlohmann::json decision_matrix_json(const DecisionMatrix& matrix,
                                    const InferenceConfig& config) {
  nlohmann::json j;
  j["alpha"] = matrix.alpha;
  j["config_echo"] = inference_config_json(config);
  j["pairs"] = nlohmann::json::array();
  for (const PairDecision& p : matrix.pairs) {
    std::vector<double> raw, stat;
    for (const KSResult& ks : p.node_tests) {
      raw.push_back(ks.p_value);
      stat.push_back(ks.statistic);
    }
    j["pairs"].push_back({{"src", p.src_group},
                          {"dst", p.dst_group},
                          {"node_pvalues", raw},
                          {"adjusted", p.adjusted_p},
                          {"statistic", stat},
                          {"verdict", p.causes ? "causes" : "not-causes"}});
  }
  j["links"] = nlohmann::json::array();
  for (const PairLink& l : matrix.links)
    j["links"].push_back(
        {{"a", l.group_a}, {"b", l.group_b}, {"label", to_string(l.label)}});
  return j;
}

}  // namespace detail

std::string decision_matrix_to_json(const DecisionMatrix& matrix,
                                    const InferenceConfig& config) {
  return detail::decision_matrix_json(matrix, config).dump(2) + "\n";
}

}  // namespace gcause
