#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gcause/series.hpp"
#include "gcause/window.hpp"

namespace gcause {

struct ForecasterConfig {
  Eigen::Index context = 24;
  Eigen::Index horizon = 8;
  Eigen::Index hidden = 0;  // 0 = auto: max(16, 8 * n_vars)
  int epochs = 50;
  double learning_rate = 1e-2;
  double clip_norm = 5.0;
  double min_sigma = 1e-3;
  std::uint64_t seed = 0;

  void validate() const;
  Eigen::Index resolved_hidden(Eigen::Index n_vars) const;
};

/// Gaussian negative log-likelihood of one scalar observation:
/// 0.5 ln(2 pi) + ln(sigma) + (z - mu)^2 / (2 sigma^2).
double nll_loss(double mu, double sigma, double z);

Eigen::Index gru_param_count(Eigen::Index n_vars, Eigen::Index hidden);

/// Views into the flat parameter vector of the single-layer gated
/// recurrent forecaster. Layout, in order:
///   W_r, W_z, W_n (H x N) | U_r, U_z, U_n (H x H) |
///   b_r, b_z, b_n (H)     | W_out (2N x H) | b_out (2N)
/// The cell is r = sig(W_r x + U_r h + b_r), z = sig(W_z x + U_z h + b_z),
/// n = tanh(W_n x + U_n (r*h) + b_n), h' = (1-z)*n + z*h; the head maps
/// h' to (mu_1..mu_N, raw_1..raw_N) with sigma_j = softplus(raw_j) + min_sigma.
struct GruParamView {
  Eigen::Map<Eigen::MatrixXd> w_r, w_z, w_n, u_r, u_z, u_n, w_out;
  Eigen::Map<Eigen::VectorXd> b_r, b_z, b_n, b_out;
  GruParamView(double* data, Eigen::Index n_vars, Eigen::Index hidden);
};
struct GruParamConstView {
  Eigen::Map<const Eigen::MatrixXd> w_r, w_z, w_n, u_r, u_z, u_n, w_out;
  Eigen::Map<const Eigen::VectorXd> b_r, b_z, b_n, b_out;
  GruParamConstView(const double* data, Eigen::Index n_vars, Eigen::Index hidden);
};

/// Weights uniform on +-1/sqrt(fan_in), biases zero, deterministic in seed.
Eigen::VectorXd init_params(Eigen::Index n_vars, Eigen::Index hidden,
                            std::uint64_t seed);

struct TrainedForecaster {
  ForecasterConfig config;  // hidden resolved to its concrete value
  Eigen::Index n_vars = 0;
  Eigen::VectorXd params;
  std::vector<double> loss_trace;  // mean summed window NLL per epoch
};

/// Per-step, per-variable predictive mean and standard deviation over a
/// forecast horizon; both are horizon x N.
struct PredictiveTrajectory {
  Eigen::MatrixXd mu;
  Eigen::MatrixXd sigma;
};

/// Summed teacher-forced NLL of one window given as (C + T_h) x N rows:
/// the cell rolls over the first C rows, then each horizon step is scored
/// against the observed row and the observed row is fed back in.
double window_nll(const TrainedForecaster& model, const Eigen::MatrixXd& rows);

/// Minimizes mean window NLL with per-window adaptive-moment updates
/// (decay 0.9/0.999, eps 1e-8), global-norm gradient clipping and a
/// deterministic per-epoch shuffle. Throws ComputeError with the epoch
/// index if the loss or gradient goes non-finite.
TrainedForecaster train(const MultivariateSeries& series, const WindowSet& windows,
                        const ForecasterConfig& config);

/// Rolls the cell over `context` (C x N), then decodes `horizon` steps
/// feeding back the predictive means. Deterministic.
PredictiveTrajectory predict(const TrainedForecaster& model,
                             const Eigen::MatrixXd& context, Eigen::Index horizon);

/// Compares the analytic window-NLL gradient against central finite
/// differences on the first window of `probe`, parameter by parameter,
/// and returns max |g_a - g_fd| / max(1, |g_a|, |g_fd|). Parameters come
/// from init_params(config.seed) unless overridden.
double gradient_check(const ForecasterConfig& config, const MultivariateSeries& probe,
                      double step = 1e-5,
                      const std::optional<Eigen::VectorXd>& params_override = {});

std::string forecaster_to_json(const TrainedForecaster& model);
TrainedForecaster forecaster_from_json(const std::string& text);
std::string loss_trace_csv(const TrainedForecaster& model);

}  // namespace gcause
