#include "gcause/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "gcause/errors.hpp"
#include "gcause/rng.hpp"

namespace gcause {

void ForecasterConfig::validate() const {
  if (context < 1) throw UsageError("context length must be >= 1");
  if (horizon < 1) throw UsageError("horizon must be >= 1");
  if (hidden < 0) throw UsageError("hidden size must be >= 1, or 0 for auto");
  if (epochs < 1) throw UsageError("epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw UsageError("learning rate must be > 0");
  if (!(clip_norm > 0.0)) throw UsageError("clip norm must be > 0");
  if (!(min_sigma > 0.0)) throw UsageError("min_sigma must be > 0");
}

Eigen::Index ForecasterConfig::resolved_hidden(Eigen::Index n_vars) const {
  return hidden > 0 ? hidden : std::max<Eigen::Index>(16, 8 * n_vars);
}

double nll_loss(double mu, double sigma, double z) {
  if (!(sigma > 0.0)) throw ComputeError("nll_loss requires sigma > 0");
  double d = z - mu;
  return 0.5 * std::log(2.0 * std::numbers::pi) + std::log(sigma) +
         d * d / (2.0 * sigma * sigma);
}

Eigen::Index gru_param_count(Eigen::Index n, Eigen::Index h) {
  return 3 * h * n + 3 * h * h + 3 * h + 2 * n * h + 2 * n;
}

GruParamView::GruParamView(double* p, Eigen::Index n, Eigen::Index h)
    : w_r(p, h, n),
      w_z(p + h * n, h, n),
      w_n(p + 2 * h * n, h, n),
      u_r(p + 3 * h * n, h, h),
      u_z(p + 3 * h * n + h * h, h, h),
      u_n(p + 3 * h * n + 2 * h * h, h, h),
      w_out(p + 3 * h * n + 3 * h * h + 3 * h, 2 * n, h),
      b_r(p + 3 * h * n + 3 * h * h, h),
      b_z(p + 3 * h * n + 3 * h * h + h, h),
      b_n(p + 3 * h * n + 3 * h * h + 2 * h, h),
      b_out(p + 3 * h * n + 3 * h * h + 3 * h + 2 * n * h, 2 * n) {}

GruParamConstView::GruParamConstView(const double* p, Eigen::Index n, Eigen::Index h)
    : w_r(p, h, n),
      w_z(p + h * n, h, n),
      w_n(p + 2 * h * n, h, n),
      u_r(p + 3 * h * n, h, h),
      u_z(p + 3 * h * n + h * h, h, h),
      u_n(p + 3 * h * n + 2 * h * h, h, h),
      w_out(p + 3 * h * n + 3 * h * h + 3 * h, 2 * n, h),
      b_r(p + 3 * h * n + 3 * h * h, h),
      b_z(p + 3 * h * n + 3 * h * h + h, h),
      b_n(p + 3 * h * n + 3 * h * h + 2 * h, h),
      b_out(p + 3 * h * n + 3 * h * h + 3 * h + 2 * n * h, 2 * n) {}

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

Eigen::VectorXd cell_step(const GruParamConstView& v, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& h_prev, Eigen::VectorXd& r,
                          Eigen::VectorXd& zt, Eigen::VectorXd& nn) {
  r = (v.w_r * x + v.u_r * h_prev + v.b_r)
          .unaryExpr([](double t) { return sigmoid(t); });
  zt = (v.w_z * x + v.u_z * h_prev + v.b_z)
           .unaryExpr([](double t) { return sigmoid(t); });
  nn = (v.w_n * x + v.u_n * r.cwiseProduct(h_prev) + v.b_n)
           .unaryExpr([](double t) { return std::tanh(t); });
  return nn + zt.cwiseProduct(h_prev - nn);
}

// Teacher-forced summed NLL of one (C + T_h) x N window; when `grad` is
// non-null the full backward pass accumulates d(loss)/d(theta) into it
// (caller zero-initializes). The cell consumes rows 0..C+T_h-2; the head
// scores states h_C .. h_{C+T_h-1} against rows C .. C+T_h-1.
double window_pass(const double* theta, Eigen::Index n, Eigen::Index h,
                   Eigen::Index context, double min_sigma,
                   const Eigen::MatrixXd& rows, double* grad) {
  GruParamConstView v(theta, n, h);
  Eigen::Index steps = rows.rows() - 1;
  Eigen::Index t_h = rows.rows() - context;

  Eigen::MatrixXd hs(steps + 1, h);
  hs.row(0).setZero();
  Eigen::MatrixXd rs(steps, h), zs(steps, h), ns(steps, h);
  Eigen::MatrixXd mus(t_h, n), raws(t_h, n), sigmas(t_h, n);

  Eigen::VectorXd r(h), zt(h), nn(h);
  for (Eigen::Index m = 1; m <= steps; ++m) {
    Eigen::VectorXd x = rows.row(m - 1).transpose();
    Eigen::VectorXd h_prev = hs.row(m - 1).transpose();
    hs.row(m) = cell_step(v, x, h_prev, r, zt, nn).transpose();
    rs.row(m - 1) = r.transpose();
    zs.row(m - 1) = zt.transpose();
    ns.row(m - 1) = nn.transpose();
  }

  double loss = 0.0;
  for (Eigen::Index k = 0; k < t_h; ++k) {
    Eigen::VectorXd o = v.w_out * hs.row(context + k).transpose() + v.b_out;
    for (Eigen::Index j = 0; j < n; ++j) {
      mus(k, j) = o(j);
      raws(k, j) = o(n + j);
      sigmas(k, j) = softplus(o(n + j)) + min_sigma;
      loss += nll_loss(mus(k, j), sigmas(k, j), rows(context + k, j));
    }
  }
  if (!grad) return loss;

  GruParamView g(grad, n, h);
  Eigen::VectorXd dh = Eigen::VectorXd::Zero(h);
  for (Eigen::Index m = steps; m >= 1; --m) {
    if (m >= context) {
      Eigen::Index k = m - context;
      Eigen::VectorXd dout(2 * n);
      for (Eigen::Index j = 0; j < n; ++j) {
        double sig = sigmas(k, j);
        double d = mus(k, j) - rows(context + k, j);
        dout(j) = d / (sig * sig);
        double dsig = 1.0 / sig - d * d / (sig * sig * sig);
        dout(n + j) = dsig * sigmoid(raws(k, j));
      }
      g.w_out += dout * hs.row(m);
      g.b_out += dout;
      dh += v.w_out.transpose() * dout;
    }

    Eigen::VectorXd x = rows.row(m - 1).transpose();
    Eigen::VectorXd h_prev = hs.row(m - 1).transpose();
    Eigen::VectorXd rv = rs.row(m - 1).transpose();
    Eigen::VectorXd zv = zs.row(m - 1).transpose();
    Eigen::VectorXd nv = ns.row(m - 1).transpose();

    Eigen::VectorXd dz = dh.cwiseProduct(h_prev - nv);
    Eigen::VectorXd dn = dh.cwiseProduct(Eigen::VectorXd::Ones(h) - zv);
    Eigen::VectorXd dh_prev = dh.cwiseProduct(zv);

    Eigen::VectorXd da_n =
        dn.cwiseProduct(Eigen::VectorXd::Ones(h) - nv.cwiseAbs2());
    g.w_n += da_n * x.transpose();
    g.u_n += da_n * rv.cwiseProduct(h_prev).transpose();
    g.b_n += da_n;
    Eigen::VectorXd dq = v.u_n.transpose() * da_n;
    Eigen::VectorXd dr = dq.cwiseProduct(h_prev);
    dh_prev += dq.cwiseProduct(rv);

    Eigen::VectorXd da_r =
        dr.cwiseProduct(rv).cwiseProduct(Eigen::VectorXd::Ones(h) - rv);
    Eigen::VectorXd da_z =
        dz.cwiseProduct(zv).cwiseProduct(Eigen::VectorXd::Ones(h) - zv);
    g.w_r += da_r * x.transpose();
    g.u_r += da_r * h_prev.transpose();
    g.b_r += da_r;
    dh_prev += v.u_r.transpose() * da_r;
    g.w_z += da_z * x.transpose();
    g.u_z += da_z * h_prev.transpose();
    g.b_z += da_z;
    dh_prev += v.u_z.transpose() * da_z;

    dh = dh_prev;
  }
  return loss;
}

}  // namespace

Eigen::VectorXd init_params(Eigen::Index n, Eigen::Index h, std::uint64_t seed) {
  if (n < 1 || h < 1) throw UsageError("init_params needs n_vars >= 1 and hidden >= 1");
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(gru_param_count(n, h));
  GruParamView v(theta.data(), n, h);
  Rng rng(mix_seed(seed, 0x696e6974));  // "init" substream
  auto fill = [&](Eigen::Map<Eigen::MatrixXd>& m, double a) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index rr = 0; rr < m.rows(); ++rr) m(rr, c) = rng.uniform(-a, a);
  };
  double a_in = 1.0 / std::sqrt(static_cast<double>(n));
  double a_h = 1.0 / std::sqrt(static_cast<double>(h));
  fill(v.w_r, a_in);
  fill(v.w_z, a_in);
  fill(v.w_n, a_in);
  fill(v.u_r, a_h);
  fill(v.u_z, a_h);
  fill(v.u_n, a_h);
  fill(v.w_out, a_h);
  // biases stay zero; the sigma head then starts near softplus(0) ~ 0.69
  return theta;
}

double window_nll(const TrainedForecaster& model, const Eigen::MatrixXd& rows) {
  if (rows.cols() != model.n_vars)
    throw UsageError("window width does not match the model's variable count");
  if (rows.rows() <= model.config.context)
    throw UsageError("window must contain the context plus at least one target row");
  return window_pass(model.params.data(), model.n_vars, model.config.hidden,
                     model.config.context, model.config.min_sigma, rows, nullptr);
}

TrainedForecaster train(const MultivariateSeries& series, const WindowSet& windows,
                        const ForecasterConfig& config) {
  config.validate();
  if (windows.context != config.context || windows.horizon != config.horizon)
    throw UsageError("window set geometry does not match the forecaster config");
  if (windows.windows.empty()) throw UsageError("training needs at least one window");

  Eigen::Index n = series.n_vars();
  Eigen::Index h = config.resolved_hidden(n);

  TrainedForecaster model;
  model.config = config;
  model.config.hidden = h;
  model.n_vars = n;
  model.params = init_params(n, h, config.seed);

  Eigen::Index p = model.params.size();
  Eigen::VectorXd grad(p);
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(p), m2 = Eigen::VectorXd::Zero(p);
  const double b1 = 0.9, b2 = 0.999, adam_eps = 1e-8;
  long long step = 0;

  std::vector<size_t> order(windows.windows.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng shuffle_rng(mix_seed(config.seed, 0x73687566));  // "shuf" substream

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (size_t i = order.size(); i > 1; --i) {
      auto j = static_cast<size_t>(
          shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }
    double total = 0.0;
    for (size_t idx : order) {
      const Window& w = windows.windows[idx];
      Eigen::MatrixXd rows =
          series.values.middleRows(w.context_begin, w.target_end - w.context_begin);
      grad.setZero();
      double loss = window_pass(model.params.data(), n, h, config.context,
                                config.min_sigma, rows, grad.data());
      if (!std::isfinite(loss) || !grad.allFinite())
        throw ComputeError("training diverged at epoch " + std::to_string(epoch) +
                           ": non-finite loss or gradient");
      total += loss;

      double norm = grad.norm();
      if (norm > config.clip_norm) grad *= config.clip_norm / norm;
      ++step;
      m1 = b1 * m1 + (1.0 - b1) * grad;
      m2 = b2 * m2 + (1.0 - b2) * grad.cwiseAbs2();
      double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
      double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
      model.params -=
          config.learning_rate *
          (m1 / c1).cwiseQuotient(((m2 / c2).cwiseSqrt().array() + adam_eps).matrix());
    }
    model.loss_trace.push_back(total / static_cast<double>(windows.windows.size()));
  }
  return model;
}

PredictiveTrajectory predict(const TrainedForecaster& model,
                             const Eigen::MatrixXd& context, Eigen::Index horizon) {
  if (context.cols() != model.n_vars)
    throw UsageError("context width does not match the model's variable count");
  if (context.rows() != model.config.context)
    throw UsageError("context length does not match the model's configuration");
  if (horizon < 1) throw UsageError("prediction horizon must be >= 1");

  Eigen::Index n = model.n_vars, h = model.config.hidden;
  GruParamConstView v(model.params.data(), n, h);

  Eigen::VectorXd hstate = Eigen::VectorXd::Zero(h), r(h), zt(h), nn(h);
  for (Eigen::Index t = 0; t < context.rows(); ++t)
    hstate = cell_step(v, context.row(t).transpose(), hstate, r, zt, nn);

  PredictiveTrajectory out;
  out.mu.resize(horizon, n);
  out.sigma.resize(horizon, n);
  for (Eigen::Index k = 0; k < horizon; ++k) {
    Eigen::VectorXd o = v.w_out * hstate + v.b_out;
    for (Eigen::Index j = 0; j < n; ++j) {
      out.mu(k, j) = o(j);
      out.sigma(k, j) = softplus(o(n + j)) + model.config.min_sigma;
    }
    if (k + 1 < horizon)
      hstate = cell_step(v, out.mu.row(k).transpose(), hstate, r, zt, nn);
  }
  return out;
}

double gradient_check(const ForecasterConfig& config, const MultivariateSeries& probe,
                      double step, const std::optional<Eigen::VectorXd>& params_override) {
  config.validate();
  if (!(step > 0.0)) throw UsageError("finite-difference step must be > 0");
  Eigen::Index n = probe.n_vars();
  Eigen::Index h = config.resolved_hidden(n);
  Eigen::Index need = config.context + config.horizon;
  if (probe.length() < need)
    throw UsageError("probe series shorter than context + horizon");
  Eigen::MatrixXd rows = probe.values.topRows(need);

  Eigen::VectorXd theta =
      params_override ? *params_override : init_params(n, h, config.seed);
  if (theta.size() != gru_param_count(n, h))
    throw UsageError("parameter override has the wrong size for this configuration");

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.size());
  window_pass(theta.data(), n, h, config.context, config.min_sigma, rows, grad.data());

  double worst = 0.0;
  Eigen::VectorXd probe_theta = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    probe_theta(i) = theta(i) + step;
    double lp = window_pass(probe_theta.data(), n, h, config.context,
                            config.min_sigma, rows, nullptr);
    probe_theta(i) = theta(i) - step;
    double lm = window_pass(probe_theta.data(), n, h, config.context,
                            config.min_sigma, rows, nullptr);
    probe_theta(i) = theta(i);
    double fd = (lp - lm) / (2.0 * step);
    double rel =
        std::abs(grad(i) - fd) / std::max({1.0, std::abs(grad(i)), std::abs(fd)});
    worst = std::max(worst, rel);
  }
  return worst;
}

std::string forecaster_to_json(const TrainedForecaster& model) {
  nlohmann::json j;
  j["schema"] = "gcause-forecaster/1";
  j["n_vars"] = model.n_vars;
  j["config"] = {{"context", model.config.context},
                 {"horizon", model.config.horizon},
                 {"hidden", model.config.hidden},
                 {"epochs", model.config.epochs},
                 {"learning_rate", model.config.learning_rate},
                 {"clip_norm", model.config.clip_norm},
                 {"min_sigma", model.config.min_sigma},
                 {"seed", model.config.seed}};
  j["params"] = std::vector<double>(model.params.begin(), model.params.end());
  j["loss_trace"] = model.loss_trace;
  return j.dump() + "\n";
}

TrainedForecaster forecaster_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("forecaster JSON is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("schema").get<std::string>() != "gcause-forecaster/1")
      throw UsageError("unsupported forecaster schema tag");
    TrainedForecaster model;
    model.n_vars = j.at("n_vars").get<Eigen::Index>();
    const auto& c = j.at("config");
    model.config.context = c.at("context").get<Eigen::Index>();
    model.config.horizon = c.at("horizon").get<Eigen::Index>();
    model.config.hidden = c.at("hidden").get<Eigen::Index>();
    model.config.epochs = c.at("epochs").get<int>();
    model.config.learning_rate = c.at("learning_rate").get<double>();
    model.config.clip_norm = c.at("clip_norm").get<double>();
    model.config.min_sigma = c.at("min_sigma").get<double>();
    model.config.seed = c.at("seed").get<std::uint64_t>();
    model.config.validate();
    auto params = j.at("params").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(params.size()) !=
        gru_param_count(model.n_vars, model.config.hidden))
      throw UsageError("forecaster JSON parameter count does not match its shape");
    model.params = Eigen::Map<Eigen::VectorXd>(params.data(),
                                               static_cast<Eigen::Index>(params.size()));
    model.loss_trace = j.at("loss_trace").get<std::vector<double>>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("forecaster JSON is missing or mistypes a field: ") +
                     e.what());
  }
}

std::string loss_trace_csv(const TrainedForecaster& model) {
  std::string out = "epoch,loss\n";
  char buf[64];
  for (size_t i = 0; i < model.loss_trace.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, model.loss_trace[i]);
    out += buf;
  }
  return out;
}

}  // namespace gcause
