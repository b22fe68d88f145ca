#include "gcause/knockoff.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "gcause/errors.hpp"
#include "json_detail.hpp"

namespace gcause {

std::string to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::Equicorrelated: return "equicorrelated";
    case SolveMethod::SdpCoordinate: return "sdp_coordinate";
  }
  throw ComputeError("invalid SolveMethod value");
}

SolveMethod solve_method_from_string(const std::string& s) {
  if (s == "equicorrelated") return SolveMethod::Equicorrelated;
  if (s == "sdp_coordinate") return SolveMethod::SdpCoordinate;
  throw UsageError("unknown s-solver '" + s +
                   "' (expected equicorrelated or sdp_coordinate)");
}

namespace {

constexpr double kJitter = 1e-10;
constexpr double kMinEigen = 1e-6;

bool psd_feasible(const Eigen::MatrixXd& sigma_corr, const Eigen::VectorXd& s) {
  Eigen::MatrixXd m = 2.0 * sigma_corr;
  m.diagonal() -= s;
  m.diagonal().array() += kJitter;
  return Eigen::LLT<Eigen::MatrixXd>(m).info() == Eigen::Success;
}

Eigen::VectorXd equicorrelated_s(const Eigen::MatrixXd& sigma_corr) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma_corr,
                                                     Eigen::EigenvaluesOnly);
  double lo = eig.eigenvalues().minCoeff();
  double s = std::clamp(2.0 * lo, 0.0, 1.0);
  return Eigen::VectorXd::Constant(sigma_corr.rows(), s);
}

Eigen::VectorXd coordinate_ascent(const Eigen::MatrixXd& sigma_corr,
                                  Eigen::VectorXd s) {
  Eigen::Index n = s.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      double before = s(j);  // current point is feasible by construction
      double lo = before, hi = 1.0;
      s(j) = hi;
      if (!psd_feasible(sigma_corr, s)) {
        // Feasibility is monotone in s_j, so bisect the boundary.
        for (int it = 0; it < 60 && hi - lo > 1e-9; ++it) {
          double mid = 0.5 * (lo + hi);
          s(j) = mid;
          (psd_feasible(sigma_corr, s) ? lo : hi) = mid;
        }
        s(j) = lo;
      }
      max_change = std::max(max_change, std::abs(s(j) - before));
    }
    if (max_change < 1e-6) break;
  }
  return s;
}

Eigen::VectorXd sdp_coordinate_s(const Eigen::MatrixXd& sigma_corr) {
  Eigen::VectorXd equi = equicorrelated_s(sigma_corr);

  // The equicorrelated point lies exactly on the PSD boundary (2*sigma -
  // diag(s) is singular there), and the binding eigenvector generically
  // touches every coordinate, so an ascent started *at* that vertex cannot
  // move. Ascend from a few strictly interior points instead and keep the
  // best feasible result; with heterogeneous correlations this frees the
  // weakly correlated coordinates that the global lambda_min needlessly pins.
  Eigen::VectorXd best = equi;
  for (double gamma : {0.0, 0.25, 0.5, 0.75}) {
    Eigen::VectorXd start = gamma * equi;
    if (!psd_feasible(sigma_corr, start)) continue;
    Eigen::VectorXd s = coordinate_ascent(sigma_corr, start);
    if (s.sum() > best.sum() + 1e-12 && psd_feasible(sigma_corr, s)) best = s;
  }
  // Candidates must dominate the closed-form answer or we keep it.
  return best;
}

}  // namespace

Eigen::VectorXd solve_s(const Eigen::MatrixXd& sigma_corr, SolveMethod method) {
  if (sigma_corr.rows() != sigma_corr.cols())
    throw UsageError("correlation matrix must be square");
  if (!sigma_corr.isApprox(sigma_corr.transpose(), 1e-10))
    throw UsageError("correlation matrix must be symmetric");
  if ((sigma_corr.diagonal().array() - 1.0).abs().maxCoeff() > 1e-10)
    throw UsageError("correlation matrix must have unit diagonal");

  switch (method) {
    case SolveMethod::Equicorrelated: return equicorrelated_s(sigma_corr);
    case SolveMethod::SdpCoordinate: return sdp_coordinate_s(sigma_corr);
  }
  throw ComputeError("invalid SolveMethod value");
}

namespace {

// F with F F^T = A for symmetric PSD A. Cholesky when A is comfortably
// positive definite; otherwise an eigendecomposition with clamped
// spectrum, which also maps the all-zero matrix (the s = 0 limit) to an
// exactly zero factor.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& a) {
  if (a.isZero(0.0)) return Eigen::MatrixXd::Zero(a.rows(), a.cols());
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success)
    return Eigen::MatrixXd(llt.matrixL());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  if (eig.info() != Eigen::Success)
    throw ComputeError("eigendecomposition of the conditional covariance failed");
  Eigen::VectorXd ev = eig.eigenvalues();
  double scale = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
  if (ev.minCoeff() < -1e-8 * scale)
    throw ComputeError("conditional knockoff covariance is not positive semidefinite");
  ev = ev.cwiseMax(0.0);
  return eig.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

}  // namespace

KnockoffModel fit_gaussian(const MultivariateSeries& series,
                           std::optional<double> shrinkage, SolveMethod method) {
  const Eigen::MatrixXd& z = series.values;
  Eigen::Index t = z.rows(), n = z.cols();
  if (t < 2) throw UsageError("knockoff fit needs at least 2 rows");
  if (shrinkage && (*shrinkage < 0.0 || *shrinkage > 1.0))
    throw UsageError("shrinkage must lie in [0, 1]");

  KnockoffModel model;
  model.mu = z.colwise().mean();
  Eigen::MatrixXd centered = z.rowwise() - model.mu.transpose();
  Eigen::MatrixXd sample_cov =
      centered.transpose() * centered / static_cast<double>(t - 1);
  sample_cov = 0.5 * (sample_cov + sample_cov.transpose());

  auto shrink = [&](double lam) {
    Eigen::MatrixXd m = (1.0 - lam) * sample_cov;
    m.diagonal() += lam * sample_cov.diagonal();
    return m;
  };
  auto min_eig = [](const Eigen::MatrixXd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly)
        .eigenvalues()
        .minCoeff();
  };

  if (shrinkage) {
    model.shrinkage = *shrinkage;
    model.sigma = shrink(*shrinkage);
    if (min_eig(model.sigma) < kMinEigen)
      throw ComputeError(
          "covariance is singular or near-singular at the requested shrinkage; "
          "increase shrinkage or drop duplicated variables");
  } else {
    bool found = false;
    for (double lam : {0.0, 0.01, 0.05, 0.1, 0.2}) {
      Eigen::MatrixXd m = shrink(lam);
      if (min_eig(m) >= kMinEigen) {
        model.shrinkage = lam;
        model.sigma = std::move(m);
        found = true;
        break;
      }
    }
    if (!found)
      throw ComputeError(
          "covariance stays near-singular over the whole shrinkage grid; "
          "the data likely contains (almost) duplicated variables");
  }

  Eigen::VectorXd sd = model.sigma.diagonal().cwiseSqrt();
  Eigen::MatrixXd corr =
      sd.cwiseInverse().asDiagonal() * model.sigma * sd.cwiseInverse().asDiagonal();
  corr = 0.5 * (corr + corr.transpose());
  corr.diagonal().setOnes();

  model.s = solve_s(corr, method);
  model.s_tilde = model.s.cwiseProduct(model.sigma.diagonal());

  Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
  if (llt.info() != Eigen::Success)
    throw ComputeError("Cholesky of the shrunk covariance failed unexpectedly");
  Eigen::MatrixXd sigma_inv =
      llt.solve(Eigen::MatrixXd::Identity(n, n));
  model.mean_shift_mat = model.s_tilde.asDiagonal() * sigma_inv;
  model.cond_mean_mat =
      Eigen::MatrixXd::Identity(n, n) - model.mean_shift_mat;

  Eigen::MatrixXd cond_cov = -model.mean_shift_mat * model.s_tilde.asDiagonal();
  cond_cov.diagonal() += 2.0 * model.s_tilde;
  cond_cov = 0.5 * (cond_cov + cond_cov.transpose());
  model.cond_cov_factor = psd_factor(cond_cov);
  return model;
}

Eigen::MatrixXd sample_knockoff_matrix(const KnockoffModel& model,
                                       const Eigen::MatrixXd& rows, Rng& rng) {
  Eigen::Index n = model.n_vars();
  if (rows.cols() != n)
    throw UsageError("row width does not match the knockoff model dimension");

  Eigen::MatrixXd out(rows.rows(), n);
  Eigen::VectorXd xi(n);
  for (Eigen::Index t = 0; t < rows.rows(); ++t) {
    for (Eigen::Index j = 0; j < n; ++j) xi(j) = rng.normal();
    out.row(t) = rows.row(t) -
                 (model.mean_shift_mat *
                  (rows.row(t).transpose() - model.mu))
                     .transpose() +
                 (model.cond_cov_factor * xi).transpose();
  }
  return out;
}

MultivariateSeries sample_knockoffs(const KnockoffModel& model,
                                    const MultivariateSeries& series,
                                    std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x6b6e6f63));  // "knoc" substream
  Eigen::MatrixXd rows = sample_knockoff_matrix(model, series.values, rng);
  std::vector<std::string> names;
  names.reserve(series.names.size());
  for (const std::string& name : series.names) names.push_back(name + "_ko");
  return MultivariateSeries::make(std::move(rows), std::move(names), series.dt);
}

namespace {

Eigen::MatrixXd column_corr(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::RowVectorXd mean_a = a.colwise().mean();
  Eigen::RowVectorXd mean_b = b.colwise().mean();
  Eigen::MatrixXd ca = a.rowwise() - mean_a;
  Eigen::MatrixXd cb = b.rowwise() - mean_b;
  Eigen::VectorXd sd_a = (ca.array().square().colwise().mean()).sqrt();
  Eigen::VectorXd sd_b = (cb.array().square().colwise().mean()).sqrt();
  if (sd_a.minCoeff() < 1e-15 || sd_b.minCoeff() < 1e-15)
    throw ComputeError("correlation undefined: a column is constant");
  Eigen::MatrixXd cov = ca.transpose() * cb / static_cast<double>(a.rows());
  return sd_a.cwiseInverse().asDiagonal() * cov * sd_b.cwiseInverse().asDiagonal();
}

}  // namespace

KnockoffDiagnostics diagnostics(const MultivariateSeries& originals,
                                const MultivariateSeries& knockoffs) {
  if (originals.values.rows() != knockoffs.values.rows() ||
      originals.values.cols() != knockoffs.values.cols())
    throw UsageError("originals and knockoffs must have the same shape");

  Eigen::MatrixXd corr_zz = column_corr(originals.values, originals.values);
  Eigen::MatrixXd corr_kk = column_corr(knockoffs.values, knockoffs.values);
  Eigen::MatrixXd corr_zk = column_corr(originals.values, knockoffs.values);

  KnockoffDiagnostics diag;
  diag.knockoff_corr_dev = (corr_kk - corr_zz).cwiseAbs().maxCoeff();
  double dev = 0.0;
  for (Eigen::Index i = 0; i < corr_zk.rows(); ++i)
    for (Eigen::Index j = 0; j < corr_zk.cols(); ++j)
      if (i != j) dev = std::max(dev, std::abs(corr_zk(i, j) - corr_zz(i, j)));
  diag.cross_corr_dev = dev;
  diag.self_corr.assign(corr_zk.diagonal().begin(), corr_zk.diagonal().end());
  return diag;
}

namespace detail {

nlohmann::json diagnostics_json(const KnockoffDiagnostics& diag) {
  return {{"knockoff_corr_dev", diag.knockoff_corr_dev},
          {"cross_corr_dev", diag.cross_corr_dev},
          {"self_corr", diag.self_corr}};
}

}  // namespace detail

std::string diagnostics_to_json(const KnockoffDiagnostics& diag) {
  return detail::diagnostics_json(diag).dump(2) + "\n";
}

}  // namespace gcause
