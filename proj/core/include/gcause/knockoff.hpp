#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gcause/rng.hpp"
#include "gcause/series.hpp"

namespace gcause {

enum class SolveMethod { Equicorrelated, SdpCoordinate };

std::string to_string(SolveMethod method);
SolveMethod solve_method_from_string(const std::string& s);

/// Second-order Gaussian knockoff model: given mu and a positive-definite
/// sigma, a knockoff row for an observed row z is drawn from
///   N(z - diag(s~) Sigma^-1 (z - mu),  2 diag(s~) - diag(s~) Sigma^-1 diag(s~))
/// where s is solved on the correlation scale and s~_j = s_j * Sigma_jj.
/// The shift form of the mean (rather than mu + (Sigma - diag(s~)) Sigma^-1
/// (z - mu), which it equals algebraically) makes the degenerate s = 0
/// limit reproduce z bit for bit.
struct KnockoffModel {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;        // shrunk covariance, symmetric positive definite
  Eigen::VectorXd s;            // decorrelation weights, correlation scale, in [0,1]
  Eigen::VectorXd s_tilde;      // s rescaled to covariance scale
  Eigen::MatrixXd cond_mean_mat;    // (Sigma - diag(s~)) Sigma^-1
  Eigen::MatrixXd mean_shift_mat;   // diag(s~) Sigma^-1 = I - cond_mean_mat
  Eigen::MatrixXd cond_cov_factor;  // F with F F^T = conditional covariance
  double shrinkage = 0.0;           // lambda actually applied

  Eigen::Index n_vars() const { return mu.size(); }
};

struct KnockoffDiagnostics {
  double knockoff_corr_dev;  // max |corr(K)_jk - corr(Z)_jk|
  double cross_corr_dev;     // max off-diagonal |corr(Z_j, K_k) - corr(Z)_jk|
  std::vector<double> self_corr;  // corr(Z_j, K_j) per variable
};

/// Decorrelation weights for a correlation matrix.
///
/// Equicorrelated: s_j = min(2 lambda_min, 1).
/// SdpCoordinate: cyclic coordinate ascent on sum(s) subject to
/// 0 <= s_j <= 1 and 2 sigma_corr - diag(s) >= 0 (feasibility = Cholesky
/// with 1e-10 jitter); bisection per coordinate, stopping when the largest
/// per-sweep change drops below 1e-6 or after 100 sweeps. The ascent runs
/// from several interior multiples of the equicorrelated point (which
/// itself sits on the PSD boundary and would pin the ascent); the best
/// feasible candidate is kept only if it dominates equicorrelated in sum.
Eigen::VectorXd solve_s(const Eigen::MatrixXd& sigma_corr, SolveMethod method);

/// Fits mu and Sigma = (1-lambda) S + lambda diag(S) from the rows of the
/// series, then precomputes the conditional sampling matrices. A missing
/// shrinkage picks the smallest lambda in {0, 0.01, 0.05, 0.1, 0.2} whose
/// shrunk covariance has smallest eigenvalue >= 1e-6.
KnockoffModel fit_gaussian(const MultivariateSeries& series,
                           std::optional<double> shrinkage = std::nullopt,
                           SolveMethod method = SolveMethod::SdpCoordinate);

/// Draws one knockoff row per input row, i.i.d. across rows, consuming
/// N normals per row from `rng` in row-major order.
Eigen::MatrixXd sample_knockoff_matrix(const KnockoffModel& model,
                                       const Eigen::MatrixXd& rows, Rng& rng);

/// Seeded wrapper over sample_knockoff_matrix for whole-series use.
MultivariateSeries sample_knockoffs(const KnockoffModel& model,
                                    const MultivariateSeries& series,
                                    std::uint64_t seed);

/// Exchangeability diagnostics from sample correlations: how closely the
/// knockoff-knockoff correlations track the originals, how closely the
/// off-diagonal cross-correlations track them, and the per-variable
/// self correlation corr(Z_j, K_j) (which should sit near 1 - s_j on
/// standardized data).
KnockoffDiagnostics diagnostics(const MultivariateSeries& originals,
                                const MultivariateSeries& knockoffs);

std::string diagnostics_to_json(const KnockoffDiagnostics& diag);

}  // namespace gcause
