#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

#include "liqsurf/errors.hpp"
#include "liqsurf/ingest.hpp"

namespace liqsurf::pipeline {

struct RollingConfig {
  int window_T = 400;
  int step = 10;
  std::vector<int> k_set = {3, 4, 5, 6, 7};
};

struct WindowDecomposition {
  int start_row = 0;
  std::int64_t start_block = 0;
  Eigen::VectorXd eigenvalues;       // full spectrum, descending
  Eigen::MatrixXd basis;             // M x max(k_set) leading eigenvectors
  Eigen::VectorXd mean_row;          // window column means
  std::map<int, double> cpve;        // K -> cumulative share, K in k_set
};

// One independently centered decomposition per window start
// 0, step, 2*step, ... while start + window_T <= rows.
std::vector<WindowDecomposition> rolling_decompose(
    const ingest::SurfaceGrid& surface, const RollingConfig& config);

struct DriftSeries {
  std::vector<std::int64_t> window_starts;
  std::vector<int> k_values;
  Eigen::MatrixXd d_to_inception;  // windows x |k_values|
  Eigen::MatrixXd d_to_legendre;   // windows x |k_values|
  std::vector<double> baselines;   // K (1 - K/M) per K
};

// Subspace drift of each window basis relative to the first window and to
// the orthonormal polynomial basis. The inception window is compared with
// itself and reports exactly zero.
DriftSeries drift_series(const std::vector<WindowDecomposition>& windows,
                         const Eigen::MatrixXd& reference_basis,
                         const std::vector<int>& k_set);

// baseline = mean_row + basis * scores; shocked adds amount to component k
// (1-based). The difference curve is amount times the k-th basis column.
std::pair<Eigen::VectorXd, Eigen::VectorXd> shock_cross_section(
    const Eigen::VectorXd& scores_row, const Eigen::MatrixXd& basis,
    const Eigen::VectorXd& mean_row, int k, double amount);

// Linear point forecast: component k decays as phi_k^h from its current
// score; the curve is mean_row + basis * forecast.
Eigen::VectorXd forecast_curve(const std::vector<double>& phis,
                               const Eigen::VectorXd& current_scores,
                               const Eigen::MatrixXd& basis,
                               const Eigen::VectorXd& mean_row, int h);

struct VarGarchParams {
  Eigen::VectorXd a;      // VAR(1) intercept
  Eigen::MatrixXd A;      // VAR(1) transition
  Eigen::VectorXd omega;  // per-factor GARCH(1,1)
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  Eigen::MatrixXd R;      // shock correlation, positive definite
  double nu = 8.0;        // multivariate-t degrees of freedom, > 2
};

struct VarGarchState {
  Eigen::VectorXd scores;     // beta_t
  Eigen::VectorXd sigma2;     // current conditional variances
  Eigen::VectorXd residuals;  // eps_t entering the next variance update
};

struct VarGarchEnsemble {
  int horizon = 0;
  std::vector<Eigen::MatrixXd> scores;  // per h = 1..horizon: n_paths x K
  double spectral_radius = 0.0;         // of A
};

// Scores follow beta_{t+1} = a + A beta_t + eps with eps conditionally
// multivariate-t of covariance H = D R D, D the diagonal of per-factor
// GARCH(1,1) standard deviations. Path p uses a generator seeded from
// (seed, p), so ensembles are reproducible and independent of threading.
VarGarchEnsemble simulate_var_garch(const VarGarchParams& params,
                                    const VarGarchState& state, int horizon,
                                    int n_paths, std::uint64_t seed,
                                    int threads = 0);

// Linear-interpolation sample quantile on order statistics
// (h = (n-1) p convention).
double quantile_type7(Eigen::VectorXd values, double p);

struct EstimatedVarGarch {
  VarGarchParams params;
  VarGarchState state;  // state after the last observed row
};

// Two-step estimation on an observed score panel: least-squares VAR(1),
// then per-factor GARCH(1,1) margins on the residual columns, then the
// sample correlation of the standardized residuals, then the t degrees of
// freedom by an integer-grid profile likelihood on those standardized
// residuals.
EstimatedVarGarch estimate_var_garch(const Eigen::MatrixXd& scores,
                                     std::uint64_t seed = 0);

struct CurveQuantiles {
  std::vector<int> horizons;
  Eigen::MatrixXd q05, q25, q50, q75, q95;  // horizon x M
};

// Reconstructs every path into a curve and reduces to per-(h, x) quantiles.
CurveQuantiles curve_quantiles(const VarGarchEnsemble& ensemble,
                               const Eigen::MatrixXd& basis,
                               const Eigen::VectorXd& mean_row);

}  // namespace liqsurf::pipeline
