#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "liqsurf/errors.hpp"

namespace liqsurf::tsmodel {

enum class MeanModel { Ar1, Ar2, Ar3, Arma11 };
enum class VolModel {
  Constant,
  Arch1,
  Garch11,
  Gjr111,
  Tarch111,
  Egarch101,
  Egarch111,
};
enum class Innovation { Normal, StudentT, SkewT, Ged };

std::string to_string(MeanModel m);
std::string to_string(VolModel v);
std::string to_string(Innovation d);
MeanModel mean_model_from_string(const std::string& name);
VolModel vol_model_from_string(const std::string& name);
Innovation innovation_from_string(const std::string& name);

struct ModelSpec {
  MeanModel mean = MeanModel::Ar1;
  VolModel vol = VolModel::Constant;
  Innovation dist = Innovation::Normal;
};

struct MeanParams {
  Eigen::VectorXd phi;  // AR coefficients, no intercept
  double theta = 0.0;   // MA(1) coefficient (ARMA(1,1) only)
};

struct VolParams {
  double omega = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  // E|Z| under the fitted innovation law; enters the EGARCH recursions only.
  double kappa = 0.0;
};

struct DistParams {
  double nu = 0.0;      // Student-t / skew-t tail parameter, > 2
  double lambda = 0.0;  // skew-t asymmetry, in (-1, 1)
  double shape = 0.0;   // exponential-power shape, restricted > 2
};

struct TsFit {
  ModelSpec spec;
  MeanParams mean_params;
  VolParams vol_params;
  DistParams dist_params;
  double loglik = 0.0;
  double bic = 0.0;
  int n_params = 0;
  int n_obs = 0;  // conditional-likelihood observation count
  bool converged = false;
  // alpha + beta < 1 (variance recursions); always true for models without
  // the pair.
  bool covariance_stationary = true;
};

struct AcfResult {
  Eigen::VectorXd values;  // lags 0..max_lag, lag 0 exactly 1
  double band = 0.0;       // 1.96/sqrt(T) pointwise 95% cutoff
};

AcfResult acf(const Eigen::VectorXd& series, int max_lag);

// ACF of the squared residuals of a no-intercept AR(1) fit.
AcfResult acf_squared_ar1_residuals(const Eigen::VectorXd& series, int max_lag);

struct AdfResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int lags = 0;
};

// Augmented Dickey-Fuller test with constant and linear trend; lag order by
// AIC up to floor(12*(T/100)^(1/4)); p-value from the published
// response-surface approximation for the constant+trend case.
AdfResult adf_test(const Eigen::VectorXd& series);

struct Ar1Fit {
  double phi = 0.0;
  Eigen::VectorXd residuals;  // length T-1
};

// Least-squares phi for y_t = phi * y_{t-1} + e_t, no intercept.
Ar1Fit fit_ar1(const Eigen::VectorXd& series);

// tau = -1/ln|phi| in sampling intervals; 0 when phi = 0 (instant
// reversion, by convention); +infinity when |phi| >= 1.
double mean_reversion_time(double phi);

// Conditional sigma^2 path: sigma2[0] is the given initialization (except
// the constant model, which is omega everywhere) and later entries follow
// the model recursion on (eps[i-1], sigma[i-1]). EGARCH recursions read
// params.kappa = E|Z|.
Eigen::VectorXd volatility_filter(VolModel model, const VolParams& params,
                                  const Eigen::VectorXd& residuals,
                                  double sigma0_sq);

// Log density of the unit-variance standardization of each innovation
// family at z.
double log_density(Innovation dist, const DistParams& params, double z);

// kappa = E|Z| under the innovation law: closed forms for normal, Student-t
// and the exponential-power family; adaptive-free tan-substitution
// Gauss-Legendre quadrature for the skewed Student-t.
double mean_abs_innovation(Innovation dist, const DistParams& params);

double bic(double loglik, int d, int n_obs);

// Joint conditional MLE of mean, volatility and distribution parameters.
// Constraints are enforced by smooth reparameterization; up to five
// randomized restarts; the convergence flag reports the optimizer's own
// criterion, and the returned point never falls below the initialization.
TsFit fit_mle(const Eigen::VectorXd& series, const ModelSpec& spec,
              std::uint64_t seed = 0);

struct SweepRow {
  ModelSpec spec;
  TsFit fit;
  double delta_bic = 0.0;
  std::string label;
  bool is_best = false;
};

// Fits every mean x vol x dist combination, ranks by BIC (non-converged
// fits excluded from the argmin), and attaches evidence labels for the
// BIC gaps: (0,2) "not worth a bare mention", [2,6) "positive",
// [6,10) "strong", [10,inf) "very strong"; the minimum row gets an em dash.
std::vector<SweepRow> bic_sweep(const Eigen::VectorXd& series,
                                const std::vector<MeanModel>& means,
                                const std::vector<VolModel>& vols,
                                const std::vector<Innovation>& dists,
                                std::uint64_t seed = 0, int threads = 0);

std::string evidence_label(double delta_bic);

// Zero-mean GARCH(1,1) fit with Gaussian innovations, for per-factor
// residual margins of the joint score model.
VolParams fit_garch11_normal_residuals(const Eigen::VectorXd& residuals,
                                       std::uint64_t seed = 0);

// Residuals of the mean model at the given parameters, conditioning on the
// first p observations (ARMA(1,1) starts its MA recursion at zero).
Eigen::VectorXd mean_residuals(MeanModel model, const MeanParams& params,
                               const Eigen::VectorXd& series);

int mean_order(MeanModel model);
int param_count(const ModelSpec& spec);

}  // namespace liqsurf::tsmodel
