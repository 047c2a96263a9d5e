#include "liqsurf/tsmodel.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "liqsurf/rng.hpp"

namespace liqsurf::tsmodel {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace

std::string to_string(MeanModel m) {
  switch (m) {
    case MeanModel::Ar1: return "ar1";
    case MeanModel::Ar2: return "ar2";
    case MeanModel::Ar3: return "ar3";
    case MeanModel::Arma11: return "arma11";
  }
  return "?";
}

std::string to_string(VolModel v) {
  switch (v) {
    case VolModel::Constant: return "const";
    case VolModel::Arch1: return "arch1";
    case VolModel::Garch11: return "garch11";
    case VolModel::Gjr111: return "gjr111";
    case VolModel::Tarch111: return "tarch111";
    case VolModel::Egarch101: return "egarch101";
    case VolModel::Egarch111: return "egarch111";
  }
  return "?";
}

std::string to_string(Innovation d) {
  switch (d) {
    case Innovation::Normal: return "normal";
    case Innovation::StudentT: return "t";
    case Innovation::SkewT: return "skewt";
    case Innovation::Ged: return "ged";
  }
  return "?";
}

MeanModel mean_model_from_string(const std::string& name) {
  if (name == "ar1") return MeanModel::Ar1;
  if (name == "ar2") return MeanModel::Ar2;
  if (name == "ar3") return MeanModel::Ar3;
  if (name == "arma11") return MeanModel::Arma11;
  throw validation_error("unknown mean model: " + name);
}

VolModel vol_model_from_string(const std::string& name) {
  if (name == "const") return VolModel::Constant;
  if (name == "arch1") return VolModel::Arch1;
  if (name == "garch11") return VolModel::Garch11;
  if (name == "gjr111") return VolModel::Gjr111;
  if (name == "tarch111") return VolModel::Tarch111;
  if (name == "egarch101") return VolModel::Egarch101;
  if (name == "egarch111") return VolModel::Egarch111;
  throw validation_error("unknown volatility model: " + name);
}

Innovation innovation_from_string(const std::string& name) {
  if (name == "normal") return Innovation::Normal;
  if (name == "t") return Innovation::StudentT;
  if (name == "skewt") return Innovation::SkewT;
  if (name == "ged") return Innovation::Ged;
  throw validation_error("unknown innovation family: " + name);
}

int mean_order(MeanModel model) {
  switch (model) {
    case MeanModel::Ar1: return 1;
    case MeanModel::Ar2: return 2;
    case MeanModel::Ar3: return 3;
    case MeanModel::Arma11: return 1;
  }
  return 0;
}

namespace {

int mean_param_count(MeanModel m) {
  return m == MeanModel::Arma11 ? 2 : mean_order(m);
}

int vol_param_count(VolModel v) {
  switch (v) {
    case VolModel::Constant: return 1;
    case VolModel::Arch1: return 2;
    case VolModel::Garch11: return 3;
    case VolModel::Gjr111: return 4;
    case VolModel::Tarch111: return 4;
    case VolModel::Egarch101: return 3;
    case VolModel::Egarch111: return 4;
  }
  return 0;
}

int dist_param_count(Innovation d) {
  switch (d) {
    case Innovation::Normal: return 0;
    case Innovation::StudentT: return 1;
    case Innovation::SkewT: return 2;
    case Innovation::Ged: return 1;
  }
  return 0;
}

bool is_egarch(VolModel v) {
  return v == VolModel::Egarch101 || v == VolModel::Egarch111;
}

}  // namespace

int param_count(const ModelSpec& spec) {
  return mean_param_count(spec.mean) + vol_param_count(spec.vol) +
         dist_param_count(spec.dist);
}

// ---------------------------------------------------------------------------
// Diagnostics: ACF, AR(1), ADF, mean reversion
// ---------------------------------------------------------------------------

AcfResult acf(const Eigen::VectorXd& series, int max_lag) {
  const Eigen::Index T = series.size();
  if (max_lag < 0 || T <= max_lag) {
    throw validation_error("acf needs T > max_lag >= 0");
  }
  const double mean = series.mean();
  const Eigen::VectorXd c = series.array() - mean;
  // Same summation order as the lag loop below, so values[0] is exactly 1.
  double denom = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) denom += c[t] * c[t];
  if (denom <= 0.0) {
    throw validation_error("acf is undefined for a constant series");
  }
  AcfResult out;
  out.values.resize(max_lag + 1);
  out.band = 1.96 / std::sqrt(static_cast<double>(T));
  for (int k = 0; k <= max_lag; ++k) {
    double num = 0.0;
    for (Eigen::Index t = k; t < T; ++t) num += c[t] * c[t - k];
    out.values[k] = num / denom;
  }
  return out;
}

Ar1Fit fit_ar1(const Eigen::VectorXd& series) {
  const Eigen::Index T = series.size();
  if (T < 3) {
    throw validation_error("AR(1) fit needs at least 3 observations");
  }
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index t = 1; t < T; ++t) {
    num += series[t] * series[t - 1];
    den += series[t - 1] * series[t - 1];
  }
  if (den <= 0.0) {
    throw validation_error("AR(1) regressor has zero variance");
  }
  Ar1Fit out;
  out.phi = num / den;
  out.residuals.resize(T - 1);
  for (Eigen::Index t = 1; t < T; ++t) {
    out.residuals[t - 1] = series[t] - out.phi * series[t - 1];
  }
  return out;
}

AcfResult acf_squared_ar1_residuals(const Eigen::VectorXd& series,
                                    int max_lag) {
  const Ar1Fit fit = fit_ar1(series);
  return acf(fit.residuals.array().square().matrix(), max_lag);
}

double mean_reversion_time(double phi) {
  if (phi == 0.0) return 0.0;
  const double a = std::abs(phi);
  if (a >= 1.0) return std::numeric_limits<double>::infinity();
  return -1.0 / std::log(a);
}

namespace {

struct OlsResult {
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  double ssr = 0.0;
  Eigen::Index n = 0;
};

OlsResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  OlsResult out;
  out.n = X.rows();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) {
    throw validation_error("regression design matrix is rank deficient");
  }
  out.coef = qr.solve(y);
  const Eigen::VectorXd resid = y - X * out.coef;
  out.ssr = resid.squaredNorm();
  const double dof = static_cast<double>(out.n - X.cols());
  const double s2 = out.ssr / dof;
  const Eigen::MatrixXd xtx_inv =
      (X.transpose() * X).ldlt().solve(
          Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  out.se = (s2 * xtx_inv.diagonal().array()).sqrt();
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Response-surface p-value approximation for the Dickey-Fuller distribution
// with constant and linear trend: p = Phi(poly(tau)), quadratic branch for
// the small-p region, cubic for the large-p region, with the published
// clamp and switch points.
double adf_pvalue_const_trend(double tau) {
  constexpr double kTauMax = 0.7;
  constexpr double kTauMin = -16.18;
  constexpr double kTauStar = -2.89;
  if (tau > kTauMax) return 1.0;
  if (tau < kTauMin) return 0.0;
  double poly;
  if (tau <= kTauStar) {
    poly = 3.2512 + tau * (1.6047 + tau * 0.049588);
  } else {
    poly = 2.5261 + tau * (0.61654 + tau * (-0.37956 + tau * -0.060285));
  }
  return normal_cdf(poly);
}

Eigen::MatrixXd adf_design(const Eigen::VectorXd& y, int p, Eigen::Index first,
                           Eigen::Index last) {
  // Rows are differences indices i in [first, last]; regressors: constant,
  // linear trend, lagged level, p lagged differences.
  const Eigen::Index n = last - first + 1;
  Eigen::MatrixXd X(n, 3 + p);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index i = first + r;
    X(r, 0) = 1.0;
    X(r, 1) = static_cast<double>(r + 1);
    X(r, 2) = y[i];
    for (int j = 1; j <= p; ++j) {
      X(r, 2 + j) = y[i - j + 1] - y[i - j];
    }
  }
  return X;
}

}  // namespace

AdfResult adf_test(const Eigen::VectorXd& series) {
  const Eigen::Index T = series.size();
  if (T < 25) {
    throw validation_error("unit-root test needs at least 25 observations");
  }
  if ((series.array() == series[0]).all()) {
    throw validation_error("unit-root test is undefined for a constant series");
  }
  int maxlag = static_cast<int>(
      std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
  maxlag = std::min<int>(maxlag, static_cast<int>((T - 1) / 2) - 4);
  maxlag = std::max(maxlag, 0);

  Eigen::VectorXd dy(T - 1);
  for (Eigen::Index i = 0; i + 1 < T; ++i) dy[i] = series[i + 1] - series[i];

  // Lag order by AIC on the common sample, then refit on the full sample.
  int best_p = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  const Eigen::Index sel_first = maxlag;
  const Eigen::Index sel_last = T - 2;
  for (int p = 0; p <= maxlag; ++p) {
    const Eigen::MatrixXd X = adf_design(series, p, sel_first, sel_last);
    const Eigen::VectorXd yy = dy.segment(sel_first, sel_last - sel_first + 1);
    OlsResult fit;
    try {
      fit = ols(X, yy);
    } catch (const validation_error&) {
      continue;
    }
    const double n = static_cast<double>(fit.n);
    const double aic = n * std::log(fit.ssr / n) + 2.0 * (3 + p);
    if (aic < best_aic) {
      best_aic = aic;
      best_p = p;
    }
  }
  if (!std::isfinite(best_aic)) {
    throw validation_error("unit-root regression is degenerate");
  }

  const Eigen::Index first = best_p;
  const Eigen::MatrixXd X = adf_design(series, best_p, first, T - 2);
  const Eigen::VectorXd yy = dy.segment(first, T - 1 - first);
  const OlsResult fit = ols(X, yy);

  AdfResult out;
  out.lags = best_p;
  out.statistic = fit.coef[2] / fit.se[2];
  out.p_value = adf_pvalue_const_trend(out.statistic);
  return out;
}

// ---------------------------------------------------------------------------
// Innovation densities (unit variance) and E|Z|
// ---------------------------------------------------------------------------

namespace {

// Gauss-Legendre nodes/weights on [-1,1], computed once by Newton iteration
// on the Legendre recurrence.
struct GaussLegendre {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    for (int i = 0; i < n; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 1; k < n; ++k) {
          const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      double p0 = 1.0, p1 = x;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendre& quadrature_rule() {
  static const GaussLegendre rule(256);
  return rule;
}

// Per-parameter-point context with the density constants hoisted out of the
// per-observation loop.
struct DensityContext {
  Innovation dist = Innovation::Normal;
  double c0 = 0.0;        // additive log-density constant
  double nu = 0.0;
  double inv_nu2 = 0.0;   // 1/(nu-2)
  double lambda = 0.0;
  double a = 0.0, b = 0.0;  // skew-t location/scale constants
  double shape = 0.0;
  double scale_g = 1.0;   // exponential-power scale for unit variance

  static DensityContext make(Innovation dist, const DistParams& p) {
    DensityContext ctx;
    ctx.dist = dist;
    switch (dist) {
      case Innovation::Normal:
        ctx.c0 = -0.5 * std::log(2.0 * kPi);
        break;
      case Innovation::StudentT: {
        if (!(p.nu > 2.0)) {
          throw validation_error("Student-t requires nu > 2");
        }
        ctx.nu = p.nu;
        ctx.inv_nu2 = 1.0 / (p.nu - 2.0);
        ctx.c0 = std::lgamma(0.5 * (p.nu + 1.0)) - std::lgamma(0.5 * p.nu) -
                 0.5 * std::log(kPi * (p.nu - 2.0));
        break;
      }
      case Innovation::SkewT: {
        if (!(p.nu > 2.0)) {
          throw validation_error("skew-t requires nu > 2");
        }
        if (!(std::abs(p.lambda) < 1.0)) {
          throw validation_error("skew-t requires |lambda| < 1");
        }
        ctx.nu = p.nu;
        ctx.inv_nu2 = 1.0 / (p.nu - 2.0);
        ctx.lambda = p.lambda;
        const double logc = std::lgamma(0.5 * (p.nu + 1.0)) -
                            std::lgamma(0.5 * p.nu) -
                            0.5 * std::log(kPi * (p.nu - 2.0));
        const double c = std::exp(logc);
        ctx.a = 4.0 * p.lambda * c * (p.nu - 2.0) / (p.nu - 1.0);
        const double b2 = 1.0 + 3.0 * p.lambda * p.lambda - ctx.a * ctx.a;
        if (!(b2 > 0.0)) {
          throw validation_error("skew-t parameters leave no positive scale");
        }
        ctx.b = std::sqrt(b2);
        ctx.c0 = std::log(ctx.b) + logc;
        break;
      }
      case Innovation::Ged: {
        if (!(p.shape > 2.0)) {
          throw validation_error(
              "exponential-power shape is restricted to > 2");
        }
        ctx.shape = p.shape;
        const double k = p.shape;
        ctx.scale_g = std::exp(-std::log(2.0) / k +
                               0.5 * (std::lgamma(1.0 / k) -
                                      std::lgamma(3.0 / k)));
        ctx.c0 = std::log(k) - std::log(ctx.scale_g) -
                 (1.0 + 1.0 / k) * std::log(2.0) - std::lgamma(1.0 / k);
        break;
      }
    }
    return ctx;
  }

  double logpdf(double z) const {
    switch (dist) {
      case Innovation::Normal:
        return c0 - 0.5 * z * z;
      case Innovation::StudentT:
        return c0 - 0.5 * (nu + 1.0) * std::log1p(z * z * inv_nu2);
      case Innovation::SkewT: {
        const double denom = z < -a / b ? 1.0 - lambda : 1.0 + lambda;
        const double w = (b * z + a) / denom;
        return c0 - 0.5 * (nu + 1.0) * std::log1p(w * w * inv_nu2);
      }
      case Innovation::Ged:
        return c0 - 0.5 * std::pow(std::abs(z / scale_g), shape);
    }
    return -std::numeric_limits<double>::infinity();
  }

  // E|Z|.
  double mean_abs() const {
    switch (dist) {
      case Innovation::Normal:
        return std::sqrt(2.0 / kPi);
      case Innovation::StudentT:
        return 2.0 * std::sqrt(nu - 2.0) / ((nu - 1.0) * std::sqrt(kPi)) *
               std::exp(std::lgamma(0.5 * (nu + 1.0)) -
                        std::lgamma(0.5 * nu));
      case Innovation::Ged:
        return scale_g * std::exp(std::log(2.0) / shape +
                                  std::lgamma(2.0 / shape) -
                                  std::lgamma(1.0 / shape));
      case Innovation::SkewT: {
        // Quadrature of integral |z| f(z) dz with z = tan(theta), which
        // maps the real line to (-pi/2, pi/2) without truncating the
        // polynomial tails. The integrand has kinks at z = 0 (the absolute
        // value) and z = -a/b (the density branch point), so the rule is
        // applied per smooth panel.
        const GaussLegendre& rule = quadrature_rule();
        double cuts[2] = {std::atan(-a / b), 0.0};
        if (cuts[0] > cuts[1]) std::swap(cuts[0], cuts[1]);
        const double edges[4] = {-0.5 * kPi, cuts[0], cuts[1], 0.5 * kPi};
        double total = 0.0;
        for (int panel = 0; panel < 3; ++panel) {
          const double lo = edges[panel], hi = edges[panel + 1];
          if (!(hi > lo)) continue;
          const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
          for (int i = 0; i < rule.nodes.size(); ++i) {
            const double theta = mid + half * rule.nodes[i];
            const double z = std::tan(theta);
            const double jac = half * (1.0 + z * z);
            total +=
                rule.weights[i] * std::abs(z) * std::exp(logpdf(z)) * jac;
          }
        }
        return total;
      }
    }
    return 0.0;
  }
};

}  // namespace

double log_density(Innovation dist, const DistParams& params, double z) {
  return DensityContext::make(dist, params).logpdf(z);
}

double mean_abs_innovation(Innovation dist, const DistParams& params) {
  return DensityContext::make(dist, params).mean_abs();
}

// ---------------------------------------------------------------------------
// Volatility recursions
// ---------------------------------------------------------------------------

namespace {

// Recursions without precondition checks; used inside the likelihood loop
// where the reparameterization already guarantees the constraint set. The
// log-variance state is clamped to keep exp() finite in the explosive
// regions the optimizer probes and immediately abandons.
void filter_unchecked(VolModel model, const VolParams& p,
                      const double* eps, Eigen::Index n, double sigma0_sq,
                      double* sigma2) {
  constexpr double kLogCap = 690.0;
  switch (model) {
    case VolModel::Constant: {
      for (Eigen::Index i = 0; i < n; ++i) sigma2[i] = p.omega;
      break;
    }
    case VolModel::Arch1: {
      sigma2[0] = sigma0_sq;
      for (Eigen::Index i = 1; i < n; ++i) {
        sigma2[i] = p.omega + p.alpha * eps[i - 1] * eps[i - 1];
      }
      break;
    }
    case VolModel::Garch11: {
      sigma2[0] = sigma0_sq;
      for (Eigen::Index i = 1; i < n; ++i) {
        sigma2[i] = p.omega + p.alpha * eps[i - 1] * eps[i - 1] +
                    p.beta * sigma2[i - 1];
      }
      break;
    }
    case VolModel::Gjr111: {
      sigma2[0] = sigma0_sq;
      for (Eigen::Index i = 1; i < n; ++i) {
        const double e2 = eps[i - 1] * eps[i - 1];
        const double lever = eps[i - 1] < 0.0 ? p.gamma * e2 : 0.0;
        sigma2[i] = p.omega + p.alpha * e2 + lever + p.beta * sigma2[i - 1];
      }
      break;
    }
    case VolModel::Tarch111: {
      double sd = std::sqrt(sigma0_sq);
      sigma2[0] = sigma0_sq;
      for (Eigen::Index i = 1; i < n; ++i) {
        const double ae = std::abs(eps[i - 1]);
        const double lever = eps[i - 1] < 0.0 ? p.gamma * ae : 0.0;
        sd = p.omega + p.alpha * ae + lever + p.beta * sd;
        sigma2[i] = sd * sd;
      }
      break;
    }
    case VolModel::Egarch101:
    case VolModel::Egarch111: {
      const bool leverage = model == VolModel::Egarch111;
      double ls = std::log(sigma0_sq);
      sigma2[0] = sigma0_sq;
      for (Eigen::Index i = 1; i < n; ++i) {
        const double e = eps[i - 1] / std::sqrt(sigma2[i - 1]);
        ls = p.omega + p.alpha * (std::abs(e) - p.kappa) + p.beta * ls;
        if (leverage) ls += p.gamma * e;
        ls = std::clamp(ls, -kLogCap, kLogCap);
        sigma2[i] = std::exp(ls);
      }
      break;
    }
  }
}

void validate_vol_params(VolModel model, const VolParams& p) {
  const auto fail = [&](const char* what) {
    throw validation_error(std::string("volatility parameters violate the ") +
                           to_string(model) + " constraint set: " + what);
  };
  switch (model) {
    case VolModel::Constant:
      if (!(p.omega > 0.0)) fail("omega must be positive");
      break;
    case VolModel::Arch1:
      if (!(p.omega > 0.0)) fail("omega must be positive");
      if (p.alpha < 0.0) fail("alpha must be nonnegative");
      break;
    case VolModel::Garch11:
      if (!(p.omega > 0.0)) fail("omega must be positive");
      if (p.alpha < 0.0 || p.beta < 0.0) fail("alpha, beta must be nonnegative");
      break;
    case VolModel::Gjr111:
    case VolModel::Tarch111:
      if (!(p.omega > 0.0)) fail("omega must be positive");
      if (p.alpha < 0.0) fail("alpha must be nonnegative");
      if (p.alpha + p.gamma < 0.0) fail("alpha + gamma must be nonnegative");
      if (p.beta < 0.0) fail("beta must be nonnegative");
      break;
    case VolModel::Egarch101:
    case VolModel::Egarch111:
      if (!(p.kappa > 0.0)) fail("kappa = E|Z| must be positive");
      break;
  }
}

}  // namespace

Eigen::VectorXd volatility_filter(VolModel model, const VolParams& params,
                                  const Eigen::VectorXd& residuals,
                                  double sigma0_sq) {
  validate_vol_params(model, params);
  if (!(sigma0_sq > 0.0)) {
    throw validation_error("sigma0^2 must be positive");
  }
  if (residuals.size() == 0) {
    throw validation_error("empty residual series");
  }
  Eigen::VectorXd sigma2(residuals.size());
  filter_unchecked(model, params, residuals.data(), residuals.size(),
                   sigma0_sq, sigma2.data());
  if (!(sigma2.array() > 0.0).all() || !sigma2.allFinite()) {
    throw validation_error("conditional variance path is not strictly "
                           "positive and finite");
  }
  return sigma2;
}

// ---------------------------------------------------------------------------
// Mean models
// ---------------------------------------------------------------------------

Eigen::VectorXd mean_residuals(MeanModel model, const MeanParams& params,
                               const Eigen::VectorXd& series) {
  const Eigen::Index T = series.size();
  const int p = mean_order(model);
  if (T <= p) {
    throw validation_error("series shorter than the mean-model order");
  }
  Eigen::VectorXd eps(T - p);
  if (model == MeanModel::Arma11) {
    if (params.phi.size() != 1) {
      throw validation_error("ARMA(1,1) needs one AR coefficient");
    }
    double prev = 0.0;
    for (Eigen::Index t = 1; t < T; ++t) {
      const double e = series[t] - params.phi[0] * series[t - 1] -
                       params.theta * prev;
      eps[t - 1] = e;
      prev = e;
    }
  } else {
    if (params.phi.size() != p) {
      throw validation_error("AR coefficient count does not match the order");
    }
    for (Eigen::Index t = p; t < T; ++t) {
      double mu = 0.0;
      for (int j = 0; j < p; ++j) mu += params.phi[j] * series[t - 1 - j];
      eps[t - p] = series[t] - mu;
    }
  }
  return eps;
}

namespace {

// No-intercept AR(p) least squares for initialization.
Eigen::VectorXd ols_ar(const Eigen::VectorXd& series, int p) {
  const Eigen::Index T = series.size();
  Eigen::MatrixXd X(T - p, p);
  Eigen::VectorXd y(T - p);
  for (Eigen::Index t = p; t < T; ++t) {
    y[t - p] = series[t];
    for (int j = 0; j < p; ++j) X(t - p, j) = series[t - 1 - j];
  }
  const Eigen::MatrixXd xtx = X.transpose() * X;
  if (xtx.ldlt().info() != Eigen::Success || xtx.diagonal().minCoeff() <= 0.0) {
    throw validation_error("AR regressors are degenerate");
  }
  return xtx.ldlt().solve(X.transpose() * y);
}

// ---------------------------------------------------------------------------
// MLE: smooth reparameterization and optimization
// ---------------------------------------------------------------------------

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double x) { return std::log(x / (1.0 - x)); }
double safe_exp(double u) { return std::exp(std::min(u, 50.0)); }

struct Transform {
  ModelSpec spec;
  int n_mean, n_vol, n_dist;

  explicit Transform(const ModelSpec& s)
      : spec(s),
        n_mean(mean_param_count(s.mean)),
        n_vol(vol_param_count(s.vol)),
        n_dist(dist_param_count(s.dist)) {}

  int size() const { return n_mean + n_vol + n_dist; }

  void unpack(const double* u, MeanParams& mean, VolParams& vol,
              DistParams& dist) const {
    const int p = mean_order(spec.mean);
    mean.phi.resize(p);
    for (int j = 0; j < p; ++j) mean.phi[j] = u[j];
    mean.theta =
        spec.mean == MeanModel::Arma11 ? std::tanh(u[n_mean - 1]) : 0.0;

    const double* v = u + n_mean;
    vol = VolParams{};
    switch (spec.vol) {
      case VolModel::Constant:
        vol.omega = safe_exp(v[0]);
        break;
      case VolModel::Arch1:
        vol.omega = safe_exp(v[0]);
        vol.alpha = safe_exp(v[1]);
        break;
      case VolModel::Garch11:
        vol.omega = safe_exp(v[0]);
        vol.alpha = safe_exp(v[1]);
        vol.beta = logistic(v[2]);
        break;
      case VolModel::Gjr111:
      case VolModel::Tarch111:
        vol.omega = safe_exp(v[0]);
        vol.alpha = safe_exp(v[1]);
        vol.gamma = safe_exp(v[2]) - vol.alpha;  // alpha + gamma = exp(v2) > 0
        vol.beta = logistic(v[3]);
        break;
      case VolModel::Egarch101:
        vol.omega = v[0];
        vol.alpha = v[1];
        vol.beta = std::tanh(v[2]);
        break;
      case VolModel::Egarch111:
        vol.omega = v[0];
        vol.alpha = v[1];
        vol.gamma = v[2];
        vol.beta = std::tanh(v[3]);
        break;
    }

    const double* w = u + n_mean + n_vol;
    dist = DistParams{};
    switch (spec.dist) {
      case Innovation::Normal:
        break;
      case Innovation::StudentT:
        dist.nu = 2.0 + safe_exp(w[0]);
        break;
      case Innovation::SkewT:
        dist.nu = 2.0 + safe_exp(w[0]);
        dist.lambda = std::tanh(w[1]);
        break;
      case Innovation::Ged:
        dist.shape = 2.0 + safe_exp(w[0]);
        break;
    }
  }

  Eigen::VectorXd pack(const MeanParams& mean, const VolParams& vol,
                       const DistParams& dist) const {
    Eigen::VectorXd u(size());
    const int p = mean_order(spec.mean);
    for (int j = 0; j < p; ++j) u[j] = mean.phi[j];
    if (spec.mean == MeanModel::Arma11) u[n_mean - 1] = std::atanh(mean.theta);

    double* v = u.data() + n_mean;
    switch (spec.vol) {
      case VolModel::Constant:
        v[0] = std::log(vol.omega);
        break;
      case VolModel::Arch1:
        v[0] = std::log(vol.omega);
        v[1] = std::log(vol.alpha);
        break;
      case VolModel::Garch11:
        v[0] = std::log(vol.omega);
        v[1] = std::log(vol.alpha);
        v[2] = logit(vol.beta);
        break;
      case VolModel::Gjr111:
      case VolModel::Tarch111:
        v[0] = std::log(vol.omega);
        v[1] = std::log(vol.alpha);
        v[2] = std::log(vol.alpha + vol.gamma);
        v[3] = logit(vol.beta);
        break;
      case VolModel::Egarch101:
        v[0] = vol.omega;
        v[1] = vol.alpha;
        v[2] = std::atanh(vol.beta);
        break;
      case VolModel::Egarch111:
        v[0] = vol.omega;
        v[1] = vol.alpha;
        v[2] = vol.gamma;
        v[3] = std::atanh(vol.beta);
        break;
    }

    double* w = u.data() + n_mean + n_vol;
    switch (spec.dist) {
      case Innovation::Normal:
        break;
      case Innovation::StudentT:
        w[0] = std::log(dist.nu - 2.0);
        break;
      case Innovation::SkewT:
        w[0] = std::log(dist.nu - 2.0);
        w[1] = std::atanh(dist.lambda);
        break;
      case Innovation::Ged:
        w[0] = std::log(dist.shape - 2.0);
        break;
    }
    return u;
  }
};

class Objective {
 public:
  Objective(const Eigen::VectorXd& series, const ModelSpec& spec)
      : series_(series), spec_(spec), transform_(spec) {
    n_obs_ = static_cast<int>(series.size()) - mean_order(spec.mean);
    eps_.resize(n_obs_);
    sigma2_.resize(n_obs_);
  }

  int dim() const { return transform_.size(); }
  int n_obs() const { return n_obs_; }
  const Transform& transform() const { return transform_; }

  // Negative mean log-likelihood; large finite penalty outside the usable
  // region so the derivative-free stage can recover.
  double operator()(const double* u) {
    MeanParams mean;
    VolParams vol;
    DistParams dist;
    transform_.unpack(u, mean, vol, dist);
    double loglik;
    if (!evaluate(mean, vol, dist, &loglik)) return 1e10;
    return -loglik / n_obs_;
  }

  bool evaluate(const MeanParams& mean, VolParams vol, const DistParams& dist,
                double* loglik_out) {
    DensityContext ctx;
    try {
      ctx = DensityContext::make(spec_.dist, dist);
    } catch (const validation_error&) {
      return false;
    }
    if (is_egarch(spec_.vol)) vol.kappa = ctx.mean_abs();

    const Eigen::Index T = series_.size();
    const int p = mean_order(spec_.mean);
    if (spec_.mean == MeanModel::Arma11) {
      double prev = 0.0;
      for (Eigen::Index t = 1; t < T; ++t) {
        const double e =
            series_[t] - mean.phi[0] * series_[t - 1] - mean.theta * prev;
        eps_[t - 1] = e;
        prev = e;
      }
    } else {
      for (Eigen::Index t = p; t < T; ++t) {
        double mu = 0.0;
        for (int j = 0; j < p; ++j) mu += mean.phi[j] * series_[t - 1 - j];
        eps_[t - p] = series_[t] - mu;
      }
    }

    const double sigma0_sq = eps_.squaredNorm() / n_obs_;
    if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq)) return false;
    filter_unchecked(spec_.vol, vol, eps_.data(), n_obs_, sigma0_sq,
                     sigma2_.data());

    double loglik = 0.0;
    for (int i = 0; i < n_obs_; ++i) {
      const double s2 = sigma2_[i];
      if (!(s2 > 0.0) || !std::isfinite(s2)) return false;
      const double z = eps_[i] / std::sqrt(s2);
      loglik += ctx.logpdf(z) - 0.5 * std::log(s2);
    }
    if (!std::isfinite(loglik)) return false;
    *loglik_out = loglik;
    return true;
  }

 private:
  const Eigen::VectorXd& series_;
  ModelSpec spec_;
  Transform transform_;
  int n_obs_ = 0;
  Eigen::VectorXd eps_;
  Eigen::VectorXd sigma2_;
};

using RawObjective = std::function<double(const double*)>;

struct GslAdapter {
  const RawObjective* f;
};

double gsl_f(const gsl_vector* v, void* params) {
  auto* adapter = static_cast<GslAdapter*>(params);
  return (*adapter->f)(v->data);
}

void gsl_df(const gsl_vector* v, void* params, gsl_vector* g) {
  auto* adapter = static_cast<GslAdapter*>(params);
  const std::size_t n = v->size;
  std::vector<double> u(v->data, v->data + n);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = 1e-6 * (1.0 + std::abs(u[i]));
    const double saved = u[i];
    u[i] = saved + h;
    const double fp = (*adapter->f)(u.data());
    u[i] = saved - h;
    const double fm = (*adapter->f)(u.data());
    u[i] = saved;
    gsl_vector_set(g, i, (fp - fm) / (2.0 * h));
  }
}

void gsl_fdf(const gsl_vector* v, void* params, double* f, gsl_vector* g) {
  *f = gsl_f(v, params);
  gsl_df(v, params, g);
}

struct StageResult {
  Eigen::VectorXd u;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
};

StageResult run_simplex(const RawObjective& f, const Eigen::VectorXd& start,
                        int max_iter) {
  const int n = static_cast<int>(start.size());
  GslAdapter adapter{&f};
  gsl_multimin_function func;
  func.n = n;
  func.f = gsl_f;
  func.params = &adapter;

  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  for (int i = 0; i < n; ++i) {
    gsl_vector_set(x, i, start[i]);
    gsl_vector_set(step, i, 0.2);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(
      gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &func, x, step);

  StageResult out;
  int status = GSL_CONTINUE;
  for (int iter = 0; iter < max_iter && status == GSL_CONTINUE; ++iter) {
    if (gsl_multimin_fminimizer_iterate(s) != 0) break;
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-8);
  }
  out.converged = status == GSL_SUCCESS;
  out.u.resize(n);
  for (int i = 0; i < n; ++i) out.u[i] = gsl_vector_get(s->x, i);
  out.value = s->fval;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(x);
  gsl_vector_free(step);
  return out;
}

StageResult run_bfgs(const RawObjective& f, const Eigen::VectorXd& start,
                     int max_iter) {
  const int n = static_cast<int>(start.size());
  GslAdapter adapter{&f};
  gsl_multimin_function_fdf func;
  func.n = n;
  func.f = gsl_f;
  func.df = gsl_df;
  func.fdf = gsl_fdf;
  func.params = &adapter;

  gsl_vector* x = gsl_vector_alloc(n);
  for (int i = 0; i < n; ++i) gsl_vector_set(x, i, start[i]);
  gsl_multimin_fdfminimizer* s = gsl_multimin_fdfminimizer_alloc(
      gsl_multimin_fdfminimizer_vector_bfgs2, n);
  gsl_multimin_fdfminimizer_set(s, &func, x, 0.05, 0.1);

  StageResult out;
  out.u = start;
  out.value = f(start.data());
  int status = GSL_CONTINUE;
  for (int iter = 0; iter < max_iter && status == GSL_CONTINUE; ++iter) {
    if (gsl_multimin_fdfminimizer_iterate(s) != 0) break;
    status = gsl_multimin_test_gradient(s->gradient, 1e-8);
  }
  // Keep the refined point only if it actually improved.
  if (s->f < out.value) {
    out.value = s->f;
    for (int i = 0; i < n; ++i) out.u[i] = gsl_vector_get(s->x, i);
  }
  out.converged = status == GSL_SUCCESS;
  gsl_multimin_fdfminimizer_free(s);
  gsl_vector_free(x);
  return out;
}

void ensure_gsl_handler_off() {
  static const auto once = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)once;
}

VolParams init_vol(VolModel model, double sample_var) {
  VolParams v;
  const double var = std::max(sample_var, 1e-12);
  switch (model) {
    case VolModel::Constant:
      v.omega = var;
      break;
    case VolModel::Arch1:
      v.alpha = 0.05;
      v.omega = var * (1.0 - v.alpha);
      break;
    case VolModel::Garch11:
      v.alpha = 0.05;
      v.beta = 0.90;
      v.omega = var * (1.0 - v.alpha - v.beta);
      break;
    case VolModel::Gjr111:
      v.alpha = 0.05;
      v.beta = 0.90;
      v.gamma = 0.0;
      v.omega = var * (1.0 - v.alpha - v.beta);
      break;
    case VolModel::Tarch111: {
      v.alpha = 0.05;
      v.beta = 0.90;
      v.gamma = 0.0;
      v.omega = std::sqrt(var) * (1.0 - v.alpha - v.beta);
      break;
    }
    case VolModel::Egarch101:
    case VolModel::Egarch111:
      v.alpha = 0.05;
      v.beta = 0.90;
      v.gamma = 0.0;
      v.omega = (1.0 - v.beta) * std::log(var);
      break;
  }
  return v;
}

DistParams init_dist(Innovation dist) {
  DistParams d;
  if (dist == Innovation::StudentT || dist == Innovation::SkewT) d.nu = 8.0;
  if (dist == Innovation::SkewT) d.lambda = 0.0;
  if (dist == Innovation::Ged) d.shape = 2.5;
  return d;
}

}  // namespace

double bic(double loglik, int d, int n_obs) {
  if (n_obs < 1 || d < 0) {
    throw validation_error("bic needs n_obs >= 1 and d >= 0");
  }
  return -2.0 * loglik + d * std::log(static_cast<double>(n_obs));
}

TsFit fit_mle(const Eigen::VectorXd& series, const ModelSpec& spec,
              std::uint64_t seed) {
  ensure_gsl_handler_off();
  const Eigen::Index T = series.size();
  if (T < 50) {
    throw validation_error("maximum-likelihood fit needs at least 50 "
                           "observations");
  }

  // Deterministic initialization: least-squares mean, variance targeting.
  MeanParams mean0;
  const int p = mean_order(spec.mean);
  if (spec.mean == MeanModel::Arma11) {
    mean0.phi = ols_ar(series, 1);
    mean0.theta = 0.0;
  } else {
    mean0.phi = ols_ar(series, p);
  }
  const Eigen::VectorXd eps0 = mean_residuals(spec.mean, mean0, series);
  const double var0 = eps0.squaredNorm() / eps0.size();
  const VolParams vol0 = init_vol(spec.vol, var0);
  const DistParams dist0 = init_dist(spec.dist);

  Objective obj(series, spec);
  const RawObjective fn = [&obj](const double* u) { return obj(u); };
  const Transform& tr = obj.transform();
  const Eigen::VectorXd u0 = tr.pack(mean0, vol0, dist0);

  Eigen::VectorXd best_u = u0;
  double best_f = fn(u0.data());
  bool converged = false;

  rng::Engine eng(rng::split_seed(seed, 0x7473666974ULL));
  constexpr int kMaxRestarts = 5;
  for (int attempt = 0; attempt <= kMaxRestarts; ++attempt) {
    Eigen::VectorXd start = u0;
    if (attempt > 0) {
      for (int i = 0; i < start.size(); ++i) {
        start[i] += 0.5 * rng::normal(eng);
      }
    }
    bool attempt_converged = false;
    Eigen::VectorXd u = start;
    double f = fn(u.data());
    // Simplex stage, quasi-Newton refinement, repeated while the refinement
    // still moves the log-likelihood materially.
    for (int cycle = 0; cycle < 3; ++cycle) {
      const StageResult nm = run_simplex(fn, u, 4000);
      if (nm.value < f) {
        f = nm.value;
        u = nm.u;
      }
      const StageResult qn = run_bfgs(fn, u, 200);
      const double rel =
          (f - qn.value) / (std::abs(qn.value) + 1.0);
      if (qn.value < f) {
        f = qn.value;
        u = qn.u;
      }
      if (nm.converged && rel < 1e-8) {
        attempt_converged = true;
        break;
      }
    }
    if (f < best_f) {
      best_f = f;
      best_u = u;
    }
    if (attempt_converged && std::abs(f - best_f) <= 1e-12 + 1e-8 * std::abs(best_f)) {
      converged = true;
      break;
    }
  }

  TsFit fit;
  fit.spec = spec;
  tr.unpack(best_u.data(), fit.mean_params, fit.vol_params, fit.dist_params);
  double loglik = 0.0;
  if (!obj.evaluate(fit.mean_params, fit.vol_params, fit.dist_params,
                    &loglik)) {
    throw validation_error("likelihood is not finite at the returned "
                           "parameters");
  }
  if (is_egarch(spec.vol)) {
    fit.vol_params.kappa =
        mean_abs_innovation(spec.dist, fit.dist_params);
  }
  fit.loglik = loglik;
  fit.n_obs = obj.n_obs();
  fit.n_params = param_count(spec);
  fit.bic = bic(fit.loglik, fit.n_params, fit.n_obs);
  fit.converged = converged;
  if (spec.vol == VolModel::Garch11 || spec.vol == VolModel::Gjr111 ||
      spec.vol == VolModel::Tarch111) {
    fit.covariance_stationary = fit.vol_params.alpha + fit.vol_params.beta < 1.0;
  }
  return fit;
}

VolParams fit_garch11_normal_residuals(const Eigen::VectorXd& residuals,
                                       std::uint64_t seed) {
  ensure_gsl_handler_off();
  const Eigen::Index n = residuals.size();
  if (n < 20) {
    throw validation_error("margin fit needs at least 20 residuals");
  }
  const double sigma0_sq = residuals.squaredNorm() / n;
  if (!(sigma0_sq > 0.0)) {
    throw validation_error("residuals have zero variance");
  }
  Eigen::VectorXd sigma2(n);
  const double half_log_2pi = 0.5 * std::log(2.0 * kPi);
  const RawObjective fn = [&](const double* u) {
    VolParams p;
    p.omega = safe_exp(u[0]);
    p.alpha = safe_exp(u[1]);
    p.beta = logistic(u[2]);
    filter_unchecked(VolModel::Garch11, p, residuals.data(), n, sigma0_sq,
                     sigma2.data());
    double loglik = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s2 = sigma2[i];
      if (!(s2 > 0.0) || !std::isfinite(s2)) return 1e10;
      loglik += -half_log_2pi - 0.5 * std::log(s2) -
                0.5 * residuals[i] * residuals[i] / s2;
    }
    if (!std::isfinite(loglik)) return 1e10;
    return -loglik / n;
  };

  const VolParams v0 = init_vol(VolModel::Garch11, sigma0_sq);
  Eigen::VectorXd u0(3);
  u0 << std::log(v0.omega), std::log(v0.alpha), logit(v0.beta);
  Eigen::VectorXd best_u = u0;
  double best_f = fn(u0.data());
  rng::Engine eng(rng::split_seed(seed, 0x6d617267696eULL));
  for (int attempt = 0; attempt <= 2; ++attempt) {
    Eigen::VectorXd start = u0;
    if (attempt > 0) {
      for (int i = 0; i < 3; ++i) start[i] += 0.5 * rng::normal(eng);
    }
    const StageResult nm = run_simplex(fn, start, 4000);
    const StageResult qn = run_bfgs(fn, nm.u, 200);
    const StageResult& better = qn.value < nm.value ? qn : nm;
    if (better.value < best_f) {
      best_f = better.value;
      best_u = better.u;
    }
    if (nm.converged) break;
  }
  VolParams out;
  out.omega = safe_exp(best_u[0]);
  out.alpha = safe_exp(best_u[1]);
  out.beta = logistic(best_u[2]);
  return out;
}

std::string evidence_label(double delta_bic) {
  if (delta_bic < 2.0) return "not worth a bare mention";
  if (delta_bic < 6.0) return "positive";
  if (delta_bic < 10.0) return "strong";
  return "very strong";
}

std::vector<SweepRow> bic_sweep(const Eigen::VectorXd& series,
                                const std::vector<MeanModel>& means,
                                const std::vector<VolModel>& vols,
                                const std::vector<Innovation>& dists,
                                std::uint64_t seed, int threads) {
  if (means.empty() || vols.empty() || dists.empty()) {
    throw validation_error("empty model grid");
  }
  std::vector<ModelSpec> specs;
  for (MeanModel m : means) {
    for (VolModel v : vols) {
      for (Innovation d : dists) {
        specs.push_back(ModelSpec{m, v, d});
      }
    }
  }

  std::vector<SweepRow> rows(specs.size());
  std::vector<std::string> failures(specs.size());
  std::atomic<std::size_t> next{0};
  int n_workers = threads > 0
                      ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_workers = std::clamp<int>(n_workers, 1,
                              static_cast<int>(specs.size()));
  const auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) break;
      rows[i].spec = specs[i];
      try {
        rows[i].fit = fit_mle(series, specs[i], rng::split_seed(seed, i));
      } catch (const std::exception& e) {
        failures[i] = e.what();
        rows[i].fit.spec = specs[i];
        rows[i].fit.converged = false;
        rows[i].fit.loglik = -std::numeric_limits<double>::infinity();
        rows[i].fit.bic = std::numeric_limits<double>::infinity();
      }
    }
  };
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::size_t best = specs.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].fit.converged) continue;
    if (best == specs.size() || rows[i].fit.bic < rows[best].fit.bic) {
      best = i;
    }
  }
  if (best == specs.size()) {
    throw validation_error("no model in the sweep converged");
  }
  const double best_bic = rows[best].fit.bic;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].delta_bic = rows[i].fit.bic - best_bic;
    rows[i].is_best = i == best;
    rows[i].label = i == best ? "\xe2\x80\x94" : evidence_label(rows[i].delta_bic);
  }
  return rows;
}

}  // namespace liqsurf::tsmodel
