#include "liqsurf/synth.hpp"

#include <cmath>

#include "liqsurf/basis.hpp"

namespace liqsurf::synth {

namespace {

constexpr int kBurnIn = 500;
constexpr double kPi = 3.141592653589793238462643383279502884;

double ged_scale(double shape) {
  return std::exp(-std::log(2.0) / shape +
                  0.5 * (std::lgamma(1.0 / shape) - std::lgamma(3.0 / shape)));
}

double draw_student_t(double nu, rng::Engine& eng) {
  const double z = rng::normal(eng);
  const double v = rng::chi_squared(eng, nu);
  return z / std::sqrt(v / nu) * std::sqrt((nu - 2.0) / nu);
}

}  // namespace

double draw_innovation(tsmodel::Innovation dist,
                       const tsmodel::DistParams& params, rng::Engine& eng) {
  switch (dist) {
    case tsmodel::Innovation::Normal:
      return rng::normal(eng);
    case tsmodel::Innovation::StudentT: {
      if (!(params.nu > 2.0)) {
        throw validation_error("Student-t requires nu > 2");
      }
      return draw_student_t(params.nu, eng);
    }
    case tsmodel::Innovation::SkewT: {
      if (!(params.nu > 2.0) || !(std::abs(params.lambda) < 1.0)) {
        throw validation_error("skew-t requires nu > 2 and |lambda| < 1");
      }
      const double nu = params.nu;
      const double lam = params.lambda;
      const double logc = std::lgamma(0.5 * (nu + 1.0)) -
                          std::lgamma(0.5 * nu) -
                          0.5 * std::log(kPi * (nu - 2.0));
      const double c = std::exp(logc);
      const double a = 4.0 * lam * c * (nu - 2.0) / (nu - 1.0);
      const double b = std::sqrt(1.0 + 3.0 * lam * lam - a * a);
      const double w = std::abs(draw_student_t(nu, eng));
      const bool right = rng::uniform01(eng) < 0.5 * (1.0 + lam);
      return right ? ((1.0 + lam) * w - a) / b : (-(1.0 - lam) * w - a) / b;
    }
    case tsmodel::Innovation::Ged: {
      if (!(params.shape > 2.0)) {
        throw validation_error("exponential-power shape is restricted to > 2");
      }
      const double k = params.shape;
      const double g = rng::gamma(eng, 1.0 / k);
      const double mag = ged_scale(k) * std::pow(2.0 * g, 1.0 / k);
      return rng::uniform01(eng) < 0.5 ? -mag : mag;
    }
  }
  throw validation_error("unknown innovation family");
}

Eigen::VectorXd simulate_score_series(const FactorDynamics& dynamics, int T,
                                      std::uint64_t seed) {
  if (T < 1) throw validation_error("series length must be positive");
  if (std::abs(dynamics.phi) > 1.0) {
    throw validation_error("|phi| > 1 would make the score series explosive");
  }
  tsmodel::VolParams vp = dynamics.vol_params;
  if (dynamics.vol == tsmodel::VolModel::Egarch101 ||
      dynamics.vol == tsmodel::VolModel::Egarch111) {
    vp.kappa = tsmodel::mean_abs_innovation(dynamics.dist,
                                            dynamics.dist_params);
  }
  // Parameter validation via a one-step filter run.
  tsmodel::volatility_filter(dynamics.vol, vp, Eigen::VectorXd::Ones(1), 1.0);

  // Initialization at a rough unconditional level; the burn-in removes the
  // transient.
  const double persistence =
      std::max(1.0 - vp.alpha - vp.beta, 0.05);
  double sigma2 = vp.omega;
  double log_sigma2 = 0.0;
  double sd = 0.0;
  switch (dynamics.vol) {
    case tsmodel::VolModel::Constant:
      sigma2 = vp.omega;
      break;
    case tsmodel::VolModel::Arch1:
      sigma2 = vp.omega / std::max(1.0 - vp.alpha, 0.05);
      break;
    case tsmodel::VolModel::Garch11:
    case tsmodel::VolModel::Gjr111:
      sigma2 = vp.omega / persistence;
      break;
    case tsmodel::VolModel::Tarch111:
      sd = vp.omega / persistence;
      sigma2 = sd * sd;
      break;
    case tsmodel::VolModel::Egarch101:
    case tsmodel::VolModel::Egarch111:
      log_sigma2 = vp.omega / std::max(1.0 - vp.beta, 0.05);
      sigma2 = std::exp(log_sigma2);
      break;
  }

  rng::Engine eng(seed);
  Eigen::VectorXd out(T);
  double beta_prev = 0.0;
  for (int t = 0; t < kBurnIn + T; ++t) {
    const double z = draw_innovation(dynamics.dist, dynamics.dist_params, eng);
    const double eps = std::sqrt(sigma2) * z;
    const double beta = dynamics.phi * beta_prev + eps;
    if (t >= kBurnIn) out[t - kBurnIn] = beta;
    beta_prev = beta;

    switch (dynamics.vol) {
      case tsmodel::VolModel::Constant:
        break;
      case tsmodel::VolModel::Arch1:
        sigma2 = vp.omega + vp.alpha * eps * eps;
        break;
      case tsmodel::VolModel::Garch11:
        sigma2 = vp.omega + vp.alpha * eps * eps + vp.beta * sigma2;
        break;
      case tsmodel::VolModel::Gjr111: {
        const double lever = eps < 0.0 ? vp.gamma * eps * eps : 0.0;
        sigma2 = vp.omega + vp.alpha * eps * eps + lever + vp.beta * sigma2;
        break;
      }
      case tsmodel::VolModel::Tarch111: {
        const double prev_sd = std::sqrt(sigma2);
        const double lever = eps < 0.0 ? vp.gamma * std::abs(eps) : 0.0;
        sd = vp.omega + vp.alpha * std::abs(eps) + lever + vp.beta * prev_sd;
        sigma2 = sd * sd;
        break;
      }
      case tsmodel::VolModel::Egarch101:
      case tsmodel::VolModel::Egarch111: {
        log_sigma2 = vp.omega + vp.alpha * (std::abs(z) - vp.kappa) +
                     vp.beta * log_sigma2;
        if (dynamics.vol == tsmodel::VolModel::Egarch111) {
          log_sigma2 += vp.gamma * z;
        }
        sigma2 = std::exp(log_sigma2);
        break;
      }
    }
  }
  return out;
}

SynthSpec default_spec(int T, int M, std::uint64_t seed) {
  SynthSpec spec;
  spec.T = T;
  spec.M = M;
  spec.seed = seed;
  const double sds[5] = {8.0, 4.0, 2.0, 1.5, 1.0};
  const double phis[5] = {0.9, 0.87, 0.84, 0.75, 0.6};
  for (int k = 0; k < 5; ++k) {
    FactorDynamics f;
    f.phi = phis[k];
    f.vol = tsmodel::VolModel::Garch11;
    f.vol_params.alpha = 0.1;
    f.vol_params.beta = 0.8;
    // Variance targeting: Var(beta) = sd^2 requires Var(eps) =
    // sd^2 (1 - phi^2) = omega / (1 - alpha - beta).
    f.vol_params.omega = sds[k] * sds[k] * (1.0 - phis[k] * phis[k]) *
                         (1.0 - f.vol_params.alpha - f.vol_params.beta);
    f.dist = tsmodel::Innovation::StudentT;
    f.dist_params.nu = 6.0;
    spec.factors.push_back(f);
  }
  return spec;
}

SynthResult generate_surface(const SynthSpec& spec) {
  if (spec.T < 1) throw validation_error("T must be positive");
  if (spec.factors.empty()) {
    throw validation_error("at least one factor is required");
  }
  if (spec.noise_sd < 0.0) {
    throw validation_error("noise sd must be nonnegative");
  }
  if (spec.block_spacing < 1) {
    throw validation_error("block spacing must be positive");
  }
  const int K = static_cast<int>(spec.factors.size());
  const Eigen::VectorXd x = ingest::standard_grid(spec.M);
  const basis::FixedBasis raw = basis::sample_legendre(spec.M, K);
  const Eigen::MatrixXd ortho = basis::orthonormal_grid_basis(raw, K);

  SynthResult out;
  out.basis = ortho;
  out.mean_curve = spec.tent_a - spec.tent_b * x.array().abs();
  out.scores.resize(spec.T, K);
  for (int k = 0; k < K; ++k) {
    out.scores.col(k) = simulate_score_series(
        spec.factors[k], spec.T, rng::split_seed(spec.seed, k));
  }

  out.surface.grid_x = x;
  out.surface.block_numbers.resize(spec.T);
  for (int t = 0; t < spec.T; ++t) {
    out.surface.block_numbers[t] =
        spec.block_start + static_cast<std::int64_t>(t) * spec.block_spacing;
  }
  out.surface.values = out.scores * ortho.transpose();
  out.surface.values.rowwise() += out.mean_curve.transpose();
  if (spec.noise_sd > 0.0) {
    rng::Engine eng(rng::split_seed(spec.seed, 0x6e6f697365ULL));
    for (int t = 0; t < spec.T; ++t) {
      for (int m = 0; m < spec.M; ++m) {
        out.surface.values(t, m) += spec.noise_sd * rng::normal(eng);
      }
    }
  }
  return out;
}

}  // namespace liqsurf::synth
