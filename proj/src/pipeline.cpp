#include "liqsurf/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "liqsurf/basis.hpp"
#include "liqsurf/factor.hpp"
#include "liqsurf/rng.hpp"
#include "liqsurf/tsmodel.hpp"

namespace liqsurf::pipeline {

namespace {

void validate_k_set(const std::vector<int>& k_set, Eigen::Index M) {
  if (k_set.empty()) throw validation_error("rank set is empty");
  for (int K : k_set) {
    if (K < 1 || K > M) {
      throw validation_error("rank " + std::to_string(K) +
                             " is outside [1, M]");
    }
  }
}

}  // namespace

std::vector<WindowDecomposition> rolling_decompose(
    const ingest::SurfaceGrid& surface, const RollingConfig& config) {
  const Eigen::Index T = surface.rows();
  const Eigen::Index M = surface.cols();
  if (config.step < 1) throw validation_error("step must be >= 1");
  if (config.window_T < 2) throw validation_error("window must have >= 2 rows");
  if (T < config.window_T) {
    throw validation_error("surface has fewer rows than one window");
  }
  validate_k_set(config.k_set, M);
  const int k_max = *std::max_element(config.k_set.begin(), config.k_set.end());

  std::vector<WindowDecomposition> out;
  for (Eigen::Index start = 0; start + config.window_T <= T;
       start += config.step) {
    ingest::SurfaceGrid window;
    window.grid_x = surface.grid_x;
    window.values = surface.values.middleRows(start, config.window_T);
    window.block_numbers.assign(
        surface.block_numbers.begin() + start,
        surface.block_numbers.begin() + start + config.window_T);

    const factor::FactorDecomposition dec = factor::decompose(window, true);
    const factor::VarianceExplained ve = factor::pve_cpve(dec.eigenvalues);

    WindowDecomposition w;
    w.start_row = static_cast<int>(start);
    w.start_block = surface.block_numbers[start];
    w.eigenvalues = dec.eigenvalues;
    w.basis = dec.basis.leftCols(k_max);
    w.mean_row = dec.mean_row;
    for (int K : config.k_set) w.cpve[K] = ve.cpve[K - 1];
    out.push_back(std::move(w));
  }
  return out;
}

DriftSeries drift_series(const std::vector<WindowDecomposition>& windows,
                         const Eigen::MatrixXd& reference_basis,
                         const std::vector<int>& k_set) {
  if (windows.empty()) throw validation_error("no window decompositions");
  const Eigen::Index M = windows.front().basis.rows();
  validate_k_set(k_set, M);
  const int k_max = *std::max_element(k_set.begin(), k_set.end());
  if (reference_basis.rows() != M || reference_basis.cols() < k_max) {
    throw validation_error("reference basis must be M x max(K)");
  }

  DriftSeries out;
  out.k_values = k_set;
  out.d_to_inception.resize(windows.size(), k_set.size());
  out.d_to_legendre.resize(windows.size(), k_set.size());
  for (int K : k_set) {
    out.baselines.push_back(K * (1.0 - static_cast<double>(K) / M));
  }
  for (std::size_t j = 0; j < windows.size(); ++j) {
    out.window_starts.push_back(windows[j].start_block);
    for (std::size_t i = 0; i < k_set.size(); ++i) {
      const int K = k_set[i];
      const Eigen::MatrixXd u = windows[j].basis.leftCols(K);
      out.d_to_inception(j, i) =
          j == 0 ? 0.0
                 : basis::projection_distance(u,
                                              windows[0].basis.leftCols(K));
      out.d_to_legendre(j, i) =
          basis::projection_distance(u, reference_basis.leftCols(K));
    }
  }
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> shock_cross_section(
    const Eigen::VectorXd& scores_row, const Eigen::MatrixXd& basis,
    const Eigen::VectorXd& mean_row, int k, double amount) {
  const Eigen::Index K = scores_row.size();
  if (basis.cols() != K || basis.rows() != mean_row.size()) {
    throw validation_error("basis shape does not match scores and mean row");
  }
  if (k < 1 || k > K) {
    throw validation_error("shock component out of range");
  }
  Eigen::VectorXd baseline = mean_row + basis * scores_row;
  Eigen::VectorXd shocked = baseline + amount * basis.col(k - 1);
  return {std::move(baseline), std::move(shocked)};
}

Eigen::VectorXd forecast_curve(const std::vector<double>& phis,
                               const Eigen::VectorXd& current_scores,
                               const Eigen::MatrixXd& basis,
                               const Eigen::VectorXd& mean_row, int h) {
  const Eigen::Index K = current_scores.size();
  if (static_cast<Eigen::Index>(phis.size()) != K) {
    throw validation_error("one AR coefficient per factor is required");
  }
  if (basis.cols() != K || basis.rows() != mean_row.size()) {
    throw validation_error("basis shape does not match scores and mean row");
  }
  if (h < 0) throw validation_error("horizon must be >= 0");
  Eigen::VectorXd forecast(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    forecast[k] = h == 0 ? current_scores[k]
                         : std::pow(phis[k], h) * current_scores[k];
  }
  return mean_row + basis * forecast;
}

double quantile_type7(Eigen::VectorXd values, double p) {
  const Eigen::Index n = values.size();
  if (n == 0) throw validation_error("quantile of an empty sample");
  if (p < 0.0 || p > 1.0) throw validation_error("quantile level outside [0,1]");
  std::sort(values.data(), values.data() + n);
  const double h = (n - 1) * p;
  const Eigen::Index lo = static_cast<Eigen::Index>(std::floor(h));
  if (lo + 1 >= n) return values[n - 1];
  const double frac = h - lo;
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

VarGarchEnsemble simulate_var_garch(const VarGarchParams& params,
                                    const VarGarchState& state, int horizon,
                                    int n_paths, std::uint64_t seed,
                                    int threads) {
  const Eigen::Index K = state.scores.size();
  if (K < 1) throw validation_error("empty factor state");
  if (params.a.size() != K || params.A.rows() != K || params.A.cols() != K ||
      params.omega.size() != K || params.alpha.size() != K ||
      params.beta.size() != K || params.R.rows() != K ||
      params.R.cols() != K || state.sigma2.size() != K ||
      state.residuals.size() != K) {
    throw validation_error("factor dimensions disagree");
  }
  if (horizon < 1) throw validation_error("horizon must be >= 1");
  if (n_paths < 1) throw validation_error("need at least one path");
  if (!(params.nu > 2.0)) throw validation_error("nu must exceed 2");
  if (!(params.omega.array() > 0.0).all() ||
      (params.alpha.array() < 0.0).any() ||
      (params.beta.array() < 0.0).any()) {
    throw validation_error("variance recursion parameters violate "
                           "omega > 0, alpha >= 0, beta >= 0");
  }
  if (!(state.sigma2.array() > 0.0).all()) {
    throw validation_error("current conditional variances must be positive");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(params.R);
  if (llt.info() != Eigen::Success) {
    throw validation_error("correlation matrix is not positive definite");
  }
  const Eigen::MatrixXd L = llt.matrixL();

  VarGarchEnsemble out;
  out.horizon = horizon;
  out.scores.assign(horizon, Eigen::MatrixXd(n_paths, K));
  out.spectral_radius =
      params.A.eigenvalues().array().abs().maxCoeff();

  const double t_scale = std::sqrt((params.nu - 2.0) / params.nu);
  const auto run_path = [&](int p) {
    rng::Engine eng(rng::split_seed(seed, static_cast<std::uint64_t>(p)));
    Eigen::VectorXd beta = state.scores;
    Eigen::VectorXd sigma2 = state.sigma2;
    Eigen::VectorXd eps = state.residuals;
    Eigen::VectorXd z(K);
    for (int h = 0; h < horizon; ++h) {
      for (Eigen::Index k = 0; k < K; ++k) {
        sigma2[k] = params.omega[k] + params.alpha[k] * eps[k] * eps[k] +
                    params.beta[k] * sigma2[k];
      }
      for (Eigen::Index k = 0; k < K; ++k) z[k] = rng::normal(eng);
      const double w = rng::chi_squared(eng, params.nu) / params.nu;
      // eps = D L z * sqrt((nu-2)/nu) / sqrt(w) has covariance D R D.
      eps = (sigma2.array().sqrt() *
             (L * z).array() * (t_scale / std::sqrt(w)))
                .matrix();
      beta = params.a + params.A * beta + eps;
      out.scores[h].row(p) = beta.transpose();
    }
  };

  int n_workers = threads > 0
                      ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_workers = std::clamp(n_workers, 1, std::max(1, n_paths / 256));
  if (n_workers == 1) {
    for (int p = 0; p < n_paths; ++p) run_path(p);
  } else {
    std::atomic<int> next{0};
    const auto worker = [&] {
      while (true) {
        const int p = next.fetch_add(1);
        if (p >= n_paths) break;
        run_path(p);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

EstimatedVarGarch estimate_var_garch(const Eigen::MatrixXd& scores,
                                     std::uint64_t seed) {
  const Eigen::Index T = scores.rows();
  const Eigen::Index K = scores.cols();
  if (T < 30) {
    throw validation_error("joint score model needs at least 30 rows");
  }
  if (K < 1) throw validation_error("empty score panel");

  Eigen::MatrixXd X(T - 1, K + 1);
  X.col(0).setOnes();
  X.rightCols(K) = scores.topRows(T - 1);
  const Eigen::MatrixXd Y = scores.bottomRows(T - 1);
  const Eigen::MatrixXd B =
      (X.transpose() * X).ldlt().solve(X.transpose() * Y);
  const Eigen::MatrixXd E = Y - X * B;  // (T-1) x K residuals

  EstimatedVarGarch out;
  out.params.a = B.row(0).transpose();
  out.params.A = B.bottomRows(K).transpose();
  out.params.omega.resize(K);
  out.params.alpha.resize(K);
  out.params.beta.resize(K);

  const Eigen::Index n = E.rows();
  Eigen::MatrixXd z(n, K);
  Eigen::VectorXd sigma2_last(K);
  Eigen::VectorXd eps_last(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const Eigen::VectorXd eps = E.col(k);
    const tsmodel::VolParams vp = tsmodel::fit_garch11_normal_residuals(
        eps, rng::split_seed(seed, 0x1000 + static_cast<std::uint64_t>(k)));
    out.params.omega[k] = vp.omega;
    out.params.alpha[k] = vp.alpha;
    out.params.beta[k] = vp.beta;
    const Eigen::VectorXd s2 = tsmodel::volatility_filter(
        tsmodel::VolModel::Garch11, vp, eps, eps.squaredNorm() / n);
    z.col(k) = eps.array() / s2.array().sqrt();
    sigma2_last[k] = s2[n - 1];
    eps_last[k] = eps[n - 1];
  }

  // Sample correlation of the standardized residuals, diagonal pinned at 1.
  const Eigen::RowVectorXd zbar = z.colwise().mean();
  const Eigen::MatrixXd zc = z.rowwise() - zbar;
  const Eigen::MatrixXd S = zc.transpose() * zc / static_cast<double>(n);
  Eigen::MatrixXd R(K, K);
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index j = 0; j < K; ++j) {
      R(i, j) = i == j ? 1.0 : S(i, j) / std::sqrt(S(i, i) * S(j, j));
    }
  }
  R = ((R + R.transpose()) / 2.0).eval();
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success) {
    throw validation_error("standardized-residual correlation is not "
                           "positive definite");
  }
  out.params.R = R;

  // Profile the multivariate-t degrees of freedom over an integer grid,
  // holding the correlation fixed; the scale matrix R (nu-2)/nu keeps the
  // covariance equal to R at every candidate.
  const Eigen::MatrixXd R_inv =
      llt.solve(Eigen::MatrixXd::Identity(K, K));
  const double logdet_R =
      2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
  Eigen::VectorXd quad(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    quad[t] = z.row(t) * R_inv * z.row(t).transpose();
  }
  constexpr double kPi = 3.141592653589793238462643383279502884;
  double best_nu = 8.0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int nu = 3; nu <= 40; ++nu) {
    const double scale = (nu - 2.0) / nu;  // Sigma = scale * R
    const double logdet_sigma = logdet_R + K * std::log(scale);
    const double c = std::lgamma(0.5 * (nu + K)) - std::lgamma(0.5 * nu) -
                     0.5 * K * std::log(nu * kPi) - 0.5 * logdet_sigma;
    double ll = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
      ll += c - 0.5 * (nu + K) * std::log1p(quad[t] / (scale * nu));
    }
    if (ll > best_ll) {
      best_ll = ll;
      best_nu = nu;
    }
  }
  out.params.nu = best_nu;

  out.state.scores = scores.row(T - 1).transpose();
  out.state.sigma2 = sigma2_last;
  out.state.residuals = eps_last;
  return out;
}

CurveQuantiles curve_quantiles(const VarGarchEnsemble& ensemble,
                               const Eigen::MatrixXd& basis,
                               const Eigen::VectorXd& mean_row) {
  if (ensemble.scores.empty()) throw validation_error("empty ensemble");
  const Eigen::Index K = ensemble.scores.front().cols();
  const Eigen::Index M = basis.rows();
  if (basis.cols() != K || mean_row.size() != M) {
    throw validation_error("basis shape does not match the ensemble");
  }
  CurveQuantiles out;
  const int H = ensemble.horizon;
  out.q05.resize(H, M);
  out.q25.resize(H, M);
  out.q50.resize(H, M);
  out.q75.resize(H, M);
  out.q95.resize(H, M);
  for (int h = 0; h < H; ++h) {
    out.horizons.push_back(h + 1);
    // n_paths x M curve values for this horizon.
    Eigen::MatrixXd curves = ensemble.scores[h] * basis.transpose();
    curves.rowwise() += mean_row.transpose();
    for (Eigen::Index m = 0; m < M; ++m) {
      Eigen::VectorXd col = curves.col(m);
      std::sort(col.data(), col.data() + col.size());
      const auto q = [&](double p) {
        const double pos = (col.size() - 1) * p;
        const Eigen::Index lo = static_cast<Eigen::Index>(std::floor(pos));
        if (lo + 1 >= col.size()) return col[col.size() - 1];
        return col[lo] + (pos - lo) * (col[lo + 1] - col[lo]);
      };
      out.q05(h, m) = q(0.05);
      out.q25(h, m) = q(0.25);
      out.q50(h, m) = q(0.50);
      out.q75(h, m) = q(0.75);
      out.q95(h, m) = q(0.95);
    }
  }
  return out;
}

}  // namespace liqsurf::pipeline
