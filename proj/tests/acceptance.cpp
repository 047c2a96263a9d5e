// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. argv[1] must point at the command-line binary for the end-to-end
// run.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "liqsurf/basis.hpp"
#include "liqsurf/factor.hpp"
#include "liqsurf/ingest.hpp"
#include "liqsurf/io.hpp"
#include "liqsurf/pipeline.hpp"
#include "liqsurf/rng.hpp"
#include "liqsurf/synth.hpp"
#include "liqsurf/tsmodel.hpp"

using namespace liqsurf;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void fail(Outcome& out, const std::string& why) {
  out.pass = false;
  if (!out.detail.empty()) out.detail += "; ";
  out.detail += why;
}

// --------------------------------------------------------------------------
// 1. Polynomial closed forms on a dense grid.

Outcome criterion_closed_forms() {
  Outcome out;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = -1.0 + 2.0 * i / 999.0;
    const double p[5] = {
        1.0,
        x,
        0.5 * (3.0 * x * x - 1.0),
        0.5 * (5.0 * x * x * x - 3.0 * x),
        0.125 * (35.0 * x * x * x * x - 30.0 * x * x + 3.0),
    };
    for (int n = 0; n <= 4; ++n) {
      worst = std::max(worst, std::abs(basis::legendre_eval(n, x) - p[n]));
    }
  }
  if (worst > 1e-12) {
    fail(out, "max closed-form error " + std::to_string(worst));
  }
  return out;
}

// --------------------------------------------------------------------------
// 2. Monte Carlo mean distance to a random subspace vs K(1 - K/M).

Outcome criterion_random_baseline() {
  Outcome out;
  const int M = 201;
  const double expected[5] = {2.955223880597015, 3.92039800995025,
                              4.875621890547264, 5.820895522388060,
                              6.756218905472637};
  rng::Engine eng(2024);
  for (int K = 3; K <= 7; ++K) {
    const Eigen::MatrixXd fixed = basis::orthonormal_grid_basis(
        basis::sample_legendre(M, K), K);
    double sum = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
      sum += basis::projection_distance(
          fixed, basis::random_orthonormal(M, K, eng));
    }
    const double mean = sum / 200.0;
    const double target = basis::random_subspace_baseline(K, M);
    if (std::abs(target - expected[K - 3]) > 1e-12) {
      fail(out, "closed-form baseline mismatch at K=" + std::to_string(K));
    }
    if (std::abs(mean - target) > 0.05 * target) {
      fail(out, "K=" + std::to_string(K) + " mean " + std::to_string(mean) +
                    " vs " + std::to_string(target));
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// 3. Distance bounds, exact symmetry, rotation invariance.

Outcome criterion_distance_properties() {
  Outcome out;
  const std::vector<int> ms = {11, 51, 201};
  rng::Engine eng(7);
  int done = 0;
  const int total = 10000;
  double worst_rot = 0.0;
  for (int pair = 0; pair < total; ++pair) {
    const int K = 1 + pair % 7;
    const int M = ms[(pair / 7) % ms.size()];
    const Eigen::MatrixXd u1 = basis::random_orthonormal(M, K, eng);
    const Eigen::MatrixXd u2 = basis::random_orthonormal(M, K, eng);
    const double d12 = basis::projection_distance(u1, u2);
    const double d21 = basis::projection_distance(u2, u1);
    const double bound = std::min(K, M - K);
    if (!(d12 >= 0.0 && d12 <= bound + 1e-12)) {
      fail(out, "bound violated: d=" + std::to_string(d12) +
                    " K=" + std::to_string(K) + " M=" + std::to_string(M));
      break;
    }
    if (d12 != d21) {
      fail(out, "symmetry not exact at pair " + std::to_string(pair));
      break;
    }
    if (pair % 25 == 0) {
      const Eigen::MatrixXd q = basis::random_orthonormal(K, K, eng);
      worst_rot = std::max(
          worst_rot, std::abs(basis::projection_distance(u1, u2 * q) - d12));
    }
    ++done;
  }
  if (worst_rot > 1e-10) {
    fail(out, "rotation invariance error " + std::to_string(worst_rot));
  }
  if (done != total && out.pass) fail(out, "aborted early");
  return out;
}

// --------------------------------------------------------------------------
// 4. Rank-K reconstruction optimality against a truncated SVD oracle.

Outcome criterion_pca_optimality() {
  Outcome out;
  rng::Engine eng(99);
  const int T = 30, M = 11, K = 3;
  for (int rep = 0; rep < 50 && out.pass; ++rep) {
    ingest::SurfaceGrid surface;
    surface.grid_x = ingest::standard_grid(M);
    surface.values.resize(T, M);
    for (int t = 0; t < T; ++t) {
      for (int m = 0; m < M; ++m) surface.values(t, m) = rng::normal(eng);
    }
    surface.block_numbers.resize(T);
    for (int t = 0; t < T; ++t) surface.block_numbers[t] = t;

    const factor::FactorDecomposition dec = factor::decompose(surface, false);
    const Eigen::MatrixXd hat = factor::reconstruct(
        dec.scores.leftCols(K), dec.basis.leftCols(K), dec.mean_row);
    const double sse = (surface.values - hat).squaredNorm();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        surface.values, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::MatrixXd svd_hat =
        svd.matrixU().leftCols(K) *
        svd.singularValues().head(K).asDiagonal() *
        svd.matrixV().leftCols(K).transpose();
    const double sse_svd = (surface.values - svd_hat).squaredNorm();
    if (std::abs(sse - sse_svd) > 1e-8) {
      fail(out, "SSE " + std::to_string(sse) + " vs SVD " +
                    std::to_string(sse_svd));
    }
    for (int c = 0; c < 20; ++c) {
      const Eigen::MatrixXd b = basis::random_orthonormal(M, K, eng);
      const double sse_c =
          (surface.values - surface.values * b * b.transpose())
              .squaredNorm();
      if (sse > sse_c + 1e-9) {
        fail(out, "competitor beat the decomposition by " +
                      std::to_string(sse - sse_c));
        break;
      }
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// 5. Synthetic round trip: CPVE and subspace recovery across seeds.

Outcome criterion_synthetic_roundtrip() {
  Outcome out;
  int good = 0;
  const int M = 201, K = 5;
  const double baseline = basis::random_subspace_baseline(K, M);
  for (int seed = 0; seed < 20; ++seed) {
    synth::SynthSpec spec = synth::default_spec(800, M, seed);
    spec.noise_sd = 0.01;
    const synth::SynthResult result = synth::generate_surface(spec);
    const factor::FactorDecomposition dec =
        factor::decompose(result.surface, true);
    const factor::VarianceExplained ve = factor::pve_cpve(dec.eigenvalues);
    const double cpve5 = ve.cpve[K - 1];
    const double d = basis::projection_distance(dec.basis.leftCols(K),
                                                result.basis);
    if (cpve5 >= 0.95 && d < 0.1 * baseline) ++good;
  }
  if (good < 18) {
    fail(out, "only " + std::to_string(good) + "/20 seeds recovered");
  }
  return out;
}

// --------------------------------------------------------------------------
// 6. GARCH MLE recovery and the Gaussian closed-form check.

Outcome criterion_garch_recovery() {
  Outcome out;
  const double omega = 0.1, alpha = 0.1, beta = 0.8;
  int good = 0;
  for (int seed = 0; seed < 20; ++seed) {
    rng::Engine eng(rng::split_seed(515, seed));
    const int T = 4000, burn = 200;
    Eigen::VectorXd y(T);
    double sig2 = omega / (1.0 - alpha - beta);
    double eps = 0.0;
    for (int t = -burn; t < T; ++t) {
      sig2 = omega + alpha * eps * eps + beta * sig2;
      eps = std::sqrt(sig2) * rng::normal(eng);
      if (t >= 0) y[t] = eps;
    }
    const tsmodel::TsFit fit = tsmodel::fit_mle(
        y, {tsmodel::MeanModel::Ar1, tsmodel::VolModel::Garch11,
            tsmodel::Innovation::Normal},
        seed);
    if (std::abs(fit.vol_params.omega - omega) <= 0.08 &&
        std::abs(fit.vol_params.alpha - alpha) <= 0.08 &&
        std::abs(fit.vol_params.beta - beta) <= 0.08) {
      ++good;
    }
  }
  if (good < 16) {
    fail(out, "only " + std::to_string(good) + "/20 seeds within 0.08");
  }

  rng::Engine eng(909);
  const int T = 500;
  Eigen::VectorXd y(T);
  y[0] = rng::normal(eng);
  for (int t = 1; t < T; ++t) {
    y[t] = 0.6 * y[t - 1] + 0.5 * rng::normal(eng);
  }
  const tsmodel::TsFit fit = tsmodel::fit_mle(
      y, {tsmodel::MeanModel::Ar1, tsmodel::VolModel::Constant,
          tsmodel::Innovation::Normal},
      0);
  const auto ols = tsmodel::fit_ar1(y);
  const double n = static_cast<double>(T - 1);
  const double sig2 = ols.residuals.squaredNorm() / n;
  const double closed =
      -0.5 * n * (std::log(2.0 * M_PI * sig2) + 1.0);
  if (std::abs(fit.loglik - closed) > 1e-6) {
    fail(out, "loglik " + std::to_string(fit.loglik) + " vs closed form " +
                  std::to_string(closed));
  }
  return out;
}

// --------------------------------------------------------------------------
// 7. Model selection picks conditional heteroskedasticity with heavy tails.

Outcome criterion_bic_selection() {
  Outcome out;
  int good = 0;
  for (int seed = 0; seed < 20; ++seed) {
    rng::Engine eng(rng::split_seed(717, seed));
    const int T = 3000, burn = 300;
    const double phi = 0.9, w = -0.2, a = 0.25, b = 0.95;
    tsmodel::DistParams tpar;
    tpar.nu = 6.0;
    const double kappa =
        tsmodel::mean_abs_innovation(tsmodel::Innovation::StudentT, tpar);
    Eigen::VectorXd y(T);
    double ln_sig2 = w / (1.0 - b);
    double y_prev = 0.0;
    for (int t = -burn; t < T; ++t) {
      const double sig = std::exp(0.5 * ln_sig2);
      const double z =
          synth::draw_innovation(tsmodel::Innovation::StudentT, tpar, eng);
      const double y_t = phi * y_prev + sig * z;
      if (t >= 0) y[t] = y_t;
      y_prev = y_t;
      ln_sig2 = w + a * (std::abs(z) - kappa) + b * ln_sig2;
    }
    const auto rows = tsmodel::bic_sweep(
        y, {tsmodel::MeanModel::Ar1},
        {tsmodel::VolModel::Constant, tsmodel::VolModel::Arch1,
         tsmodel::VolModel::Garch11, tsmodel::VolModel::Gjr111,
         tsmodel::VolModel::Tarch111, tsmodel::VolModel::Egarch101,
         tsmodel::VolModel::Egarch111},
        {tsmodel::Innovation::Normal, tsmodel::Innovation::StudentT,
         tsmodel::Innovation::SkewT, tsmodel::Innovation::Ged},
        seed, 4);
    for (const auto& row : rows) {
      if (!row.is_best) continue;
      const bool persistent_vol =
          row.spec.vol != tsmodel::VolModel::Constant &&
          row.spec.vol != tsmodel::VolModel::Arch1;
      const bool heavy = row.spec.dist == tsmodel::Innovation::StudentT ||
                         row.spec.dist == tsmodel::Innovation::SkewT;
      if (persistent_vol && heavy) ++good;
      break;
    }
  }
  if (good < 16) {
    fail(out, "only " + std::to_string(good) +
                  "/20 sweeps selected a heavy-tailed variance model");
  }
  if (tsmodel::evidence_label(1.0) != "not worth a bare mention" ||
      tsmodel::evidence_label(2.0) != "positive" ||
      tsmodel::evidence_label(6.0) != "strong" ||
      tsmodel::evidence_label(10.0) != "very strong") {
    fail(out, "evidence labels do not match the cutoffs");
  }
  return out;
}

// --------------------------------------------------------------------------
// 8. Unit-root test calibration.

Outcome criterion_adf_calibration() {
  Outcome out;
  int rw_kept = 0, trend_rejected = 0;
  for (int seed = 0; seed < 100; ++seed) {
    rng::Engine eng(rng::split_seed(818, seed));
    const int T = 400;
    Eigen::VectorXd rw(T);
    rw[0] = rng::normal(eng);
    for (int t = 1; t < T; ++t) rw[t] = rw[t - 1] + rng::normal(eng);
    if (tsmodel::adf_test(rw).p_value > 0.10) ++rw_kept;

    Eigen::VectorXd st(T);
    double u = 0.0;
    for (int t = 0; t < T; ++t) {
      u = 0.2 * u + rng::normal(eng);
      st[t] = 0.01 * t + u;
    }
    if (tsmodel::adf_test(st).p_value < 0.05) ++trend_rejected;
  }
  if (rw_kept < 85) {
    fail(out, "random walk kept in only " + std::to_string(rw_kept) + "/100");
  }
  if (trend_rejected < 90) {
    fail(out, "trend-stationary rejected in only " +
                  std::to_string(trend_rejected) + "/100");
  }
  return out;
}

// --------------------------------------------------------------------------
// 9. Mean-reversion time identities.

Outcome criterion_mean_reversion() {
  Outcome out;
  if (tsmodel::mean_reversion_time(std::exp(-1.0)) != 1.0) {
    fail(out, "tau(e^-1) is not exactly 1");
  }
  const double tau = tsmodel::mean_reversion_time(std::exp(-1.0 / 9.156));
  if (std::abs(tau - 9.156) > 1e-9) {
    fail(out, "tau anchor error " + std::to_string(tau - 9.156));
  }
  return out;
}

// --------------------------------------------------------------------------
// 10. Forecast identities and ensemble reproducibility.

Outcome criterion_forecast() {
  Outcome out;
  const int M = 21, K = 2;
  const Eigen::MatrixXd b =
      basis::orthonormal_grid_basis(basis::sample_legendre(M, K), K);
  Eigen::VectorXd mean_row = Eigen::VectorXd::Constant(M, 40.0);
  Eigen::VectorXd current(K);
  current << 4.0, -2.0;

  const Eigen::VectorXd at0 =
      pipeline::forecast_curve({0.5, 0.8}, current, b, mean_row, 0);
  const Eigen::VectorXd fitted = mean_row + b * current;
  if ((at0 - fitted).cwiseAbs().maxCoeff() != 0.0) {
    fail(out, "h=0 is not the fitted curve");
  }

  const Eigen::VectorXd rev =
      pipeline::forecast_curve({0.0, 0.0}, current, b, mean_row, 4);
  if ((rev - mean_row).cwiseAbs().maxCoeff() != 0.0) {
    fail(out, "phi=0 does not revert to the mean curve");
  }

  Eigen::VectorXd scaled(K);
  scaled << 0.25 * current[0], 0.25 * current[1];
  const Eigen::VectorXd two =
      pipeline::forecast_curve({0.5, 0.5}, current, b, mean_row, 2);
  const Eigen::VectorXd expected = mean_row + b * scaled;
  if ((two - expected).cwiseAbs().maxCoeff() != 0.0) {
    fail(out, "phi=0.5, h=2 is not exactly quartered");
  }

  pipeline::VarGarchParams params;
  params.a = Eigen::VectorXd::Constant(K, 0.1);
  params.A = Eigen::MatrixXd::Identity(K, K) * 0.5;
  params.omega = Eigen::VectorXd::Constant(K, 0.05);
  params.alpha = Eigen::VectorXd::Constant(K, 0.05);
  params.beta = Eigen::VectorXd::Constant(K, 0.9);
  params.R = Eigen::MatrixXd::Identity(K, K);
  params.R(0, 1) = params.R(1, 0) = 0.25;
  params.nu = 6.0;
  pipeline::VarGarchState state;
  state.scores = current;
  state.sigma2 = Eigen::VectorXd::Constant(K, 1.0);
  state.residuals = Eigen::VectorXd::Constant(K, 0.1);
  const auto e1 = pipeline::simulate_var_garch(params, state, 5, 400, 31, 2);
  const auto e2 = pipeline::simulate_var_garch(params, state, 5, 400, 31, 4);
  for (int h = 0; h < 5; ++h) {
    if ((e1.scores[h] - e2.scores[h]).cwiseAbs().maxCoeff() != 0.0) {
      fail(out, "ensemble depends on the rerun/thread count");
      break;
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// 11. Shock linearity on the polynomial basis.

Outcome criterion_shock() {
  Outcome out;
  const int M = 201, K = 5;
  const Eigen::MatrixXd b =
      basis::orthonormal_grid_basis(basis::sample_legendre(M, K), K);
  rng::Engine eng(4242);
  Eigen::VectorXd mean_row(M), scores(K);
  for (int m = 0; m < M; ++m) mean_row[m] = 40.0 + rng::normal(eng);
  for (int k = 0; k < K; ++k) scores[k] = rng::normal(eng);
  for (int k = 1; k <= K; ++k) {
    const double amount = 0.5 + k;
    const auto [baseline, shocked] =
        pipeline::shock_cross_section(scores, b, mean_row, k, amount);
    const Eigen::VectorXd diff = shocked - baseline - amount * b.col(k - 1);
    if (diff.cwiseAbs().maxCoeff() > 1e-12) {
      fail(out, "nonlinearity at k=" + std::to_string(k));
    }
    if (k == 1) {
      const Eigen::VectorXd step = shocked - baseline;
      if ((step.array() - step[0]).abs().maxCoeff() > 1e-12) {
        fail(out, "k=1 shock is not a uniform shift");
      }
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// 12. End-to-end command-line run on a T=800, M=201 synthetic surface.

int run_cli(const std::string& cli, const std::string& args,
            const std::string& log) {
  const std::string cmd = "\"" + cli + "\" " + args + " >>\"" + log +
                          "\" 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -2;
}

bool file_has_header(const std::string& path, const std::string& header,
                     Outcome& out) {
  const std::string text = io::read_text(path);
  if (text.rfind(header, 0) != 0) {
    fail(out, path + " header mismatch");
    return false;
  }
  return true;
}

bool manifest_ok(const std::string& primary, const std::string& subcommand,
                 Outcome& out) {
  namespace fs = std::filesystem;
  const std::string path = primary + ".manifest.json";
  if (!fs::exists(path)) {
    fail(out, "missing manifest " + path);
    return false;
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_text(path));
  } catch (const std::exception& e) {
    fail(out, path + " does not parse: " + e.what());
    return false;
  }
  if (j.value("subcommand", "") != subcommand) {
    fail(out, path + " subcommand mismatch");
    return false;
  }
  for (const auto& o : j.at("outputs")) {
    if (!fs::exists(o.get<std::string>())) {
      fail(out, "manifest lists missing output " + o.get<std::string>());
      return false;
    }
  }
  return true;
}

Outcome criterion_end_to_end(const std::string& cli) {
  Outcome out;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("liqsurf_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string d = dir.string() + "/";
  const std::string log = d + "cli.log";

  struct Step {
    std::string name;
    std::string args;
    std::string primary;
  };
  const std::vector<Step> steps = {
      {"synth",
       "synth --out " + d + "surface.csv --truth-out " + d +
           "truth.csv --T 800 --M 201 --seed 7",
       d + "surface.csv"},
      {"synth",
       "synth --out " + d + "surface2.csv --T 800 --M 201 --seed 7",
       d + "surface2.csv"},
      {"decompose",
       "decompose --in " + d + "surface.csv --out " + d +
           "dec.json --K 5 --k-max 7 --scores-out " + d +
           "scores.csv --svg",
       d + "dec.json"},
      {"roll",
       "roll --in " + d + "surface.csv --out-prefix " + d +
           "roll --window 400 --step 100 --K-set 3,4,5 --svg",
       d + "roll_drift.csv"},
      {"sweep",
       "sweep --in " + d + "scores.csv --out " + d +
           "sweep.csv --factor 1 --threads 4",
       d + "sweep.csv"},
      {"shock",
       "shock --in " + d + "dec.json --out " + d + "shock.csv --k 2 --svg",
       d + "shock.csv"},
      {"forecast",
       "forecast --in " + d + "dec.json --out " + d +
           "forecast.csv --K 5 --horizon 5 --var-garch --paths 500 --seed 3 "
           "--threads 4 --svg",
       d + "forecast.csv"},
      {"report",
       "report --out " + d + "report.md --surface " + d +
           "surface.csv --eigenvalues " + d + "roll_eigenvalues.csv --cpve " +
           d + "roll_cpve.csv --drift " + d + "roll_drift.csv --sweep " + d +
           "sweep.csv --forecast " + d + "forecast.csv --shock " + d +
           "shock.csv",
       d + "report.md"},
  };
  for (const auto& step : steps) {
    const int code = run_cli(cli, step.args, log);
    if (code != 0) {
      fail(out, step.name + " exited with " + std::to_string(code));
      std::cerr << io::read_text(log);
      return out;
    }
    if (!manifest_ok(step.primary, step.name, out)) return out;
  }

  if (io::read_text(d + "surface.csv") != io::read_text(d + "surface2.csv")) {
    fail(out, "same-seed surfaces differ");
  }
  file_has_header(d + "surface.csv", "block,-1.000000,", out);
  file_has_header(d + "truth.csv", "block,beta_1,", out);
  file_has_header(d + "scores.csv", "block,beta_1,", out);
  file_has_header(d + "roll_eigenvalues.csv", "window_start_block,lambda_1,",
                  out);
  file_has_header(d + "roll_cpve.csv", "window_start_block,K,cpve", out);
  file_has_header(d + "roll_drift.csv",
                  "window_start_block,K,d_to_inception,d_to_legendre,baseline",
                  out);
  file_has_header(
      d + "sweep.csv",
      "series_id,mean,vol,dist,converged,loglik,d,bic,delta_bic,label", out);
  file_has_header(d + "forecast.csv", "h,x,q05,q25,q50,q75,q95", out);
  file_has_header(d + "shock.csv", "x,baseline,shocked", out);
  file_has_header(d + "report.md", "#", out);
  for (const std::string svg :
       {d + "dec_basis.svg", d + "roll_drift.svg", d + "shock.svg",
        d + "forecast.svg"}) {
    if (!fs::exists(svg)) fail(out, "missing plot " + svg);
  }

  try {
    const auto dec = io::decomposition_from_json(io::read_text(d + "dec.json"));
    if (dec.basis.cols() != 7 || dec.grid_x.size() != 201) {
      fail(out, "stored decomposition has unexpected shape");
    }
    const auto sweep = io::read_text(d + "sweep.csv");
    if (sweep.find(",\xe2\x80\x94\n") == std::string::npos) {
      fail(out, "sweep CSV has no best-row marker");
    }
  } catch (const std::exception& e) {
    fail(out, e.what());
  }
  if (out.pass) fs::remove_all(dir);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  struct Entry {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries = {
      {"polynomial closed forms", criterion_closed_forms},
      {"random-subspace baseline", criterion_random_baseline},
      {"distance bounds and symmetry", criterion_distance_properties},
      {"rank-K reconstruction optimality", criterion_pca_optimality},
      {"synthetic round trip", criterion_synthetic_roundtrip},
      {"volatility MLE recovery", criterion_garch_recovery},
      {"model selection by BIC", criterion_bic_selection},
      {"unit-root test calibration", criterion_adf_calibration},
      {"mean-reversion identities", criterion_mean_reversion},
      {"forecast identities", criterion_forecast},
      {"shock linearity", criterion_shock},
      {"end-to-end command line", [&] { return criterion_end_to_end(cli); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = entries[i].run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%2zu] %s  %s (%.1f s)%s%s\n", i + 1,
                out.pass ? "PASS" : "FAIL", entries[i].name, secs,
                out.detail.empty() ? "" : "  -- ",
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, entries.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", entries.size());
  return 0;
}
