#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "liqsurf/basis.hpp"
#include "liqsurf/factor.hpp"
#include "liqsurf/ingest.hpp"
#include "liqsurf/io.hpp"
#include "liqsurf/pipeline.hpp"
#include "liqsurf/synth.hpp"
#include "liqsurf/tsmodel.hpp"
#include "report.hpp"
#include "svg.hpp"

namespace {

using nlohmann::json;
using namespace liqsurf;

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<int> parse_int_list(const std::string& text,
                                const std::string& flag) {
  std::vector<int> out;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t end = text.find(',', begin);
    const std::string cell =
        text.substr(begin, end == std::string::npos ? end : end - begin);
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw usage_error(flag + ": '" + cell + "' is not an integer");
    }
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  if (out.empty()) throw usage_error(flag + ": empty list");
  return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t end = text.find(',', begin);
    out.push_back(
        text.substr(begin, end == std::string::npos ? end : end - begin));
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  return out;
}

// foo/bar.csv + "_M51" -> foo/bar_M51.csv
std::string with_suffix(const std::string& path, const std::string& suffix) {
  const std::size_t slash = path.find_last_of('/');
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + suffix;
  }
  return path.substr(0, dot) + suffix + path.substr(dot);
}

// foo/bar.csv -> foo/bar.svg
std::string sibling_svg(const std::string& path) {
  const std::size_t slash = path.find_last_of('/');
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + ".svg";
  }
  return path.substr(0, dot) + ".svg";
}

void write_manifest(const std::string& primary_out,
                    const std::string& subcommand,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs,
                    const json& config, std::uint64_t seed) {
  io::atomic_write_text(
      primary_out + ".manifest.json",
      io::manifest_json(subcommand, inputs, outputs, config.dump(), seed));
}

void require_odd_m(int M) {
  if (M < 3 || M % 2 == 0) {
    throw usage_error("--M must be an odd integer >= 3, got " +
                      std::to_string(M));
  }
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string in, out, format = "snapshot-json", m_list = "201";
  std::int64_t block_spacing = 1;
  bool allow_gaps = false;
};

void run_ingest(const IngestArgs& a) {
  ingest::SnapshotFormat format;
  if (a.format == "snapshot-json") {
    format = ingest::SnapshotFormat::SnapshotJson;
  } else if (a.format == "positions-json") {
    format = ingest::SnapshotFormat::PositionsJson;
  } else {
    throw usage_error("--format must be snapshot-json or positions-json");
  }
  const std::vector<int> ms = parse_int_list(a.m_list, "--M");
  for (int M : ms) require_odd_m(M);
  if (a.block_spacing < 1) throw usage_error("--block-spacing must be >= 1");

  const auto snapshots = ingest::parse_snapshot_file(a.in, format);
  for (int M : ms) {
    const std::string out =
        ms.size() > 1 ? with_suffix(a.out, "_M" + std::to_string(M)) : a.out;
    std::size_t dropped = 0;
    const ingest::SurfaceGrid surface =
        ingest::build_surface(snapshots, a.block_spacing, M, a.allow_gaps,
                              &dropped);
    if (dropped > 0) {
      std::cerr << "note: dropped " << dropped << " rows with missing blocks\n";
    }
    io::atomic_write_text(out, io::surface_to_csv(surface));
    write_manifest(out, "ingest", {a.in}, {out},
                   json{{"format", a.format},
                        {"M", M},
                        {"block_spacing", a.block_spacing},
                        {"allow_gaps", a.allow_gaps}},
                   0);
  }
}

struct SynthArgs {
  std::string out, truth_out;
  int T = 800, K = 5;
  std::string m_list = "201";
  double noise_sd = 0.1, tent_a = 42.0, tent_b = 2.0;
  std::uint64_t seed = 0;
  std::int64_t block_spacing = 1;
  int unit_root_factor = 0;
};

void run_synth(const SynthArgs& a) {
  const std::vector<int> ms = parse_int_list(a.m_list, "--M");
  for (int M : ms) require_odd_m(M);
  if (a.T < 1) throw usage_error("--T must be positive");
  if (a.K < 1 || a.K > 5) throw usage_error("--K must be in 1..5");
  if (a.noise_sd < 0) throw usage_error("--noise-sd must be >= 0");
  if (a.unit_root_factor < 0 || a.unit_root_factor > a.K) {
    throw usage_error("--unit-root-factor must be in 1..K (0 disables)");
  }
  for (int M : ms) {
    const std::string suffix =
        ms.size() > 1 ? "_M" + std::to_string(M) : std::string();
    synth::SynthSpec spec = synth::default_spec(a.T, M, a.seed);
    spec.factors.resize(a.K);
    spec.noise_sd = a.noise_sd;
    spec.tent_a = a.tent_a;
    spec.tent_b = a.tent_b;
    spec.block_spacing = a.block_spacing;
    if (a.unit_root_factor > 0) {
      spec.factors[a.unit_root_factor - 1].phi = 1.0;
    }
    const synth::SynthResult result = synth::generate_surface(spec);
    const std::string out = with_suffix(a.out, suffix);
    io::atomic_write_text(out, io::surface_to_csv(result.surface));
    std::vector<std::string> outputs{out};
    if (!a.truth_out.empty()) {
      const std::string truth = with_suffix(a.truth_out, suffix);
      io::CoefficientTable table;
      table.blocks = result.surface.block_numbers;
      table.values = result.scores;
      io::atomic_write_text(truth, io::coefficients_to_csv(table));
      outputs.push_back(truth);
    }
    write_manifest(out, "synth", {}, outputs,
                   json{{"T", a.T},
                        {"M", M},
                        {"K", a.K},
                        {"noise_sd", a.noise_sd},
                        {"tent_a", a.tent_a},
                        {"tent_b", a.tent_b},
                        {"block_spacing", a.block_spacing},
                        {"unit_root_factor", a.unit_root_factor}},
                   a.seed);
  }
}

struct DecomposeArgs {
  std::string in, out, scores_out;
  std::string basis = "pca", quadrature = "gls";
  int K = 5, k_max = 10;
  bool no_center = false;
  bool svg = false;
};

void run_decompose(const DecomposeArgs& a) {
  if (a.basis != "pca" && a.basis != "legendre") {
    throw usage_error("--basis must be pca or legendre");
  }
  if (a.quadrature != "gls" && a.quadrature != "simpson-sum") {
    throw usage_error("--quadrature must be gls or simpson-sum");
  }
  if (a.K < 1) throw usage_error("--K must be >= 1");
  if (a.k_max < 1) throw usage_error("--k-max must be >= 1");

  const ingest::SurfaceGrid surface = io::surface_from_csv(io::read_text(a.in));
  std::vector<std::string> outputs;
  if (a.basis == "pca") {
    const factor::FactorDecomposition dec =
        factor::decompose(surface, !a.no_center);
    io::atomic_write_text(
        a.out, io::decomposition_to_json(dec, surface.grid_x, a.k_max));
    outputs.push_back(a.out);
    if (!a.scores_out.empty()) {
      io::CoefficientTable table;
      table.blocks = surface.block_numbers;
      table.values = dec.scores.leftCols(std::min<Eigen::Index>(
          a.K, dec.scores.cols()));
      io::atomic_write_text(a.scores_out, io::coefficients_to_csv(table));
      outputs.push_back(a.scores_out);
    }
    if (a.svg) {
      std::vector<svg::Series> series;
      const int k_plot = std::min<int>(3, static_cast<int>(dec.basis.cols()));
      for (int k = 0; k < k_plot; ++k) {
        series.push_back({"u_" + std::to_string(k + 1), surface.grid_x,
                          dec.basis.col(k)});
      }
      const std::string svg_path = sibling_svg(with_suffix(a.out, "_basis"));
      io::atomic_write_text(
          svg_path, svg::line_plot(series, "Leading factor shapes", "x",
                                   "loading"));
      outputs.push_back(svg_path);
    }
  } else {
    const basis::FixedBasis fixed =
        basis::sample_legendre(surface.grid_x, a.K);
    const basis::ProjectionMethod method =
        a.quadrature == "gls" ? basis::ProjectionMethod::WeightedLeastSquares
                              : basis::ProjectionMethod::QuadratureSum;
    io::CoefficientTable table;
    table.blocks = surface.block_numbers;
    table.values = basis::project_fixed_basis(surface.values, fixed, a.K,
                                              method);
    io::atomic_write_text(a.out, io::coefficients_to_csv(table));
    outputs.push_back(a.out);
  }
  write_manifest(a.out, "decompose", {a.in}, outputs,
                 json{{"basis", a.basis},
                      {"quadrature", a.quadrature},
                      {"K", a.K},
                      {"k_max", a.k_max},
                      {"center", !a.no_center}},
                 0);
}

struct RollArgs {
  std::string in, out_prefix;
  std::string window_list = "400", k_set = "3,4,5,6,7";
  int step = 10;
  bool svg = false;
};

void run_roll(const RollArgs& a) {
  const std::vector<int> windows = parse_int_list(a.window_list, "--window");
  const std::vector<int> k_set = parse_int_list(a.k_set, "--K-set");
  if (a.step < 1) throw usage_error("--step must be >= 1");
  for (int w : windows) {
    if (w < 2) throw usage_error("--window entries must be >= 2");
  }
  const ingest::SurfaceGrid surface = io::surface_from_csv(io::read_text(a.in));
  const int M = static_cast<int>(surface.cols());
  const int k_max = *std::max_element(k_set.begin(), k_set.end());
  if (k_max > M) throw usage_error("--K-set entries must be <= M");
  const Eigen::MatrixXd reference = basis::orthonormal_grid_basis(
      basis::sample_legendre(surface.grid_x, k_max), k_max);

  for (int W : windows) {
    if (W < M) {
      std::cerr << "warning: window " << W << " is below the grid size " << M
                << "; the windowed covariance is rank deficient\n";
    }
    const std::string suffix =
        windows.size() > 1 ? "_W" + std::to_string(W) : std::string();
    pipeline::RollingConfig config;
    config.window_T = W;
    config.step = a.step;
    config.k_set = k_set;
    const auto decs = pipeline::rolling_decompose(surface, config);
    const pipeline::DriftSeries drift =
        pipeline::drift_series(decs, reference, k_set);

    const std::string eig_path = a.out_prefix + suffix + "_eigenvalues.csv";
    const std::string cpve_path = a.out_prefix + suffix + "_cpve.csv";
    const std::string drift_path = a.out_prefix + suffix + "_drift.csv";
    io::atomic_write_text(eig_path, io::eigenvalues_to_csv(decs));
    io::atomic_write_text(cpve_path, io::cpve_to_csv(decs));
    io::atomic_write_text(drift_path, io::drift_to_csv(drift));
    std::vector<std::string> outputs{eig_path, cpve_path, drift_path};

    if (a.svg) {
      std::vector<svg::Series> series;
      Eigen::VectorXd xs(drift.window_starts.size());
      for (std::size_t j = 0; j < drift.window_starts.size(); ++j) {
        xs[j] = static_cast<double>(drift.window_starts[j]);
      }
      for (std::size_t i = 0; i < drift.k_values.size(); ++i) {
        series.push_back({"K=" + std::to_string(drift.k_values[i]), xs,
                          drift.d_to_inception.col(i)});
      }
      const std::string svg_path = a.out_prefix + suffix + "_drift.svg";
      io::atomic_write_text(
          svg_path, svg::line_plot(series, "Subspace drift from inception",
                                   "window start block", "distance"));
      outputs.push_back(svg_path);
    }
    write_manifest(drift_path, "roll", {a.in}, outputs,
                   json{{"window_T", W},
                        {"step", a.step},
                        {"K_set", k_set}},
                   0);
  }
}

tsmodel::ModelSpec parse_spec(const std::string& mean, const std::string& vol,
                              const std::string& dist) {
  tsmodel::ModelSpec spec;
  try {
    spec.mean = tsmodel::mean_model_from_string(mean);
    spec.vol = tsmodel::vol_model_from_string(vol);
    spec.dist = tsmodel::innovation_from_string(dist);
  } catch (const validation_error& e) {
    throw usage_error(e.what());
  }
  return spec;
}

struct FitArgs {
  std::string in, out;
  int factor = 1;
  std::string mean = "ar1", vol = "garch11", dist = "t";
  std::uint64_t seed = 0;
  bool include_sigma = false;
};

void run_fit(const FitArgs& a) {
  const tsmodel::ModelSpec spec = parse_spec(a.mean, a.vol, a.dist);
  if (a.factor < 1) throw usage_error("--factor must be >= 1");
  const io::CoefficientTable table =
      io::coefficients_from_csv(io::read_text(a.in));
  if (a.factor > table.values.cols()) {
    throw validation_error("factor " + std::to_string(a.factor) +
                           " exceeds the " +
                           std::to_string(table.values.cols()) +
                           " columns in " + a.in);
  }
  const Eigen::VectorXd raw = table.values.col(a.factor - 1);
  const double series_mean = raw.mean();
  const Eigen::VectorXd series = raw.array() - series_mean;
  const tsmodel::TsFit fit = tsmodel::fit_mle(series, spec, a.seed);

  json j = json::parse(io::fit_to_json(fit));
  j["series_id"] = "beta_" + std::to_string(a.factor);
  j["series_mean"] = series_mean;
  j["mean_reversion_time"] = tsmodel::mean_reversion_time(
      fit.mean_params.phi.size() > 0 ? fit.mean_params.phi[0] : 0.0);
  if (a.include_sigma) {
    const Eigen::VectorXd eps =
        tsmodel::mean_residuals(spec.mean, fit.mean_params, series);
    const Eigen::VectorXd sigma2 = tsmodel::volatility_filter(
        spec.vol, fit.vol_params, eps, eps.squaredNorm() / eps.size());
    json arr = json::array();
    for (Eigen::Index i = 0; i < sigma2.size(); ++i) arr.push_back(sigma2[i]);
    j["sigma2"] = arr;
  }
  io::atomic_write_text(a.out, j.dump(1) + "\n");
  write_manifest(a.out, "fit", {a.in}, {a.out},
                 json{{"factor", a.factor},
                      {"mean", a.mean},
                      {"vol", a.vol},
                      {"dist", a.dist},
                      {"include_sigma", a.include_sigma}},
                 a.seed);
}

struct SweepArgs {
  std::string in, out;
  std::string factors = "1";
  std::string means = "ar1";
  std::string vols = "const,arch1,garch11,gjr111,tarch111,egarch101,egarch111";
  std::string dists = "normal,t,skewt,ged";
  std::uint64_t seed = 0;
  int threads = 0;
};

void run_sweep(const SweepArgs& a) {
  std::vector<tsmodel::MeanModel> means;
  std::vector<tsmodel::VolModel> vols;
  std::vector<tsmodel::Innovation> dists;
  try {
    for (const auto& n : parse_name_list(a.means)) {
      means.push_back(tsmodel::mean_model_from_string(n));
    }
    for (const auto& n : parse_name_list(a.vols)) {
      vols.push_back(tsmodel::vol_model_from_string(n));
    }
    for (const auto& n : parse_name_list(a.dists)) {
      dists.push_back(tsmodel::innovation_from_string(n));
    }
  } catch (const validation_error& e) {
    throw usage_error(e.what());
  }
  const std::vector<int> factors = parse_int_list(a.factors, "--factor");
  const io::CoefficientTable table =
      io::coefficients_from_csv(io::read_text(a.in));
  for (int f : factors) {
    if (f < 1 || f > table.values.cols()) {
      throw validation_error("factor " + std::to_string(f) +
                             " exceeds the table in " + a.in);
    }
  }
  for (int f : factors) {
    const std::string out =
        factors.size() > 1 ? with_suffix(a.out, "_F" + std::to_string(f))
                           : a.out;
    const Eigen::VectorXd raw = table.values.col(f - 1);
    const Eigen::VectorXd series = raw.array() - raw.mean();
    const auto rows = tsmodel::bic_sweep(series, means, vols, dists, a.seed,
                                         a.threads);
    io::atomic_write_text(
        out, io::sweep_to_csv("beta_" + std::to_string(f), rows));
    write_manifest(out, "sweep", {a.in}, {out},
                   json{{"factor", f},
                        {"means", a.means},
                        {"vols", a.vols},
                        {"dists", a.dists},
                        {"threads", a.threads}},
                   a.seed);
  }
}

struct ShockArgs {
  std::string in, out;
  int row = -1, k = 1;
  double amount = 0.0;
  bool amount_set = false;
  bool svg = false;
};

void run_shock(const ShockArgs& a) {
  const io::StoredDecomposition dec =
      io::decomposition_from_json(io::read_text(a.in));
  const Eigen::Index T = dec.scores.rows();
  if (T == 0) throw validation_error("decomposition has no score rows");
  Eigen::Index row = a.row;
  if (row < 0) row = T + row;
  if (row < 0 || row >= T) {
    throw validation_error("--row is outside the score panel");
  }
  if (a.k < 1 || a.k > dec.scores.cols()) {
    throw validation_error("--k is outside the stored components");
  }
  double amount = a.amount;
  if (!a.amount_set) {
    const Eigen::VectorXd col = dec.scores.col(a.k - 1);
    const double mu = col.mean();
    amount = std::sqrt((col.array() - mu).square().sum() / col.size());
  }
  const auto [baseline, shocked] = pipeline::shock_cross_section(
      dec.scores.row(row).transpose(), dec.basis, dec.mean_row, a.k, amount);
  io::atomic_write_text(a.out,
                        io::shock_to_csv(dec.grid_x, baseline, shocked));
  std::vector<std::string> outputs{a.out};
  if (a.svg) {
    const std::string svg_path = sibling_svg(a.out);
    io::atomic_write_text(
        svg_path,
        svg::line_plot({{"baseline", dec.grid_x, baseline},
                        {"shocked", dec.grid_x, shocked}},
                       "Factor shock cross-section", "x", "log liquidity"));
    outputs.push_back(svg_path);
  }
  write_manifest(a.out, "shock", {a.in}, outputs,
                 json{{"row", a.row}, {"k", a.k}, {"amount", amount}}, 0);
}

struct ForecastArgs {
  std::string in, out;
  int K = 5, h = 10, paths = 2000, threads = 0;
  std::uint64_t seed = 0;
  bool var_garch = false;
  bool svg = false;
};

void run_forecast(const ForecastArgs& a) {
  if (a.K < 1) throw usage_error("--K must be >= 1");
  if (a.h < 1) throw usage_error("--h must be >= 1");
  if (a.paths < 1) throw usage_error("--paths must be >= 1");
  const io::StoredDecomposition dec =
      io::decomposition_from_json(io::read_text(a.in));
  if (a.K > dec.scores.cols()) {
    throw validation_error("--K exceeds the stored components");
  }
  const Eigen::Index T = dec.scores.rows();
  if (T < 3) throw validation_error("too few score rows to forecast");

  // Forecast around the in-sample mean of each score series: demean, run
  // the linear dynamics, and fold the score means into the mean curve.
  const Eigen::MatrixXd raw = dec.scores.leftCols(a.K);
  const Eigen::RowVectorXd score_mean = raw.colwise().mean();
  const Eigen::MatrixXd centered = raw.rowwise() - score_mean;
  const Eigen::MatrixXd basis_k = dec.basis.leftCols(a.K);
  const Eigen::VectorXd mean_row =
      dec.mean_row + basis_k * score_mean.transpose();

  std::vector<std::string> outputs{a.out};
  if (!a.var_garch) {
    std::vector<double> phis;
    for (int k = 0; k < a.K; ++k) {
      phis.push_back(tsmodel::fit_ar1(centered.col(k)).phi);
    }
    const Eigen::VectorXd current = centered.row(T - 1).transpose();
    std::string csv = "h,x,value\n";
    for (int h = 1; h <= a.h; ++h) {
      const Eigen::VectorXd curve =
          pipeline::forecast_curve(phis, current, basis_k, mean_row, h);
      for (Eigen::Index m = 0; m < curve.size(); ++m) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%d,%.6f,%.17g\n", h, dec.grid_x[m],
                      curve[m]);
        csv += buf;
      }
    }
    io::atomic_write_text(a.out, csv);
  } else {
    const pipeline::EstimatedVarGarch est =
        pipeline::estimate_var_garch(centered, a.seed);
    if (est.params.nu <= 2.0) {
      throw validation_error("estimated nu is out of range");
    }
    const pipeline::VarGarchEnsemble ens = pipeline::simulate_var_garch(
        est.params, est.state, a.h, a.paths, a.seed, a.threads);
    if (ens.spectral_radius >= 1.0) {
      std::cerr << "warning: VAR(1) spectral radius "
                << ens.spectral_radius << " >= 1; paths may diverge\n";
    }
    const pipeline::CurveQuantiles q =
        pipeline::curve_quantiles(ens, basis_k, mean_row);
    io::atomic_write_text(a.out, io::forecast_to_csv(q, dec.grid_x));
    if (a.svg) {
      const Eigen::Index last = q.q50.rows() - 1;
      std::vector<svg::Series> series{
          {"q05", dec.grid_x, q.q05.row(last).transpose()},
          {"q50", dec.grid_x, q.q50.row(last).transpose()},
          {"q95", dec.grid_x, q.q95.row(last).transpose()}};
      const std::string svg_path = sibling_svg(a.out);
      io::atomic_write_text(
          svg_path, svg::line_plot(series,
                                   "Forecast quantiles at h=" +
                                       std::to_string(a.h),
                                   "x", "log liquidity"));
      outputs.push_back(svg_path);
    }
  }
  write_manifest(a.out, "forecast", {a.in}, outputs,
                 json{{"K", a.K},
                      {"h", a.h},
                      {"paths", a.paths},
                      {"var_garch", a.var_garch},
                      {"threads", a.threads}},
                 a.seed);
}

struct ReportArgs {
  std::string out;
  report::ReportInputs inputs;
};

void run_report(const ReportArgs& a) {
  const std::string md = report::build_report(a.inputs);
  io::atomic_write_text(a.out, md);
  std::vector<std::string> inputs;
  for (const std::string* p :
       {&a.inputs.surface_csv, &a.inputs.eigenvalues_csv, &a.inputs.cpve_csv,
        &a.inputs.drift_csv, &a.inputs.sweep_csv, &a.inputs.forecast_csv,
        &a.inputs.shock_csv}) {
    if (!p->empty()) inputs.push_back(*p);
  }
  write_manifest(a.out, "report", inputs, {a.out}, json::object(), 0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Factor analysis of tick-level liquidity surfaces"};
  app.require_subcommand(1);
  std::function<void()> action;

  IngestArgs ingest_args;
  auto* c_ingest = app.add_subcommand(
      "ingest", "Build a rank-standardized log-liquidity surface from "
                "snapshot JSON lines");
  c_ingest->add_option("--in", ingest_args.in, "snapshot JSONL file")
      ->required();
  c_ingest->add_option("--out", ingest_args.out, "surface CSV")->required();
  c_ingest->add_option("--format", ingest_args.format,
                       "snapshot-json or positions-json");
  c_ingest->add_option("--M", ingest_args.m_list,
                       "grid size(s), odd, comma separated");
  c_ingest->add_option("--block-spacing", ingest_args.block_spacing,
                       "blocks between retained rows");
  c_ingest->add_flag("--allow-gaps", ingest_args.allow_gaps,
                     "drop missing blocks instead of failing");
  c_ingest->callback([&] { action = [&] { run_ingest(ingest_args); }; });

  SynthArgs synth_args;
  auto* c_synth = app.add_subcommand(
      "synth", "Generate a synthetic surface with known factor structure");
  c_synth->add_option("--out", synth_args.out, "surface CSV")->required();
  c_synth->add_option("--truth-out", synth_args.truth_out,
                      "ground-truth score CSV");
  c_synth->add_option("--T", synth_args.T, "rows");
  c_synth->add_option("--M", synth_args.m_list,
                      "grid size(s), odd, comma separated");
  c_synth->add_option("--K", synth_args.K, "number of factors (1..5)");
  c_synth->add_option("--noise-sd", synth_args.noise_sd,
                      "idiosyncratic noise sd");
  c_synth->add_option("--tent-a", synth_args.tent_a, "mean level at x=0");
  c_synth->add_option("--tent-b", synth_args.tent_b, "mean tent slope");
  c_synth->add_option("--block-spacing", synth_args.block_spacing,
                      "block spacing of the emitted rows");
  c_synth->add_option("--unit-root-factor", synth_args.unit_root_factor,
                      "give this factor (1-based) a unit root");
  c_synth->add_option("--seed", synth_args.seed, "RNG seed");
  c_synth->callback([&] { action = [&] { run_synth(synth_args); }; });

  DecomposeArgs dec_args;
  auto* c_dec = app.add_subcommand(
      "decompose", "Eigendecompose a surface (pca) or project it on the "
                   "polynomial basis (legendre)");
  c_dec->add_option("--in", dec_args.in, "surface CSV")->required();
  c_dec->add_option("--out", dec_args.out,
                    "output (JSON for pca, CSV for legendre)")->required();
  c_dec->add_option("--basis", dec_args.basis, "pca or legendre");
  c_dec->add_option("--quadrature", dec_args.quadrature,
                    "legendre coefficients: gls or simpson-sum");
  c_dec->add_option("--K", dec_args.K, "coefficient count");
  c_dec->add_option("--k-max", dec_args.k_max,
                    "stored basis/score columns in the JSON");
  c_dec->add_option("--scores-out", dec_args.scores_out,
                    "also write the first K scores as CSV (pca)");
  c_dec->add_flag("--no-center", dec_args.no_center,
                  "skip demeaning before the covariance");
  c_dec->add_flag("--svg", dec_args.svg, "plot the leading shapes");
  c_dec->callback([&] { action = [&] { run_decompose(dec_args); }; });

  RollArgs roll_args;
  auto* c_roll = app.add_subcommand(
      "roll", "Rolling-window decompositions, CPVE and subspace drift");
  c_roll->add_option("--in", roll_args.in, "surface CSV")->required();
  c_roll->add_option("--out-prefix", roll_args.out_prefix,
                     "prefix for the output CSVs")->required();
  c_roll->add_option("--window", roll_args.window_list,
                     "window length(s), comma separated");
  c_roll->add_option("--step", roll_args.step, "window start step");
  c_roll->add_option("--K-set", roll_args.k_set, "ranks, comma separated");
  c_roll->add_flag("--svg", roll_args.svg, "plot the drift series");
  c_roll->callback([&] { action = [&] { run_roll(roll_args); }; });

  FitArgs fit_args;
  auto* c_fit = app.add_subcommand(
      "fit", "Maximum-likelihood fit of one mean/volatility/distribution "
             "triple to a factor series");
  c_fit->add_option("--in", fit_args.in, "coefficient CSV")->required();
  c_fit->add_option("--out", fit_args.out, "fit JSON")->required();
  c_fit->add_option("--factor", fit_args.factor, "1-based column");
  c_fit->add_option("--mean", fit_args.mean, "ar1|ar2|ar3|arma11");
  c_fit->add_option("--vol", fit_args.vol,
                    "const|arch1|garch11|gjr111|tarch111|egarch101|egarch111");
  c_fit->add_option("--dist", fit_args.dist, "normal|t|skewt|ged");
  c_fit->add_option("--seed", fit_args.seed, "RNG seed for restarts");
  c_fit->add_flag("--include-sigma", fit_args.include_sigma,
                  "store the conditional variance path");
  c_fit->callback([&] { action = [&] { run_fit(fit_args); }; });

  SweepArgs sweep_args;
  auto* c_sweep = app.add_subcommand(
      "sweep", "Fit a model grid to factor series and rank by BIC");
  c_sweep->add_option("--in", sweep_args.in, "coefficient CSV")->required();
  c_sweep->add_option("--out", sweep_args.out, "sweep CSV")->required();
  c_sweep->add_option("--factor", sweep_args.factors,
                      "1-based column(s), comma separated");
  c_sweep->add_option("--means", sweep_args.means, "mean models");
  c_sweep->add_option("--vols", sweep_args.vols, "volatility models");
  c_sweep->add_option("--dists", sweep_args.dists, "innovation families");
  c_sweep->add_option("--seed", sweep_args.seed, "RNG seed");
  c_sweep->add_option("--threads", sweep_args.threads,
                      "worker threads (0 = auto)");
  c_sweep->callback([&] { action = [&] { run_sweep(sweep_args); }; });

  ShockArgs shock_args;
  auto* c_shock = app.add_subcommand(
      "shock", "Reconstruct a row with one factor score shocked");
  c_shock->add_option("--in", shock_args.in, "decomposition JSON")->required();
  c_shock->add_option("--out", shock_args.out, "shock CSV")->required();
  c_shock->add_option("--row", shock_args.row,
                      "score row (negative counts from the end)");
  c_shock->add_option("--k", shock_args.k, "1-based component to shock");
  c_shock->add_option("--amount", shock_args.amount,
                      "shock size (default: in-sample sd of the score)")
      ->each([&](const std::string&) { shock_args.amount_set = true; });
  c_shock->add_flag("--svg", shock_args.svg, "plot both curves");
  c_shock->callback([&] { action = [&] { run_shock(shock_args); }; });

  ForecastArgs fc_args;
  auto* c_fc = app.add_subcommand(
      "forecast", "Point forecast (per-factor AR(1)) or simulated joint "
                  "forecast quantiles");
  c_fc->add_option("--in", fc_args.in, "decomposition JSON")->required();
  c_fc->add_option("--out", fc_args.out, "forecast CSV")->required();
  c_fc->add_option("--K", fc_args.K, "factors used");
  c_fc->add_option("--horizon", fc_args.h, "horizon");
  c_fc->add_flag("--var-garch", fc_args.var_garch,
                 "simulate the joint score model instead of the point "
                 "forecast");
  c_fc->add_option("--paths", fc_args.paths, "simulation paths");
  c_fc->add_option("--seed", fc_args.seed, "RNG seed");
  c_fc->add_option("--threads", fc_args.threads, "worker threads (0 = auto)");
  c_fc->add_flag("--svg", fc_args.svg, "plot the terminal quantile curves");
  c_fc->callback([&] { action = [&] { run_forecast(fc_args); }; });

  ReportArgs report_args;
  auto* c_rep = app.add_subcommand(
      "report", "Summarize previously produced artifacts as Markdown");
  c_rep->add_option("--out", report_args.out, "report Markdown")->required();
  c_rep->add_option("--surface", report_args.inputs.surface_csv,
                    "surface CSV");
  c_rep->add_option("--eigenvalues", report_args.inputs.eigenvalues_csv,
                    "eigenvalue CSV from roll");
  c_rep->add_option("--cpve", report_args.inputs.cpve_csv,
                    "CPVE CSV from roll");
  c_rep->add_option("--drift", report_args.inputs.drift_csv,
                    "drift CSV from roll");
  c_rep->add_option("--sweep", report_args.inputs.sweep_csv, "sweep CSV");
  c_rep->add_option("--forecast", report_args.inputs.forecast_csv,
                    "forecast quantile CSV");
  c_rep->add_option("--shock", report_args.inputs.shock_csv, "shock CSV");
  c_rep->callback([&] { action = [&] { run_report(report_args); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    action();
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
