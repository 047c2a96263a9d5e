#include "liqsurf/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace liqsurf::io {

namespace {

using nlohmann::json;

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_grid(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt_block(std::int64_t b) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%" PRId64, b);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t end = line.find(sep, begin);
    if (end == std::string::npos) {
      out.push_back(line.substr(begin));
      break;
    }
    out.push_back(line.substr(begin, end - begin));
    begin = end + 1;
  }
  return out;
}

double parse_double(const std::string& cell, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw parse_error("line " + std::to_string(line_no) +
                      ": not a number: '" + cell + "'");
  }
}

std::int64_t parse_block(const std::string& cell, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw parse_error("line " + std::to_string(line_no) +
                      ": not a block number: '" + cell + "'");
  }
}

std::vector<std::string> non_empty_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != static_cast<std::size_t>(m.cols())) {
      throw parse_error("ragged matrix in JSON");
    }
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(r, c) = rows[r][c].get<double>();
    }
  }
  return m;
}

}  // namespace

void atomic_write_text(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw validation_error("cannot open for writing: " + tmp.string());
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw validation_error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw validation_error("cannot move " + tmp.string() + " into place: " +
                           ec.message());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string surface_to_csv(const ingest::SurfaceGrid& surface) {
  std::string out = "block";
  for (Eigen::Index m = 0; m < surface.cols(); ++m) {
    out += ',';
    out += fmt_grid(surface.grid_x[m]);
  }
  out += '\n';
  for (Eigen::Index t = 0; t < surface.rows(); ++t) {
    out += fmt_block(surface.block_numbers[t]);
    for (Eigen::Index m = 0; m < surface.cols(); ++m) {
      out += ',';
      out += fmt_full(surface.values(t, m));
    }
    out += '\n';
  }
  return out;
}

ingest::SurfaceGrid surface_from_csv(const std::string& text) {
  const std::vector<std::string> lines = non_empty_lines(text);
  if (lines.size() < 2) {
    throw parse_error("surface CSV needs a header and at least one row");
  }
  const std::vector<std::string> head = split(lines[0], ',');
  if (head.size() < 2 || head[0] != "block") {
    throw parse_error("line 1: expected header 'block,<x values>'");
  }
  const Eigen::Index M = static_cast<Eigen::Index>(head.size()) - 1;
  ingest::SurfaceGrid surface;
  surface.grid_x.resize(M);
  for (Eigen::Index m = 0; m < M; ++m) {
    surface.grid_x[m] = parse_double(head[m + 1], 1);
  }
  const Eigen::Index T = static_cast<Eigen::Index>(lines.size()) - 1;
  surface.values.resize(T, M);
  surface.block_numbers.resize(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const std::size_t line_no = t + 2;
    const std::vector<std::string> cells = split(lines[t + 1], ',');
    if (static_cast<Eigen::Index>(cells.size()) != M + 1) {
      throw parse_error("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(M + 1) + " cells, found " +
                        std::to_string(cells.size()));
    }
    surface.block_numbers[t] = parse_block(cells[0], line_no);
    if (t > 0 && surface.block_numbers[t] <= surface.block_numbers[t - 1]) {
      throw parse_error("line " + std::to_string(line_no) +
                        ": block numbers must be strictly increasing");
    }
    for (Eigen::Index m = 0; m < M; ++m) {
      surface.values(t, m) = parse_double(cells[m + 1], line_no);
    }
  }
  return surface;
}

std::string coefficients_to_csv(const CoefficientTable& table) {
  if (static_cast<Eigen::Index>(table.blocks.size()) != table.values.rows()) {
    throw validation_error("block count does not match row count");
  }
  std::string out = "block";
  for (Eigen::Index k = 0; k < table.values.cols(); ++k) {
    out += ",beta_" + std::to_string(k + 1);
  }
  out += '\n';
  for (Eigen::Index t = 0; t < table.values.rows(); ++t) {
    out += fmt_block(table.blocks[t]);
    for (Eigen::Index k = 0; k < table.values.cols(); ++k) {
      out += ',';
      out += fmt_full(table.values(t, k));
    }
    out += '\n';
  }
  return out;
}

CoefficientTable coefficients_from_csv(const std::string& text) {
  const std::vector<std::string> lines = non_empty_lines(text);
  if (lines.size() < 2) {
    throw parse_error("coefficient CSV needs a header and at least one row");
  }
  const std::vector<std::string> head = split(lines[0], ',');
  if (head.size() < 2 || head[0] != "block" || head[1] != "beta_1") {
    throw parse_error("line 1: expected header 'block,beta_1,...'");
  }
  const Eigen::Index K = static_cast<Eigen::Index>(head.size()) - 1;
  CoefficientTable table;
  const Eigen::Index T = static_cast<Eigen::Index>(lines.size()) - 1;
  table.values.resize(T, K);
  table.blocks.resize(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const std::size_t line_no = t + 2;
    const std::vector<std::string> cells = split(lines[t + 1], ',');
    if (static_cast<Eigen::Index>(cells.size()) != K + 1) {
      throw parse_error("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(K + 1) + " cells");
    }
    table.blocks[t] = parse_block(cells[0], line_no);
    for (Eigen::Index k = 0; k < K; ++k) {
      table.values(t, k) = parse_double(cells[k + 1], line_no);
    }
  }
  return table;
}

std::string drift_to_csv(const pipeline::DriftSeries& drift) {
  std::string out =
      "window_start_block,K,d_to_inception,d_to_legendre,baseline\n";
  for (std::size_t j = 0; j < drift.window_starts.size(); ++j) {
    for (std::size_t i = 0; i < drift.k_values.size(); ++i) {
      out += fmt_block(drift.window_starts[j]);
      out += ',' + std::to_string(drift.k_values[i]);
      out += ',' + fmt_full(drift.d_to_inception(j, i));
      out += ',' + fmt_full(drift.d_to_legendre(j, i));
      out += ',' + fmt_full(drift.baselines[i]);
      out += '\n';
    }
  }
  return out;
}

std::string eigenvalues_to_csv(
    const std::vector<pipeline::WindowDecomposition>& windows) {
  if (windows.empty()) throw validation_error("no windows");
  std::string out = "window_start_block";
  for (Eigen::Index i = 0; i < windows.front().eigenvalues.size(); ++i) {
    out += ",lambda_" + std::to_string(i + 1);
  }
  out += '\n';
  for (const auto& w : windows) {
    out += fmt_block(w.start_block);
    for (Eigen::Index i = 0; i < w.eigenvalues.size(); ++i) {
      out += ',';
      out += fmt_full(w.eigenvalues[i]);
    }
    out += '\n';
  }
  return out;
}

std::string cpve_to_csv(
    const std::vector<pipeline::WindowDecomposition>& windows) {
  if (windows.empty()) throw validation_error("no windows");
  std::string out = "window_start_block,K,cpve\n";
  for (const auto& w : windows) {
    for (const auto& [K, cpve] : w.cpve) {
      out += fmt_block(w.start_block);
      out += ',' + std::to_string(K);
      out += ',' + fmt_full(cpve);
      out += '\n';
    }
  }
  return out;
}

std::string sweep_to_csv(const std::string& series_id,
                         const std::vector<tsmodel::SweepRow>& rows) {
  std::string out =
      "series_id,mean,vol,dist,converged,loglik,d,bic,delta_bic,label\n";
  for (const auto& row : rows) {
    out += series_id;
    out += ',' + tsmodel::to_string(row.spec.mean);
    out += ',' + tsmodel::to_string(row.spec.vol);
    out += ',' + tsmodel::to_string(row.spec.dist);
    out += row.fit.converged ? ",true" : ",false";
    out += ',' + fmt_full(row.fit.loglik);
    out += ',' + std::to_string(row.fit.n_params);
    out += ',' + fmt_full(row.fit.bic);
    out += ',' + fmt_full(row.delta_bic);
    out += ',' + row.label;
    out += '\n';
  }
  return out;
}

std::string forecast_to_csv(const pipeline::CurveQuantiles& quantiles,
                            const Eigen::VectorXd& grid_x) {
  if (quantiles.q50.cols() != grid_x.size()) {
    throw validation_error("grid size does not match the quantile matrix");
  }
  std::string out = "h,x,q05,q25,q50,q75,q95\n";
  for (std::size_t hi = 0; hi < quantiles.horizons.size(); ++hi) {
    for (Eigen::Index m = 0; m < grid_x.size(); ++m) {
      out += std::to_string(quantiles.horizons[hi]);
      out += ',' + fmt_grid(grid_x[m]);
      out += ',' + fmt_full(quantiles.q05(hi, m));
      out += ',' + fmt_full(quantiles.q25(hi, m));
      out += ',' + fmt_full(quantiles.q50(hi, m));
      out += ',' + fmt_full(quantiles.q75(hi, m));
      out += ',' + fmt_full(quantiles.q95(hi, m));
      out += '\n';
    }
  }
  return out;
}

std::string shock_to_csv(const Eigen::VectorXd& grid_x,
                         const Eigen::VectorXd& baseline,
                         const Eigen::VectorXd& shocked) {
  if (grid_x.size() != baseline.size() || grid_x.size() != shocked.size()) {
    throw validation_error("curve lengths disagree");
  }
  std::string out = "x,baseline,shocked\n";
  for (Eigen::Index m = 0; m < grid_x.size(); ++m) {
    out += fmt_grid(grid_x[m]);
    out += ',' + fmt_full(baseline[m]);
    out += ',' + fmt_full(shocked[m]);
    out += '\n';
  }
  return out;
}

std::string decomposition_to_json(const factor::FactorDecomposition& dec,
                                  const Eigen::VectorXd& grid_x, int k_max) {
  const Eigen::Index k =
      std::min<Eigen::Index>(k_max, dec.basis.cols());
  json j;
  j["eigenvalues"] = vector_to_json(dec.eigenvalues);
  j["basis"] = matrix_to_json(dec.basis.leftCols(k));
  j["scores"] = matrix_to_json(dec.scores.leftCols(k));
  j["mean_row"] = vector_to_json(dec.mean_row);
  j["grid_x"] = vector_to_json(grid_x);
  j["centered"] = dec.centered;
  return j.dump(1) + "\n";
}

StoredDecomposition decomposition_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw parse_error(std::string("decomposition JSON: ") + e.what());
  }
  StoredDecomposition out;
  try {
    out.eigenvalues = vector_from_json(j.at("eigenvalues"));
    out.basis = matrix_from_json(j.at("basis"));
    out.scores = matrix_from_json(j.at("scores"));
    out.mean_row = vector_from_json(j.at("mean_row"));
    out.grid_x = vector_from_json(j.at("grid_x"));
    out.centered = j.at("centered").get<bool>();
  } catch (const json::exception& e) {
    throw parse_error(std::string("decomposition JSON: ") + e.what());
  }
  if (out.basis.rows() != out.mean_row.size() ||
      out.basis.cols() != out.scores.cols() ||
      out.grid_x.size() != out.mean_row.size()) {
    throw parse_error("decomposition JSON: inconsistent shapes");
  }
  return out;
}

std::string fit_to_json(const tsmodel::TsFit& fit,
                        const Eigen::VectorXd* sigma2_path) {
  json j;
  j["mean"] = tsmodel::to_string(fit.spec.mean);
  j["vol"] = tsmodel::to_string(fit.spec.vol);
  j["dist"] = tsmodel::to_string(fit.spec.dist);
  j["phi"] = vector_to_json(fit.mean_params.phi);
  if (fit.spec.mean == tsmodel::MeanModel::Arma11) {
    j["theta"] = fit.mean_params.theta;
  }
  j["omega"] = fit.vol_params.omega;
  if (fit.spec.vol != tsmodel::VolModel::Constant) {
    j["alpha"] = fit.vol_params.alpha;
  }
  switch (fit.spec.vol) {
    case tsmodel::VolModel::Garch11:
    case tsmodel::VolModel::Egarch101:
      j["beta"] = fit.vol_params.beta;
      break;
    case tsmodel::VolModel::Gjr111:
    case tsmodel::VolModel::Tarch111:
    case tsmodel::VolModel::Egarch111:
      j["beta"] = fit.vol_params.beta;
      j["gamma"] = fit.vol_params.gamma;
      break;
    default:
      break;
  }
  if (fit.spec.vol == tsmodel::VolModel::Egarch101 ||
      fit.spec.vol == tsmodel::VolModel::Egarch111) {
    j["kappa"] = fit.vol_params.kappa;
  }
  if (fit.spec.dist == tsmodel::Innovation::StudentT ||
      fit.spec.dist == tsmodel::Innovation::SkewT) {
    j["nu"] = fit.dist_params.nu;
  }
  if (fit.spec.dist == tsmodel::Innovation::SkewT) {
    j["lambda"] = fit.dist_params.lambda;
  }
  if (fit.spec.dist == tsmodel::Innovation::Ged) {
    j["shape"] = fit.dist_params.shape;
  }
  j["loglik"] = fit.loglik;
  j["bic"] = fit.bic;
  j["n_params"] = fit.n_params;
  j["n_obs"] = fit.n_obs;
  j["converged"] = fit.converged;
  j["covariance_stationary"] = fit.covariance_stationary;
  if (sigma2_path != nullptr) {
    j["sigma2"] = vector_to_json(*sigma2_path);
  }
  return j.dump(1) + "\n";
}

std::string manifest_json(const std::string& subcommand,
                          const std::vector<std::string>& inputs,
                          const std::vector<std::string>& outputs,
                          const std::string& config_json,
                          std::uint64_t seed) {
  json j;
  j["tool"] = "liqsurf";
  j["version"] = "1.0.0";
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
               std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  j["subcommand"] = subcommand;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["config"] = json::parse(config_json);
  j["seed"] = seed;
  return j.dump(1) + "\n";
}

}  // namespace liqsurf::io
