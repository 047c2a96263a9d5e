#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "liqsurf/errors.hpp"
#include "liqsurf/factor.hpp"
#include "liqsurf/ingest.hpp"
#include "liqsurf/pipeline.hpp"
#include "liqsurf/tsmodel.hpp"

namespace liqsurf::io {

// Writes content to a sibling temporary file and renames it into place, so
// a failed run never leaves a partial output file.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

// CSV with header "block,<x_1>,...,<x_M>" where the x cells carry the grid
// values with six decimal places; data cells are full-precision.
std::string surface_to_csv(const ingest::SurfaceGrid& surface);
ingest::SurfaceGrid surface_from_csv(const std::string& text);

struct CoefficientTable {
  std::vector<std::int64_t> blocks;
  Eigen::MatrixXd values;  // T x K
};

// CSV with header "block,beta_1,...,beta_K".
std::string coefficients_to_csv(const CoefficientTable& table);
CoefficientTable coefficients_from_csv(const std::string& text);

// CSV with header "window_start_block,K,d_to_inception,d_to_legendre,baseline".
std::string drift_to_csv(const pipeline::DriftSeries& drift);

// CSV with header "window_start_block,lambda_1,...,lambda_M".
std::string eigenvalues_to_csv(
    const std::vector<pipeline::WindowDecomposition>& windows);

// CSV with header "window_start_block,K,cpve".
std::string cpve_to_csv(
    const std::vector<pipeline::WindowDecomposition>& windows);

// CSV with header "series_id,mean,vol,dist,converged,loglik,d,bic,delta_bic,label".
std::string sweep_to_csv(const std::string& series_id,
                         const std::vector<tsmodel::SweepRow>& rows);

// CSV with header "h,x,q05,q25,q50,q75,q95".
std::string forecast_to_csv(const pipeline::CurveQuantiles& quantiles,
                            const Eigen::VectorXd& grid_x);

// CSV with header "x,baseline,shocked".
std::string shock_to_csv(const Eigen::VectorXd& grid_x,
                         const Eigen::VectorXd& baseline,
                         const Eigen::VectorXd& shocked);

// JSON with eigenvalues (full), the first k_max basis columns and score
// columns, the mean row, and the centering flag.
std::string decomposition_to_json(const factor::FactorDecomposition& dec,
                                  const Eigen::VectorXd& grid_x,
                                  int k_max = 10);

struct StoredDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd basis;   // M x k_stored
  Eigen::MatrixXd scores;  // T x k_stored
  Eigen::VectorXd mean_row;
  Eigen::VectorXd grid_x;
  bool centered = true;
};

StoredDecomposition decomposition_from_json(const std::string& text);

// Fitted-model JSON; the conditional-variance path is included only on
// request.
std::string fit_to_json(const tsmodel::TsFit& fit,
                        const Eigen::VectorXd* sigma2_path = nullptr);

// Run manifest: subcommand, inputs, outputs, configuration, seed, library
// versions. No timestamps, so reruns are bit-identical.
std::string manifest_json(const std::string& subcommand,
                          const std::vector<std::string>& inputs,
                          const std::vector<std::string>& outputs,
                          const std::string& config_json,
                          std::uint64_t seed);

}  // namespace liqsurf::io
