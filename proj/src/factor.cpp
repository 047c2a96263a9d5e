#include "liqsurf/factor.hpp"

#include <cmath>
#include <string>

namespace liqsurf::factor {

Eigen::MatrixXd covariance(const ingest::SurfaceGrid& surface, bool center) {
  if (surface.rows() < 1) {
    throw validation_error("covariance needs at least one row");
  }
  const double T = static_cast<double>(surface.rows());
  Eigen::MatrixXd Y = surface.values;
  if (center) {
    const Eigen::RowVectorXd mean = Y.colwise().mean();
    Y.rowwise() -= mean;
  }
  const Eigen::Index M = Y.cols();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(M, M);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(Y.transpose(), 1.0 / T);
  cov = cov.selfadjointView<Eigen::Lower>();
  return cov;
}

EigenResult eigendecompose(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols()) {
    throw validation_error("eigendecomposition needs a square matrix");
  }
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale) {
    throw validation_error("matrix is not symmetric (max asymmetry " +
                           std::to_string(asym) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw validation_error("eigendecomposition failed to converge");
  }
  const Eigen::Index M = cov.rows();
  EigenResult out;
  out.eigenvalues.resize(M);
  out.basis.resize(M, M);
  // Solver returns ascending order; flip to descending.
  for (Eigen::Index k = 0; k < M; ++k) {
    double lambda = solver.eigenvalues()[M - 1 - k];
    // Round-off negatives on PSD inputs are clamped; a genuinely indefinite
    // input keeps its spectrum so U Lambda U' still reconstructs it.
    if (lambda < 0.0 && lambda >= -1e-12 * scale) lambda = 0.0;
    out.eigenvalues[k] = lambda;
    out.basis.col(k) = solver.eigenvectors().col(M - 1 - k);
    // Sign convention: the entry of largest magnitude is positive.
    Eigen::Index argmax = 0;
    out.basis.col(k).cwiseAbs().maxCoeff(&argmax);
    if (out.basis(argmax, k) < 0.0) out.basis.col(k) = -out.basis.col(k);
  }
  return out;
}

FactorDecomposition decompose(const ingest::SurfaceGrid& surface, bool center) {
  FactorDecomposition out;
  out.centered = center;
  out.mean_row = center ? Eigen::VectorXd(surface.values.colwise().mean())
                        : Eigen::VectorXd(Eigen::VectorXd::Zero(surface.cols()));
  EigenResult eig = eigendecompose(covariance(surface, center));
  out.eigenvalues = std::move(eig.eigenvalues);
  out.basis = std::move(eig.basis);
  out.scores =
      (surface.values.rowwise() - out.mean_row.transpose()) * out.basis;
  return out;
}

Eigen::MatrixXd scores(const ingest::SurfaceGrid& surface,
                       const FactorDecomposition& decomposition, int K) {
  if (K < 1 || K > decomposition.basis.cols()) {
    throw validation_error("score rank out of range");
  }
  if (surface.cols() != decomposition.basis.rows()) {
    throw validation_error("surface width does not match the decomposition");
  }
  return (surface.values.rowwise() - decomposition.mean_row.transpose()) *
         decomposition.basis.leftCols(K);
}

VarianceExplained pve_cpve(const Eigen::VectorXd& eigenvalues) {
  if (eigenvalues.size() == 0) {
    throw validation_error("empty spectrum");
  }
  if ((eigenvalues.array() < 0.0).any()) {
    throw validation_error("eigenvalues must be nonnegative");
  }
  double total = 0.0;
  for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
    total += eigenvalues[j];
  }
  if (total <= 0.0) {
    throw validation_error("all-zero spectrum has no variance to apportion");
  }
  VarianceExplained out;
  out.pve = eigenvalues / total;
  out.cpve.resize(eigenvalues.size());
  double partial = 0.0;
  for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
    partial += eigenvalues[j];
    // Same left-to-right accumulation as `total`, so the last entry is
    // total/total = 1 exactly.
    out.cpve[j] = partial / total;
  }
  return out;
}

Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& scores,
                            const Eigen::MatrixXd& basis_columns,
                            const Eigen::VectorXd& mean_row) {
  if (scores.cols() != basis_columns.cols()) {
    throw validation_error("score and basis ranks differ");
  }
  if (mean_row.size() != basis_columns.rows()) {
    throw validation_error("mean row length does not match the basis");
  }
  return (scores * basis_columns.transpose()).rowwise() + mean_row.transpose();
}

}  // namespace liqsurf::factor
