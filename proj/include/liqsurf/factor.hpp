#pragma once

#include <Eigen/Dense>

#include "liqsurf/errors.hpp"
#include "liqsurf/ingest.hpp"

namespace liqsurf::factor {

// Full spectral decomposition of the sample covariance of a surface.
// mean_row is the removed pointwise mean (zero vector when centering is
// disabled); eigenvalues are descending and clamped at zero; each basis
// column is signed so its largest-magnitude entry is positive; scores hold
// the coordinates of every (centered) row in every eigenvector.
struct FactorDecomposition {
  Eigen::VectorXd mean_row;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd basis;   // M x M, columns orthonormal
  Eigen::MatrixXd scores;  // T x M
  bool centered = true;
};

// Sample covariance (1/T) Y'Y, rows demeaned first when center is set.
// Exactly symmetric by construction.
Eigen::MatrixXd covariance(const ingest::SurfaceGrid& surface, bool center);

// Spectral decomposition of a symmetric matrix: descending eigenvalues
// (round-off negatives clamped to 0) and the sign-normalized orthonormal
// eigenvector matrix.
struct EigenResult {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd basis;
};
EigenResult eigendecompose(const Eigen::MatrixXd& cov);

// Covariance + eigendecomposition + scores in one pass.
FactorDecomposition decompose(const ingest::SurfaceGrid& surface, bool center);

// Coordinates of each (centered) surface row in the first K eigenvectors.
Eigen::MatrixXd scores(const ingest::SurfaceGrid& surface,
                       const FactorDecomposition& decomposition, int K);

// Proportion of variance explained per eigenvalue and its cumulative sum;
// the last cumulative entry is exactly 1.
struct VarianceExplained {
  Eigen::VectorXd pve;
  Eigen::VectorXd cpve;
};
VarianceExplained pve_cpve(const Eigen::VectorXd& eigenvalues);

// mean_row + scores * basis_columns'.
Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& scores,
                            const Eigen::MatrixXd& basis_columns,
                            const Eigen::VectorXd& mean_row);

}  // namespace liqsurf::factor
