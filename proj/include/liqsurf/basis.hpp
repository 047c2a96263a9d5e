#pragma once

#include <Eigen/Dense>

#include "liqsurf/errors.hpp"
#include "liqsurf/rng.hpp"

namespace liqsurf::basis {

// Legendre polynomial P_n(x) via the Bonnet three-term recurrence
// (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}.
double legendre_eval(int n, double x);

// Composite Simpson weights on [-1, 1]: (h/3) * (1, 4, 2, 4, ..., 2, 4, 1)
// with h = 2/(M-1). M must be odd (an even point count has no whole number
// of panels; no silent fallback rule is applied).
Eigen::VectorXd simpson_weights(int M);

// Sampled polynomial basis on an M-point grid: column k holds P_{k-1} at the
// grid points, weights are the Simpson weights for the same grid.
struct FixedBasis {
  Eigen::VectorXd grid_x;
  Eigen::MatrixXd columns;  // M x K, columns[m][k] = P_k(grid_x[m])
  Eigen::VectorXd weights;

  Eigen::Index size() const { return grid_x.size(); }
  Eigen::Index rank() const { return columns.cols(); }
};

FixedBasis sample_legendre(int M, int K);
FixedBasis sample_legendre(const Eigen::VectorXd& grid_x, int K);

enum class ProjectionMethod {
  // Weighted least squares (Psi' W Psi)^{-1} Psi' W y: exact for rows in the
  // span of the sampled columns regardless of quadrature error. Default.
  WeightedLeastSquares,
  // Quadrature of the L2 projection integral: beta_k =
  // (sum_m w_m y_m psi_k(x_m)) / (2/(2k-1)), the analytic norm of P_{k-1}.
  QuadratureSum,
};

// Per-row coefficients of the surface rows in the first K basis columns.
// No demeaning. The condition number of the weighted normal matrix is
// reported through the optional out-parameter.
Eigen::MatrixXd project_fixed_basis(
    const Eigen::MatrixXd& surface_rows, const FixedBasis& basis, int K,
    ProjectionMethod method = ProjectionMethod::WeightedLeastSquares,
    double* condition_number = nullptr);

// QR orthonormalization (positive-diagonal convention) of the first K
// unit-weighted sampled columns; spans are preserved.
Eigen::MatrixXd orthonormal_grid_basis(const FixedBasis& basis, int K);

// Squared projection-matrix distance (1/2)||U1 U1' - U2 U2'||_F^2 between
// the column spans, computed as K - ||U1' U2||_F^2 with a summation order
// that makes d(U1, U2) and d(U2, U1) bit-identical. Inputs must have
// orthonormal columns (checked to 1e-10).
double projection_distance(const Eigen::MatrixXd& U1, const Eigen::MatrixXd& U2);

// Expected distance K(1 - K/M) between a fixed K-subspace and a uniformly
// random one.
double random_subspace_baseline(int K, int M);

// Uniformly random M x K orthonormal frame: QR of an iid standard normal
// matrix, R-diagonal signs fixed positive.
Eigen::MatrixXd random_orthonormal(int M, int K, rng::Engine& eng);

}  // namespace liqsurf::basis
