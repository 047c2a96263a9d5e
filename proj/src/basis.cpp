#include "liqsurf/basis.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace liqsurf::basis {

double legendre_eval(int n, double x) {
  if (n < 0) {
    throw validation_error("Legendre degree must be nonnegative");
  }
  if (std::abs(x) > 1.0 + 1e-12) {
    throw validation_error("Legendre argument out of [-1, 1]: " +
                           std::to_string(x));
  }
  if (n == 0) return 1.0;
  double prev = 1.0;
  double curr = x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0) * x * curr - k * prev) / (k + 1.0);
    prev = curr;
    curr = next;
  }
  return curr;
}

Eigen::VectorXd simpson_weights(int M) {
  if (M < 3 || M % 2 == 0) {
    throw validation_error("Simpson weights need an odd point count >= 3, got " +
                           std::to_string(M));
  }
  const double h = 2.0 / (M - 1);
  Eigen::VectorXd w(M);
  w[0] = h / 3.0;
  w[M - 1] = h / 3.0;
  for (int m = 1; m < M - 1; ++m) {
    w[m] = (m % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
  }
  return w;
}

FixedBasis sample_legendre(const Eigen::VectorXd& grid_x, int K) {
  if (K < 1) {
    throw validation_error("basis rank must be >= 1");
  }
  const int M = static_cast<int>(grid_x.size());
  FixedBasis out;
  out.grid_x = grid_x;
  out.weights = simpson_weights(M);
  out.columns.resize(M, K);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      out.columns(m, k) = legendre_eval(k, grid_x[m]);
    }
  }
  return out;
}

FixedBasis sample_legendre(int M, int K) {
  if (M < 3 || M % 2 == 0) {
    throw validation_error("grid size must be an odd integer >= 3, got " +
                           std::to_string(M));
  }
  Eigen::VectorXd grid(M);
  const int j_star = (M + 1) / 2;
  for (int j = 1; j <= M; ++j) {
    grid[j - 1] = 2.0 * (j - j_star) / static_cast<double>(M - 1);
  }
  return sample_legendre(grid, K);
}

Eigen::MatrixXd project_fixed_basis(const Eigen::MatrixXd& surface_rows,
                                    const FixedBasis& basis, int K,
                                    ProjectionMethod method,
                                    double* condition_number) {
  if (K < 1 || K > basis.rank()) {
    throw validation_error("projection rank out of range");
  }
  if (surface_rows.cols() != basis.size()) {
    throw validation_error("surface row length does not match the basis grid");
  }
  const Eigen::MatrixXd Psi = basis.columns.leftCols(K);
  const Eigen::VectorXd& w = basis.weights;

  if (method == ProjectionMethod::QuadratureSum) {
    // beta_k = quadrature of integral(y * P_{k-1}) divided by the analytic
    // norm integral(P_{k-1}^2) = 2/(2k-1).
    Eigen::MatrixXd beta =
        surface_rows * (w.asDiagonal() * Psi);
    for (int k = 0; k < K; ++k) {
      beta.col(k) *= (2.0 * k + 1.0) / 2.0;
    }
    if (condition_number != nullptr) *condition_number = 1.0;
    return beta;
  }

  const Eigen::MatrixXd normal = Psi.transpose() * w.asDiagonal() * Psi;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(normal);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  const double cond = smin > 0.0 ? smax / smin
                                 : std::numeric_limits<double>::infinity();
  if (condition_number != nullptr) *condition_number = cond;
  if (!(smin > smax * 1e-13)) {
    throw validation_error(
        "weighted normal matrix is numerically singular (condition number " +
        std::to_string(cond) + ")");
  }
  // beta_t solves (Psi' W Psi) beta = Psi' W y_t for each row.
  const Eigen::MatrixXd rhs = Psi.transpose() * w.asDiagonal() *
                              surface_rows.transpose();
  return normal.ldlt().solve(rhs).transpose();
}

Eigen::MatrixXd orthonormal_grid_basis(const FixedBasis& basis, int K) {
  if (K < 1 || K > basis.rank()) {
    throw validation_error("orthonormalization rank out of range");
  }
  const Eigen::Index M = basis.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis.columns.leftCols(K));
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(M, K);
  const Eigen::MatrixXd R =
      qr.matrixQR().topLeftCorner(K, K).triangularView<Eigen::Upper>();
  for (int k = 0; k < K; ++k) {
    if (std::abs(R(k, k)) < 1e-12 * std::sqrt(static_cast<double>(M))) {
      throw validation_error("rank-deficient basis columns");
    }
    if (R(k, k) < 0.0) Q.col(k) = -Q.col(k);
  }
  return Q;
}

namespace {

void check_orthonormal(const Eigen::MatrixXd& U, const char* name) {
  const Eigen::MatrixXd gram = U.transpose() * U;
  const double err = (gram - Eigen::MatrixXd::Identity(U.cols(), U.cols()))
                         .cwiseAbs()
                         .maxCoeff();
  if (err > 1e-10) {
    throw validation_error(std::string(name) +
                           " does not have orthonormal columns (max Gram "
                           "deviation " +
                           std::to_string(err) + ")");
  }
}

}  // namespace

double projection_distance(const Eigen::MatrixXd& U1,
                           const Eigen::MatrixXd& U2) {
  if (U1.rows() != U2.rows() || U1.cols() != U2.cols()) {
    throw validation_error("subspace representatives must share a shape");
  }
  check_orthonormal(U1, "U1");
  check_orthonormal(U2, "U2");
  const Eigen::Index K = U1.cols();
  const Eigen::Index M = U1.rows();
  // (1/2)||U1 U1' - U2 U2'||_F^2 = K - ||G||_F^2 for orthonormal columns,
  // G = U1' U2. G is formed with an explicit ascending-m accumulation so
  // entry (i,j) under swapped arguments is the bitwise-identical sum with
  // factors commuted; the overlap below then pairs (i,j) with (j,i), making
  // d(U1, U2) and d(U2, U1) literally equal.
  Eigen::MatrixXd G(K, K);
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index j = 0; j < K; ++j) {
      double acc = 0.0;
      for (Eigen::Index m = 0; m < M; ++m) acc += U1(m, i) * U2(m, j);
      G(i, j) = acc;
    }
  }
  double overlap = 0.0;
  for (Eigen::Index i = 0; i < K; ++i) overlap += G(i, i) * G(i, i);
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index j = i + 1; j < K; ++j) {
      overlap += G(i, j) * G(i, j) + G(j, i) * G(j, i);
    }
  }
  const double d = static_cast<double>(K) - overlap;
  return d > 0.0 ? d : 0.0;
}

double random_subspace_baseline(int K, int M) {
  if (K < 1 || M < 1 || K > M) {
    throw validation_error("baseline needs 1 <= K <= M");
  }
  return K * (1.0 - static_cast<double>(K) / M);
}

Eigen::MatrixXd random_orthonormal(int M, int K, rng::Engine& eng) {
  Eigen::MatrixXd G(M, K);
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < K; ++j) {
      G(i, j) = rng::normal(eng);
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(M, K);
  const Eigen::MatrixXd R =
      qr.matrixQR().topLeftCorner(K, K).triangularView<Eigen::Upper>();
  for (int k = 0; k < K; ++k) {
    if (R(k, k) < 0.0) Q.col(k) = -Q.col(k);
  }
  return Q;
}

}  // namespace liqsurf::basis
