#include <cmath>

#include "doctest.h"
#include "liqsurf/basis.hpp"
#include "liqsurf/ingest.hpp"
#include "liqsurf/rng.hpp"

using namespace liqsurf;

namespace {

double closed_form(int n, double x) {
  switch (n) {
    case 0: return 1.0;
    case 1: return x;
    case 2: return 0.5 * (3 * x * x - 1);
    case 3: return 0.5 * (5 * x * x * x - 3 * x);
    case 4: return (35 * x * x * x * x - 30 * x * x + 3) / 8.0;
    default: return 0.0;
  }
}

// Two applications of classical Gram-Schmidt with positive normalization.
Eigen::MatrixXd gram_schmidt_twice(Eigen::MatrixXd A) {
  for (int pass = 0; pass < 2; ++pass) {
    for (int k = 0; k < A.cols(); ++k) {
      for (int j = 0; j < k; ++j) {
        A.col(k) -= A.col(j).dot(A.col(k)) * A.col(j);
      }
      A.col(k) /= A.col(k).norm();
    }
  }
  return A;
}

}  // namespace

TEST_CASE("legendre_eval matches the degree 0..4 closed forms") {
  CHECK(basis::legendre_eval(0, 0.37) == 1.0);
  CHECK(basis::legendre_eval(2, 0.0) == -0.5);
  CHECK(basis::legendre_eval(4, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  for (int n = 0; n <= 4; ++n) {
    for (int i = 0; i <= 100; ++i) {
      const double x = -1.0 + 0.02 * i;
      CHECK(std::abs(basis::legendre_eval(n, x) - closed_form(n, x)) < 1e-12);
    }
  }
}

TEST_CASE("legendre_eval satisfies the three-term recurrence") {
  for (int n = 1; n <= 50; ++n) {
    for (int i = 0; i <= 200; ++i) {
      const double x = -1.0 + 0.01 * i;
      const double residual = (n + 1) * basis::legendre_eval(n + 1, x) -
                              (2 * n + 1) * x * basis::legendre_eval(n, x) +
                              n * basis::legendre_eval(n - 1, x);
      CHECK(std::abs(residual) < 1e-12);
    }
  }
}

TEST_CASE("legendre_eval rejects bad arguments") {
  CHECK_THROWS_AS(basis::legendre_eval(-1, 0.0), validation_error);
  CHECK_THROWS_AS(basis::legendre_eval(2, 1.1), validation_error);
}

TEST_CASE("simpson_weights single panel") {
  const Eigen::VectorXd w = basis::simpson_weights(3);
  CHECK(w[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(w[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("simpson_weights sum to the interval length") {
  for (int M : {3, 5, 11, 51, 201}) {
    CHECK(std::abs(basis::simpson_weights(M).sum() - 2.0) < 1e-12);
  }
}

TEST_CASE("simpson_weights integrate x^2 exactly at M=3") {
  const Eigen::VectorXd w = basis::simpson_weights(3);
  const Eigen::VectorXd g = ingest::standard_grid(3);
  double sum = 0.0;
  for (int m = 0; m < 3; ++m) sum += w[m] * g[m] * g[m];
  CHECK(sum == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("simpson_weights reject even M") {
  CHECK_THROWS_AS(basis::simpson_weights(4), validation_error);
  CHECK_THROWS_AS(basis::simpson_weights(2), validation_error);
}

TEST_CASE("sampled basis is discretely orthogonal with analytic norms") {
  const basis::FixedBasis fixed = basis::sample_legendre(201, 6);
  for (int j = 1; j <= 6; ++j) {
    for (int k = 1; k <= 6; ++k) {
      double sum = 0.0;
      for (int m = 0; m < 201; ++m) {
        sum += fixed.weights[m] * fixed.columns(m, j - 1) *
               fixed.columns(m, k - 1);
      }
      // Composite Simpson error on the degree-12 product at h = 0.01 is
      // (2/180) h^4 max|f''''| ~ 1e-6.
      const double expected = j == k ? 2.0 / (2 * j - 1) : 0.0;
      CHECK(std::abs(sum - expected) < 1e-5);
    }
  }
}

TEST_CASE("project_fixed_basis recovers in-span rows") {
  const basis::FixedBasis fixed = basis::sample_legendre(201, 5);
  Eigen::MatrixXd rows(3, 201);
  rows.row(0) = fixed.columns.col(1).transpose();          // P_1
  rows.row(1) = Eigen::RowVectorXd::Constant(201, 2.75);   // constant
  rows.row(2) = fixed.columns.col(3).transpose();          // P_3

  const Eigen::MatrixXd beta3 = basis::project_fixed_basis(
      rows.topRows(1), fixed, 3, basis::ProjectionMethod::WeightedLeastSquares);
  CHECK(std::abs(beta3(0, 0)) < 1e-10);
  CHECK(std::abs(beta3(0, 1) - 1.0) < 1e-10);
  CHECK(std::abs(beta3(0, 2)) < 1e-10);

  const Eigen::MatrixXd beta5 = basis::project_fixed_basis(rows, fixed, 5);
  CHECK(std::abs(beta5(1, 0) - 2.75) < 1e-12);
  for (int k = 1; k < 5; ++k) CHECK(std::abs(beta5(1, k)) < 1e-12);
  CHECK(std::abs(beta5(2, 3) - 1.0) < 1e-8);
}

TEST_CASE("project_fixed_basis quadrature-sum variant on symmetric rows") {
  const basis::FixedBasis fixed = basis::sample_legendre(201, 3);
  Eigen::MatrixXd rows(1, 201);
  rows.row(0) = fixed.columns.col(1).transpose();
  const Eigen::MatrixXd beta = basis::project_fixed_basis(
      rows, fixed, 3, basis::ProjectionMethod::QuadratureSum);
  CHECK(std::abs(beta(0, 0)) < 1e-12);
  CHECK(std::abs(beta(0, 1) - 1.0) < 1e-12);  // Simpson exact for x * x
  CHECK(std::abs(beta(0, 2)) < 1e-12);
}

TEST_CASE("project_fixed_basis with K=M reproduces exact-rank rows") {
  const int M = 11;
  const basis::FixedBasis fixed = basis::sample_legendre(M, M);
  rng::Engine eng(7);
  Eigen::VectorXd coef(M);
  for (int k = 0; k < M; ++k) coef[k] = rng::uniform(eng, -2.0, 2.0);
  Eigen::MatrixXd rows(1, M);
  rows.row(0) = (fixed.columns * coef).transpose();
  const Eigen::MatrixXd beta = basis::project_fixed_basis(rows, fixed, M);
  const Eigen::RowVectorXd recon = beta.row(0) * fixed.columns.transpose();
  CHECK((recon - rows.row(0)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("project_fixed_basis reports conditioning") {
  const basis::FixedBasis fixed = basis::sample_legendre(51, 4);
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(1, 51);
  double cond = 0.0;
  basis::project_fixed_basis(rows, fixed, 4,
                             basis::ProjectionMethod::WeightedLeastSquares,
                             &cond);
  CHECK(cond >= 1.0);
  CHECK(cond < 1e3);
}

TEST_CASE("orthonormal_grid_basis is orthonormal and spans the same space") {
  const basis::FixedBasis fixed = basis::sample_legendre(201, 5);
  const Eigen::MatrixXd U = basis::orthonormal_grid_basis(fixed, 5);
  const Eigen::MatrixXd gram = U.transpose() * U;
  CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <
        1e-12);

  Eigen::MatrixXd scaled = fixed.columns;
  for (int k = 0; k < 5; ++k) {
    scaled.col(k) /= std::sqrt(2.0 / (2 * k + 1));
  }
  const Eigen::MatrixXd U2 = gram_schmidt_twice(scaled);
  CHECK(basis::projection_distance(U, U2) < 1e-10);
}

TEST_CASE("orthonormal_grid_basis K=1 is the positive constant direction") {
  const basis::FixedBasis fixed = basis::sample_legendre(9, 3);
  const Eigen::MatrixXd U = basis::orthonormal_grid_basis(fixed, 1);
  const double expected = 1.0 / 3.0;  // 1/sqrt(9)
  for (int m = 0; m < 9; ++m) {
    CHECK(U(m, 0) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("projection_distance basic values") {
  Eigen::MatrixXd e1(2, 1), e2(2, 1);
  e1 << 1, 0;
  e2 << 0, 1;
  CHECK(basis::projection_distance(e1, e1) == 0.0);
  CHECK(basis::projection_distance(e1, e2) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("projection_distance symmetry is bit exact") {
  rng::Engine eng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd U1 = basis::random_orthonormal(31, 4, eng);
    const Eigen::MatrixXd U2 = basis::random_orthonormal(31, 4, eng);
    CHECK(basis::projection_distance(U1, U2) ==
          basis::projection_distance(U2, U1));
  }
}

TEST_CASE("projection_distance is rotation invariant") {
  rng::Engine eng(13);
  const Eigen::MatrixXd U1 = basis::random_orthonormal(41, 5, eng);
  const Eigen::MatrixXd U2 = basis::random_orthonormal(41, 5, eng);
  const double d = basis::projection_distance(U1, U2);
  const Eigen::MatrixXd Q = basis::random_orthonormal(5, 5, eng);
  const double d_rot = basis::projection_distance(U1, U2 * Q);
  CHECK(std::abs(d - d_rot) < 1e-10);
}

TEST_CASE("projection_distance stays within the subspace bound") {
  rng::Engine eng(17);
  for (int K = 1; K <= 5; ++K) {
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::MatrixXd U1 = basis::random_orthonormal(11, K, eng);
      const Eigen::MatrixXd U2 = basis::random_orthonormal(11, K, eng);
      const double d = basis::projection_distance(U1, U2);
      CHECK(d >= 0.0);
      CHECK(d <= std::min(K, 11 - K) + 1e-12);
    }
  }
}

TEST_CASE("projection_distance rejects non-orthonormal input") {
  Eigen::MatrixXd bad = Eigen::MatrixXd::Constant(4, 2, 0.5);
  Eigen::MatrixXd ok(4, 2);
  ok << 1, 0, 0, 1, 0, 0, 0, 0;
  CHECK_THROWS_AS(basis::projection_distance(bad, ok), validation_error);
  CHECK_THROWS_AS(basis::projection_distance(ok, bad), validation_error);
}

TEST_CASE("random_subspace_baseline closed form") {
  CHECK(basis::random_subspace_baseline(3, 201) ==
        doctest::Approx(2.955223880597015).epsilon(1e-14));
  CHECK(basis::random_subspace_baseline(7, 201) ==
        doctest::Approx(6.756218905472637).epsilon(1e-14));
  CHECK(basis::random_subspace_baseline(8, 8) == 0.0);
}

TEST_CASE("random_orthonormal produces orthonormal frames") {
  rng::Engine eng(23);
  const Eigen::MatrixXd U = basis::random_orthonormal(15, 6, eng);
  CHECK((U.transpose() * U - Eigen::MatrixXd::Identity(6, 6))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}
