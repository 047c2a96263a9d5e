#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "liqsurf/basis.hpp"
#include "liqsurf/factor.hpp"
#include "liqsurf/rng.hpp"
#include "liqsurf/synth.hpp"
#include "liqsurf/tsmodel.hpp"

using namespace liqsurf;

TEST_CASE("draw_innovation families have unit variance") {
  struct Case {
    tsmodel::Innovation dist;
    tsmodel::DistParams params;
  };
  std::vector<Case> cases;
  cases.push_back({tsmodel::Innovation::Normal, {}});
  Case t;
  t.dist = tsmodel::Innovation::StudentT;
  t.params.nu = 5.0;
  cases.push_back(t);
  Case sk;
  sk.dist = tsmodel::Innovation::SkewT;
  sk.params.nu = 6.0;
  sk.params.lambda = -0.3;
  cases.push_back(sk);
  Case ged;
  ged.dist = tsmodel::Innovation::Ged;
  ged.params.shape = 2.5;
  cases.push_back(ged);

  const int n = 1000000;
  for (const auto& c : cases) {
    rng::Engine eng(101);
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = synth::draw_innovation(c.dist, c.params, eng);
      sum += z;
      sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(var > 0.99);
    CHECK(var < 1.01);
    CHECK(std::abs(mean) < 0.01);
  }
}

TEST_CASE("draw_innovation Student-t has positive excess kurtosis") {
  rng::Engine eng(103);
  tsmodel::DistParams p;
  p.nu = 5.0;
  const int n = 100000;
  double sum2 = 0.0, sum4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z =
        synth::draw_innovation(tsmodel::Innovation::StudentT, p, eng);
    sum2 += z * z;
    sum4 += z * z * z * z;
  }
  const double kurtosis = (sum4 / n) / ((sum2 / n) * (sum2 / n));
  CHECK(kurtosis > 3.5);
}

TEST_CASE("draw_innovation skew direction follows lambda") {
  rng::Engine eng(105);
  tsmodel::DistParams p;
  p.nu = 6.0;
  p.lambda = 0.5;
  double sum3 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z =
        synth::draw_innovation(tsmodel::Innovation::SkewT, p, eng);
    sum3 += z * z * z;
  }
  CHECK(sum3 / n > 0.1);  // positive lambda -> right skew
}

TEST_CASE("draw_innovation validates parameters") {
  rng::Engine eng(1);
  tsmodel::DistParams bad;
  bad.nu = 1.5;
  CHECK_THROWS_AS(
      synth::draw_innovation(tsmodel::Innovation::StudentT, bad, eng),
      validation_error);
}

TEST_CASE("simulate_score_series degenerate recursion is iid with variance omega") {
  synth::FactorDynamics dyn;
  dyn.phi = 0.0;
  dyn.vol = tsmodel::VolModel::Garch11;
  dyn.vol_params.omega = 2.0;
  dyn.vol_params.alpha = 0.0;
  dyn.vol_params.beta = 0.0;
  dyn.dist = tsmodel::Innovation::Normal;
  const Eigen::VectorXd y = synth::simulate_score_series(dyn, 100000, 7);
  const double var = y.squaredNorm() / y.size() -
                     std::pow(y.mean(), 2);
  CHECK(var == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("simulate_score_series matches the unconditional variance formula") {
  synth::FactorDynamics dyn;
  dyn.phi = 0.5;
  dyn.vol = tsmodel::VolModel::Garch11;
  dyn.vol_params.omega = 0.3;
  dyn.vol_params.alpha = 0.1;
  dyn.vol_params.beta = 0.6;
  dyn.dist = tsmodel::Innovation::Normal;
  const Eigen::VectorXd y = synth::simulate_score_series(dyn, 100000, 8);
  const double var = y.squaredNorm() / y.size() - std::pow(y.mean(), 2);
  const double expected = 0.3 / (1.0 - 0.1 - 0.6) / (1.0 - 0.25);
  CHECK(var == doctest::Approx(expected).epsilon(0.10));
}

TEST_CASE("simulate_score_series is deterministic and validates") {
  synth::FactorDynamics dyn;
  dyn.vol_params.omega = 0.1;
  dyn.vol_params.alpha = 0.1;
  dyn.vol_params.beta = 0.8;
  dyn.dist_params.nu = 6.0;
  const Eigen::VectorXd a = synth::simulate_score_series(dyn, 500, 9);
  const Eigen::VectorXd b = synth::simulate_score_series(dyn, 500, 9);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);

  synth::FactorDynamics bad = dyn;
  bad.vol_params.omega = 0.0;
  CHECK_THROWS_AS(synth::simulate_score_series(bad, 500, 9),
                  validation_error);
  synth::FactorDynamics explosive = dyn;
  explosive.phi = 1.5;
  CHECK_THROWS_AS(synth::simulate_score_series(explosive, 500, 9),
                  validation_error);
}

TEST_CASE("generate_surface with zero noise is an exact factor model") {
  synth::SynthSpec spec = synth::default_spec(60, 41, 3);
  spec.noise_sd = 0.0;
  const auto result = synth::generate_surface(spec);
  REQUIRE(result.surface.rows() == 60);
  REQUIRE(result.surface.cols() == 41);
  REQUIRE(result.scores.cols() == 5);

  // coefficients in the orthonormal generating basis recover the scores
  const Eigen::MatrixXd centered =
      result.surface.values.rowwise() - result.mean_curve.transpose();
  const Eigen::MatrixXd recovered = centered * result.basis;
  CHECK((recovered - result.scores).cwiseAbs().maxCoeff() < 1e-8);

  // the basis columns are orthonormal and span the residual exactly
  CHECK((result.basis.transpose() * result.basis -
         Eigen::MatrixXd::Identity(5, 5))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  const Eigen::MatrixXd recon = recovered * result.basis.transpose();
  CHECK((recon - centered).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("generate_surface mean curve is the tent") {
  synth::SynthSpec spec = synth::default_spec(10, 21, 4);
  const auto result = synth::generate_surface(spec);
  for (int m = 0; m < 21; ++m) {
    const double x = result.surface.grid_x[m];
    CHECK(result.mean_curve[m] ==
          doctest::Approx(42.0 - 2.0 * std::abs(x)).epsilon(1e-14));
  }
}

TEST_CASE("generate_surface is seed deterministic") {
  const auto a = synth::generate_surface(synth::default_spec(50, 31, 12));
  const auto b = synth::generate_surface(synth::default_spec(50, 31, 12));
  CHECK((a.surface.values - b.surface.values).cwiseAbs().maxCoeff() == 0.0);
  const auto c = synth::generate_surface(synth::default_spec(50, 31, 13));
  CHECK((a.surface.values - c.surface.values).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("generate_surface block numbering follows the spec") {
  synth::SynthSpec spec = synth::default_spec(5, 11, 1);
  spec.block_start = 100;
  spec.block_spacing = 2400;
  const auto result = synth::generate_surface(spec);
  CHECK(result.surface.block_numbers ==
        std::vector<std::int64_t>{100, 2500, 4900, 7300, 9700});
}

TEST_CASE("default synthetic surface has a dominant rank-5 structure") {
  const auto result = synth::generate_surface(synth::default_spec(800, 201, 5));
  const auto dec = factor::decompose(result.surface, true);
  const auto ve = factor::pve_cpve(dec.eigenvalues);
  CHECK(ve.cpve[4] >= 0.95);
}

TEST_CASE("low-noise surfaces put the PCA basis on the generating span") {
  synth::SynthSpec spec = synth::default_spec(800, 101, 6);
  spec.noise_sd = 0.01;  // 1% of the smallest factor sd
  const auto result = synth::generate_surface(spec);
  const auto dec = factor::decompose(result.surface, true);
  const double d =
      basis::projection_distance(dec.basis.leftCols(5), result.basis);
  CHECK(d < 0.1 * basis::random_subspace_baseline(5, 101));
}

TEST_CASE("unit-root factor scores fail to reject the unit root") {
  synth::SynthSpec spec = synth::default_spec(400, 31, 14);
  spec.factors[0].phi = 1.0;
  const auto result = synth::generate_surface(spec);
  const auto adf = tsmodel::adf_test(result.scores.col(0));
  CHECK(adf.p_value > 0.1);
}
