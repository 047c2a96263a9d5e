#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "liqsurf/errors.hpp"
#include "liqsurf/ingest.hpp"
#include "liqsurf/rng.hpp"
#include "liqsurf/tsmodel.hpp"

namespace liqsurf::synth {

// One unit-variance draw from the innovation family.
double draw_innovation(tsmodel::Innovation dist,
                       const tsmodel::DistParams& params, rng::Engine& eng);

struct FactorDynamics {
  double phi = 0.9;
  tsmodel::VolModel vol = tsmodel::VolModel::Garch11;
  tsmodel::VolParams vol_params;
  tsmodel::Innovation dist = tsmodel::Innovation::StudentT;
  tsmodel::DistParams dist_params;
};

// beta_t = phi * beta_{t-1} + sigma_t z_t with sigma_t from the chosen
// variance recursion run forward; the first 500 steps are discarded.
Eigen::VectorXd simulate_score_series(const FactorDynamics& dynamics, int T,
                                      std::uint64_t seed);

struct SynthSpec {
  int T = 800;
  int M = 201;
  double tent_a = 42.0;  // log-liquidity level at x = 0
  double tent_b = 2.0;   // tent slope per unit of x
  std::vector<FactorDynamics> factors;
  double noise_sd = 0.1;
  std::uint64_t seed = 0;
  std::int64_t block_start = 0;
  std::int64_t block_spacing = 1;
};

// Five factors with score standard deviations (8, 4, 2, 1.5, 1), AR
// coefficients (0.9, 0.87, 0.84, 0.75, 0.6), GARCH(1,1) shocks
// (alpha, beta) = (0.1, 0.8) with omega set by variance targeting, and
// Student-t(6) innovations.
SynthSpec default_spec(int T = 800, int M = 201, std::uint64_t seed = 0);

struct SynthResult {
  ingest::SurfaceGrid surface;
  Eigen::MatrixXd scores;      // T x K_true ground truth
  Eigen::MatrixXd basis;       // M x K_true orthonormalized grid columns
  Eigen::VectorXd mean_curve;  // tent_a - tent_b * |x|
};

// y_t(x_m) = mean_curve(x_m) + sum_k scores(t,k) basis(m,k) + noise, with
// the generating basis equal to the orthonormalized grid columns of the
// polynomial design, so the truth subspace is exactly the comparison
// subspace in round-trip tests.
SynthResult generate_surface(const SynthSpec& spec);

}  // namespace liqsurf::synth
