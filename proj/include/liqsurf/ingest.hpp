#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "liqsurf/errors.hpp"

namespace liqsurf::ingest {

// One LP position: liquidity_level active on the half-open tick range
// [range_lower_tick, range_upper_tick).
struct LpPosition {
  double liquidity_level = 0.0;
  std::int64_t range_lower_tick = 0;
  std::int64_t range_upper_tick = 0;
};

// Pool state at one block: the aggregate-liquidity step function sampled at
// its stored ticks (multiples of tick_spacing, strictly increasing keys).
// Liquidity is 0 outside the stored support.
struct LiquiditySnapshot {
  std::int64_t block_number = 0;
  std::int64_t tick_spacing = 1;
  std::int64_t current_tick = 0;
  std::map<std::int64_t, double> liquidity;
};

// T x M panel of log-liquidity on the rank-standardized grid. grid_x holds M
// equally spaced points in [-1, 1] with 0 exactly at the center index; M odd.
struct SurfaceGrid {
  std::vector<std::int64_t> block_numbers;
  Eigen::VectorXd grid_x;
  Eigen::MatrixXd values;  // rows: blocks, cols: grid points

  std::int64_t rows() const { return values.rows(); }
  std::int64_t cols() const { return values.cols(); }
};

struct SummaryFunctions {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_dev;
};

enum class SnapshotFormat { SnapshotJson, PositionsJson };

// Parses one snapshot per line; "snapshot-json" lines carry the liquidity map
// directly, "positions-json" lines carry LP positions which are aggregated
// over [min lower, max upper). Snapshots must arrive in strictly increasing
// block order.
std::vector<LiquiditySnapshot> parse_snapshot_file(const std::string& path,
                                                   SnapshotFormat format);

// Sum of liquidity_level over all positions whose [lower, upper) contains the
// tick, for every tick in [range_first, range_last] stepped by tick_spacing.
std::map<std::int64_t, double> aggregate_positions(
    const std::vector<LpPosition>& positions, std::int64_t tick_spacing,
    std::int64_t range_first, std::int64_t range_last);

// Rank standardization: selects the (M-1)/2 liquidity-jump ticks nearest the
// current tick on each side (strictly), anchors the center grid point at the
// current tick, and returns the equally spaced grid in [-1,1] together with
// the liquidity values at the selected ticks.
struct RankStandardized {
  Eigen::VectorXd grid_x;
  Eigen::VectorXd values;
};
RankStandardized rank_standardize(const LiquiditySnapshot& snapshot, int M);

// Jump ticks of the stored step function: ticks i in the stored support with
// liquidity(i) != liquidity(i - spacing), liquidity 0 off-support.
std::vector<std::int64_t> jump_ticks(const LiquiditySnapshot& snapshot);

// Subsamples snapshots at blocks b0, b0+spacing, b0+2*spacing, ...,
// rank-standardizes each retained snapshot and takes the natural log.
// A missing block is an error unless allow_gaps, in which case the row is
// dropped (and reported through the optional counter).
SurfaceGrid build_surface(const std::vector<LiquiditySnapshot>& snapshots,
                          std::int64_t block_spacing, int M,
                          bool allow_gaps = false,
                          std::size_t* dropped_rows = nullptr);

// Pointwise mean and standard deviation over time, population (1/T)
// convention for the variance.
SummaryFunctions mean_std_functions(const SurfaceGrid& surface);

// The equally spaced grid 2(j - j*)/(M - 1), j = 1..M, j* = (M+1)/2.
Eigen::VectorXd standard_grid(int M);

}  // namespace liqsurf::ingest
