#include "liqsurf/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace liqsurf::ingest {

using nlohmann::json;

namespace {

void validate_snapshot(const LiquiditySnapshot& snap, std::size_t line_no) {
  if (snap.tick_spacing <= 0) {
    throw validation_error("line " + std::to_string(line_no) +
                           ": tick_spacing must be positive");
  }
  for (const auto& [tick, value] : snap.liquidity) {
    if (tick % snap.tick_spacing != 0) {
      throw validation_error("line " + std::to_string(line_no) + ": tick " +
                             std::to_string(tick) +
                             " is not a multiple of tick_spacing");
    }
    if (!std::isfinite(value) || value < 0.0) {
      throw validation_error("line " + std::to_string(line_no) + ": tick " +
                             std::to_string(tick) +
                             " has a non-finite or negative liquidity value");
    }
  }
}

LiquiditySnapshot parse_snapshot_line(const json& record, SnapshotFormat format,
                                      std::size_t line_no) {
  LiquiditySnapshot snap;
  snap.block_number = record.at("block").get<std::int64_t>();
  snap.tick_spacing = record.at("tick_spacing").get<std::int64_t>();
  snap.current_tick = record.at("current_tick").get<std::int64_t>();
  if (snap.block_number < 0) {
    throw validation_error("line " + std::to_string(line_no) +
                           ": negative block number");
  }

  if (format == SnapshotFormat::SnapshotJson) {
    for (const auto& entry : record.at("liquidity")) {
      if (!entry.is_array() || entry.size() != 2) {
        throw parse_error("line " + std::to_string(line_no) +
                          ": liquidity entries must be [tick, value] pairs");
      }
      const auto tick = entry[0].get<std::int64_t>();
      const auto value = entry[1].get<double>();
      auto [it, inserted] = snap.liquidity.emplace(tick, value);
      (void)it;
      if (!inserted) {
        throw validation_error("line " + std::to_string(line_no) +
                               ": duplicate tick key " + std::to_string(tick));
      }
    }
  } else {
    std::vector<LpPosition> positions;
    for (const auto& entry : record.at("positions")) {
      LpPosition pos;
      pos.liquidity_level = entry.at("L").get<double>();
      pos.range_lower_tick = entry.at("lower").get<std::int64_t>();
      pos.range_upper_tick = entry.at("upper").get<std::int64_t>();
      if (pos.liquidity_level <= 0.0) {
        throw validation_error("line " + std::to_string(line_no) +
                               ": position liquidity must be positive");
      }
      if (pos.range_lower_tick >= pos.range_upper_tick) {
        throw validation_error("line " + std::to_string(line_no) +
                               ": position range must satisfy lower < upper");
      }
      if (pos.range_lower_tick % snap.tick_spacing != 0 ||
          pos.range_upper_tick % snap.tick_spacing != 0) {
        throw validation_error("line " + std::to_string(line_no) +
                               ": position range must align to tick_spacing");
      }
      positions.push_back(pos);
    }
    if (!positions.empty()) {
      std::int64_t lo = positions.front().range_lower_tick;
      std::int64_t hi = positions.front().range_upper_tick;
      for (const auto& pos : positions) {
        lo = std::min(lo, pos.range_lower_tick);
        hi = std::max(hi, pos.range_upper_tick);
      }
      snap.liquidity = aggregate_positions(positions, snap.tick_spacing, lo,
                                           hi - snap.tick_spacing);
    }
  }

  validate_snapshot(snap, line_no);
  return snap;
}

}  // namespace

std::vector<LiquiditySnapshot> parse_snapshot_file(const std::string& path,
                                                   SnapshotFormat format) {
  std::ifstream in(path);
  if (!in) {
    throw parse_error("cannot open input file: " + path);
  }
  std::vector<LiquiditySnapshot> snapshots;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw parse_error("line " + std::to_string(line_no) + ": " + e.what());
    }
    LiquiditySnapshot snap;
    try {
      snap = parse_snapshot_line(record, format, line_no);
    } catch (const json::exception& e) {
      throw parse_error("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!snapshots.empty() &&
        snap.block_number <= snapshots.back().block_number) {
      throw parse_error("line " + std::to_string(line_no) +
                        ": block numbers must be strictly increasing (" +
                        std::to_string(snapshots.back().block_number) +
                        " then " + std::to_string(snap.block_number) + ")");
    }
    snapshots.push_back(std::move(snap));
  }
  return snapshots;
}

std::map<std::int64_t, double> aggregate_positions(
    const std::vector<LpPosition>& positions, std::int64_t tick_spacing,
    std::int64_t range_first, std::int64_t range_last) {
  if (tick_spacing <= 0) {
    throw validation_error("tick_spacing must be positive");
  }
  if (range_first % tick_spacing != 0 || range_last % tick_spacing != 0) {
    throw validation_error("tick range bounds must align to tick_spacing");
  }
  for (const auto& pos : positions) {
    if (!(pos.liquidity_level > 0.0)) {
      throw validation_error("position liquidity must be positive");
    }
    if (pos.range_lower_tick >= pos.range_upper_tick) {
      throw validation_error("position range [" +
                             std::to_string(pos.range_lower_tick) + ", " +
                             std::to_string(pos.range_upper_tick) +
                             ") is empty");
    }
    if (pos.range_lower_tick % tick_spacing != 0 ||
        pos.range_upper_tick % tick_spacing != 0) {
      throw validation_error("position range bounds must align to "
                             "tick_spacing");
    }
  }
  std::map<std::int64_t, double> out;
  for (std::int64_t tick = range_first; tick <= range_last;
       tick += tick_spacing) {
    double total = 0.0;
    for (const auto& pos : positions) {
      if (pos.range_lower_tick <= tick && tick < pos.range_upper_tick) {
        total += pos.liquidity_level;
      }
    }
    out[tick] = total;
  }
  return out;
}

std::vector<std::int64_t> jump_ticks(const LiquiditySnapshot& snapshot) {
  std::vector<std::int64_t> jumps;
  const auto& liq = snapshot.liquidity;
  const std::int64_t s = snapshot.tick_spacing;
  for (auto it = liq.begin(); it != liq.end(); ++it) {
    const auto prev = liq.find(it->first - s);
    const double left_value = prev == liq.end() ? 0.0 : prev->second;
    if (it->second != left_value) {
      jumps.push_back(it->first);
    }
  }
  return jumps;
}

Eigen::VectorXd standard_grid(int M) {
  if (M < 3 || M % 2 == 0) {
    throw validation_error("M must be an odd integer >= 3, got " +
                           std::to_string(M));
  }
  Eigen::VectorXd grid(M);
  const int j_star = (M + 1) / 2;
  for (int j = 1; j <= M; ++j) {
    grid[j - 1] = 2.0 * (j - j_star) / static_cast<double>(M - 1);
  }
  return grid;
}

RankStandardized rank_standardize(const LiquiditySnapshot& snapshot, int M) {
  RankStandardized out;
  out.grid_x = standard_grid(M);
  const int half = (M - 1) / 2;
  const std::int64_t s = snapshot.tick_spacing;
  const std::int64_t current = snapshot.current_tick;

  const std::vector<std::int64_t> jumps = jump_ticks(snapshot);
  std::vector<std::int64_t> left, right;
  for (std::int64_t tick : jumps) {
    if (tick < current) left.push_back(tick);
    if (tick > current) right.push_back(tick);
  }
  if (static_cast<int>(left.size()) < half ||
      static_cast<int>(right.size()) < half) {
    throw validation_error(
        "block " + std::to_string(snapshot.block_number) +
        ": insufficient liquidity jumps around the current tick (need " +
        std::to_string(half) + " per side, have " +
        std::to_string(left.size()) + " left, " +
        std::to_string(right.size()) + " right)");
  }

  // jump_ticks returns ascending order; the nearest `half` on the left are
  // the last `half` entries, on the right the first `half`.
  std::vector<std::int64_t> selected;
  selected.insert(selected.end(), left.end() - half, left.end());
  // Anchor at the step-function value in force at the current tick
  // (floor to the containing multiple of the spacing).
  std::int64_t q = current / s;
  if (current % s != 0 && current < 0) --q;
  const std::int64_t anchor_tick = q * s;
  selected.push_back(anchor_tick);
  selected.insert(selected.end(), right.begin(), right.begin() + half);

  out.values.resize(M);
  for (int j = 0; j < M; ++j) {
    const auto it = snapshot.liquidity.find(selected[j]);
    out.values[j] = it == snapshot.liquidity.end() ? 0.0 : it->second;
  }
  return out;
}

SurfaceGrid build_surface(const std::vector<LiquiditySnapshot>& snapshots,
                          std::int64_t block_spacing, int M, bool allow_gaps,
                          std::size_t* dropped_rows) {
  if (block_spacing <= 0) {
    throw validation_error("block_spacing must be positive");
  }
  if (snapshots.empty()) {
    throw validation_error("no snapshots to build a surface from");
  }
  const Eigen::VectorXd grid = standard_grid(M);

  std::map<std::int64_t, const LiquiditySnapshot*> by_block;
  for (const auto& snap : snapshots) by_block[snap.block_number] = &snap;

  const std::int64_t b0 = snapshots.front().block_number;
  const std::int64_t b_last = snapshots.back().block_number;

  std::vector<std::int64_t> blocks;
  std::vector<Eigen::VectorXd> rows;
  std::size_t dropped = 0;
  for (std::int64_t block = b0; block <= b_last; block += block_spacing) {
    const auto it = by_block.find(block);
    if (it == by_block.end()) {
      if (allow_gaps) {
        ++dropped;
        continue;
      }
      throw validation_error("missing snapshot at required block " +
                             std::to_string(block) +
                             " (spacing " + std::to_string(block_spacing) +
                             " from block " + std::to_string(b0) + ")");
    }
    const RankStandardized std_row = rank_standardize(*it->second, M);
    Eigen::VectorXd log_row(M);
    for (int m = 0; m < M; ++m) {
      if (!(std_row.values[m] > 0.0)) {
        std::ostringstream msg;
        msg << "zero liquidity at retained grid point (block " << block
            << ", x = " << std_row.grid_x[m] << ")";
        throw validation_error(msg.str());
      }
      log_row[m] = std::log(std_row.values[m]);
    }
    blocks.push_back(block);
    rows.push_back(std::move(log_row));
  }
  if (dropped_rows != nullptr) *dropped_rows = dropped;
  if (rows.empty()) {
    throw validation_error("all rows dropped while building the surface");
  }

  SurfaceGrid out;
  out.block_numbers = std::move(blocks);
  out.grid_x = grid;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), M);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    out.values.row(static_cast<Eigen::Index>(t)) = rows[t];
  }
  return out;
}

SummaryFunctions mean_std_functions(const SurfaceGrid& surface) {
  if (surface.rows() < 1) {
    throw validation_error("surface must have at least one row");
  }
  const double T = static_cast<double>(surface.rows());
  SummaryFunctions out;
  out.mean = surface.values.colwise().mean();
  Eigen::MatrixXd centered =
      surface.values.rowwise() - out.mean.transpose();
  out.std_dev = (centered.array().square().colwise().sum() / T).sqrt();
  // A constant column must report its common value and exactly zero spread;
  // the sum/T route can leave rounding dust there.
  for (Eigen::Index m = 0; m < surface.cols(); ++m) {
    const double first = surface.values(0, m);
    if ((surface.values.col(m).array() == first).all()) {
      out.mean[m] = first;
      out.std_dev[m] = 0.0;
    }
  }
  return out;
}

}  // namespace liqsurf::ingest
