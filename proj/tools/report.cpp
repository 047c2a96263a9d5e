#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include "liqsurf/errors.hpp"
#include "liqsurf/io.hpp"

namespace liqsurf::report {

namespace {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Csv load_csv(const std::string& path) {
  const std::string text = io::read_text(path);
  Csv out;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t begin = 0;
    while (true) {
      const std::size_t end = line.find(',', begin);
      if (end == std::string::npos) {
        cells.push_back(line.substr(begin));
        break;
      }
      cells.push_back(line.substr(begin, end - begin));
      begin = end + 1;
    }
    if (first) {
      out.header = std::move(cells);
      first = false;
    } else {
      out.rows.push_back(std::move(cells));
    }
  }
  if (out.header.empty()) throw parse_error("empty CSV: " + path);
  return out;
}

int column(const Csv& csv, const std::string& name) {
  for (std::size_t i = 0; i < csv.header.size(); ++i) {
    if (csv.header[i] == name) return static_cast<int>(i);
  }
  throw parse_error("missing CSV column: " + name);
}

double cell_num(const std::vector<std::string>& row, int i) {
  return std::stod(row[i]);
}

std::string fmt(double v, int prec = 4) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

void surface_section(std::string& md, const std::string& path) {
  const ingest::SurfaceGrid s = io::surface_from_csv(io::read_text(path));
  md += "## Surface\n\n";
  md += "- rows: " + std::to_string(s.rows()) + "\n";
  md += "- grid points: " + std::to_string(s.cols()) + "\n";
  md += "- blocks: " + std::to_string(s.block_numbers.front()) + " to " +
        std::to_string(s.block_numbers.back()) + "\n";
  md += "- value range: [" + fmt(s.values.minCoeff()) + ", " +
        fmt(s.values.maxCoeff()) + "]\n\n";
}

void eigenvalue_section(std::string& md, const std::string& path) {
  const Csv csv = load_csv(path);
  md += "## Eigenvalues per window\n\n";
  md += "- windows: " + std::to_string(csv.rows.size()) + "\n";
  if (!csv.rows.empty() && csv.header.size() >= 3) {
    double l1_min = 1e300, l1_max = -1e300;
    for (const auto& row : csv.rows) {
      const double l1 = cell_num(row, 1);
      l1_min = std::min(l1_min, l1);
      l1_max = std::max(l1_max, l1);
    }
    md += "- leading eigenvalue across windows: [" + fmt(l1_min) + ", " +
          fmt(l1_max) + "]\n";
  }
  md += "\n";
}

void cpve_section(std::string& md, const std::string& path) {
  const Csv csv = load_csv(path);
  const int ck = column(csv, "K");
  const int cv = column(csv, "cpve");
  std::map<int, std::vector<double>> per_k;
  for (const auto& row : csv.rows) {
    per_k[static_cast<int>(cell_num(row, ck))].push_back(cell_num(row, cv));
  }
  md += "## Cumulative variance explained\n\n";
  md += "| K | mean | min | max |\n|---|------|-----|-----|\n";
  for (const auto& [k, vals] : per_k) {
    double mn = 1e300, mx = -1e300, total = 0;
    for (double v : vals) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
      total += v;
    }
    md += "| " + std::to_string(k) + " | " + fmt(total / vals.size()) +
          " | " + fmt(mn) + " | " + fmt(mx) + " |\n";
  }
  md += "\n";
}

void drift_section(std::string& md, const std::string& path) {
  const Csv csv = load_csv(path);
  const int ck = column(csv, "K");
  const int ci = column(csv, "d_to_inception");
  const int cl = column(csv, "d_to_legendre");
  const int cb = column(csv, "baseline");
  struct Agg {
    double max_incep = 0, max_leg = 0, baseline = 0;
  };
  std::map<int, Agg> per_k;
  for (const auto& row : csv.rows) {
    Agg& a = per_k[static_cast<int>(cell_num(row, ck))];
    a.max_incep = std::max(a.max_incep, cell_num(row, ci));
    a.max_leg = std::max(a.max_leg, cell_num(row, cl));
    a.baseline = cell_num(row, cb);
  }
  md += "## Subspace drift\n\n";
  md += "| K | max d to inception | max d to polynomial | baseline |\n";
  md += "|---|--------------------|---------------------|----------|\n";
  for (const auto& [k, a] : per_k) {
    md += "| " + std::to_string(k) + " | " + fmt(a.max_incep) + " | " +
          fmt(a.max_leg) + " | " + fmt(a.baseline) + " |\n";
  }
  md += "\n";
}

void sweep_section(std::string& md, const std::string& path) {
  const Csv csv = load_csv(path);
  const int cm = column(csv, "mean");
  const int cv = column(csv, "vol");
  const int cd = column(csv, "dist");
  const int cc = column(csv, "converged");
  const int cb = column(csv, "bic");
  const int cdb = column(csv, "delta_bic");
  const int cl = column(csv, "label");
  const int cs = column(csv, "series_id");
  std::vector<std::size_t> order(csv.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return cell_num(csv.rows[a], cb) <
                            cell_num(csv.rows[b], cb);
                   });
  std::size_t n_conv = 0;
  for (const auto& row : csv.rows) {
    if (row[cc] == "true") ++n_conv;
  }
  md += "## Model selection\n\n";
  md += "- series: " + (csv.rows.empty() ? std::string("?")
                                         : csv.rows.front()[cs]) + "\n";
  md += "- fits: " + std::to_string(csv.rows.size()) + " (" +
        std::to_string(n_conv) + " converged)\n\n";
  md += "| rank | mean | vol | dist | BIC | delta | evidence |\n";
  md += "|------|------|-----|------|-----|-------|----------|\n";
  const std::size_t top = std::min<std::size_t>(5, order.size());
  for (std::size_t i = 0; i < top; ++i) {
    const auto& row = csv.rows[order[i]];
    md += "| " + std::to_string(i + 1) + " | " + row[cm] + " | " + row[cv] +
          " | " + row[cd] + " | " + fmt(cell_num(row, cb), 2) + " | " +
          fmt(cell_num(row, cdb), 2) + " | " + row[cl] + " |\n";
  }
  md += "\n";
}

void forecast_section(std::string& md, const std::string& path) {
  const Csv csv = load_csv(path);
  const int ch = column(csv, "h");
  const int c05 = column(csv, "q05");
  const int c95 = column(csv, "q95");
  std::map<int, std::pair<double, int>> width;  // h -> (sum, n)
  for (const auto& row : csv.rows) {
    auto& w = width[static_cast<int>(cell_num(row, ch))];
    w.first += cell_num(row, c95) - cell_num(row, c05);
    w.second += 1;
  }
  md += "## Forecast bands\n\n";
  md += "| h | mean 5-95 width |\n|---|------------------|\n";
  for (const auto& [h, w] : width) {
    md += "| " + std::to_string(h) + " | " + fmt(w.first / w.second) +
          " |\n";
  }
  md += "\n";
}

void shock_section(std::string& md, const std::string& path) {
  const Csv csv = load_csv(path);
  const int cb = column(csv, "baseline");
  const int cs = column(csv, "shocked");
  double max_abs = 0.0;
  for (const auto& row : csv.rows) {
    max_abs = std::max(max_abs,
                       std::abs(cell_num(row, cs) - cell_num(row, cb)));
  }
  md += "## Shock response\n\n";
  md += "- grid points: " + std::to_string(csv.rows.size()) + "\n";
  md += "- max |shocked - baseline|: " + fmt(max_abs) + "\n\n";
}

}  // namespace

std::string build_report(const ReportInputs& in) {
  std::string md = "# Liquidity surface analysis report\n\n";
  bool any = false;
  if (!in.surface_csv.empty()) {
    surface_section(md, in.surface_csv);
    any = true;
  }
  if (!in.eigenvalues_csv.empty()) {
    eigenvalue_section(md, in.eigenvalues_csv);
    any = true;
  }
  if (!in.cpve_csv.empty()) {
    cpve_section(md, in.cpve_csv);
    any = true;
  }
  if (!in.drift_csv.empty()) {
    drift_section(md, in.drift_csv);
    any = true;
  }
  if (!in.sweep_csv.empty()) {
    sweep_section(md, in.sweep_csv);
    any = true;
  }
  if (!in.forecast_csv.empty()) {
    forecast_section(md, in.forecast_csv);
    any = true;
  }
  if (!in.shock_csv.empty()) {
    shock_section(md, in.shock_csv);
    any = true;
  }
  if (!any) {
    throw validation_error("report needs at least one input artifact");
  }
  return md;
}

}  // namespace liqsurf::report
