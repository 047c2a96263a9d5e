#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace liqsurf::svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Mapper {
  double lo, hi;
  double pix0, pix1;
  double operator()(double v) const {
    const double t = hi == lo ? 0.5 : (v - lo) / (hi - lo);
    return pix0 + t * (pix1 - pix0);
  }
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

void axis_ticks(std::string& out, const Mapper& map, bool horizontal,
                double fixed_pix) {
  const double span = map.hi - map.lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(
                                        raw > 0 ? raw : 1.0)));
  double step = mag;
  if (raw / mag > 5.0) step = 5.0 * mag;
  else if (raw / mag > 2.0) step = 2.0 * mag;
  const double first = std::ceil(map.lo / step) * step;
  for (double v = first; v <= map.hi + 1e-9 * span; v += step) {
    const double p = map(v);
    if (horizontal) {
      out += "<line x1='" + num(p) + "' y1='" + num(fixed_pix) + "' x2='" +
             num(p) + "' y2='" + num(fixed_pix + 5) +
             "' stroke='#333' stroke-width='1'/>\n";
      out += "<text x='" + num(p) + "' y='" + num(fixed_pix + 18) +
             "' font-size='11' text-anchor='middle'>" + num(v) + "</text>\n";
    } else {
      out += "<line x1='" + num(fixed_pix - 5) + "' y1='" + num(p) +
             "' x2='" + num(fixed_pix) + "' y2='" + num(p) +
             "' stroke='#333' stroke-width='1'/>\n";
      out += "<text x='" + num(fixed_pix - 8) + "' y='" + num(p + 4) +
             "' font-size='11' text-anchor='end'>" + num(v) + "</text>\n";
    }
  }
}

std::string color_scale(double t) {
  // Blue (0) through white (0.5) to red (1).
  t = std::clamp(t, 0.0, 1.0);
  int r, g, b;
  if (t < 0.5) {
    const double u = t / 0.5;
    r = static_cast<int>(33 + u * (255 - 33));
    g = static_cast<int>(102 + u * (255 - 102));
    b = static_cast<int>(172 + u * (255 - 172));
  } else {
    const double u = (t - 0.5) / 0.5;
    r = static_cast<int>(255 - u * (255 - 178));
    g = static_cast<int>(255 - u * (255 - 24));
    b = static_cast<int>(255 - u * (255 - 43));
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string line_plot(const std::vector<Series>& series,
                      const std::string& title, const std::string& x_label,
                      const std::string& y_label, int width, int height) {
  const double ml = 64, mr = 16, mt = 40, mb = 48;
  double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  bool first = true;
  for (const auto& s : series) {
    for (Eigen::Index i = 0; i < s.x.size(); ++i) {
      if (first) {
        xlo = xhi = s.x[i];
        ylo = yhi = s.y[i];
        first = false;
      }
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  }
  if (ylo == yhi) {
    ylo -= 1.0;
    yhi += 1.0;
  }
  const double pad = 0.04 * (yhi - ylo);
  ylo -= pad;
  yhi += pad;
  const Mapper mx{xlo, xhi, ml, width - mr};
  const Mapper my{ylo, yhi, static_cast<double>(height - mb),
                  mt};  // y grows upward

  std::string out = "<svg xmlns='http://www.w3.org/2000/svg' width='" +
                    std::to_string(width) + "' height='" +
                    std::to_string(height) + "'>\n";
  out += "<rect width='100%' height='100%' fill='white'/>\n";
  out += "<text x='" + num(width / 2.0) +
         "' y='22' font-size='15' text-anchor='middle' font-weight='bold'>" +
         escape(title) + "</text>\n";
  out += "<line x1='" + num(ml) + "' y1='" + num(height - mb) + "' x2='" +
         num(width - mr) + "' y2='" + num(height - mb) +
         "' stroke='#333' stroke-width='1'/>\n";
  out += "<line x1='" + num(ml) + "' y1='" + num(mt) + "' x2='" + num(ml) +
         "' y2='" + num(height - mb) + "' stroke='#333' stroke-width='1'/>\n";
  axis_ticks(out, mx, true, height - mb);
  axis_ticks(out, my, false, ml);
  out += "<text x='" + num((ml + width - mr) / 2.0) + "' y='" +
         num(height - 10.0) + "' font-size='12' text-anchor='middle'>" +
         escape(x_label) + "</text>\n";
  out += "<text x='14' y='" + num((mt + height - mb) / 2.0) +
         "' font-size='12' text-anchor='middle' transform='rotate(-90 14 " +
         num((mt + height - mb) / 2.0) + ")'>" + escape(y_label) +
         "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    if (ser.x.size() == 0) continue;
    std::string path = "M";
    for (Eigen::Index i = 0; i < ser.x.size(); ++i) {
      path += num(mx(ser.x[i])) + " " + num(my(ser.y[i]));
      if (i + 1 < ser.x.size()) path += " L";
    }
    out += "<path d='" + path + "' fill='none' stroke='" +
           kPalette[s % 8] + "' stroke-width='1.6'/>\n";
    const double ly = mt + 16.0 * s;
    out += "<line x1='" + num(width - mr - 130) + "' y1='" + num(ly) +
           "' x2='" + num(width - mr - 110) + "' y2='" + num(ly) +
           "' stroke='" + kPalette[s % 8] + "' stroke-width='2'/>\n";
    out += "<text x='" + num(width - mr - 104) + "' y='" + num(ly + 4) +
           "' font-size='11'>" + escape(ser.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string heatmap(const Eigen::MatrixXd& values, const std::string& title,
                    int width, int height) {
  const double ml = 48, mr = 16, mt = 40, mb = 32;
  const Eigen::Index max_cells = 240;
  const Eigen::Index rb =
      (values.rows() + max_cells - 1) / max_cells;  // block sizes
  const Eigen::Index cb = (values.cols() + max_cells - 1) / max_cells;
  const Eigen::Index nr = (values.rows() + rb - 1) / rb;
  const Eigen::Index nc = (values.cols() + cb - 1) / cb;
  Eigen::MatrixXd cells(nr, nc);
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nc; ++j) {
      const Eigen::Index r0 = i * rb;
      const Eigen::Index c0 = j * cb;
      const Eigen::Index rn = std::min(rb, values.rows() - r0);
      const Eigen::Index cn = std::min(cb, values.cols() - c0);
      cells(i, j) = values.block(r0, c0, rn, cn).mean();
    }
  }
  const double lo = cells.minCoeff();
  const double hi = cells.maxCoeff();
  const double cw = (width - ml - mr) / static_cast<double>(nc);
  const double ch = (height - mt - mb) / static_cast<double>(nr);

  std::string out = "<svg xmlns='http://www.w3.org/2000/svg' width='" +
                    std::to_string(width) + "' height='" +
                    std::to_string(height) + "'>\n";
  out += "<rect width='100%' height='100%' fill='white'/>\n";
  out += "<text x='" + num(width / 2.0) +
         "' y='22' font-size='15' text-anchor='middle' font-weight='bold'>" +
         escape(title) + "</text>\n";
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nc; ++j) {
      const double t = hi == lo ? 0.5 : (cells(i, j) - lo) / (hi - lo);
      const double x = ml + j * cw;
      const double y = mt + (nr - 1 - i) * ch;
      out += "<rect x='" + num(x) + "' y='" + num(y) + "' width='" +
             num(cw + 0.5) + "' height='" + num(ch + 0.5) + "' fill='" +
             color_scale(t) + "'/>\n";
    }
  }
  out += "<text x='" + num(ml) + "' y='" + num(height - 10.0) +
         "' font-size='11'>min " + num(lo) + "</text>\n";
  out += "<text x='" + num(width - mr) + "' y='" + num(height - 10.0) +
         "' font-size='11' text-anchor='end'>max " + num(hi) + "</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace liqsurf::svg
