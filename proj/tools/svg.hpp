#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace liqsurf::svg {

struct Series {
  std::string label;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

// Self-contained line plot with axes, tick labels and a legend.
std::string line_plot(const std::vector<Series>& series,
                      const std::string& title, const std::string& x_label,
                      const std::string& y_label, int width = 880,
                      int height = 520);

// Blue-white-red heatmap of a matrix (rows bottom-up); large inputs are
// block-averaged down to at most 240 cells per axis.
std::string heatmap(const Eigen::MatrixXd& values, const std::string& title,
                    int width = 880, int height = 520);

}  // namespace liqsurf::svg
