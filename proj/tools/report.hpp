#pragma once

#include <string>

namespace liqsurf::report {

struct ReportInputs {
  std::string surface_csv;  // any subset may be empty; at least one set
  std::string eigenvalues_csv;
  std::string cpve_csv;
  std::string drift_csv;
  std::string sweep_csv;
  std::string forecast_csv;
  std::string shock_csv;
};

// Markdown summary assembled strictly from the listed artifact files.
std::string build_report(const ReportInputs& inputs);

}  // namespace liqsurf::report
