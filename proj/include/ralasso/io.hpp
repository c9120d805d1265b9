#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "ralasso/simulation.hpp"

namespace ralasso {

using json = nlohmann::ordered_json;

// Shortest-round-trip formatting used for every double we serialize:
// printf %.17g, which strtod recovers exactly.
std::string fmt17(double x);

// Like json::dump(indent=2) but routes every floating-point number through
// fmt17 so files are reproducible byte for byte.
std::string dump_json(const json& j);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Strict CSV: comma separated, one header line, '.' decimal point, scientific
// notation accepted, NaN/inf rejected. Errors carry the 1-based line number of
// the first offending line.
CsvTable read_csv(const std::string& path);

// Dataset CSV: a column named "y" plus at least one feature column.
Dataset read_dataset_csv(const std::string& path);
// Single-column CSV.
Eigen::VectorXd read_column_csv(const std::string& path);
// Any numeric CSV as a matrix in header order.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

// Scenario files:
// {
//   "model": "homoscedastic" | "heteroscedastic",
//   "error": "normal04" | "2t3" | "mixn" | "lognormal" | "weibull" | "zero",
//   "n": 100, "p": 400,
//   "beta_star": [...] or "beta_star_spec": {"nonzero": 20, "value": 3.0},
//   "replications": 100, "seed": 0,
//   "grid": {"lambda": [...], "alpha": [...], "n_validation": 100}
// }
// model and error are required; everything else defaults as in Scenario.
Scenario scenario_from_json(const json& j);
json scenario_to_json(const Scenario& sc);

json report_to_json(const MetricsReport& report);
// One `method,metric,value` row per statistic; `extra_header` lines are
// emitted first, each prefixed with "# ".
std::string report_to_csv(const MetricsReport& report,
                          const std::vector<std::string>& extra_header);

void write_file(const std::string& path, const std::string& content);

}  // namespace ralasso
