// SPDX-License-Identifier: Apache-2.0
//
// Tabular output shared by the CLI subcommands. CSV files carry a
// `# schema=v1` line, optional `# key=value` comments and the fixed header
//
//   scheme,d,beta_d,beta,ebn0_db,snr,rate,route,stderr
//
// with empty fields where a column does not apply.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "snoma/baselines.hpp"
#include "snoma/spectral.hpp"

namespace snoma {

double db_to_linear(double db);
double linear_to_db(double linear);

inline constexpr std::string_view kSchemaVersion = "v1";
inline constexpr std::string_view kCsvHeader = "scheme,d,beta_d,beta,ebn0_db,snr,rate,route,stderr";

struct OutputRow {
  std::string scheme;
  std::optional<int> d;
  std::optional<int> beta_d;
  double beta = 0.0;
  std::optional<double> ebn0_db;
  std::optional<double> snr;
  double rate = 0.0;
  std::string route;
  std::optional<double> stderr_value;

  friend bool operator==(const OutputRow&, const OutputRow&) = default;
};

using Comments = std::vector<std::pair<std::string, std::string>>;

struct CsvDocument {
  Comments comments;
  std::vector<OutputRow> rows;
};

/// Envelope rows get route "timeshare:<generator>", solved rows "fixed_point".
OutputRow to_output_row(const RatePoint& point);

void write_csv(std::ostream& out, const CsvDocument& document);

/// Parses a document written by write_csv. Throws ConfigError on a missing
/// schema line, a foreign header or a malformed field.
CsvDocument read_csv(std::istream& in);

nlohmann::json to_json(const OutputRow& row);
nlohmann::json params_to_json(const DerivedParams& params);

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool dashed = false;
  bool markers = false;
};

/// Single-file SVG line chart: axes, one polyline per series, legend.
std::string render_svg(const std::vector<SvgSeries>& series, std::string_view title,
                       std::string_view x_label, std::string_view y_label);

}  // namespace snoma
