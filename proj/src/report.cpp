// SPDX-License-Identifier: Apache-2.0
#include "snoma/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "snoma/errors.hpp"

namespace snoma {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) {
  if (!(linear > 0.0)) throw DomainError("linear_to_db: value must be positive");
  return 10.0 * std::log10(linear);
}

namespace {

std::string format_number(double value) {
  std::array<char, 32> buffer{};
  std::snprintf(buffer.data(), buffer.size(), "%.17g", value);
  return buffer.data();
}

template <class T>
std::string format_optional(const std::optional<T>& value) {
  if (!value) return {};
  if constexpr (std::is_same_v<T, int>) {
    return std::to_string(*value);
  } else {
    return format_number(*value);
  }
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    fields.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

double parse_double(const std::string& text, std::string_view column) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("csv: malformed number '" + text + "' in column " + std::string(column));
  }
  return value;
}

int parse_int(const std::string& text, std::string_view column) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("csv: malformed integer '" + text + "' in column " + std::string(column));
  }
  return value;
}

template <class T, class Parse>
std::optional<T> parse_optional(const std::string& text, std::string_view column, Parse parse) {
  if (text.empty()) return std::nullopt;
  return parse(text, column);
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

OutputRow to_output_row(const RatePoint& point) {
  OutputRow row;
  row.scheme = std::string(to_string(point.scheme));
  row.d = point.d;
  row.beta_d = point.beta_d;
  row.beta = point.beta;
  if (point.ebn0 > 0.0) row.ebn0_db = linear_to_db(point.ebn0);
  row.snr = point.snr;
  row.rate = point.rate;
  if (point.scheme == Scheme::timeshare_envelope) {
    row.route = "timeshare:" + std::string(point.envelope_of ? to_string(*point.envelope_of)
                                                             : std::string_view("pooled"));
  } else {
    row.route = point.below_threshold ? "below_threshold" : "fixed_point";
  }
  return row;
}

void write_csv(std::ostream& out, const CsvDocument& document) {
  out << "# schema=" << kSchemaVersion << '\n';
  for (const auto& [key, value] : document.comments) out << "# " << key << '=' << value << '\n';
  out << kCsvHeader << '\n';
  for (const auto& row : document.rows) {
    out << row.scheme << ',' << format_optional(row.d) << ',' << format_optional(row.beta_d) << ','
        << format_number(row.beta) << ',' << format_optional(row.ebn0_db) << ','
        << format_optional(row.snr) << ',' << format_number(row.rate) << ',' << row.route << ','
        << format_optional(row.stderr_value) << '\n';
  }
}

CsvDocument read_csv(std::istream& in) {
  CsvDocument document;
  std::string line;
  bool saw_schema = false;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (saw_header) throw ConfigError("csv: comment after header");
      const std::string body = line.substr(line.find_first_not_of("# "));
      const std::size_t eq = body.find('=');
      if (eq == std::string::npos) throw ConfigError("csv: comment without key=value: " + line);
      std::string key = body.substr(0, eq);
      std::string value = body.substr(eq + 1);
      if (key == "schema") {
        if (value != kSchemaVersion) throw ConfigError("csv: unsupported schema " + value);
        saw_schema = true;
      } else {
        document.comments.emplace_back(std::move(key), std::move(value));
      }
      continue;
    }
    if (!saw_header) {
      if (!saw_schema) throw ConfigError("csv: missing '# schema=v1' line");
      if (line != kCsvHeader) throw ConfigError("csv: unexpected header: " + line);
      saw_header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 9) throw ConfigError("csv: expected 9 fields, got " + std::to_string(f.size()));
    OutputRow row;
    row.scheme = f[0];
    row.d = parse_optional<int>(f[1], "d", parse_int);
    row.beta_d = parse_optional<int>(f[2], "beta_d", parse_int);
    row.beta = parse_double(f[3], "beta");
    row.ebn0_db = parse_optional<double>(f[4], "ebn0_db", parse_double);
    row.snr = parse_optional<double>(f[5], "snr", parse_double);
    row.rate = parse_double(f[6], "rate");
    row.route = f[7];
    row.stderr_value = parse_optional<double>(f[8], "stderr", parse_double);
    document.rows.push_back(std::move(row));
  }
  if (!saw_header) throw ConfigError("csv: missing header");
  return document;
}

nlohmann::json to_json(const OutputRow& row) {
  const auto opt = [](const auto& value) -> nlohmann::json {
    if (value) return *value;
    return nullptr;
  };
  return {{"scheme", row.scheme},
          {"d", opt(row.d)},
          {"beta_d", opt(row.beta_d)},
          {"beta", row.beta},
          {"ebn0_db", opt(row.ebn0_db)},
          {"snr", opt(row.snr)},
          {"rate", row.rate},
          {"route", row.route},
          {"stderr", opt(row.stderr_value)}};
}

nlohmann::json params_to_json(const DerivedParams& p) {
  const SpectralDensity density(p);
  return {{"d", p.d},
          {"beta_d", p.beta_d},
          {"beta", p.beta.value()},
          {"alpha", p.alpha.value()},
          {"gamma", p.gamma.value()},
          {"beta_tilde", p.beta_tilde.value()},
          {"zeta", p.zeta.value()},
          {"lambda_minus", p.lambda_minus},
          {"lambda_plus", p.lambda_plus},
          {"point_mass_at_zero", density.point_mass_at_zero()}};
}

std::string render_svg(const std::vector<SvgSeries>& series, std::string_view title,
                       std::string_view x_label, std::string_view y_label) {
  constexpr double kWidth = 760.0;
  constexpr double kHeight = 500.0;
  constexpr double kLeft = 70.0;
  constexpr double kRight = 200.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 55.0;
  constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = 0.0;
  double y_max = -x_min;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (!std::isfinite(x_min)) {
    x_min = 0.0;
    x_max = 1.0;
    y_max = 1.0;
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= y_min) y_max = y_min + 1.0;
  y_max *= 1.05;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  const auto py = [&](double y) { return kTop + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft + plot_w / 2
      << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title) << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double x = x_min + (x_max - x_min) * i / kTicks;
    const double y = y_min + (y_max - y_min) * i / kTicks;
    svg << "<line x1=\"" << px(x) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << px(x)
        << "\" y2=\"" << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(x) << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">"
        << format_number(std::round(x * 1000) / 1000) << "</text>\n";
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << kLeft << "\" y2=\""
        << py(y) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">"
        << format_number(std::round(y * 1000) / 1000) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\">" << xml_escape(x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << kTop + plot_h / 2 << ")\">"
      << xml_escape(y_label) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % kPalette.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\"";
    if (s.dashed) svg << " stroke-dasharray=\"4 3\"";
    svg << " points=\"";
    for (const auto& [x, y] : s.points) svg << px(x) << ',' << py(y) << ' ';
    svg << "\"/>\n";
    if (s.markers) {
      for (const auto& [x, y] : s.points) {
        svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color
            << "\"/>\n";
      }
    }
    const double ly = kTop + 12 + 18.0 * static_cast<double>(i);
    const double lx = kLeft + plot_w + 15;
    svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (s.dashed) svg << " stroke-dasharray=\"4 3\"";
    svg << "/>\n<text x=\"" << lx + 30 << "\" y=\"" << ly + 4 << "\">" << xml_escape(s.label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace snoma
