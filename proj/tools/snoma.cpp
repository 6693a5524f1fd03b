// SPDX-License-Identifier: Apache-2.0
//
// snoma: closed-form spectral efficiency of regular sparse NOMA, load
// sweeps, Monte Carlo cross-checks and the invariant suite.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "snoma/asymptotics.hpp"
#include "snoma/baselines.hpp"
#include "snoma/capacity.hpp"
#include "snoma/errors.hpp"
#include "snoma/montecarlo.hpp"
#include "snoma/report.hpp"
#include "snoma/spectral.hpp"
#include "snoma/validate.hpp"

namespace {

using nlohmann::json;
using namespace snoma;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Options {
  int d = 0;
  int beta_d = 0;
  std::optional<double> snr_db;
  std::optional<double> ebn0_db;
  double beta_min = 0.05;
  double beta_max = 3.0;
  int points = 0;
  int n = 1200;
  int trials = 50;
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string out;
  std::string phase = "uniform";
  bool quick = false;
  std::string fault = "none";
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

json document(std::string_view command) {
  return {{"schema", std::string(kSchemaVersion)}, {"command", std::string(command)}};
}

json rows_to_json(const std::vector<OutputRow>& rows) {
  json array = json::array();
  for (const auto& row : rows) array.push_back(to_json(row));
  return array;
}

void require_format(const Options& o, std::initializer_list<std::string_view> allowed) {
  for (auto f : allowed) {
    if (o.format == f) return;
  }
  throw ConfigError("--format " + o.format + " is not available for this subcommand");
}

double snr_linear(const Options& o) {
  if (!o.snr_db) throw ConfigError("--snr-db is required");
  return db_to_linear(*o.snr_db);
}

int cmd_params(const Options& o) {
  require_format(o, {"json", "csv"});
  const DerivedParams p = derive_params(o.d, o.beta_d);
  Output out(o.out);
  json doc = document("params");
  doc["params"] = params_to_json(p);
  out.stream() << doc.dump(2) << '\n';
  return 0;
}

int cmd_density(const Options& o) {
  const SpectralDensity density(derive_params(o.d, o.beta_d));
  const int points = o.points > 0 ? o.points : 200;
  std::vector<std::pair<double, double>> samples;
  const double lo = density.lambda_minus();
  const double width = density.lambda_plus() - lo;
  for (int i = 1; i <= points; ++i) {
    const double lambda = lo + width * i / (points + 1.0);
    samples.emplace_back(lambda, density.at(lambda).value);
  }

  Output out(o.out);
  auto& s = out.stream();
  if (o.format == "csv") {
    s << "# schema=" << kSchemaVersion << '\n';
    s << "# point_mass_at_zero=" << number(density.point_mass_at_zero()) << '\n';
    s << "lambda,rho\n";
    for (const auto& [x, y] : samples) s << number(x) << ',' << number(y) << '\n';
  } else if (o.format == "json") {
    json doc = document("density");
    doc["params"] = params_to_json(density.params());
    json array = json::array();
    for (const auto& [x, y] : samples) array.push_back({{"lambda", x}, {"rho", y}});
    doc["density"] = array;
    s << doc.dump(2) << '\n';
  } else {
    std::ostringstream title;
    title << "Limiting spectral density, d=" << o.d << ", beta_d=" << o.beta_d
          << " (atom at 0: " << density.point_mass_at_zero() << ")";
    s << render_svg({{"rho", samples, false, false}}, title.str(), "lambda", "density");
  }
  return 0;
}

int cmd_capacity(const Options& o) {
  require_format(o, {"csv", "json"});
  const SystemConfig config(o.d, o.beta_d, snr_linear(o));
  const double beta = config.beta();
  const double snr = config.snr();

  std::vector<OutputRow> rows;
  const auto add = [&](Scheme scheme, double rate, bool sparse) {
    OutputRow row;
    row.scheme = std::string(to_string(scheme));
    if (sparse) {
      row.d = o.d;
      row.beta_d = o.beta_d;
    }
    row.beta = beta;
    row.snr = snr;
    row.rate = rate;
    if (rate > 0.0) row.ebn0_db = linear_to_db(beta * snr / rate);
    row.route = "closed_form";
    rows.push_back(row);
  };
  add(Scheme::sparse_opt, capacity_optimum(config).spectral_efficiency, true);
  add(Scheme::sparse_lmmse, capacity_lmmse(config).spectral_efficiency, true);
  add(Scheme::rs_cdma_opt, baseline_rate(Scheme::rs_cdma_opt, beta, snr), false);
  add(Scheme::rs_cdma_lmmse, baseline_rate(Scheme::rs_cdma_lmmse, beta, snr), false);
  if (beta <= 1.0) add(Scheme::orthogonal, baseline_rate(Scheme::orthogonal, beta, snr), false);
  add(Scheme::cover_wyner, baseline_rate(Scheme::cover_wyner, beta, snr), false);

  Output out(o.out);
  if (o.format == "csv") {
    write_csv(out.stream(), {{{"command", "capacity"}, {"snr_db", number(*o.snr_db)}}, rows});
  } else {
    json doc = document("capacity");
    doc["rows"] = rows_to_json(rows);
    out.stream() << doc.dump(2) << '\n';
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  if (!o.ebn0_db) throw ConfigError("--ebn0-db is required");
  if (!(o.beta_min > 0.0 && o.beta_max > o.beta_min)) {
    throw ConfigError("require 0 < --beta-min < --beta-max");
  }
  if (o.d < 2) throw ConfigError("d >= 2 violated (d=" + std::to_string(o.d) + ")");
  const int points = o.points > 0 ? o.points : 60;
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) {
    grid.push_back(points == 1 ? o.beta_min
                               : o.beta_min + (o.beta_max - o.beta_min) * i / (points - 1.0));
  }
  const SweepTable table = sweep_load(o.d, db_to_linear(*o.ebn0_db), grid);

  std::vector<OutputRow> rows;
  for (const auto& point : table.points) rows.push_back(to_output_row(point));

  Output out(o.out);
  if (o.format == "csv") {
    write_csv(out.stream(), {{{"command", "sweep"}, {"ebn0_db", number(*o.ebn0_db)}}, rows});
  } else if (o.format == "json") {
    json doc = document("sweep");
    doc["rows"] = rows_to_json(rows);
    out.stream() << doc.dump(2) << '\n';
  } else {
    // one series per scheme; envelopes dashed, lattice points as markers
    std::map<std::string, SvgSeries> series;
    std::vector<std::string> order;
    for (const auto& point : table.points) {
      std::string label(to_string(point.scheme));
      if (point.envelope_of) label = "envelope(" + std::string(to_string(*point.envelope_of)) + ")";
      auto [it, inserted] = series.try_emplace(label);
      if (inserted) {
        order.push_back(label);
        it->second.label = label;
        it->second.dashed = point.scheme == Scheme::timeshare_envelope;
        it->second.markers =
            point.scheme == Scheme::sparse_opt || point.scheme == Scheme::sparse_lmmse;
      }
      it->second.points.emplace_back(point.beta, point.rate);
    }
    std::vector<SvgSeries> ordered;
    for (const auto& label : order) ordered.push_back(series.at(label));
    std::ostringstream title;
    title << "Spectral efficiency vs load, d=" << o.d << ", Eb/N0=" << *o.ebn0_db << " dB";
    out.stream() << render_svg(ordered, title.str(), "load beta", "bits/s/Hz");
  }
  return 0;
}

PhaseScheme parse_phase(const std::string& name) {
  if (name == "uniform") return PhaseScheme::uniform;
  if (name == "binary") return PhaseScheme::binary;
  if (name == "repetition") return PhaseScheme::repetition;
  throw ConfigError("unknown phase scheme " + name);
}

int cmd_montecarlo(const Options& o) {
  require_format(o, {"csv", "json"});
  const SystemConfig config(o.d, o.beta_d, snr_linear(o));
  const PhaseScheme phase = parse_phase(o.phase);
  const double beta = config.beta();

  std::vector<OutputRow> rows;
  bool passed = true;
  const auto add = [&](Scheme scheme, double closed, const McEstimate& mc) {
    OutputRow row;
    row.scheme = std::string(to_string(scheme));
    row.d = o.d;
    row.beta_d = o.beta_d;
    row.beta = beta;
    row.snr = config.snr();
    row.rate = closed;
    row.route = "closed_form";
    rows.push_back(row);
    row.rate = mc.mean;
    row.route = "montecarlo";
    row.stderr_value = mc.standard_error;
    rows.push_back(row);
    passed = passed && std::abs(mc.mean - closed) <=
                           std::max(3.0 * mc.standard_error, 0.01 * closed);
  };
  add(Scheme::sparse_opt, capacity_optimum(config).spectral_efficiency,
      empirical_capacity_opt(o.n, config, o.trials, o.seed, phase));
  if (config.snr() > 0.0) {
    add(Scheme::sparse_lmmse, capacity_lmmse(config).spectral_efficiency,
        empirical_capacity_lmmse(o.n, config, o.trials, o.seed, phase));
  }
  const SignatureMatrix a = generate_signature(o.n, o.d, o.beta_d, phase, o.seed);
  const double ks = ks_distance(empirical_spectrum(a), SpectralDensity(derive_params(config)));

  Output out(o.out);
  if (o.format == "csv") {
    write_csv(out.stream(), {{{"command", "montecarlo"},
                              {"n", std::to_string(o.n)},
                              {"trials", std::to_string(o.trials)},
                              {"seed", std::to_string(o.seed)},
                              {"phase", o.phase},
                              {"ks_distance", number(ks)},
                              {"tolerance", "max(3*stderr,0.01*closed_form)"},
                              {"result", passed ? "pass" : "fail"}},
                             rows});
  } else {
    json doc = document("montecarlo");
    doc["rows"] = rows_to_json(rows);
    doc["ks_distance"] = ks;
    doc["passed"] = passed;
    out.stream() << doc.dump(2) << '\n';
  }
  return passed ? 0 : kExitFailure;
}

int cmd_validate(const Options& o) {
  require_format(o, {"csv", "json"});
  const auto fault = fault_from_string(o.fault);
  if (!fault) throw ConfigError("unknown fault " + o.fault);
  const auto results = run_validation({o.quick, *fault, o.seed});
  bool passed = true;
  for (const auto& r : results) passed = passed && r.passed;

  Output out(o.out);
  auto& s = out.stream();
  if (o.format == "json") {
    json doc = document("validate");
    json checks = json::array();
    for (const auto& r : results) {
      checks.push_back(
          {{"name", r.name}, {"passed", r.passed}, {"seconds", r.seconds}, {"detail", r.detail}});
    }
    doc["checks"] = checks;
    doc["passed"] = passed;
    s << doc.dump(2) << '\n';
  } else {
    for (const auto& r : results) {
      char timing[32];
      std::snprintf(timing, sizeof timing, "%8.2fs", r.seconds);
      s << (r.passed ? "PASS " : "FAIL ") << timing << "  " << r.name << "  " << r.detail << '\n';
    }
    s << (passed ? "all checks passed" : "validation FAILED") << '\n';
  }
  return passed ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral efficiency of regular sparse NOMA"};
  app.require_subcommand(1);
  Options o;

  const auto formats = CLI::IsMember({"csv", "json", "svg"});
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "csv | json | svg")->check(formats);
    sub->add_option("--out", o.out, "output path (default stdout)");
  };
  const auto degrees = [&](CLI::App* sub) {
    sub->add_option("--d", o.d, "nonzeros per user signature")->required();
    sub->add_option("--beta-d", o.beta_d, "users per resource")->required();
  };

  auto* params = app.add_subcommand("params", "derived parameters and spectral support");
  degrees(params);
  common(params);

  auto* density = app.add_subcommand("density", "limiting eigenvalue density");
  degrees(density);
  density->add_option("--points", o.points, "interior samples (default 200)");
  common(density);

  auto* capacity = app.add_subcommand("capacity", "closed forms and baselines at one snr");
  degrees(capacity);
  capacity->add_option("--snr-db", o.snr_db, "snr in dB")->required();
  common(capacity);

  auto* sweep = app.add_subcommand("sweep", "rates versus load at fixed Eb/N0");
  sweep->add_option("--d", o.d, "nonzeros per user signature")->required();
  sweep->add_option("--ebn0-db", o.ebn0_db, "Eb/N0 in dB")->required();
  sweep->add_option("--beta-min", o.beta_min, "smallest load (default 0.05)");
  sweep->add_option("--beta-max", o.beta_max, "largest load (default 3)");
  sweep->add_option("--points", o.points, "load grid size (default 60)");
  common(sweep);

  auto* montecarlo = app.add_subcommand("montecarlo", "finite-N estimates against closed forms");
  degrees(montecarlo);
  montecarlo->add_option("--snr-db", o.snr_db, "snr in dB")->required();
  montecarlo->add_option("--n", o.n, "resources N (default 1200)");
  montecarlo->add_option("--trials", o.trials, "independent draws (default 50)");
  montecarlo->add_option("--seed", o.seed, "master seed (default 0)");
  montecarlo->add_option("--phase", o.phase, "uniform | binary | repetition")
      ->check(CLI::IsMember({"uniform", "binary", "repetition"}));
  common(montecarlo);

  auto* validate = app.add_subcommand("validate", "invariant suite over the acceptance grid");
  validate->add_flag("--quick", o.quick, "sub-minute subset");
  validate->add_option("--inject-fault", o.fault, "none | wrong-branch | oracle-offset")
      ->check(CLI::IsMember({"none", "wrong-branch", "oracle-offset"}));
  validate->add_option("--seed", o.seed, "master seed (default 0)");
  common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  if (params->parsed() && params->count("--format") == 0) o.format = "json";

  try {
    if (params->parsed()) return cmd_params(o);
    if (density->parsed()) return cmd_density(o);
    if (capacity->parsed()) return cmd_capacity(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (montecarlo->parsed()) return cmd_montecarlo(o);
    if (validate->parsed()) return cmd_validate(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
