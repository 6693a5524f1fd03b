// SPDX-License-Identifier: Apache-2.0
#include "snoma/validate.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "snoma/asymptotics.hpp"
#include "snoma/baselines.hpp"
#include "snoma/capacity.hpp"
#include "snoma/montecarlo.hpp"
#include "snoma/report.hpp"
#include "snoma/spectral.hpp"

namespace snoma {

std::optional<Fault> fault_from_string(std::string_view name) {
  if (name == "none") return Fault::none;
  if (name == "wrong-branch") return Fault::wrong_branch;
  if (name == "oracle-offset") return Fault::oracle_offset;
  return std::nullopt;
}

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Grid {
  int d;
  int beta_d;
};

std::vector<Grid> acceptance_grid() {
  std::vector<Grid> grid;
  for (int d = 2; d <= 6; ++d) {
    for (int bd = 2; bd <= 12; ++bd) grid.push_back({d, bd});
  }
  return grid;
}

constexpr std::array<double, 5> kSnrGrid{0.01, 0.1, 1.0, 10.0, 100.0};

// Records the worst violation seen so far and a description of where.
class Worst {
 public:
  void update(double value, const std::string& where) {
    if (value > value_) {
      value_ = value;
      where_ = where;
    }
  }
  double value() const { return value_; }
  std::string describe(std::string_view what) const {
    std::ostringstream out;
    out << what << " = " << value_;
    if (!where_.empty()) out << " at " << where_;
    return out.str();
  }

 private:
  double value_ = 0.0;
  std::string where_;
};

std::string at(int d, int bd, double snr = -1.0) {
  std::ostringstream out;
  out << "(d=" << d << ", beta_d=" << bd;
  if (snr >= 0.0) out << ", snr=" << snr;
  out << ")";
  return out.str();
}

Outcome threshold(const Worst& worst, double limit, std::string_view what) {
  std::ostringstream out;
  out << worst.describe(what) << " (limit " << limit << ")";
  return {worst.value() < limit, out.str()};
}

double closed_form_optimum(const SystemConfig& config, Fault fault) {
  const double value = capacity_optimum(config).spectral_efficiency;
  return fault == Fault::oracle_offset ? value + 1e-6 : value;
}

double mp_density(double beta, double lambda) {
  const double lo = (1.0 - std::sqrt(beta)) * (1.0 - std::sqrt(beta));
  const double hi = (1.0 + std::sqrt(beta)) * (1.0 + std::sqrt(beta));
  if (lambda <= lo || lambda >= hi) return 0.0;
  return std::sqrt((lambda - lo) * (hi - lambda)) / (2.0 * std::numbers::pi * lambda);
}

Outcome check_params() {
  for (const auto& g : acceptance_grid()) {
    const DerivedParams p = derive_params(g.d, g.beta_d);
    const double bound = std::pow(1.0 + std::sqrt(p.beta_tilde.value()), 2);
    if (p.zeta.value() < bound * (1.0 - 1e-15) || !(p.lambda_plus <= p.beta_d + 1e-12)) {
      return {false, "domain bound violated at " + at(g.d, g.beta_d)};
    }
  }
  return {true, "55 configurations admissible"};
}

Outcome check_branch(Fault fault, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(-2.0, 14.0);
  std::uniform_real_distribution<double> log_im(-4.0, 1.0);
  const Branch branch = fault == Fault::wrong_branch ? Branch::reflected : Branch::physical;
  int checked = 0;
  for (const auto& g : acceptance_grid()) {
    const DerivedParams p = derive_params(g.d, g.beta_d);
    for (int i = 0; i < 1000 / 55 + 1; ++i, ++checked) {
      const std::complex<double> z(re(rng), std::pow(10.0, log_im(rng)));
      const StieltjesValue s = stieltjes(p, z, branch);
      if (!(s.m_outer.imag() > 0.0) || std::abs(s.m_outer) > 1.0 / z.imag() * (1.0 + 1e-12)) {
        std::ostringstream out;
        out << "Im m = " << s.m_outer.imag() << ", |m| Im z = " << std::abs(s.m_outer) * z.imag()
            << " at z = " << z << " " << at(g.d, g.beta_d);
        return {false, out.str()};
      }
    }
  }
  return {true, std::to_string(checked) + " points in the upper half plane"};
}

Outcome check_inversion() {
  Worst worst;
  for (const Grid& g : std::vector<Grid>{{2, 2}, {3, 2}, {3, 6}, {4, 9}, {6, 12}}) {
    const DerivedParams p = derive_params(g.d, g.beta_d);
    const SpectralDensity density(p);
    for (int i = 1; i < 20; ++i) {
      const double lambda = p.lambda_minus + p.support_width * i / 20.0;
      const double coarse = stieltjes(p, {lambda, 1e-3}).m_outer.imag() / std::numbers::pi;
      const double fine = stieltjes(p, {lambda, 1e-4}).m_outer.imag() / std::numbers::pi;
      const double extrapolated = (10.0 * fine - coarse) / 9.0;
      const double exact = density.at(lambda).value;
      worst.update(std::abs(extrapolated / exact - 1.0),
                   at(g.d, g.beta_d) + " lambda=" + std::to_string(lambda));
    }
  }
  return threshold(worst, 1e-2, "max relative inversion error");
}

Outcome check_moments() {
  Worst mass;
  Worst mean;
  Worst second;
  for (const auto& g : acceptance_grid()) {
    const DerivedParams p = derive_params(g.d, g.beta_d);
    const SpectralDensity density(p);
    const double beta = p.beta.value();
    mass.update(std::abs(integrate_against_density(density, [](double) { return 1.0; }) - 1.0),
                at(g.d, g.beta_d));
    mean.update(std::abs(integrate_against_density(density, [](double x) { return x; }) - beta),
                at(g.d, g.beta_d));
    second.update(std::abs(integrate_against_density(density, [](double x) { return x * x; }) -
                           (beta * beta + beta * p.alpha.value())),
                  at(g.d, g.beta_d));
  }
  const bool ok = mass.value() < 1e-10 && mean.value() < 1e-9 && second.value() < 1e-8;
  return {ok, mass.describe("mass error") + "; " + mean.describe("mean error") + "; " +
                  second.describe("second-moment error")};
}

Outcome check_edge_integrability() {
  // Midpoint sums of the substituted weight must settle as nodes double.
  for (const auto& g : acceptance_grid()) {
    const SpectralDensity density(derive_params(g.d, g.beta_d));
    double previous_error = 1.0;
    for (int n = 8; n <= 256; n *= 2) {
      double sum = 0.0;
      const double h = std::numbers::pi / 2.0 / n;
      for (int j = 0; j < n; ++j) sum += density.theta_weight((j + 0.5) * h);
      const double error = std::abs(sum * h + density.point_mass_at_zero() - 1.0);
      if (error < 1e-13) {
        previous_error = error;
        break;
      }
      if (error > previous_error) {
        return {false, "substituted quadrature not converging at " + at(g.d, g.beta_d)};
      }
      previous_error = error;
    }
    if (previous_error > 1e-12) return {false, "mass not reached at " + at(g.d, g.beta_d)};
  }
  return {true, "mass reached with 256 nodes for every configuration"};
}

Outcome check_mp_limit() {
  Worst worst;
  for (int bd : {250, 500, 1000}) {
    const SpectralDensity density(derive_params(500, bd));
    const double beta = bd / 500.0;
    const double lo = (1.0 - std::sqrt(beta)) * (1.0 - std::sqrt(beta));
    const double hi = (1.0 + std::sqrt(beta)) * (1.0 + std::sqrt(beta));
    for (int i = 1; i < 40; ++i) {
      const double lambda = lo + (hi - lo) * i / 40.0;
      worst.update(std::abs(density.at(lambda).value - mp_density(beta, lambda)),
                   "beta=" + std::to_string(beta) + " lambda=" + std::to_string(lambda));
    }
  }
  return threshold(worst, 1e-2, "max density deviation from Marchenko-Pastur at d=500");
}

Outcome check_oracle(Fault fault) {
  Worst worst;
  for (const auto& g : acceptance_grid()) {
    for (double snr : kSnrGrid) {
      const SystemConfig config(g.d, g.beta_d, snr);
      worst.update(std::abs(closed_form_optimum(config, fault) -
                            capacity_integral_oracle(config).spectral_efficiency),
                   at(g.d, g.beta_d, snr));
    }
  }
  return threshold(worst, 1e-9, "max |closed form - quadrature|");
}

Outcome check_arcsine(Fault fault) {
  const SystemConfig config(2, 2, 10.0);
  const double opt = closed_form_optimum(config, fault);
  const double mmse = capacity_lmmse(config).spectral_efficiency;
  const double opt_ref = std::log2((11.0 + std::sqrt(21.0)) / 2.0);
  const double mmse_ref = 0.5 * std::log2(21.0);
  const double err = std::max(std::abs(opt - opt_ref), std::abs(mmse - mmse_ref));
  std::ostringstream out;
  out << "C_opt=" << opt << ", C_mmse=" << mmse << ", max error " << err;
  return {err < 1e-9, out.str()};
}

Outcome check_ordering_and_monotonicity() {
  for (const auto& g : acceptance_grid()) {
    double previous_opt = 0.0;
    double previous_mmse = 0.0;
    for (int e = -30; e <= 20; ++e) {
      const double snr = std::pow(10.0, e / 10.0);
      const SystemConfig config(g.d, g.beta_d, snr);
      const double opt = capacity_optimum(config).spectral_efficiency;
      const double mmse = capacity_lmmse(config).spectral_efficiency;
      if (!(opt > mmse && mmse > 0.0)) {
        return {false, "ordering C_opt > C_mmse > 0 fails at " + at(g.d, g.beta_d, snr)};
      }
      if (!(opt > previous_opt && mmse > previous_mmse)) {
        return {false, "capacities not increasing in snr at " + at(g.d, g.beta_d, snr)};
      }
      previous_opt = opt;
      previous_mmse = mmse;
    }
    const SystemConfig zero(g.d, g.beta_d, 0.0);
    if (capacity_optimum(zero).spectral_efficiency != 0.0 ||
        capacity_lmmse(zero).spectral_efficiency != 0.0) {
      return {false, "nonzero capacity at snr = 0 for " + at(g.d, g.beta_d)};
    }
  }
  return {true, "C_opt > C_mmse > 0, both increasing on a 51-point snr grid"};
}

Outcome check_lmmse_route() {
  Worst worst;
  for (const auto& g : acceptance_grid()) {
    for (double snr : kSnrGrid) {
      const SystemConfig config(g.d, g.beta_d, snr);
      const double via_error = config.beta() * std::log2(1.0 / lmmse_error(config).m1);
      worst.update(std::abs(via_error - capacity_lmmse(config).spectral_efficiency),
                   at(g.d, g.beta_d, snr));
    }
  }
  return threshold(worst, 1e-9, "max |beta log2(1/M1) - C_mmse|");
}

Outcome check_dense_limit() {
  Worst worst;
  for (int bd : {250, 500, 1000}) {
    const double beta = bd / 500.0;
    for (double snr : kSnrGrid) {
      const SystemConfig config(500, bd, snr);
      worst.update(std::abs(capacity_optimum(config).spectral_efficiency -
                            baseline_rate(Scheme::rs_cdma_opt, beta, snr)),
                   "optimum " + at(500, bd, snr));
      worst.update(std::abs(capacity_lmmse(config).spectral_efficiency -
                            baseline_rate(Scheme::rs_cdma_lmmse, beta, snr)),
                   "lmmse " + at(500, bd, snr));
    }
  }
  return threshold(worst, 1e-2, "max |sparse - RS-CDMA| at d=500");
}

Outcome check_superiority() {
  for (int d : {2, 3, 10}) {
    for (int bd : lattice_row_degrees(d, 0.0, 3.0)) {
      const double beta = static_cast<double>(bd) / d;
      for (double snr : kSnrGrid) {
        const double sparse = capacity_optimum(SystemConfig(d, bd, snr)).spectral_efficiency;
        if (!(sparse > baseline_rate(Scheme::rs_cdma_opt, beta, snr))) {
          return {false, "sparse optimum does not exceed RS-CDMA at " + at(d, bd, snr)};
        }
      }
    }
  }
  return {true, "sparse optimum > RS-CDMA optimum for d in {2,3,10}, beta <= 3"};
}

Outcome check_low_snr() {
  Worst worst;
  for (const auto& g : acceptance_grid()) {
    for (Receiver receiver : {Receiver::optimum, Receiver::lmmse}) {
      const auto rate = [&](double snr) {
        const SystemConfig config(g.d, g.beta_d, snr);
        return receiver == Receiver::optimum ? capacity_optimum(config).spectral_efficiency
                                             : capacity_lmmse(config).spectral_efficiency;
      };
      const double beta = SystemConfig(g.d, g.beta_d).beta();
      const double s1 = 1e-5;
      const double s2 = 2e-5;
      const double r1 = rate(s1);
      const double r2 = rate(s2);
      const double ebn0_db1 = linear_to_db(beta * s1 / r1);
      const double ebn0_db2 = linear_to_db(beta * s2 / r2);
      const double slope = (r2 - r1) / ((ebn0_db2 - ebn0_db1) / kThreeDb);
      const double expected = low_snr(receiver, g.d, g.beta_d).s0;
      worst.update(
          std::abs(slope / expected - 1.0),
          std::string(receiver == Receiver::optimum ? "optimum " : "lmmse ") + at(g.d, g.beta_d));
    }
  }
  return threshold(worst, 1e-3, "max relative low-SNR slope error");
}

Outcome check_high_snr() {
  Worst worst;
  const double snr = 1e6;
  for (const auto& g : acceptance_grid()) {
    for (Receiver receiver : {Receiver::optimum, Receiver::lmmse}) {
      const HighSnrParams params = high_snr(receiver, g.d, g.beta_d);
      if (!(params.s_inf > 0.0)) continue;
      const SystemConfig config(g.d, g.beta_d, snr);
      const double exact = receiver == Receiver::optimum
                               ? capacity_optimum(config).spectral_efficiency
                               : capacity_lmmse(config).spectral_efficiency;
      worst.update(
          std::abs(exact - approx_rate(params, snr)),
          std::string(receiver == Receiver::optimum ? "optimum " : "lmmse ") + at(g.d, g.beta_d));
    }
  }
  return threshold(worst, 1e-2, "max high-SNR affine residual at snr=1e6 (bits)");
}

Outcome check_cross_receiver() {
  for (const auto& g : acceptance_grid()) {
    if (!(low_snr_optimum(g.d, g.beta_d).s0 > low_snr_lmmse(g.d, g.beta_d).s0)) {
      return {false, "S0 ordering fails at " + at(g.d, g.beta_d)};
    }
    const HighSnrParams opt = high_snr_optimum(g.d, g.beta_d);
    const HighSnrParams mmse = high_snr_lmmse(g.d, g.beta_d);
    if (opt.s_inf == mmse.s_inf && opt.l_inf && mmse.l_inf && !(*opt.l_inf <= *mmse.l_inf)) {
      return {false, "L_inf ordering fails at " + at(g.d, g.beta_d)};
    }
  }
  return {true, "S0_opt > S0_mmse everywhere; L_inf_opt <= L_inf_mmse where slopes agree"};
}

Outcome check_sweep() {
  const double ebn0 = db_to_linear(10.0);
  std::vector<double> grid;
  for (int i = 0; i <= 60; ++i) grid.push_back(0.05 + i * (2.95 / 60.0));
  Worst residual;
  for (int d : {2, 3, 10}) {
    const SweepTable table = sweep_load(d, ebn0, grid);
    for (const auto& point : table.points) {
      residual.update(std::abs(point.beta * point.snr - point.rate * point.ebn0),
                      "d=" + std::to_string(d));
    }
    for (const auto& point : table.points) {
      if (point.scheme != Scheme::sparse_opt) continue;
      const double beta = point.beta;
      const auto cw = solve_rate_at_ebn0(rate_function(Scheme::cover_wyner, beta), beta, ebn0);
      const auto rs = solve_rate_at_ebn0(rate_function(Scheme::rs_cdma_opt, beta), beta, ebn0);
      if (!(cw.rate > point.rate && point.rate > rs.rate)) {
        return {false, "Cover-Wyner > sparse > RS-CDMA fails at " + at(d, *point.beta_d)};
      }
    }
    for (Scheme generator : {Scheme::sparse_opt, Scheme::sparse_lmmse}) {
      std::vector<std::pair<double, double>> env;
      for (const auto& point : table.points) {
        if (point.scheme == Scheme::timeshare_envelope && point.envelope_of == generator) {
          env.emplace_back(point.beta, point.rate);
        }
      }
      for (std::size_t i = 1; i + 1 < env.size(); ++i) {
        const double h1 = env[i].first - env[i - 1].first;
        const double h2 = env[i + 1].first - env[i].first;
        const double second =
            (env[i + 1].second - env[i].second) / h2 - (env[i].second - env[i - 1].second) / h1;
        if (second > 1e-12) return {false, "envelope not concave for d=" + std::to_string(d)};
      }
    }
  }
  return threshold(residual, 1e-9, "max |beta snr - R Eb/N0|");
}

Outcome check_monotone_in_d() {
  const double ebn0 = db_to_linear(10.0);
  for (int beta : {1, 2, 3}) {
    double previous = std::numeric_limits<double>::infinity();
    for (int d : {2, 3, 10, 100}) {
      const double rate =
          solve_rate_at_ebn0(rate_function(Scheme::sparse_opt, d, beta * d), beta, ebn0).rate;
      if (!(rate < previous)) {
        return {false, "sparse rate not decreasing in d at beta=" + std::to_string(beta)};
      }
      previous = rate;
    }
    const double dense =
        solve_rate_at_ebn0(rate_function(Scheme::rs_cdma_opt, beta), beta, ebn0).rate;
    if (!(previous > dense)) return {false, "d=100 rate not above RS-CDMA"};
  }
  return {true, "solved sparse rate decreases through d = 2, 3, 10, 100 toward RS-CDMA"};
}

Outcome check_signatures(std::uint64_t seed) {
  int generated = 0;
  for (const Grid& g : std::vector<Grid>{{2, 2}, {3, 2}, {3, 6}, {2, 4}, {4, 6}}) {
    for (PhaseScheme phase : {PhaseScheme::uniform, PhaseScheme::binary, PhaseScheme::repetition}) {
      const SignatureMatrix a = generate_signature(120, g.d, g.beta_d, phase, seed + generated);
      a.check_invariants();
      ++generated;
    }
  }
  return {true, std::to_string(generated) + " matrices with exact degrees and unit weights"};
}

Outcome check_mc_capacity(bool quick, std::uint64_t seed) {
  struct Cell {
    Grid g;
    double snr;
  };
  const std::vector<Cell> cells =
      quick ? std::vector<Cell>{{{2, 2}, 10.0}} : std::vector<Cell>{{{2, 2}, 10.0}, {{3, 6}, 10.0}};
  const int n_opt = quick ? 400 : 1200;
  const int t_opt = quick ? 10 : 50;
  const int n_mmse = quick ? 400 : 2000;
  const int t_mmse = quick ? 10 : 20;
  std::ostringstream detail;
  bool ok = true;
  for (const auto& cell : cells) {
    const SystemConfig config(cell.g.d, cell.g.beta_d, cell.snr);
    const double opt = capacity_optimum(config).spectral_efficiency;
    const double mmse = capacity_lmmse(config).spectral_efficiency;
    const McEstimate mc_opt = empirical_capacity_opt(n_opt, config, t_opt, seed);
    const McEstimate mc_mmse = empirical_capacity_lmmse(n_mmse, config, t_mmse, seed);
    const bool cell_ok =
        std::abs(mc_opt.mean - opt) < std::max(3.0 * mc_opt.standard_error, 0.01 * opt) &&
        std::abs(mc_mmse.mean - mmse) < std::max(3.0 * mc_mmse.standard_error, 0.01 * mmse);
    ok = ok && cell_ok;
    detail << at(cell.g.d, cell.g.beta_d, cell.snr) << " opt " << mc_opt.mean << " vs " << opt
           << ", lmmse " << mc_mmse.mean << " vs " << mmse << "; ";
  }
  return {ok, detail.str()};
}

Outcome check_mc_spectrum(bool quick, std::uint64_t seed) {
  const int n = quick ? 600 : 2000;
  const double ks_limit = quick ? 0.03 : 0.02;
  std::ostringstream detail;
  bool ok = true;
  for (const Grid& g : std::vector<Grid>{{2, 2}, {3, 6}}) {
    const SignatureMatrix a = generate_signature(n, g.d, g.beta_d, PhaseScheme::uniform, seed);
    const EmpiricalSpectrum spectrum = empirical_spectrum(a);
    const DerivedParams p = derive_params(g.d, g.beta_d);
    const double ks = ks_distance(spectrum, SpectralDensity(p));
    const double beta = p.beta.value();
    const double second_ref = beta * beta + beta * p.alpha.value();
    const bool cell_ok = ks < ks_limit && std::abs(spectrum.mean() - beta) < 1e-10 &&
                         std::abs(spectrum.second_moment() / second_ref - 1.0) < 0.01;
    ok = ok && cell_ok;
    detail << at(g.d, g.beta_d) << " N=" << n << " KS=" << ks << " m2=" << spectrum.second_moment()
           << "; ";
  }
  return {ok, detail.str()};
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& options) {
  using Check = std::function<Outcome()>;
  const Fault fault = options.fault;
  const std::uint64_t seed = options.seed;
  const bool quick = options.quick;
  const std::vector<std::pair<std::string, Check>> checks{
      {"spectral.params_domain", [] { return check_params(); }},
      {"spectral.branch_sanity", [&] { return check_branch(fault, seed); }},
      {"spectral.inversion_consistency", [] { return check_inversion(); }},
      {"spectral.moment_identities", [] { return check_moments(); }},
      {"spectral.edge_integrability", [] { return check_edge_integrability(); }},
      {"spectral.marchenko_pastur_limit", [] { return check_mp_limit(); }},
      {"capacity.oracle_equivalence", [&] { return check_oracle(fault); }},
      {"capacity.arcsine_point", [&] { return check_arcsine(fault); }},
      {"capacity.ordering_monotonicity", [] { return check_ordering_and_monotonicity(); }},
      {"capacity.lmmse_route_identity", [] { return check_lmmse_route(); }},
      {"capacity.dense_limit", [] { return check_dense_limit(); }},
      {"capacity.superiority", [] { return check_superiority(); }},
      {"asymptotics.low_snr_slope", [] { return check_low_snr(); }},
      {"asymptotics.high_snr_residual", [] { return check_high_snr(); }},
      {"asymptotics.cross_receiver", [] { return check_cross_receiver(); }},
      {"baselines.sweep_orderings", [] { return check_sweep(); }},
      {"baselines.monotone_in_d", [] { return check_monotone_in_d(); }},
      {"montecarlo.signatures", [&] { return check_signatures(seed); }},
      {"montecarlo.spectrum", [&] { return check_mc_spectrum(quick, seed); }},
      {"montecarlo.capacity", [&] { return check_mc_capacity(quick, seed); }},
  };

  std::vector<CheckResult> results;
  for (const auto& [name, check] : checks) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult result{name, false, {}, 0.0};
    try {
      Outcome outcome = check();
      result.passed = outcome.passed;
      result.detail = std::move(outcome.detail);
    } catch (const std::exception& e) {
      result.detail = std::string("exception: ") + e.what();
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace snoma
