// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "snoma/asymptotics.hpp"
#include "snoma/baselines.hpp"
#include "snoma/capacity.hpp"
#include "snoma/montecarlo.hpp"
#include "snoma/report.hpp"
#include "snoma/spectral.hpp"

using namespace snoma;

namespace {

struct Verdict {
  bool passed;
  std::string detail;
};

constexpr double kSnrGrid[] = {0.01, 0.1, 1.0, 10.0, 100.0};

template <class F>
void for_grid(F&& f) {
  for (int d = 2; d <= 6; ++d) {
    for (int bd = 2; bd <= 12; ++bd) f(d, bd);
  }
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

// Smallest N >= n for which K = N beta_d / d is an integer.
int feasible_n(int n, int d, int bd) {
  while ((static_cast<long>(n) * bd) % d != 0) ++n;
  return n;
}

double rate(Receiver r, const SystemConfig& c) {
  return r == Receiver::optimum ? capacity_optimum(c).spectral_efficiency
                                : capacity_lmmse(c).spectral_efficiency;
}

Verdict ac1() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for_grid([&](int d, int bd) {
    for (double snr : kSnrGrid) {
      const SystemConfig c(d, bd, snr);
      worst = std::max(worst, std::abs(capacity_optimum(c).spectral_efficiency -
                                       capacity_integral_oracle(c).spectral_efficiency));
    }
  });
  const double seconds = elapsed_since(start);
  return {worst < 1e-9 && seconds < 10.0,
          fmt("max |closed form - quadrature| = %.3g (< 1e-9), %.2f s (< 10 s)", worst, seconds)};
}

Verdict ac2() {
  const SystemConfig c(2, 2, 10.0);
  const double opt = capacity_optimum(c).spectral_efficiency;
  const double mmse = capacity_lmmse(c).spectral_efficiency;
  const double e1 = std::abs(opt - std::log2((11.0 + std::sqrt(21.0)) / 2.0));
  const double e2 = std::abs(mmse - 0.5 * std::log2(21.0));
  return {e1 < 1e-9 && e2 < 1e-9,
          fmt("C_opt = %.12f (err %.2g), C_mmse = %.12f (err %.2g), tol 1e-9", opt, e1, mmse, e2)};
}

Verdict ac3() {
  struct Cell {
    int d, bd;
    double snr;
  };
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::ostringstream detail;
  for (const Cell& cell : {Cell{2, 2, 10.0}, Cell{3, 2, 10.0}, Cell{3, 6, 1.0}}) {
    const SystemConfig c(cell.d, cell.bd, cell.snr);
    const double opt = capacity_optimum(c).spectral_efficiency;
    const double mmse = capacity_lmmse(c).spectral_efficiency;
    const McEstimate mc_opt =
        empirical_capacity_opt(feasible_n(1200, cell.d, cell.bd), c, 50, 2024);
    const McEstimate mc_mmse =
        empirical_capacity_lmmse(feasible_n(2000, cell.d, cell.bd), c, 20, 2024);
    const bool cell_ok =
        std::abs(mc_opt.mean - opt) < std::max(3.0 * mc_opt.standard_error, 0.01 * opt) &&
        std::abs(mc_mmse.mean - mmse) < std::max(3.0 * mc_mmse.standard_error, 0.01 * mmse);
    ok = ok && cell_ok;
    detail << fmt("(%d,%d,snr=%g) opt %.5f vs %.5f, lmmse %.5f vs %.5f; ", cell.d, cell.bd,
                  cell.snr, mc_opt.mean, opt, mc_mmse.mean, mmse);
  }
  const double seconds = elapsed_since(start);
  detail << fmt("%.1f s (< 300 s)", seconds);
  return {ok && seconds < 300.0, detail.str()};
}

Verdict ac4() {
  bool ok = true;
  std::ostringstream detail;
  for (auto [d, bd] : {std::pair{2, 2}, {3, 2}, {3, 6}, {10, 10}}) {
    const SpectralDensity density(derive_params(d, bd));
    std::vector<double> ks;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      ks.push_back(ks_distance(empirical_spectrum(generate_signature(feasible_n(2000, d, bd), d, bd,
                                                                     PhaseScheme::uniform, seed)),
                               density));
    }
    std::sort(ks.begin(), ks.end());
    const double median = 0.5 * (ks[4] + ks[5]);
    ok = ok && median < 0.02;
    detail << fmt("(%d,%d) %.4f; ", d, bd, median);
  }
  detail << "median KS over 10 seeds at N=2000 (2001 for d=3, beta_d=2), limit 0.02";
  return {ok, detail.str()};
}

Verdict ac5() {
  double mass = 0.0;
  double mean = 0.0;
  double second = 0.0;
  double mc_rel = 0.0;
  for_grid([&](int d, int bd) {
    const DerivedParams p = derive_params(d, bd);
    const SpectralDensity density(p);
    const double beta = p.beta.value();
    const double m2 = beta * beta + beta * p.alpha.value();
    mass = std::max(mass,
                    std::abs(integrate_against_density(density, [](double) { return 1.0; }) - 1.0));
    mean = std::max(
        mean, std::abs(integrate_against_density(density, [](double x) { return x; }) - beta));
    second = std::max(
        second, std::abs(integrate_against_density(density, [](double x) { return x * x; }) - m2));
    const int n = feasible_n(2000, d, bd);
    const TraceMoments t = trace_moments(generate_signature(n, d, bd, PhaseScheme::uniform, 5));
    mc_rel =
        std::max(mc_rel, std::max(std::abs(t.mean / beta - 1.0), std::abs(t.second / m2 - 1.0)));
  });
  return {
      mass < 1e-10 && mean < 1e-9 && second < 1e-8 && mc_rel < 1e-2,
      fmt("mass %.2g (<1e-10), mean %.2g (<1e-9), second %.2g (<1e-8), MC traces rel %.2g (<1%%)",
          mass, mean, second, mc_rel)};
}

Verdict ac6() {
  double low = 0.0;
  double high = 0.0;
  for_grid([&](int d, int bd) {
    const double beta = SystemConfig(d, bd).beta();
    for (Receiver r : {Receiver::optimum, Receiver::lmmse}) {
      const double s1 = 1e-5;
      const double s2 = 2e-5;
      const double r1 = rate(r, SystemConfig(d, bd, s1));
      const double r2 = rate(r, SystemConfig(d, bd, s2));
      const double slope =
          (r2 - r1) * kThreeDb / (linear_to_db(beta * s2 / r2) - linear_to_db(beta * s1 / r1));
      low = std::max(low, std::abs(slope / low_snr(r, d, bd).s0 - 1.0));
      const HighSnrParams hp = high_snr(r, d, bd);
      if (hp.s_inf > 0.0) {
        high = std::max(high, std::abs(rate(r, SystemConfig(d, bd, 1e6)) - approx_rate(hp, 1e6)));
      }
    }
  });
  return {
      low < 1e-3 && high < 1e-2,
      fmt("low-SNR slope rel err %.3g (< 1e-3), high-SNR residual %.3g bits (< 1e-2)", low, high)};
}

Verdict ac7() {
  double dense = 0.0;
  for (int bd : {250, 500, 1000}) {
    const double beta = bd / 500.0;
    for (double snr : kSnrGrid) {
      const SystemConfig c(500, bd, snr);
      dense = std::max(dense, std::abs(capacity_optimum(c).spectral_efficiency -
                                       baseline_rate(Scheme::rs_cdma_opt, beta, snr)));
      dense = std::max(dense, std::abs(capacity_lmmse(c).spectral_efficiency -
                                       baseline_rate(Scheme::rs_cdma_lmmse, beta, snr)));
    }
  }
  int superior = 0;
  int checked = 0;
  for (int d : {2, 3, 10}) {
    for (int bd : lattice_row_degrees(d, 0.0, 3.0)) {
      const double beta = static_cast<double>(bd) / d;
      for (double snr : kSnrGrid) {
        ++checked;
        superior += capacity_optimum(SystemConfig(d, bd, snr)).spectral_efficiency >
                    baseline_rate(Scheme::rs_cdma_opt, beta, snr);
      }
    }
  }
  int monotone_violations = 0;
  for (int beta : {1, 2, 3}) {
    for (double snr : kSnrGrid) {
      double previous = INFINITY;
      for (int d : {2, 3, 10, 100, 500}) {
        const double c = capacity_optimum(SystemConfig(d, beta * d, snr)).spectral_efficiency;
        monotone_violations += c > previous;
        previous = c;
      }
    }
  }
  return {dense < 1e-2 && superior == checked && monotone_violations == 0,
          fmt("d=500 max gap %.3g (< 1e-2); sparse > RS-CDMA at %d/%d lattice points; "
              "%d violations of monotonicity in d",
              dense, superior, checked, monotone_violations)};
}

Verdict ac8() {
  const double ebn0 = db_to_linear(10.0);
  std::vector<double> grid;
  for (int i = 0; i <= 120; ++i) grid.push_back(0.025 + i * (3.0 - 0.025) / 120.0);
  double residual = 0.0;
  int ordered = 0;
  int lattice = 0;
  double concavity = -INFINITY;
  for (int d : {2, 3, 10}) {
    const SweepTable table = sweep_load(d, ebn0, grid);
    for (const auto& p : table.points)
      residual = std::max(residual, std::abs(p.beta * p.snr - p.rate * p.ebn0));
    for (const auto& p : table.points) {
      if (p.scheme != Scheme::sparse_opt) continue;
      ++lattice;
      const double cw =
          solve_rate_at_ebn0(rate_function(Scheme::cover_wyner, p.beta), p.beta, ebn0).rate;
      const double rs =
          solve_rate_at_ebn0(rate_function(Scheme::rs_cdma_opt, p.beta), p.beta, ebn0).rate;
      ordered += cw > p.rate && p.rate > rs;
    }
    for (Scheme g : {Scheme::sparse_opt, Scheme::sparse_lmmse}) {
      std::vector<std::pair<double, double>> env;
      for (const auto& p : table.points) {
        if (p.scheme == Scheme::timeshare_envelope && p.envelope_of == g)
          env.emplace_back(p.beta, p.rate);
      }
      for (std::size_t i = 1; i + 1 < env.size(); ++i) {
        const double left = (env[i].second - env[i - 1].second) / (env[i].first - env[i - 1].first);
        const double right =
            (env[i + 1].second - env[i].second) / (env[i + 1].first - env[i].first);
        concavity = std::max(concavity, right - left);
      }
    }
  }
  return {residual < 1e-9 && ordered == lattice && concavity <= 1e-12,
          fmt("Cover-Wyner > sparse > RS-CDMA at %d/%d lattice points; max residual %.3g (< 1e-9); "
              "max slope increase %.3g (<= 1e-12)",
              ordered, lattice, residual, concavity)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"AC1 closed form vs quadrature oracle", ac1},
      {"AC2 arcsine point", ac2},
      {"AC3 Monte Carlo capacity agreement", ac3},
      {"AC4 weak convergence (KS)", ac4},
      {"AC5 moment identities", ac5},
      {"AC6 extreme-SNR expansions", ac6},
      {"AC7 dense limit and superiority", ac7},
      {"AC8 load sweep at Eb/N0 = 10 dB", ac8},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v{false, {}};
    try {
      v = check();
    } catch (const std::exception& e) {
      v.detail = std::string("exception: ") + e.what();
    }
    failures += !v.passed;
    std::printf("%s %s: %s\n", v.passed ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
