// SPDX-License-Identifier: Apache-2.0
#include "snoma/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "snoma/errors.hpp"

namespace snoma {

namespace {

constexpr std::array<std::pair<Scheme, std::string_view>, 7> kSchemeNames{{
    {Scheme::sparse_opt, "sparse_opt"},
    {Scheme::sparse_lmmse, "sparse_lmmse"},
    {Scheme::rs_cdma_opt, "rs_cdma_opt"},
    {Scheme::rs_cdma_lmmse, "rs_cdma_lmmse"},
    {Scheme::orthogonal, "orthogonal"},
    {Scheme::cover_wyner, "cover_wyner"},
    {Scheme::timeshare_envelope, "timeshare_envelope"},
}};

bool is_sparse(Scheme scheme) {
  return scheme == Scheme::sparse_opt || scheme == Scheme::sparse_lmmse;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  for (const auto& [value, name] : kSchemeNames) {
    if (value == scheme) return name;
  }
  return "unknown";
}

std::optional<Scheme> scheme_from_string(std::string_view name) {
  for (const auto& [value, text] : kSchemeNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

double baseline_rate(Scheme scheme, double beta, double snr) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("baseline_rate: beta must be > 0");
  if (!(snr >= 0.0) || !std::isfinite(snr)) throw DomainError("baseline_rate: snr must be >= 0");
  if (scheme == Scheme::orthogonal && beta > 1.0) {
    throw DomainError("orthogonal transmission requires beta <= 1 (got " + std::to_string(beta) +
                      ")");
  }
  if (is_sparse(scheme) || scheme == Scheme::timeshare_envelope) {
    throw DomainError("baseline_rate: " + std::string(to_string(scheme)) +
                      " is not a dense baseline");
  }
  if (snr == 0.0) return 0.0;

  const double ln2 = std::numbers::ln2;
  switch (scheme) {
    case Scheme::cover_wyner:
      return std::log1p(beta * snr) / ln2;
    case Scheme::orthogonal:
      return beta * std::log1p(snr) / ln2;
    case Scheme::rs_cdma_opt: {
      const double f4 = kernel_F(snr, beta) / 4.0;
      return (beta * std::log1p(snr - f4) + std::log1p(beta * snr - f4) - f4 / snr) / ln2;
    }
    case Scheme::rs_cdma_lmmse: {
      const double f4 = kernel_F(snr, beta) / 4.0;
      return beta * std::log1p(snr - f4) / ln2;
    }
    default:
      break;
  }
  throw DomainError("baseline_rate: unsupported scheme");
}

RatePoint solve_rate_at_ebn0(const RateFunction& rate_fn, double beta, double ebn0) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("solve_rate_at_ebn0: beta <= 0");
  if (!(ebn0 > 0.0) || !std::isfinite(ebn0)) throw DomainError("solve_rate_at_ebn0: Eb/N0 <= 0");

  RatePoint point;
  point.beta = beta;
  point.ebn0 = ebn0;
  if (ebn0 <= std::numbers::ln2) {
    point.below_threshold = true;
    return point;
  }

  const auto excess = [&](double rate) {
    const double value = rate_fn(rate * ebn0 / beta) - rate;
    if (!std::isfinite(value)) throw NumericalError("rate function returned a non-finite value");
    return value;
  };

  double lo = 0.0;
  double hi = 1.0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 0x1p60) throw NumericalError("solve_rate_at_ebn0: failed to bracket the fixed point");
  }
  for (int iter = 0; iter < 400 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi;
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double value = excess(mid);
    if (value == 0.0) {
      lo = hi = mid;
      break;
    }
    (value > 0.0 ? lo : hi) = mid;
  }
  const double rate = 0.5 * (lo + hi);
  const double residual = std::abs(excess(rate));
  if (!(residual < kRateResidualTolerance)) {
    throw NumericalError("solve_rate_at_ebn0: residual " + std::to_string(residual) +
                         " above tolerance");
  }
  point.rate = rate;
  point.snr = rate * ebn0 / beta;
  return point;
}

SweepTable timeshare_envelope(const std::vector<RatePoint>& points, EnvelopeMode mode) {
  if (points.size() < 2) return {points, true};
  if (mode == EnvelopeMode::fixed_d) {
    for (const auto& point : points) {
      if (point.d != points.front().d) {
        throw ConfigError("timeshare_envelope: mixed d values require pooled mode");
      }
    }
  }

  std::vector<RatePoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(), [](const RatePoint& a, const RatePoint& b) {
    return a.beta < b.beta || (a.beta == b.beta && a.rate > b.rate);
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end(),
                           [](const RatePoint& a, const RatePoint& b) { return a.beta == b.beta; }),
               sorted.end());
  if (sorted.size() < 2) return {points, true};

  // Upper hull (monotone chain); collinear middle points are dropped.
  std::vector<RatePoint> hull;
  for (const auto& point : sorted) {
    while (hull.size() >= 2) {
      const RatePoint& o = hull[hull.size() - 2];
      const RatePoint& a = hull.back();
      const double cross =
          (a.beta - o.beta) * (point.rate - o.rate) - (a.rate - o.rate) * (point.beta - o.beta);
      if (cross < 0.0) break;
      hull.pop_back();
    }
    hull.push_back(point);
  }

  const bool same_scheme = std::all_of(points.begin(), points.end(), [&](const RatePoint& p) {
    return p.scheme == points.front().scheme;
  });
  SweepTable envelope;
  for (auto point : hull) {
    point.envelope_of = same_scheme ? std::optional<Scheme>(point.scheme) : std::nullopt;
    point.scheme = Scheme::timeshare_envelope;
    if (mode == EnvelopeMode::pooled) point.d.reset();
    envelope.points.push_back(point);
  }
  return envelope;
}

std::optional<double> envelope_rate_at(const SweepTable& envelope, double beta) {
  const auto& pts = envelope.points;
  if (pts.empty()) return std::nullopt;
  const double tol = 1e-12 * std::max(1.0, std::abs(beta));
  if (beta < pts.front().beta - tol || beta > pts.back().beta + tol) return std::nullopt;
  if (pts.size() == 1) return pts.front().rate;
  const auto upper = std::lower_bound(pts.begin(), pts.end(), beta,
                                      [](const RatePoint& p, double b) { return p.beta < b; });
  if (upper == pts.begin()) return pts.front().rate;
  if (upper == pts.end()) return pts.back().rate;
  const RatePoint& left = *(upper - 1);
  const RatePoint& right = *upper;
  const double t = (beta - left.beta) / (right.beta - left.beta);
  return left.rate + t * (right.rate - left.rate);
}

RateFunction rate_function(Scheme scheme, int d, int beta_d) {
  const SystemConfig config(d, beta_d);
  switch (scheme) {
    case Scheme::sparse_opt:
      return [config](double snr) {
        return capacity_optimum(config.with_snr(snr)).spectral_efficiency;
      };
    case Scheme::sparse_lmmse:
      return
          [config](double snr) { return capacity_lmmse(config.with_snr(snr)).spectral_efficiency; };
    default:
      break;
  }
  throw ConfigError("rate_function: " + std::string(to_string(scheme)) + " is not a sparse scheme");
}

RateFunction rate_function(Scheme scheme, double beta) {
  (void)baseline_rate(scheme, beta, 0.0);  // validates the scheme/load pair
  return [scheme, beta](double snr) { return baseline_rate(scheme, beta, snr); };
}

std::vector<int> lattice_row_degrees(int d, double beta_min, double beta_max) {
  if (d < 2) throw ConfigError("column degree d must be >= 2 (got " + std::to_string(d) + ")");
  const int first = std::max(2, static_cast<int>(std::ceil(beta_min * d - 1e-9)));
  const int last = static_cast<int>(std::floor(beta_max * d + 1e-9));
  std::vector<int> degrees;
  for (int bd = first; bd <= last; ++bd) degrees.push_back(bd);
  return degrees;
}

SweepTable sweep_load(int d, double ebn0, const std::vector<double>& beta_grid) {
  if (beta_grid.empty()) throw ConfigError("sweep_load: empty load grid");
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    if (!(beta_grid[i] > 0.0) || (i > 0 && !(beta_grid[i] > beta_grid[i - 1]))) {
      throw ConfigError("sweep_load: load grid must be positive and strictly increasing");
    }
  }
  const std::vector<int> lattice = lattice_row_degrees(d, beta_grid.front(), beta_grid.back());
  if (lattice.empty()) {
    throw ConfigError("sweep_load: no admissible beta_d >= 2 with beta_d/d in [" +
                      std::to_string(beta_grid.front()) + ", " + std::to_string(beta_grid.back()) +
                      "] for d=" + std::to_string(d));
  }

  SweepTable table;
  std::vector<SweepTable> envelopes;
  for (Scheme scheme : {Scheme::sparse_opt, Scheme::sparse_lmmse}) {
    std::vector<RatePoint> generators;
    for (int bd : lattice) {
      const double beta = static_cast<double>(bd) / d;
      RatePoint point = solve_rate_at_ebn0(rate_function(scheme, d, bd), beta, ebn0);
      point.d = d;
      point.beta_d = bd;
      point.scheme = scheme;
      generators.push_back(point);
    }
    table.points.insert(table.points.end(), generators.begin(), generators.end());
    if (generators.size() >= 2) envelopes.push_back(timeshare_envelope(generators));
  }

  for (const auto& envelope : envelopes) {
    for (double beta : beta_grid) {
      const auto rate = envelope_rate_at(envelope, beta);
      if (!rate) continue;
      RatePoint point;
      point.beta = beta;
      point.d = d;
      point.scheme = Scheme::timeshare_envelope;
      point.envelope_of = envelope.points.front().envelope_of;
      point.rate = *rate;
      point.ebn0 = ebn0;
      point.snr = *rate * ebn0 / beta;
      table.points.push_back(point);
    }
  }

  for (Scheme scheme :
       {Scheme::rs_cdma_opt, Scheme::rs_cdma_lmmse, Scheme::orthogonal, Scheme::cover_wyner}) {
    for (double beta : beta_grid) {
      if (scheme == Scheme::orthogonal && beta > 1.0) continue;
      RatePoint point = solve_rate_at_ebn0(rate_function(scheme, beta), beta, ebn0);
      point.scheme = scheme;
      table.points.push_back(point);
    }
  }
  return table;
}

}  // namespace snoma
