// SPDX-License-Identifier: Apache-2.0
//
// Reference curves and the fixed-Eb/N0 machinery behind load sweeps:
//
//   cover_wyner    log2(1 + beta snr)
//   orthogonal     beta log2(1 + snr)                      (beta <= 1)
//   rs_cdma_opt    beta log2(1 + snr - F/4) + log2(1 + beta snr - F/4) - F log2(e)/(4 snr)
//   rs_cdma_lmmse  beta log2(1 + snr - F/4)
//
// with F = kernel_F(snr, beta). Sparse closed forms are only evaluated at
// lattice loads (beta*d integer); intermediate loads come from time sharing.
#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "snoma/capacity.hpp"

namespace snoma {

enum class Scheme {
  sparse_opt,
  sparse_lmmse,
  rs_cdma_opt,
  rs_cdma_lmmse,
  orthogonal,
  cover_wyner,
  timeshare_envelope,
};

std::string_view to_string(Scheme scheme);
std::optional<Scheme> scheme_from_string(std::string_view name);

struct RatePoint {
  double beta = 0.0;
  std::optional<int> d;       // absent for dense baselines
  std::optional<int> beta_d;  // present at sparse lattice points
  Scheme scheme = Scheme::cover_wyner;
  std::optional<Scheme> envelope_of;  // generator scheme for envelope rows
  double rate = 0.0;
  double ebn0 = 0.0;  // linear
  double snr = 0.0;   // linear, solved operating point
  bool below_threshold = false;
};

struct SweepTable {
  std::vector<RatePoint> points;
  // timeshare_envelope got fewer than two generators and returned its input
  bool degenerate = false;
};

/// Dense reference rate at linear snr. Only the dense schemes are accepted.
double baseline_rate(Scheme scheme, double beta, double snr);

/// Rate as a function of linear snr, for the fixed-point solve.
using RateFunction = std::function<double(double snr)>;

inline constexpr double kRateResidualTolerance = 1e-10;

/// Solves R = rate_fn(R * ebn0 / beta) for the unique positive R. Below the
/// ln 2 threshold returns R = 0 with below_threshold set.
RatePoint solve_rate_at_ebn0(const RateFunction& rate_fn, double beta, double ebn0);

enum class EnvelopeMode { fixed_d, pooled };

/// Upper concave envelope over beta of the given (beta, rate) points.
/// Returned points are the retained generators, retagged as envelope rows.
SweepTable timeshare_envelope(const std::vector<RatePoint>& points,
                              EnvelopeMode mode = EnvelopeMode::fixed_d);

/// Linear interpolation of an envelope at beta; nullopt outside its span.
std::optional<double> envelope_rate_at(const SweepTable& envelope, double beta);

/// Rate function for a sparse lattice point or a dense scheme.
RateFunction rate_function(Scheme scheme, int d, int beta_d);
RateFunction rate_function(Scheme scheme, double beta);

/// Lattice loads beta_d/d (beta_d >= 2) inside [beta_min, beta_max].
std::vector<int> lattice_row_degrees(int d, double beta_min, double beta_max);

/// Sparse optimum and LMMSE rates at every lattice point, their envelopes at
/// every grid load within the lattice span, and the dense baselines at every
/// grid load. Rows are grouped by scheme, increasing in beta within a group.
SweepTable sweep_load(int d, double ebn0, const std::vector<double>& beta_grid);

}  // namespace snoma
