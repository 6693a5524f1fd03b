// SPDX-License-Identifier: Apache-2.0
//
// Extreme-SNR parameters of the limiting spectral efficiencies:
//
//   low SNR:   R ~ (S0 / 3dB) (Eb/N0|dB - Eb/N0_min|dB),   3dB = 10 log10 2
//   high SNR:  R ~ S_inf (log2 snr - L_inf)
//
// with snr and Eb/N0 tied by beta * snr = R * Eb/N0.
#pragma once

#include <optional>

#include "snoma/capacity.hpp"

namespace snoma {

struct LowSnrParams {
  double ebn0_min;  // linear
  double s0;
};

struct HighSnrParams {
  double s_inf;
  std::optional<double> l_inf;  // 3 dB units; absent when s_inf == 0
};

inline constexpr double kThreeDb = 3.0102999566398120;  // 10 log10 2

LowSnrParams low_snr_optimum(int d, int beta_d);
HighSnrParams high_snr_optimum(int d, int beta_d);
LowSnrParams low_snr_lmmse(int d, int beta_d);
HighSnrParams high_snr_lmmse(int d, int beta_d);

LowSnrParams low_snr(Receiver receiver, int d, int beta_d);
HighSnrParams high_snr(Receiver receiver, int d, int beta_d);

/// Affine low-SNR rate at a linear Eb/N0.
double approx_rate(const LowSnrParams& params, double ebn0);

/// Affine high-SNR rate at a linear snr. Throws DomainError when the power
/// offset is undefined (zero multiplexing gain).
double approx_rate(const HighSnrParams& params, double snr);

}  // namespace snoma
